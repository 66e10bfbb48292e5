#pragma once

#include "imkit/association.hpp"
#include "imkit/contour.hpp"
#include "imkit/diagnostics.hpp"
#include "imkit/error.hpp"
#include "imkit/im_algorithm.hpp"
#include "imkit/io.hpp"
#include "imkit/models/behrens_fisher.hpp"
#include "imkit/models/binomial.hpp"
#include "imkit/models/confidence_distribution.hpp"
#include "imkit/models/normal_means.hpp"
#include "imkit/np/dkw.hpp"
#include "imkit/np/ecdf.hpp"
#include "imkit/optimize.hpp"
#include "imkit/parallel.hpp"
#include "imkit/point.hpp"
#include "imkit/procedures.hpp"
#include "imkit/random_set.hpp"
#include "imkit/rng.hpp"
#include "imkit/special.hpp"
#include "imkit/universal/grenander.hpp"
#include "imkit/universal/kde.hpp"
#include "imkit/universal/mixture.hpp"
#include "imkit/universal/monotone.hpp"
#include "imkit/universal/slr.hpp"
#include "imkit/universal/split.hpp"
