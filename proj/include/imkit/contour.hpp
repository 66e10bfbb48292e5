#pragma once

// Consonant plausibility calculus: contours, upper/lower probabilities,
// plausibility regions and marginalization by fiber suprema.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "imkit/error.hpp"
#include "imkit/optimize.hpp"
#include "imkit/point.hpp"

namespace imkit {

/// Where a contour lives: a union of boxes, a finite grid, or both.
struct Domain {
    std::vector<Box> boxes;
    std::vector<ParameterPoint> grid;

    static Domain box(Box b) { return Domain{{std::move(b)}, {}}; }
    static Domain interval(double a, double b) { return box(Box::interval(a, b)); }
    static Domain points(std::vector<ParameterPoint> pts) { return Domain{{}, std::move(pts)}; }

    bool empty() const { return boxes.empty() && grid.empty(); }
    std::size_t dim() const {
        if (!boxes.empty()) return boxes.front().dim();
        if (!grid.empty()) return grid.front().size();
        return 0;
    }
};

/// Monte Carlo settings recorded alongside a contour built by simulation.
struct McMeta {
    std::size_t n_rep = 0;
    std::uint64_t seed = 0;
    std::string note;
};

/// A plausibility contour: ϑ ↦ π_x(ϑ) ∈ [0,1] plus its search domain.
struct Contour {
    std::function<double(const ParameterPoint&)> eval;
    Domain domain;
    std::optional<McMeta> mc_meta;
    std::string label;

    double operator()(const ParameterPoint& p) const {
        const double v = eval(p);
        if (std::isnan(v)) throw NumericError("contour evaluated to NaN");
        return std::clamp(v, 0.0, 1.0);
    }
    double operator()(double t) const { return (*this)(ParameterPoint{t}); }
};

/// An assertion A about the parameter: a membership predicate plus the
/// boxes/points over which suprema are searched.
///
/// When `hint_exact` is set, the boxes and points cover exactly the closure
/// of A, so the sup is taken over them without consulting `contains`.
struct Assertion {
    enum class Kind { whole, empty, points, boxes, predicate };

    Kind kind = Kind::predicate;
    std::function<bool(const ParameterPoint&)> contains;
    std::vector<Box> boxes;
    std::vector<ParameterPoint> points;
    bool hint_exact = false;

    static Assertion whole() {
        Assertion a;
        a.kind = Kind::whole;
        a.contains = [](const ParameterPoint&) { return true; };
        a.hint_exact = true;
        return a;
    }

    static Assertion empty() {
        Assertion a;
        a.kind = Kind::empty;
        a.contains = [](const ParameterPoint&) { return false; };
        a.hint_exact = true;
        return a;
    }

    static Assertion finite(std::vector<ParameterPoint> pts) {
        Assertion a;
        a.kind = Kind::points;
        a.points = std::move(pts);
        auto copy = a.points;
        a.contains = [copy](const ParameterPoint& p) {
            return std::find(copy.begin(), copy.end(), p) != copy.end();
        };
        a.hint_exact = true;
        return a;
    }

    static Assertion singleton(ParameterPoint p) { return finite({std::move(p)}); }

    static Assertion in_boxes(std::vector<Box> bs) {
        Assertion a;
        a.kind = Kind::boxes;
        a.boxes = std::move(bs);
        auto copy = a.boxes;
        a.contains = [copy](const ParameterPoint& p) {
            for (const auto& b : copy)
                if (b.contains(p.coords())) return true;
            return false;
        };
        a.hint_exact = true;
        return a;
    }

    static Assertion in_box(Box b) { return in_boxes({std::move(b)}); }
    static Assertion interval(double lo, double hi) { return in_box(Box::interval(lo, hi)); }

    /// General predicate; `search` bounds where members may be found.
    static Assertion where(std::function<bool(const ParameterPoint&)> pred, std::vector<Box> search,
                           std::vector<ParameterPoint> pts = {}) {
        Assertion a;
        a.kind = Kind::predicate;
        a.contains = std::move(pred);
        a.boxes = std::move(search);
        a.points = std::move(pts);
        return a;
    }

    /// Complement relative to `domain`. Box complements are split into slabs
    /// and searched over their closure, so for continuous contours the sup
    /// over an open complement is recovered by continuity.
    Assertion complement(const Domain& domain) const {
        switch (kind) {
            case Kind::whole: return empty();
            case Kind::empty: {
                Assertion a = where([](const ParameterPoint&) { return true; }, domain.boxes, domain.grid);
                a.kind = Kind::whole;
                a.hint_exact = true;
                return a;
            }
            case Kind::points: {
                // Removing finitely many points from a box leaves its closure intact.
                std::vector<ParameterPoint> rest;
                for (const auto& g : domain.grid)
                    if (!contains(g)) rest.push_back(g);
                Assertion a = where([c = contains](const ParameterPoint& p) { return !c(p); }, domain.boxes,
                                    std::move(rest));
                a.hint_exact = true;
                return a;
            }
            case Kind::boxes: {
                std::vector<Box> slabs;
                for (const auto& d : domain.boxes) {
                    std::vector<Box> pieces{d};
                    for (const auto& cut : boxes) {
                        std::vector<Box> next;
                        for (const auto& piece : pieces) append_difference(piece, cut, next);
                        pieces = std::move(next);
                    }
                    slabs.insert(slabs.end(), pieces.begin(), pieces.end());
                }
                std::vector<ParameterPoint> rest;
                for (const auto& g : domain.grid)
                    if (!contains(g)) rest.push_back(g);
                Assertion a = where([c = contains](const ParameterPoint& p) { return !c(p); }, std::move(slabs),
                                    std::move(rest));
                a.hint_exact = true;
                return a;
            }
            case Kind::predicate: break;
        }
        std::vector<ParameterPoint> rest;
        for (const auto& g : domain.grid)
            if (!contains(g)) rest.push_back(g);
        return where([c = contains](const ParameterPoint& p) { return !c(p); }, domain.boxes, std::move(rest));
    }

private:
    // Closure of piece \ cut as at most 2d boxes.
    static void append_difference(const Box& piece, const Box& cut, std::vector<Box>& out) {
        const std::size_t d = piece.dim();
        for (std::size_t i = 0; i < d; ++i)
            if (cut.hi[i] < piece.lo[i] || cut.lo[i] > piece.hi[i]) {
                out.push_back(piece);
                return;
            }
        Box rest = piece;
        for (std::size_t i = 0; i < d; ++i) {
            if (cut.lo[i] > rest.lo[i]) {
                Box b = rest;
                b.hi[i] = cut.lo[i];
                out.push_back(b);
                rest.lo[i] = cut.lo[i];
            }
            if (cut.hi[i] < rest.hi[i]) {
                Box b = rest;
                b.lo[i] = cut.hi[i];
                out.push_back(b);
                rest.hi[i] = cut.hi[i];
            }
        }
    }
};

struct SupOptions {
    std::size_t grid_points = 512;
    std::size_t starts = 1;
    int sweeps = 3;
    double tol = 1e-10;
};

struct SupResult {
    double value = 0.0;
    ParameterPoint argmax;
    double resolution = 0.0;
    bool found = false;
};

/// sup of `c` over `a`; the empty set has sup 0 by convention.
inline SupResult sup_over(const Contour& c, const Assertion& a, const SupOptions& opt = {}) {
    SupResult out;
    if (a.kind == Assertion::Kind::empty) return out;
    const bool whole = a.kind == Assertion::Kind::whole;
    const auto& boxes = (whole && a.boxes.empty() && a.points.empty()) ? c.domain.boxes : a.boxes;
    const auto& points = (whole && a.boxes.empty() && a.points.empty()) ? c.domain.grid : a.points;
    const bool filter = !a.hint_exact;

    double best = -1.0;
    for (const auto& p : points) {
        if (filter && !a.contains(p)) continue;
        const double v = c(p);
        if (v > best) {
            best = v;
            out.argmax = p;
        }
    }
    for (const auto& b : boxes) {
        auto f = [&](const std::vector<double>& z) {
            ParameterPoint p(z);
            if (filter && !a.contains(p)) return -std::numeric_limits<double>::infinity();
            return c(p);
        };
        const auto r = maximize_on_box(f, b, opt.grid_points, opt.starts, opt.sweeps, opt.tol);
        out.resolution = std::max(out.resolution, r.resolution);
        if (!r.argmax.empty() || b.dim() == 0) {
            if (r.value > best) {
                best = r.value;
                out.argmax = ParameterPoint(r.argmax);
            }
        }
    }
    if (best >= 0.0) {
        out.value = best;
        out.found = true;
    }
    return out;
}

/// Π̄_x(A) = sup_{ϑ∈A} π_x(ϑ) and its dual Π̲_x(A) = 1 − Π̄_x(Aᶜ).
class ConsonantMeasure {
public:
    explicit ConsonantMeasure(Contour c, SupOptions opt = {}) : contour_(std::move(c)), opt_(opt) {}

    const Contour& contour() const { return contour_; }

    SupResult upper_detail(const Assertion& a) const { return sup_over(contour_, a, opt_); }
    double upper(const Assertion& a) const { return upper_detail(a).value; }
    double lower(const Assertion& a) const {
        if (a.kind == Assertion::Kind::empty) return 0.0;
        return 1.0 - upper(a.complement(contour_.domain));
    }

private:
    Contour contour_;
    SupOptions opt_;
};

/// {ϑ : π(ϑ) > level} as a union of intervals (scalar boxes) and retained grid points.
struct RegionDescriptor {
    double level = 0.0;
    std::vector<std::pair<double, double>> intervals;
    std::vector<ParameterPoint> points;
    bool empty = true;

    bool contains(double t) const {
        for (const auto& [lo, hi] : intervals)
            if (t >= lo && t <= hi) return true;
        return false;
    }
};

struct RegionOptions {
    std::size_t scan_points = 2001;
    double tol = 1e-10;
};

/// Scans each scalar domain box, then bisects every crossing of the level.
/// Intervals are reported closed at their numeric endpoints.
inline RegionDescriptor plausibility_region(const Contour& c, double level, const RegionOptions& opt = {}) {
    if (!(level >= 0.0 && level <= 1.0)) throw ConfigError("plausibility_region: level must lie in [0,1]");
    RegionDescriptor r;
    r.level = level;
    auto inside = [&](double t) { return c(t) > level; };
    for (const auto& b : c.domain.boxes) {
        if (b.dim() != 1) throw ConfigError("plausibility_region: interval output needs a scalar domain");
        const double lo = b.lo[0], hi = b.hi[0];
        const std::size_t k = std::max<std::size_t>(opt.scan_points, 2);
        const double h = (hi - lo) / static_cast<double>(k - 1);
        bool in_run = false;
        double run_lo = lo;
        double prev_t = lo;
        for (std::size_t i = 0; i < k; ++i) {
            const double t = (i + 1 == k) ? hi : lo + h * static_cast<double>(i);
            const bool in = inside(t);
            if (in && !in_run) {
                run_lo = (i == 0) ? t : bisect_boundary([&](double s) { return !inside(s); }, prev_t, t, opt.tol);
                in_run = true;
            } else if (!in && in_run) {
                r.intervals.emplace_back(run_lo, bisect_boundary(inside, prev_t, t, opt.tol));
                in_run = false;
            }
            prev_t = t;
        }
        if (in_run) r.intervals.emplace_back(run_lo, hi);
    }
    for (const auto& p : c.domain.grid)
        if (c(p) > level) r.points.push_back(p);
    r.empty = r.intervals.empty() && r.points.empty();
    return r;
}

inline RegionDescriptor plausibility_region(const ConsonantMeasure& m, double level,
                                            const RegionOptions& opt = {}) {
    return plausibility_region(m.contour(), level, opt);
}

/// How to search the fiber {ϑ : φ(ϑ) = φ₀}: ϑ = embed(φ₀, z) for z in
/// `nuisance`, or a closed-form maximizer when one is known.
struct FiberSearch {
    std::function<ParameterPoint(const ParameterPoint& phi, const std::vector<double>& z)> embed;
    Box nuisance;
    std::function<std::optional<ParameterPoint>(const ParameterPoint& phi)> maximizer;
    std::function<bool(const ParameterPoint& phi)> fiber_nonempty;
    Domain phi_domain;
    SupOptions sup;

    static FiberSearch identity(Domain d) {
        FiberSearch f;
        f.embed = [](const ParameterPoint& phi, const std::vector<double>&) { return phi; };
        f.phi_domain = std::move(d);
        return f;
    }
};

/// φ₀ ↦ sup{π(ϑ) : φ(ϑ) = φ₀}.
inline Contour marginal_contour(const Contour& c, const FiberSearch& fiber) {
    Contour out;
    out.domain = fiber.phi_domain.empty() ? c.domain : fiber.phi_domain;
    out.mc_meta = c.mc_meta;
    out.label = c.label.empty() ? "marginal" : c.label + " (marginal)";
    out.eval = [c, fiber](const ParameterPoint& phi) -> double {
        if (fiber.fiber_nonempty && !fiber.fiber_nonempty(phi)) return 0.0;
        if (fiber.maximizer) {
            if (auto th = fiber.maximizer(phi)) return c(*th);
            return 0.0;
        }
        if (fiber.nuisance.dim() == 0) return c(fiber.embed(phi, {}));
        auto f = [&](const std::vector<double>& z) { return c(fiber.embed(phi, z)); };
        const auto r = maximize_on_box(f, fiber.nuisance, fiber.sup.grid_points, fiber.sup.starts,
                                       fiber.sup.sweeps, fiber.sup.tol);
        return r.argmax.empty() ? 0.0 : r.value;
    };
    return out;
}

}  // namespace imkit
