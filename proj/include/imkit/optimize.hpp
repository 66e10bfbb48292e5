#pragma once

// Derivative-free maximization on boxes: grid scan, golden-section
// refinement, and a multistart coordinate search built from the two.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "imkit/error.hpp"

namespace imkit {

/// Axis-aligned box; lo[i] <= hi[i] for every coordinate.
struct Box {
    std::vector<double> lo;
    std::vector<double> hi;

    Box() = default;
    Box(std::vector<double> lo_, std::vector<double> hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
        if (lo.size() != hi.size()) throw ConfigError("Box: bound dimensions differ");
        for (std::size_t i = 0; i < lo.size(); ++i)
            if (!(lo[i] <= hi[i])) throw ConfigError("Box: lower bound exceeds upper bound");
    }

    static Box interval(double a, double b) { return Box({a}, {b}); }

    std::size_t dim() const { return lo.size(); }

    bool contains(const std::vector<double>& p) const {
        if (p.size() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (p[i] < lo[i] || p[i] > hi[i]) return false;
        return true;
    }
};

/// Points per axis so that a d-dimensional grid has roughly `total` points.
inline std::size_t points_per_axis(std::size_t total, std::size_t dim) {
    if (dim == 0) return 1;
    const double k = std::pow(static_cast<double>(total), 1.0 / static_cast<double>(dim));
    return std::max<std::size_t>(2, static_cast<std::size_t>(std::lround(k)));
}

/// Calls visit(point) for every node of a regular grid on `box`, endpoints included.
template <class Visit>
void for_each_grid_point(const Box& box, std::size_t per_axis, Visit&& visit) {
    const std::size_t d = box.dim();
    if (d == 0) {
        visit(std::vector<double>{});
        return;
    }
    std::vector<std::size_t> idx(d, 0);
    std::vector<double> p(d);
    for (;;) {
        for (std::size_t i = 0; i < d; ++i) {
            const double t = per_axis > 1 ? static_cast<double>(idx[i]) / static_cast<double>(per_axis - 1)
                                          : 0.5;
            p[i] = box.lo[i] + t * (box.hi[i] - box.lo[i]);
        }
        visit(p);
        std::size_t i = 0;
        while (i < d && ++idx[i] == per_axis) idx[i++] = 0;
        if (i == d) break;
    }
}

/// Golden-section maximization of a unimodal f on [a, b]; returns (argmax, max).
inline std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double a,
                                                    double b, double tol = 1e-10, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < max_iter && (b - a) > tol; ++it) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

struct MaximizeResult {
    std::vector<double> argmax;
    double value = -std::numeric_limits<double>::infinity();
    std::size_t evaluations = 0;
    double resolution = 0.0;  // grid spacing of the coarse scan (largest axis)
};

/// Grid scan of `total_points` nodes, then cyclic golden-section refinement
/// within one grid cell around each of the `starts` best nodes.
///
/// `f` returns -inf where the point is infeasible. No global-optimality
/// guarantee is made for multimodal f beyond the grid resolution.
inline MaximizeResult maximize_on_box(const std::function<double(const std::vector<double>&)>& f,
                                      const Box& box, std::size_t total_points = 512,
                                      std::size_t starts = 1, int sweeps = 3, double tol = 1e-10) {
    MaximizeResult out;
    const std::size_t d = box.dim();
    const std::size_t k = points_per_axis(total_points, d);
    std::vector<double> step(d);
    for (std::size_t i = 0; i < d; ++i) {
        step[i] = k > 1 ? (box.hi[i] - box.lo[i]) / static_cast<double>(k - 1) : 0.0;
        out.resolution = std::max(out.resolution, step[i]);
    }

    std::vector<std::pair<double, std::vector<double>>> nodes;
    for_each_grid_point(box, k, [&](const std::vector<double>& p) {
        const double v = f(p);
        ++out.evaluations;
        if (v > -std::numeric_limits<double>::infinity()) nodes.emplace_back(v, p);
    });
    if (nodes.empty()) return out;
    const std::size_t n_start = std::min(starts, nodes.size());
    std::partial_sort(nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(n_start), nodes.end(),
                      [](const auto& a, const auto& b) { return a.first > b.first; });

    for (std::size_t s = 0; s < n_start; ++s) {
        std::vector<double> x = nodes[s].second;
        double fx = nodes[s].first;
        for (int sweep = 0; sweep < sweeps && d > 0; ++sweep) {
            for (std::size_t i = 0; i < d; ++i) {
                if (step[i] <= 0.0) continue;
                const double a = std::max(box.lo[i], x[i] - step[i]);
                const double b = std::min(box.hi[i], x[i] + step[i]);
                std::vector<double> y = x;
                auto line = [&](double t) {
                    y[i] = t;
                    ++out.evaluations;
                    return f(y);
                };
                const auto [t, ft] = golden_section_max(line, a, b, tol);
                if (ft > fx) {
                    fx = ft;
                    x[i] = t;
                }
            }
        }
        if (fx > out.value) {
            out.value = fx;
            out.argmax = x;
        }
    }
    return out;
}

/// Bisection for the boundary of a predicate: `inside(a)` true, `inside(b)` false.
/// Returns a point within `tol` of the switch.
inline double bisect_boundary(const std::function<bool(double)>& inside, double a, double b,
                              double tol = 1e-10, int max_iter = 200) {
    for (int it = 0; it < max_iter && std::abs(b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        if (inside(m))
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace imkit
