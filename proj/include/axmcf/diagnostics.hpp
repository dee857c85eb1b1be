#pragma once

#include "axmcf/curve.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace axmcf {

/// Quadrature used for the error norms against a smooth exact curve.
///  gauss5 - 5-point Gauss-Legendre per element
///  nodal  - trapezoidal rule on each element's endpoints
enum class NormQuadrature { gauss5, nodal };

inline const char* to_string(NormQuadrature q)
{
    return q == NormQuadrature::gauss5 ? "gauss5" : "nodal";
}

/// Diagnostics sampled at one time level.
template <typename Scalar>
struct ErrorRecord {
    Index m = 0;
    Scalar t = Scalar(0);
    Scalar l2 = Scalar(0);
    Scalar h1_semi = Scalar(0);
    Scalar superconv_h1 = Scalar(0);
    Scalar mesh_ratio = Scalar(1);
    Scalar min_r = Scalar(0);
    Scalar diameter = Scalar(0);
};

namespace detail {

template <typename Scalar>
struct ElementRule {
    std::vector<Scalar> s;  // points on [0, 1]
    std::vector<Scalar> w;  // weights summing to 1
};

template <typename Scalar>
ElementRule<Scalar> element_rule(NormQuadrature q)
{
    if (q == NormQuadrature::nodal) {
        return {{Scalar(0), Scalar(1)}, {Scalar(0.5), Scalar(0.5)}};
    }
    const std::array<long double, 3> x{0.0L, 0.538469310105683091036314420700208805L,
                                       0.906179845938663992797626878299392965L};
    const std::array<long double, 3> w{0.568888888888888888888888888888888889L,
                                       0.478628670499366468041291514835638192L,
                                       0.236926885056189087514264040719917363L};
    ElementRule<Scalar> r;
    for (int k : {2, 1, 0}) {
        r.s.push_back(Scalar((1.0L - x[k]) / 2));
        r.w.push_back(Scalar(w[k] / 2));
    }
    for (int k : {1, 2}) {
        r.s.push_back(Scalar((1.0L + x[k]) / 2));
        r.w.push_back(Scalar(w[k] / 2));
    }
    return r;
}

}  // namespace detail

/// ||x(., t) - X||_{L2} over the reference circle.
template <typename Scalar>
Scalar l2_error(const PeriodicCurve<Scalar>& c, const CurveFunction<Scalar>& exact, Scalar t,
                NormQuadrature quad = NormQuadrature::gauss5)
{
    const auto rule = detail::element_rule<Scalar>(quad);
    const Index n = c.size();
    const Scalar h = c.h();
    Scalar sum = Scalar(0);
    for (Index j = 1; j <= n; ++j) {
        const Point<Scalar> a = c.node(j - 1);
        const Point<Scalar> b = c.node(j);
        for (std::size_t q = 0; q < rule.s.size(); ++q) {
            const Scalar s = rule.s[q];
            const Point<Scalar> xh = (Scalar(1) - s) * a + s * b;
            sum += rule.w[q] * h * (exact(Scalar(j - 1) * h + s * h, t) - xh).squaredNorm();
        }
    }
    return std::sqrt(sum);
}

/// |x(., t) - X|_{H1} = ||x_rho - X_rho||_{L2}.
template <typename Scalar>
Scalar h1_seminorm_error(const PeriodicCurve<Scalar>& c, const CurveFunction<Scalar>& exact,
                         Scalar t, NormQuadrature quad = NormQuadrature::gauss5)
{
    const auto rule = detail::element_rule<Scalar>(quad);
    const Index n = c.size();
    const Scalar h = c.h();
    Scalar sum = Scalar(0);
    for (Index j = 1; j <= n; ++j) {
        const Point<Scalar> slope = c.edge_vector(j) / h;
        for (std::size_t q = 0; q < rule.s.size(); ++q) {
            const Scalar rho = Scalar(j - 1) * h + rule.s[q] * h;
            sum += rule.w[q] * h * (exact.d_rho(rho, t) - slope).squaredNorm();
        }
    }
    return std::sqrt(sum);
}

/// Full H1 norm of a P1 function given by its nodal values, integrated exactly.
template <typename Scalar>
Scalar p1_h1_norm(const Points<Scalar>& e)
{
    const Index n = e.rows();
    const Scalar h = Scalar(1) / Scalar(n);
    Scalar l2 = Scalar(0);
    Scalar semi = Scalar(0);
    for (Index j = 1; j <= n; ++j) {
        const auto a = e.row(j - 1);
        const auto b = e.row(j % n);
        l2 += h / Scalar(3) * (a.squaredNorm() + a.dot(b) + b.squaredNorm());
        semi += (b - a).squaredNorm() / h;
    }
    return std::sqrt(l2 + semi);
}

/// ||Pi^h x(., t) - X||_{H1}; exact, since both sides are P1 on the same grid.
template <typename Scalar>
Scalar superconvergence_error(const PeriodicCurve<Scalar>& c, const CurveFunction<Scalar>& exact,
                              Scalar t)
{
    const Points<Scalar> diff = interpolate(exact, c.size(), t).positions() - c.positions();
    return p1_h1_norm(diff);
}

template <typename Scalar>
Scalar min_edge_length(const PeriodicCurve<Scalar>& c)
{
    Scalar m = c.edge_length(1);
    for (Index j = 2; j <= c.size(); ++j) {
        m = std::min(m, c.edge_length(j));
    }
    return m;
}

/// Longest over shortest chord.
template <typename Scalar>
Scalar mesh_ratio(const PeriodicCurve<Scalar>& c)
{
    Scalar lo = c.edge_length(1);
    Scalar hi = lo;
    for (Index j = 2; j <= c.size(); ++j) {
        const Scalar l = c.edge_length(j);
        lo = std::min(lo, l);
        hi = std::max(hi, l);
    }
    if (!(lo > Scalar(0))) {
        throw std::domain_error("mesh_ratio: degenerate element");
    }
    return hi / lo;
}

template <typename Scalar>
Scalar min_radial(const PeriodicCurve<Scalar>& c)
{
    return c.positions().col(0).minCoeff();
}

/// Largest pairwise nodal distance, by brute force.
template <typename Scalar>
Scalar diameter_brute_force(const Points<Scalar>& p)
{
    Scalar best = Scalar(0);
    for (Index i = 0; i < p.rows(); ++i) {
        for (Index k = i + 1; k < p.rows(); ++k) {
            best = std::max(best, (p.row(i) - p.row(k)).squaredNorm());
        }
    }
    return std::sqrt(best);
}

namespace detail {

template <typename Scalar>
Scalar cross(const Point<Scalar>& o, const Point<Scalar>& a, const Point<Scalar>& b)
{
    return (a(0) - o(0)) * (b(1) - o(1)) - (a(1) - o(1)) * (b(0) - o(0));
}

// Andrew's monotone chain; counter-clockwise, no collinear points.
template <typename Scalar>
std::vector<Point<Scalar>> convex_hull(const Points<Scalar>& p)
{
    std::vector<Point<Scalar>> pts(p.rows());
    for (Index i = 0; i < p.rows(); ++i) {
        pts[i] = p.row(i);
    }
    std::sort(pts.begin(), pts.end(), [](const Point<Scalar>& a, const Point<Scalar>& b) {
        return a(0) < b(0) || (a(0) == b(0) && a(1) < b(1));
    });
    if (pts.size() < 3) {
        return pts;
    }
    std::vector<Point<Scalar>> hull(2 * pts.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= Scalar(0)) {
            --k;
        }
        hull[k++] = pts[i];
    }
    for (std::size_t i = pts.size() - 1, lower = k + 1; i > 0; --i) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i - 1]) <= Scalar(0)) {
            --k;
        }
        hull[k++] = pts[i - 1];
    }
    hull.resize(k - 1);
    return hull;
}

}  // namespace detail

/// Largest pairwise nodal distance. Convex hull plus rotating calipers for
/// larger curves.
template <typename Scalar>
Scalar diameter(const PeriodicCurve<Scalar>& c)
{
    if (c.size() <= 64) {
        return diameter_brute_force(c.positions());
    }
    const auto hull = detail::convex_hull(c.positions());
    const std::size_t n = hull.size();
    if (n < 3) {
        return diameter_brute_force(c.positions());
    }
    Scalar best = Scalar(0);
    std::size_t k = 1;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t ni = (i + 1) % n;
        while (std::abs(detail::cross(hull[i], hull[ni], hull[(k + 1) % n])) >
               std::abs(detail::cross(hull[i], hull[ni], hull[k]))) {
            k = (k + 1) % n;
        }
        best = std::max({best, (hull[i] - hull[k]).squaredNorm(),
                         (hull[ni] - hull[k]).squaredNorm()});
    }
    return std::sqrt(best);
}

}  // namespace axmcf
