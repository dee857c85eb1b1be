#pragma once

#include "axmcf/curve.hpp"

#include <array>
#include <functional>
#include <stdexcept>

namespace axmcf {

/// J x J matrix with a periodic tridiagonal pattern. Row j holds diag[j] at
/// column j, sub[j] at column j - 1 (mod J) and sup[j] at column j + 1 (mod J).
template <typename Scalar>
struct CyclicTridiagonal {
    Vector<Scalar> diag;
    Vector<Scalar> sub;
    Vector<Scalar> sup;

    CyclicTridiagonal() = default;
    explicit CyclicTridiagonal(Index n)
        : diag(Vector<Scalar>::Zero(n)), sub(Vector<Scalar>::Zero(n)), sup(Vector<Scalar>::Zero(n))
    {
    }

    Index size() const { return diag.size(); }

    template <typename Derived>
    Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
    apply(const Eigen::MatrixBase<Derived>& x) const
    {
        const Index n = size();
        Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime> y(n, x.cols());
        for (Index j = 0; j < n; ++j) {
            const Index jm = j == 0 ? n - 1 : j - 1;
            const Index jp = j == n - 1 ? 0 : j + 1;
            y.row(j) = sub[j] * x.row(jm) + diag[j] * x.row(j) + sup[j] * x.row(jp);
        }
        return y;
    }

    /// |A| |x| entrywise; the floating-point scale of apply(x).
    template <typename Derived>
    Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
    apply_abs(const Eigen::MatrixBase<Derived>& x) const
    {
        CyclicTridiagonal a{*this};
        a.diag = a.diag.cwiseAbs();
        a.sub = a.sub.cwiseAbs();
        a.sup = a.sup.cwiseAbs();
        return a.apply(x.cwiseAbs());
    }

    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const
    {
        const Index n = size();
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
        for (Index j = 0; j < n; ++j) {
            a(j, j) += diag[j];
            a(j, PeriodicCurve<Scalar>::wrap(j - 1, n)) += sub[j];
            a(j, PeriodicCurve<Scalar>::wrap(j + 1, n)) += sup[j];
        }
        return a;
    }

    Scalar norm_inf() const
    {
        return (diag.cwiseAbs() + sub.cwiseAbs() + sup.cwiseAbs()).maxCoeff();
    }

    friend CyclicTridiagonal operator+(CyclicTridiagonal a, const CyclicTridiagonal& b)
    {
        a.diag += b.diag;
        a.sub += b.sub;
        a.sup += b.sup;
        return a;
    }

    friend CyclicTridiagonal operator*(Scalar s, CyclicTridiagonal a)
    {
        a.diag *= s;
        a.sub *= s;
        a.sup *= s;
        return a;
    }
};

/// Two-component nodal load, stored like Points (column 0 pairs with e1).
template <typename Scalar>
using LoadVector = Points<Scalar>;

/// Optional forcing f(rho, t) tested against the hat functions.
template <typename Scalar>
using SourceField = std::function<Point<Scalar>(Scalar rho, Scalar t)>;

namespace detail {

template <typename Scalar>
void require_admissible(const PeriodicCurve<Scalar>& c, const char* what)
{
    if (!c.admissible()) {
        throw std::domain_error(std::string(what) + ": curve is not admissible");
    }
}

// Scatter a symmetric 2x2 element block for element j (nodes j-1, j).
template <typename Scalar>
void add_element(CyclicTridiagonal<Scalar>& a, Index j, Scalar aa, Scalar ab, Scalar bb)
{
    const Index n = a.size();
    const Index ia = PeriodicCurve<Scalar>::wrap(j - 1, n);
    const Index ib = PeriodicCurve<Scalar>::wrap(j, n);
    a.diag[ia] += aa;
    a.diag[ib] += bb;
    a.sup[ia] += ab;
    a.sub[ib] += ab;
}

}  // namespace detail

/// Entries int (W.e1) |W_rho|^2 phi_i phi_k, integrated exactly elementwise.
/// The element block is (l^2/h) * [r_a/4 + r_b/12, (r_a + r_b)/12; ., r_a/12 + r_b/4].
template <typename Scalar>
CyclicTridiagonal<Scalar> assemble_weighted_mass(const PeriodicCurve<Scalar>& w)
{
    detail::require_admissible(w, "assemble_weighted_mass");
    const Index n = w.size();
    const Scalar h = w.h();
    CyclicTridiagonal<Scalar> m(n);
    for (Index j = 1; j <= n; ++j) {
        const Scalar ra = w.r(j - 1);
        const Scalar rb = w.r(j);
        const Scalar scale = w.edge_vector(j).squaredNorm() / h;
        detail::add_element(m, j,
                            scale * (ra / Scalar(4) + rb / Scalar(12)),
                            scale * (ra + rb) / Scalar(12),
                            scale * (ra / Scalar(12) + rb / Scalar(4)));
    }
    return m;
}

/// Entries int (W.e1) phi_i' phi_k'; the element block is mean(r)/h * [1, -1; -1, 1].
template <typename Scalar>
CyclicTridiagonal<Scalar> assemble_weighted_stiffness(const PeriodicCurve<Scalar>& w)
{
    detail::require_admissible(w, "assemble_weighted_stiffness");
    const Index n = w.size();
    const Scalar h = w.h();
    CyclicTridiagonal<Scalar> k(n);
    for (Index j = 1; j <= n; ++j) {
        const Scalar s = (w.r(j - 1) + w.r(j)) / (Scalar(2) * h);
        detail::add_element(k, j, s, -s, s);
    }
    return k;
}

/// (phi_i e1, |W_rho|^2): each element adds l^2 / (2h) to both of its nodes.
template <typename Scalar>
LoadVector<Scalar> assemble_e1_load(const PeriodicCurve<Scalar>& w)
{
    detail::require_admissible(w, "assemble_e1_load");
    const Index n = w.size();
    const Scalar h = w.h();
    LoadVector<Scalar> l = LoadVector<Scalar>::Zero(n, 2);
    for (Index j = 1; j <= n; ++j) {
        const Scalar half = w.edge_vector(j).squaredNorm() / (Scalar(2) * h);
        l(PeriodicCurve<Scalar>::wrap(j - 1, n), 0) += half;
        l(PeriodicCurve<Scalar>::wrap(j, n), 0) += half;
    }
    return l;
}

/// gauss3: 3-point Gauss-Legendre per element. nodal: trapezoidal rule per
/// element, which lumps the load to h f(q_i).
enum class SourceQuadrature { gauss3, nodal };

inline const char* to_string(SourceQuadrature q)
{
    return q == SourceQuadrature::gauss3 ? "gauss3" : "nodal";
}

/// (f(., t), phi_i).
template <typename Scalar>
LoadVector<Scalar> assemble_source_load(const SourceField<Scalar>& f, Scalar t, Index n,
                                        SourceQuadrature quad = SourceQuadrature::gauss3)
{
    const Scalar h = Scalar(1) / Scalar(n);
    LoadVector<Scalar> l = LoadVector<Scalar>::Zero(n, 2);
    if (!f) {
        return l;
    }
    if (quad == SourceQuadrature::nodal) {
        for (Index j = 0; j < n; ++j) {
            l.row(j) = h * f(Scalar(j) * h, t);
        }
        return l;
    }
    // Nodes on [0, 1] and their weights.
    const Scalar g = std::sqrt(Scalar(3) / Scalar(5)) / Scalar(2);
    const std::array<Scalar, 3> s{Scalar(0.5) - g, Scalar(0.5), Scalar(0.5) + g};
    const std::array<Scalar, 3> wt{Scalar(5) / Scalar(18), Scalar(8) / Scalar(18),
                                   Scalar(5) / Scalar(18)};
    for (Index j = 1; j <= n; ++j) {
        const Scalar left = Scalar(j - 1) * h;
        Point<Scalar> on_a = Point<Scalar>::Zero();
        Point<Scalar> on_b = Point<Scalar>::Zero();
        for (int q = 0; q < 3; ++q) {
            const Point<Scalar> fq = f(left + s[q] * h, t);
            on_a += (wt[q] * h * (Scalar(1) - s[q])) * fq;
            on_b += (wt[q] * h * s[q]) * fq;
        }
        l.row(PeriodicCurve<Scalar>::wrap(j - 1, n)) += on_a;
        l.row(PeriodicCurve<Scalar>::wrap(j, n)) += on_b;
    }
    return l;
}

}  // namespace axmcf
