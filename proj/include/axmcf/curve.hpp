#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace axmcf {

using Index = Eigen::Index;

template <typename Scalar>
using Point = Eigen::Matrix<Scalar, 1, 2>;

/// J x 2 array of nodal positions; column 0 is r (distance to the rotation
/// axis, direction e1), column 1 is z (axial direction e2).
template <typename Scalar>
using Points = Eigen::Matrix<Scalar, Eigen::Dynamic, 2>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Continuous piecewise-linear closed curve over the uniform periodic grid
/// q_j = j/J. Node j + J is node j; element j (1 <= j <= J) joins nodes
/// j - 1 and j.
template <typename Scalar>
class PeriodicCurve {
public:
    PeriodicCurve() = default;

    explicit PeriodicCurve(Points<Scalar> positions) : positions_(std::move(positions))
    {
        if (positions_.rows() < 3) {
            throw std::invalid_argument("PeriodicCurve needs at least 3 nodes, got " +
                                        std::to_string(positions_.rows()));
        }
    }

    Index size() const { return positions_.rows(); }
    Scalar h() const { return Scalar(1) / Scalar(size()); }

    const Points<Scalar>& positions() const { return positions_; }

    static Index wrap(Index j, Index n) { return ((j % n) + n) % n; }

    Point<Scalar> node(Index j) const { return positions_.row(wrap(j, size())); }
    Scalar r(Index j) const { return positions_(wrap(j, size()), 0); }
    Scalar z(Index j) const { return positions_(wrap(j, size()), 1); }

    /// Chord of element j: node(j) - node(j - 1).
    Point<Scalar> edge_vector(Index j) const { return node(j) - node(j - 1); }
    Scalar edge_length(Index j) const { return edge_vector(j).norm(); }

    /// Every nodal r is positive and every chord has positive length.
    bool admissible() const
    {
        for (Index j = 0; j < size(); ++j) {
            if (!(positions_(j, 0) > Scalar(0)) || !(edge_length(j + 1) > Scalar(0))) {
                return false;
            }
        }
        return true;
    }

    /// Relabel so that new node j is old node j + k.
    PeriodicCurve shifted(Index k) const
    {
        Points<Scalar> out(size(), 2);
        for (Index j = 0; j < size(); ++j) {
            out.row(j) = node(j + k);
        }
        return PeriodicCurve(std::move(out));
    }

    /// Mirror z -> -z and reverse orientation, keeping node 0 fixed.
    PeriodicCurve reflected() const
    {
        Points<Scalar> out(size(), 2);
        for (Index j = 0; j < size(); ++j) {
            out(j, 0) = r(-j);
            out(j, 1) = -z(-j);
        }
        return PeriodicCurve(std::move(out));
    }

    friend bool operator==(const PeriodicCurve& a, const PeriodicCurve& b)
    {
        return a.positions_ == b.positions_;
    }

private:
    Points<Scalar> positions_;
};

/// A 1-periodic map rho -> (r, z), optionally time dependent. The derivative
/// with respect to rho is needed only by the H1 error norms.
template <typename Scalar>
struct CurveFunction {
    using Map = std::function<Point<Scalar>(Scalar rho, Scalar t)>;

    Map value;
    Map derivative;

    Point<Scalar> operator()(Scalar rho, Scalar t = Scalar(0)) const { return value(rho, t); }

    Point<Scalar> d_rho(Scalar rho, Scalar t = Scalar(0)) const
    {
        if (!derivative) {
            throw std::logic_error("CurveFunction has no rho-derivative");
        }
        return derivative(rho, t);
    }
};

/// Nodal (P1) interpolant: node j takes the value f(j/J, t).
template <typename Scalar>
PeriodicCurve<Scalar> interpolate(const CurveFunction<Scalar>& f, Index J, Scalar t = Scalar(0))
{
    if (J < 3) {
        throw std::invalid_argument("interpolate needs J >= 3");
    }
    Points<Scalar> p(J, 2);
    for (Index j = 0; j < J; ++j) {
        p.row(j) = f(Scalar(j) / Scalar(J), t);
    }
    return PeriodicCurve<Scalar>(std::move(p));
}

namespace detail {

template <typename Scalar>
constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;

// Circle of the given radius about (center, 0).
template <typename Scalar>
CurveFunction<Scalar> offset_circle(Scalar center, Scalar radius)
{
    CurveFunction<Scalar> f;
    f.value = [=](Scalar rho, Scalar) {
        const Scalar th = two_pi<Scalar> * rho;
        return Point<Scalar>(center + radius * std::cos(th), radius * std::sin(th));
    };
    f.derivative = [=](Scalar rho, Scalar) {
        const Scalar th = two_pi<Scalar> * rho;
        return Point<Scalar>(-two_pi<Scalar> * radius * std::sin(th),
                             two_pi<Scalar> * radius * std::cos(th));
    };
    return f;
}

// Symmetric triangle wave, tri(0) = 0, tri(1/2) = 1, period 1.
template <typename Scalar>
Scalar triangle_wave(Scalar rho)
{
    const Scalar u = rho - std::floor(rho);
    return u <= Scalar(0.5) ? Scalar(2) * u : Scalar(2) * (Scalar(1) - u);
}

template <typename Scalar>
Scalar triangle_wave_slope(Scalar rho)
{
    const Scalar u = rho - std::floor(rho);
    return u < Scalar(0.5) ? Scalar(2) : Scalar(-2);
}

}  // namespace detail

/// Generating circle of the standard torus: radius r about (1, 0).
template <typename Scalar>
CurveFunction<Scalar> init_torus_circle(Scalar r)
{
    if (!(r > Scalar(0) && r < Scalar(1))) {
        throw std::invalid_argument("torus tube radius must lie in (0, 1)");
    }
    return detail::offset_circle(Scalar(1), r);
}

/// Unit circle about (5, 0).
template <typename Scalar>
CurveFunction<Scalar> init_ellipse()
{
    return detail::offset_circle(Scalar(5), Scalar(1));
}

/// Six-petal rose about (10, 0): (10 + (2 + cos 6t) cos t, (2 + cos 6t) sin t).
template <typename Scalar>
CurveFunction<Scalar> init_rose()
{
    constexpr Scalar tp = detail::two_pi<Scalar>;
    CurveFunction<Scalar> f;
    f.value = [](Scalar rho, Scalar) {
        const Scalar th = tp * rho;
        const Scalar s = Scalar(2) + std::cos(Scalar(6) * th);
        return Point<Scalar>(Scalar(10) + s * std::cos(th), s * std::sin(th));
    };
    f.derivative = [](Scalar rho, Scalar) {
        const Scalar th = tp * rho;
        const Scalar s = Scalar(2) + std::cos(Scalar(6) * th);
        const Scalar ds = -Scalar(6) * tp * std::sin(Scalar(6) * th);
        return Point<Scalar>(ds * std::cos(th) - tp * s * std::sin(th),
                             ds * std::sin(th) + tp * s * std::cos(th));
    };
    return f;
}

/// Closed spiral about (center, 0). The polar radius grows linearly from
/// inner to inner + growth and back while the angle makes 2 * winds + 1 turns,
/// so the curve winds out and back in without a jump.
template <typename Scalar>
struct SpiralParams {
    Scalar center = Scalar(3);
    Scalar inner = Scalar(0.4);
    Scalar growth = Scalar(1.2);
    int winds = 2;

    int turns() const { return 2 * winds + 1; }
};

template <typename Scalar>
CurveFunction<Scalar> init_spiral(const SpiralParams<Scalar>& p = {})
{
    if (p.winds < 0 || !(p.inner > Scalar(0)) || p.growth < Scalar(0)) {
        throw std::invalid_argument("spiral needs inner > 0, growth >= 0 and winds >= 0");
    }
    const Scalar freq = detail::two_pi<Scalar> * Scalar(p.turns());
    CurveFunction<Scalar> f;
    f.value = [=](Scalar rho, Scalar) {
        const Scalar s = p.inner + p.growth * detail::triangle_wave(rho);
        return Point<Scalar>(p.center + s * std::cos(freq * rho), s * std::sin(freq * rho));
    };
    f.derivative = [=](Scalar rho, Scalar) {
        const Scalar s = p.inner + p.growth * detail::triangle_wave(rho);
        const Scalar ds = p.growth * detail::triangle_wave_slope(rho);
        const Scalar c = std::cos(freq * rho);
        const Scalar sn = std::sin(freq * rho);
        return Point<Scalar>(ds * c - freq * s * sn, ds * sn + freq * s * c);
    };

    // Dense sample guard: the whole curve has to stay off the axis.
    constexpr int samples = 4096;
    for (int i = 0; i < samples; ++i) {
        if (!(f(Scalar(i) / Scalar(samples))(0) > Scalar(0))) {
            throw std::invalid_argument("spiral parameters reach the rotation axis");
        }
    }
    return f;
}

}  // namespace axmcf
