#pragma once

#include "axmcf/assembly.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace axmcf {

enum class SolveStatus { ok, singular, ill_conditioned };

inline const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::ok: return "ok";
    case SolveStatus::singular: return "singular";
    case SolveStatus::ill_conditioned: return "ill_conditioned";
    }
    return "unknown";
}

template <typename Scalar, int Cols = 1>
struct SolveReport {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Cols> solution;
    Scalar residual_norm = Scalar(0);
    SolveStatus status = SolveStatus::ok;

    bool ok() const { return status == SolveStatus::ok; }
};

/// Factorization of a cyclic tridiagonal matrix, reusable across right-hand
/// sides. For J >= 4 the corner couplings are peeled off with a rank-one
/// Sherman-Morrison correction and the remaining tridiagonal band is
/// eliminated by the Thomas algorithm. J = 3, a near-zero band pivot or a
/// near-zero correction denominator switch to dense partial-pivoting LU
/// (up to dense_limit unknowns).
template <typename Scalar>
class CyclicFactorization {
public:
    static constexpr Index dense_limit = 2048;

    explicit CyclicFactorization(const CyclicTridiagonal<Scalar>& a) : n_(a.size())
    {
        if (n_ < 3) {
            throw std::invalid_argument("cyclic solve needs J >= 3");
        }
        if (n_ == 3 || !factor_banded(a)) {
            factor_dense(a);
        }
    }

    bool singular() const { return singular_; }

    template <typename Derived>
    Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>
    solve(const Eigen::MatrixBase<Derived>& b) const
    {
        using Result = Eigen::Matrix<Scalar, Eigen::Dynamic, Derived::ColsAtCompileTime>;
        if (singular_) {
            return Result::Constant(n_, b.cols(), std::numeric_limits<Scalar>::quiet_NaN());
        }
        if (dense_) {
            return Result(lu_.solve(b.derived()));
        }
        Result y = thomas(b.derived());
        for (Index c = 0; c < y.cols(); ++c) {
            const Scalar vy = y(0, c) + corner_ratio_ * y(n_ - 1, c);
            y.col(c) -= (vy / denom_) * q_;
        }
        return y;
    }

private:
    static bool tiny(Scalar pivot, Scalar scale)
    {
        return !(std::abs(pivot) > Scalar(16) * std::numeric_limits<Scalar>::epsilon() * scale) ||
               std::fpclassify(pivot) == FP_SUBNORMAL;
    }

    bool factor_banded(const CyclicTridiagonal<Scalar>& a)
    {
        const Scalar scale = a.norm_inf();
        // A = T + u v^T with u = (gamma, 0, .., 0, alpha), v = (1, 0, .., 0, beta/gamma).
        const Scalar alpha = a.sup[n_ - 1];  // row J-1, column 0
        const Scalar beta = a.sub[0];        // row 0, column J-1
        const Scalar gamma = -a.diag[0];
        if (tiny(gamma, scale)) {
            return false;
        }
        lower_ = a.sub;
        upper_ = a.sup;
        Vector<Scalar> d = a.diag;
        d[0] -= gamma;
        d[n_ - 1] -= alpha * beta / gamma;

        pivot_inv_.resize(n_);
        factor_upper_.resize(n_);
        Scalar p = d[0];
        for (Index i = 0; i < n_; ++i) {
            if (i > 0) {
                p = d[i] - lower_[i] * factor_upper_[i - 1];
            }
            if (tiny(p, scale)) {
                return false;
            }
            pivot_inv_[i] = Scalar(1) / p;
            factor_upper_[i] = i + 1 < n_ ? upper_[i] * pivot_inv_[i] : Scalar(0);
        }

        Vector<Scalar> u = Vector<Scalar>::Zero(n_);
        u[0] = gamma;
        u[n_ - 1] = alpha;
        q_ = thomas(u);
        corner_ratio_ = beta / gamma;
        denom_ = Scalar(1) + q_[0] + corner_ratio_ * q_[n_ - 1];
        const Scalar denom_scale =
            Scalar(1) + std::abs(q_[0]) + std::abs(corner_ratio_ * q_[n_ - 1]);
        return !tiny(denom_, denom_scale * Scalar(n_));
    }

    void factor_dense(const CyclicTridiagonal<Scalar>& a)
    {
        dense_ = true;
        if (n_ > dense_limit) {
            singular_ = true;
            return;
        }
        const auto m = a.dense();
        lu_.compute(m);
        const Scalar scale = a.norm_inf();
        const auto& lu = lu_.matrixLU();
        for (Index i = 0; i < n_; ++i) {
            if (tiny(lu(i, i), scale * Scalar(n_))) {
                singular_ = true;
                return;
            }
        }
    }

    template <typename Rhs>
    Eigen::Matrix<Scalar, Eigen::Dynamic, Rhs::ColsAtCompileTime> thomas(const Rhs& b) const
    {
        Eigen::Matrix<Scalar, Eigen::Dynamic, Rhs::ColsAtCompileTime> x(n_, b.cols());
        x.row(0) = b.row(0) * pivot_inv_[0];
        for (Index i = 1; i < n_; ++i) {
            x.row(i) = (b.row(i) - lower_[i] * x.row(i - 1)) * pivot_inv_[i];
        }
        for (Index i = n_ - 2; i >= 0; --i) {
            x.row(i) -= factor_upper_[i] * x.row(i + 1);
        }
        return x;
    }

    Index n_;
    bool dense_ = false;
    bool singular_ = false;
    Vector<Scalar> lower_, upper_, pivot_inv_, factor_upper_, q_;
    Scalar corner_ratio_ = Scalar(0);
    Scalar denom_ = Scalar(1);
    Eigen::PartialPivLU<Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> lu_;
};

/// Solve A x = b and verify the residual. status == ok guarantees
/// |A x - b|_inf <= 1e-10 (|b|_inf + |A|_inf |x|_inf).
template <typename Scalar, typename Derived>
SolveReport<Scalar, Derived::ColsAtCompileTime>
solve_cyclic(const CyclicFactorization<Scalar>& f, const CyclicTridiagonal<Scalar>& a,
             const Eigen::MatrixBase<Derived>& b)
{
    SolveReport<Scalar, Derived::ColsAtCompileTime> rep;
    if (f.singular()) {
        rep.solution = f.solve(b);
        rep.residual_norm = std::numeric_limits<Scalar>::infinity();
        rep.status = SolveStatus::singular;
        return rep;
    }
    rep.solution = f.solve(b);
    const Scalar residual = (a.apply(rep.solution) - b.derived()).cwiseAbs().maxCoeff();
    rep.residual_norm = residual;
    const Scalar bound = Scalar(1e-10) * (b.cwiseAbs().maxCoeff() +
                                          a.norm_inf() * rep.solution.cwiseAbs().maxCoeff());
    if (!(residual <= bound)) {
        rep.status = SolveStatus::ill_conditioned;
    }
    return rep;
}

template <typename Scalar, typename Derived>
SolveReport<Scalar, Derived::ColsAtCompileTime>
solve_cyclic(const CyclicTridiagonal<Scalar>& a, const Eigen::MatrixBase<Derived>& b)
{
    const CyclicFactorization<Scalar> f(a);
    return solve_cyclic(f, a, b);
}

}  // namespace axmcf
