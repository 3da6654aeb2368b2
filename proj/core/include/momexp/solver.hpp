#pragma once

#include <cstddef>
#include <vector>

#include "momexp/expm.hpp"
#include "momexp/matrix.hpp"
#include "momexp/moment.hpp"
#include "momexp/series.hpp"

namespace momexp {

/// Moment-basis order kept by solve() unless asked otherwise.
inline constexpr std::size_t kDefaultSolutionOrder = 64;

/// y(z) = E(Az) v_c, the solution of the moment system d_m y = A y with y(0) = v_c.
template <Scalar S>
class IVPSolution {
public:
    IVPSolution(Matrix<S> a, Vector<S> v_c, MomentSequence seq, TruncationPolicy policy,
                std::size_t order);

    const Matrix<S>& matrix() const noexcept { return a_; }
    const Vector<S>& initial() const noexcept { return v_c_; }
    const MomentSequence& sequence() const noexcept { return series_.sequence(); }
    const TruncationPolicy& policy() const noexcept { return policy_; }
    /// Coefficients A^p v_c in the moment basis.
    const MomentSeries<Vector<S>>& series() const noexcept { return series_; }

    /// Evaluates y(z) by summing the vector series.
    EvalReport<Vector<S>> operator()(const S& z) const;

private:
    Matrix<S> a_;
    Vector<S> v_c_;
    TruncationPolicy policy_;
    MomentSeries<Vector<S>> series_;
};

/// General solution y(z) = E(Az) v_c; diagonalizability of A plays no role here.
template <Scalar S>
IVPSolution<S> solve(const Matrix<S>& a, const Vector<S>& v_c, const MomentSequence& seq,
                     const TruncationPolicy& policy = {}, std::size_t order = kDefaultSolutionOrder);

/// max_{p <= order} |c_{p+1} - A c_p|: the coefficients of d_m y - A y.
/// Needs order < series order. Zero in the exact backend.
template <Scalar S>
double residual_check(const IVPSolution<S>& sol, std::size_t order);

/// X(z) = E(Az) X0. Each column is a solution and X(0) = X0.
template <Scalar S>
class FundamentalMatrix {
public:
    FundamentalMatrix(Matrix<S> a, Matrix<S> x0, MomentSequence seq, TruncationPolicy policy);

    const Matrix<S>& matrix() const noexcept { return a_; }
    const Matrix<S>& initial() const noexcept { return x0_; }
    const MomentSequence& sequence() const noexcept { return seq_; }

    EvalReport<Matrix<S>> operator()(const S& z) const;
    /// The solution with initial value column j of X0.
    IVPSolution<S> column(std::size_t j, std::size_t order = kDefaultSolutionOrder) const;

private:
    Matrix<S> a_;
    Matrix<S> x0_;
    MomentSequence seq_;
    TruncationPolicy policy_;
};

/// Throws SingularMatrix unless X0 is invertible.
template <Scalar S>
FundamentalMatrix<S> fundamental_matrix(const Matrix<S>& a, const Matrix<S>& x0,
                                        const MomentSequence& seq, const TruncationPolicy& policy = {});

/// E(Az) = X(z) X(0)^{-1} from any fundamental matrix X.
template <Scalar S, class Fundamental>
EvalReport<Matrix<S>> recover_exponential(const Fundamental& x, const Matrix<S>& x0, const S& z)
{
    const Matrix<S> x0_inv = mat_inverse(x0);
    auto rep = x(z);
    return {rep.value * x0_inv, rep.terms_used, rep.tail_estimate, rep.status};
}

/// max over zs of |D_q y(z) - A y(z)| with D_q f(z) = (f(qz) - f(z)) / ((q - 1) z),
/// computed from evaluations of the solution only. Needs z != 0 and a
/// q-factorial sequence with the same q.
double q_derivative_residual(const IVPSolution<Float>& sol, double q, const std::vector<Float>& zs);

} // namespace momexp
