#include "momexp/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momexp/errors.hpp"

namespace momexp {

namespace {

template <Scalar S>
MomentSeries<Vector<S>> solution_series(const Matrix<S>& a, const Vector<S>& v,
                                        const MomentSequence& seq, std::size_t order)
{
    std::vector<Vector<S>> c;
    c.reserve(order + 1);
    c.push_back(v);
    for (std::size_t p = 1; p <= order; ++p) c.push_back(a * c.back());
    return MomentSeries<Vector<S>>(seq, std::move(c));
}

} // namespace

template <Scalar S>
IVPSolution<S>::IVPSolution(Matrix<S> a, Vector<S> v_c, MomentSequence seq, TruncationPolicy policy,
                            std::size_t order)
    : a_(std::move(a)),
      v_c_(std::move(v_c)),
      policy_(policy),
      series_(solution_series(a_, v_c_, seq, order))
{
    if (v_c_.size() != a_.n()) {
        throw DimensionMismatch("initial vector has length " + std::to_string(v_c_.size()) +
                                ", matrix dimension is " + std::to_string(a_.n()));
    }
    policy_.validate();
}

template <Scalar S>
EvalReport<Vector<S>> IVPSolution<S>::operator()(const S& z) const
{
    return eval_exp_applied(a_, v_c_, z, sequence(), policy_);
}

template <Scalar S>
IVPSolution<S> solve(const Matrix<S>& a, const Vector<S>& v_c, const MomentSequence& seq,
                     const TruncationPolicy& policy, std::size_t order)
{
    if (v_c.size() != a.n()) {
        throw DimensionMismatch("initial vector has length " + std::to_string(v_c.size()) +
                                ", matrix dimension is " + std::to_string(a.n()));
    }
    return IVPSolution<S>(a, v_c, seq, policy, order);
}

template <Scalar S>
double residual_check(const IVPSolution<S>& sol, std::size_t order)
{
    const auto& s = sol.series();
    if (order + 1 > s.order()) {
        throw InputError("residual order " + std::to_string(order) + " needs a series of order " +
                         std::to_string(order + 1) + ", have " + std::to_string(s.order()));
    }
    const auto derivative = moment_derivative(s);
    double worst = 0.0;
    for (std::size_t p = 0; p <= order; ++p) {
        worst = std::max(worst, inf_norm(Vector<S>(derivative[p] - sol.matrix() * s[p])));
    }
    return worst;
}

template <Scalar S>
FundamentalMatrix<S>::FundamentalMatrix(Matrix<S> a, Matrix<S> x0, MomentSequence seq,
                                        TruncationPolicy policy)
    : a_(std::move(a)), x0_(std::move(x0)), seq_(std::move(seq)), policy_(policy)
{
    if (x0_.n() != a_.n()) throw DimensionMismatch("X0 dimension differs from A");
    (void)mat_inverse(x0_);
    policy_.validate();
}

template <Scalar S>
EvalReport<Matrix<S>> FundamentalMatrix<S>::operator()(const S& z) const
{
    auto e = eval_exp(a_, z, seq_, policy_);
    return {e.value * x0_, e.terms_used, e.tail_estimate, e.status};
}

template <Scalar S>
IVPSolution<S> FundamentalMatrix<S>::column(std::size_t j, std::size_t order) const
{
    if (j >= x0_.n()) throw InputError("column index out of range");
    return solve(a_, x0_.column(j), seq_, policy_, order);
}

template <Scalar S>
FundamentalMatrix<S> fundamental_matrix(const Matrix<S>& a, const Matrix<S>& x0,
                                        const MomentSequence& seq, const TruncationPolicy& policy)
{
    return FundamentalMatrix<S>(a, x0, seq, policy);
}

double q_derivative_residual(const IVPSolution<Float>& sol, double q, const std::vector<Float>& zs)
{
    const auto& seq = sol.sequence();
    if (seq.kind() != MomentKind::q_factorial || seq.parameter() != q) {
        throw SequenceMismatch("q-derivative residual needs the sequence qfac:" + std::to_string(q) +
                               ", solution uses '" + seq.specifier() + "'");
    }
    double worst = 0.0;
    for (const Float& z : zs) {
        if (z == Float{}) throw InputError("q-derivative residual is undefined at z = 0");
        const auto y = sol(z);
        const auto yq = sol(q * z);
        if (!y.converged() || !yq.converged()) {
            throw NumericError("solution evaluation did not converge at z = " + to_string(z));
        }
        Vector<Float> dq = yq.value - y.value;
        dq *= Float{1.0, 0.0} / ((q - 1.0) * z);
        worst = std::max(worst, inf_norm(Vector<Float>(dq - sol.matrix() * y.value)));
    }
    return worst;
}

template class IVPSolution<Exact>;
template class IVPSolution<Float>;
template class FundamentalMatrix<Exact>;
template class FundamentalMatrix<Float>;
template IVPSolution<Exact> solve(const ExactMatrix&, const Vector<Exact>&, const MomentSequence&,
                                  const TruncationPolicy&, std::size_t);
template IVPSolution<Float> solve(const FloatMatrix&, const Vector<Float>&, const MomentSequence&,
                                  const TruncationPolicy&, std::size_t);
template double residual_check(const IVPSolution<Exact>&, std::size_t);
template double residual_check(const IVPSolution<Float>&, std::size_t);
template FundamentalMatrix<Exact> fundamental_matrix(const ExactMatrix&, const ExactMatrix&,
                                                     const MomentSequence&, const TruncationPolicy&);
template FundamentalMatrix<Float> fundamental_matrix(const FloatMatrix&, const FloatMatrix&,
                                                     const MomentSequence&, const TruncationPolicy&);

} // namespace momexp
