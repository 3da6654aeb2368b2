#pragma once

#include <cstddef>
#include <limits>
#include <string_view>

#include "momexp/jordan.hpp"
#include "momexp/matrix.hpp"
#include "momexp/moment.hpp"

namespace momexp {

/// Stopping rule for the partial sums of sum_p A^p z^p / m(p).
struct TruncationPolicy {
    /// Target absolute tail bound.
    double tol = 1e-15;
    std::size_t max_terms = 10000;
    /// Consecutive terms that must fall below tol before stopping.
    std::size_t settle_count = 5;
    /// Abort once a term norm exceeds this.
    double divergence_guard = 1e100;

    /// Throws InputError unless tol > 0 and max_terms >= settle_count >= 1.
    void validate() const;
};

enum class EvalStatus { converged, radius_exceeded, aborted_divergent, max_terms_reached };

std::string_view to_string(EvalStatus status) noexcept;

/// Worse of two statuses (converged is best).
EvalStatus combine(EvalStatus a, EvalStatus b) noexcept;

template <class V>
struct EvalReport {
    V value;
    std::size_t terms_used = 0;
    /// Heuristic geometric bound |T_last| / (1 - ratio); +inf when unavailable.
    double tail_estimate = std::numeric_limits<double>::infinity();
    EvalStatus status = EvalStatus::max_terms_reached;

    bool converged() const noexcept { return status == EvalStatus::converged; }
};

/// E_m(Az) = sum_p A^p z^p / m(p).
///
/// Terms are advanced as T_p = T_{p-1} (A z) m(p-1)/m(p). Summation stops
/// once settle_count consecutive terms are below tol, the last term ratio is
/// below one and the geometric tail estimate is within tol. A term that is
/// exactly zero ends the sum (nilpotent A z). For sequences without declared
/// rapid growth, settle_count consecutive ratios >= 1 report radius_exceeded.
///
/// In the exact backend the partial sums are exact rationals; for exact
/// geometric sequences inside the disc |A z| < b the closed form
/// (I - A z / b)^{-1} is returned instead of a partial sum.
template <Scalar S>
EvalReport<Matrix<S>> eval_exp(const Matrix<S>& a, const S& z, const MomentSequence& seq,
                               const TruncationPolicy& policy = {});

/// E_m(Az) v, summed directly on vectors.
template <Scalar S>
EvalReport<Vector<S>> eval_exp_applied(const Matrix<S>& a, const Vector<S>& v, const S& z,
                                       const MomentSequence& seq, const TruncationPolicy& policy = {});

/// Scalar E_m(w) = sum_p w^p / m(p).
EvalReport<Float> eval_scalar(Float w, const MomentSequence& seq, const TruncationPolicy& policy = {});

/// Delta_h E(lambda, z) = sum_{p >= h} C(p, h) lambda^{p-h} z^p / m(p).
/// Binomials are advanced incrementally, never formed from factorials.
EvalReport<Float> delta_E(Float lambda, std::size_t h, Float z, const MomentSequence& seq,
                          const TruncationPolicy& policy = {});

/// E_m(J z) for the Jordan block J = lambda I + N of the given size: upper
/// triangular Toeplitz with Delta_h E(lambda, z) on the h-th superdiagonal.
EvalReport<FloatMatrix> jordan_block_exp(Float lambda, std::size_t size, Float z,
                                         const MomentSequence& seq, const TruncationPolicy& policy = {});

/// P blockdiag(E(J_i z)) P^{-1}, blocks in decomposition order.
template <Scalar S>
EvalReport<FloatMatrix> eval_via_jordan(const JordanDecomposition<S>& dec, Float z,
                                        const MomentSequence& seq, const TruncationPolicy& policy = {});

struct NormBoundResult {
    double lhs = 0.0;
    double rhs = 0.0;
    bool holds = false;
    EvalStatus status = EvalStatus::converged;
};

/// |E(Az)| <= E(|A| |z|) in the row-sum norm.
NormBoundResult norm_bound_check(const FloatMatrix& a, Float z, const MomentSequence& seq,
                                 const TruncationPolicy& policy = {});

struct DetTraceResult {
    Float det_of_exp;
    Float exp_of_trace;
    EvalStatus det_status = EvalStatus::converged;
    EvalStatus trace_status = EvalStatus::converged;
};

/// det(E(A)) next to E(tr A). They agree only for m(p) = B^p p!.
DetTraceResult det_trace_probe(const FloatMatrix& a, const MomentSequence& seq,
                               const TruncationPolicy& policy = {});

} // namespace momexp
