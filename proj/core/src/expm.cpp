#include "momexp/expm.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "momexp/errors.hpp"

namespace momexp {

void TruncationPolicy::validate() const
{
    if (!(tol > 0.0)) throw InputError("truncation tolerance must be positive");
    if (settle_count < 1) throw InputError("settle_count must be at least 1");
    if (max_terms < settle_count) throw InputError("max_terms must be at least settle_count");
    if (!(divergence_guard > 0.0)) throw InputError("divergence guard must be positive");
}

std::string_view to_string(EvalStatus status) noexcept
{
    switch (status) {
    case EvalStatus::converged:
        return "converged";
    case EvalStatus::radius_exceeded:
        return "radius_exceeded";
    case EvalStatus::aborted_divergent:
        return "aborted_divergent";
    case EvalStatus::max_terms_reached:
        return "max_terms_reached";
    }
    return "unknown";
}

EvalStatus combine(EvalStatus a, EvalStatus b) noexcept
{
    auto rank = [](EvalStatus s) {
        switch (s) {
        case EvalStatus::converged:
            return 0;
        case EvalStatus::max_terms_reached:
            return 1;
        case EvalStatus::radius_exceeded:
            return 2;
        case EvalStatus::aborted_divergent:
            return 3;
        }
        return 3;
    };
    return rank(a) >= rank(b) ? a : b;
}

namespace {

template <Scalar S>
double term_norm(const Matrix<S>& m) { return row_sum_norm(m); }
template <Scalar S>
double term_norm(const Vector<S>& v) { return inf_norm(v); }
double term_norm(const Float& x) { return std::abs(x); }

template <Scalar S>
bool exactly_zero(const Matrix<S>& m) { return m.is_zero(); }
template <Scalar S>
bool exactly_zero(const Vector<S>& v)
{
    return std::all_of(v.data().begin(), v.data().end(),
                       [](const S& x) { return scalar_traits<S>::is_zero(x); });
}
bool exactly_zero(const Float& x) { return x == Float{}; }

// Partial sums of T_0 + T_1 + ..., where advance(T, p) turns T_{p-1} into T_p.
template <class V, class Advance>
EvalReport<V> sum_terms(V first, Advance&& advance, bool rapid_growth, const TruncationPolicy& policy)
{
    policy.validate();
    EvalReport<V> rep{first, 1, 0.0, EvalStatus::converged};
    double prev = term_norm(first);
    if (exactly_zero(first)) return rep;
    if (!std::isfinite(prev) || prev > policy.divergence_guard) {
        rep.status = EvalStatus::aborted_divergent;
        rep.tail_estimate = std::numeric_limits<double>::infinity();
        return rep;
    }

    V term = std::move(first);
    std::size_t small_run = 0;
    std::size_t growth_run = 0;
    double ratio = 1.0;
    for (std::size_t p = 1; p < policy.max_terms; ++p) {
        advance(term, p);
        const double norm = term_norm(term);
        if (!std::isfinite(norm) || norm > policy.divergence_guard) {
            rep.status = EvalStatus::aborted_divergent;
            rep.terms_used = p;
            rep.tail_estimate = std::numeric_limits<double>::infinity();
            return rep;
        }
        if (exactly_zero(term)) {
            // Every later term is a multiple of this one.
            rep.terms_used = p;
            rep.tail_estimate = 0.0;
            rep.status = EvalStatus::converged;
            return rep;
        }
        rep.value += term;
        rep.terms_used = p + 1;
        ratio = norm / prev;
        prev = norm;

        small_run = norm < policy.tol ? small_run + 1 : 0;
        growth_run = ratio >= 1.0 ? growth_run + 1 : 0;

        if (!rapid_growth && growth_run >= policy.settle_count) {
            rep.status = EvalStatus::radius_exceeded;
            rep.tail_estimate = std::numeric_limits<double>::infinity();
            return rep;
        }
        if (small_run >= policy.settle_count && ratio < 1.0) {
            const double tail = norm / (1.0 - ratio);
            if (tail <= policy.tol) {
                rep.tail_estimate = tail;
                rep.status = EvalStatus::converged;
                return rep;
            }
        }
    }
    rep.status = EvalStatus::max_terms_reached;
    rep.tail_estimate = ratio < 1.0 ? prev / (1.0 - ratio) : std::numeric_limits<double>::infinity();
    return rep;
}

// m(p-1) / m(p) as a scalar of the backend.
template <Scalar S>
S moment_ratio(const MomentSequence& seq, std::size_t p)
{
    if constexpr (is_exact_v<S>) {
        mpq_class r = seq.exact_value(p - 1) / seq.exact_value(p);
        r.canonicalize();
        return Exact{r};
    } else {
        return Float{seq.ratio(p), 0.0};
    }
}

mpq_class abs_q(const mpq_class& q) { return q < 0 ? mpq_class(-q) : q; }

// Row-sum bound using |re| + |im| >= |z| entrywise.
mpq_class l1_row_bound(const ExactMatrix& a)
{
    mpq_class best = 0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        mpq_class row = 0;
        for (std::size_t j = 0; j < a.n(); ++j) row += abs_q(a(i, j).real()) + abs_q(a(i, j).imag());
        if (row > best) best = row;
    }
    return best;
}

} // namespace

template <Scalar S>
EvalReport<Matrix<S>> eval_exp(const Matrix<S>& a, const S& z, const MomentSequence& seq,
                               const TruncationPolicy& policy)
{
    policy.validate();
    const std::size_t n = a.n();
    if constexpr (is_exact_v<S>) {
        if (!seq.exact_capable()) {
            throw BackendMismatch("exact evaluation needs an exact-capable sequence, got '" +
                                  seq.specifier() + "'");
        }
        if (seq.kind() == MomentKind::geometric) {
            // sum (Az/b)^p = (I - Az/b)^{-1} whenever |Az| < b.
            const mpq_class b = seq.exact_value(1);
            const mpq_class bound = l1_row_bound(a) * (abs_q(z.real()) + abs_q(z.imag()));
            if (bound < b) {
                Matrix<S> resolvent = Matrix<S>::identity(n) - a * (z / Exact{b});
                return {mat_inverse(resolvent), 0, 0.0, EvalStatus::converged};
            }
        }
    }
    const Matrix<S> az = a * z;
    auto advance = [&](Matrix<S>& term, std::size_t p) {
        term = term * az;
        term *= moment_ratio<S>(seq, p);
    };
    return sum_terms(Matrix<S>::identity(n), advance, seq.rapid_growth_declared(), policy);
}

template <Scalar S>
EvalReport<Vector<S>> eval_exp_applied(const Matrix<S>& a, const Vector<S>& v, const S& z,
                                       const MomentSequence& seq, const TruncationPolicy& policy)
{
    if (v.size() != a.n()) throw DimensionMismatch("initial vector length differs from matrix dimension");
    if constexpr (is_exact_v<S>) {
        if (seq.kind() == MomentKind::geometric && seq.exact_capable()) {
            auto full = eval_exp(a, z, seq, policy);
            return {full.value * v, full.terms_used, full.tail_estimate, full.status};
        }
    }
    const Matrix<S> az = a * z;
    auto advance = [&](Vector<S>& term, std::size_t p) {
        term = az * term;
        term *= moment_ratio<S>(seq, p);
    };
    return sum_terms(v, advance, seq.rapid_growth_declared(), policy);
}

EvalReport<Float> delta_E(Float lambda, std::size_t h, Float z, const MomentSequence& seq,
                          const TruncationPolicy& policy)
{
    // First term p = h: z^h / m(h).
    Float first{1.0, 0.0};
    if (h > 0) {
        if (z == Float{}) {
            first = Float{};
        } else {
            first = std::pow(z, static_cast<double>(h)) * std::exp(-seq.log_value(h));
        }
    }
    const Float lz = lambda * z;
    auto advance = [&](Float& term, std::size_t k) {
        // k-th step moves p = h + k - 1 to p + 1 = h + k.
        const std::size_t next = h + k;
        const double binom_step = static_cast<double>(next) / static_cast<double>(k);
        term *= lz * (binom_step * seq.ratio(next));
    };
    return sum_terms(first, advance, seq.rapid_growth_declared(), policy);
}

EvalReport<Float> eval_scalar(Float w, const MomentSequence& seq, const TruncationPolicy& policy)
{
    return delta_E(w, 0, Float{1.0, 0.0}, seq, policy);
}

EvalReport<FloatMatrix> jordan_block_exp(Float lambda, std::size_t size, Float z,
                                         const MomentSequence& seq, const TruncationPolicy& policy)
{
    if (size < 1) throw InputError("Jordan block size must be positive");
    EvalReport<FloatMatrix> rep{FloatMatrix(size), 0, 0.0, EvalStatus::converged};
    for (std::size_t h = 0; h < size; ++h) {
        const auto d = delta_E(lambda, h, z, seq, policy);
        for (std::size_t r = 0; r + h < size; ++r) rep.value(r, r + h) = d.value;
        rep.terms_used = std::max(rep.terms_used, d.terms_used);
        rep.tail_estimate = std::max(rep.tail_estimate, d.tail_estimate);
        rep.status = combine(rep.status, d.status);
    }
    return rep;
}

template <Scalar S>
EvalReport<FloatMatrix> eval_via_jordan(const JordanDecomposition<S>& dec_in, Float z,
                                        const MomentSequence& seq, const TruncationPolicy& policy)
{
    const JordanDecomposition<Float> dec = to_float(dec_in);
    std::vector<FloatMatrix> parts;
    parts.reserve(dec.blocks.size());
    EvalReport<FloatMatrix> rep{FloatMatrix(dec.P.n()), 0, 0.0, EvalStatus::converged};
    for (const auto& b : dec.blocks) {
        auto e = jordan_block_exp(b.eigenvalue, b.size, z, seq, policy);
        rep.terms_used = std::max(rep.terms_used, e.terms_used);
        rep.tail_estimate = std::max(rep.tail_estimate, e.tail_estimate);
        rep.status = combine(rep.status, e.status);
        parts.push_back(std::move(e.value));
    }
    const FloatMatrix d = block_diag(parts);
    if (d.n() != dec.P.n()) throw DimensionMismatch("Jordan block sizes do not sum to the dimension");
    rep.value = dec.P * d * dec.P_inv;
    return rep;
}

NormBoundResult norm_bound_check(const FloatMatrix& a, Float z, const MomentSequence& seq,
                                 const TruncationPolicy& policy)
{
    const auto lhs = eval_exp(a, z, seq, policy);
    const auto rhs = eval_scalar(Float{row_sum_norm(a) * std::abs(z), 0.0}, seq, policy);
    NormBoundResult r;
    r.lhs = row_sum_norm(lhs.value);
    r.rhs = std::abs(rhs.value);
    r.status = combine(lhs.status, rhs.status);
    // Both sides carry rounding of order n * eps * rhs.
    const double slack = policy.tol + 8.0 * static_cast<double>(a.n()) *
                                          std::numeric_limits<double>::epsilon() * r.rhs;
    r.holds = r.status == EvalStatus::converged && r.lhs <= r.rhs + slack;
    return r;
}

DetTraceResult det_trace_probe(const FloatMatrix& a, const MomentSequence& seq,
                               const TruncationPolicy& policy)
{
    const auto e = eval_exp(a, Float{1.0, 0.0}, seq, policy);
    const auto t = eval_scalar(trace(a), seq, policy);
    DetTraceResult r;
    r.det_of_exp = determinant(e.value);
    r.exp_of_trace = t.value;
    r.det_status = e.status;
    r.trace_status = t.status;
    return r;
}

template EvalReport<ExactMatrix> eval_exp(const ExactMatrix&, const Exact&, const MomentSequence&,
                                          const TruncationPolicy&);
template EvalReport<FloatMatrix> eval_exp(const FloatMatrix&, const Float&, const MomentSequence&,
                                          const TruncationPolicy&);
template EvalReport<Vector<Exact>> eval_exp_applied(const ExactMatrix&, const Vector<Exact>&,
                                                    const Exact&, const MomentSequence&,
                                                    const TruncationPolicy&);
template EvalReport<Vector<Float>> eval_exp_applied(const FloatMatrix&, const Vector<Float>&,
                                                    const Float&, const MomentSequence&,
                                                    const TruncationPolicy&);
template EvalReport<FloatMatrix> eval_via_jordan(const JordanDecomposition<Exact>&, Float,
                                                 const MomentSequence&, const TruncationPolicy&);
template EvalReport<FloatMatrix> eval_via_jordan(const JordanDecomposition<Float>&, Float,
                                                 const MomentSequence&, const TruncationPolicy&);

} // namespace momexp
