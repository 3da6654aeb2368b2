#pragma once

#include <algorithm>
#include <cstddef>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "momexp/errors.hpp"
#include "momexp/matrix.hpp"
#include "momexp/moment.hpp"

namespace momexp {

// Shape and norm of a series coefficient: a scalar, a Vector or a Matrix.
template <class C>
struct coeff_traits;

template <Scalar S>
struct coeff_traits<S> {
    using scalar = S;
    static std::size_t shape(const S&) { return 0; }
    static double norm(const S& x) { return scalar_traits<S>::modulus(x); }
    static S zero_like(const S&) { return scalar_traits<S>::zero(); }
};

template <Scalar S>
struct coeff_traits<Vector<S>> {
    using scalar = S;
    static std::size_t shape(const Vector<S>& v) { return v.size(); }
    static double norm(const Vector<S>& v) { return inf_norm(v); }
    static Vector<S> zero_like(const Vector<S>& v) { return Vector<S>(v.size()); }
};

template <Scalar S>
struct coeff_traits<Matrix<S>> {
    using scalar = S;
    static std::size_t shape(const Matrix<S>& m) { return m.n(); }
    static double norm(const Matrix<S>& m) { return row_sum_norm(m); }
    static Matrix<S> zero_like(const Matrix<S>& m) { return Matrix<S>(m.n()); }
};

/// Truncated series sum_{p=0}^{N} c_p z^p / m(p). The coefficients c_p are
/// stored in the moment basis; the plain Taylor coefficient is c_p / m(p).
template <class C>
class MomentSeries {
public:
    using coeff_type = C;
    using scalar_type = typename coeff_traits<C>::scalar;

    MomentSeries(MomentSequence seq, std::vector<C> coeffs)
        : seq_(std::move(seq)), coeffs_(std::move(coeffs))
    {
        if (coeffs_.empty()) throw InputError("a moment series needs at least one coefficient");
        const auto shape = coeff_traits<C>::shape(coeffs_.front());
        for (const auto& c : coeffs_) {
            if (coeff_traits<C>::shape(c) != shape) {
                throw DimensionMismatch("series coefficients differ in shape");
            }
        }
    }

    const MomentSequence& sequence() const noexcept { return seq_; }
    const std::vector<C>& coeffs() const noexcept { return coeffs_; }
    const C& operator[](std::size_t p) const { return coeffs_.at(p); }
    /// Truncation order N.
    std::size_t order() const noexcept { return coeffs_.size() - 1; }

    friend bool operator==(const MomentSeries& a, const MomentSeries& b)
    {
        return a.seq_ == b.seq_ && a.coeffs_ == b.coeffs_;
    }

private:
    MomentSequence seq_;
    std::vector<C> coeffs_;
};

/// Moment derivative: the coefficient shift c'_p = c_{p+1}. Independent of m.
template <class C>
MomentSeries<C> moment_derivative(const MomentSeries<C>& s)
{
    if (s.order() < 1) throw InputError("moment derivative needs a series of order >= 1");
    std::vector<C> shifted(s.coeffs().begin() + 1, s.coeffs().end());
    return MomentSeries<C>(s.sequence(), std::move(shifted));
}

/// Product of two moment series, truncated at min(N1, N2):
///   r_p = sum_n m(p) / (m(n) m(p-n)) * c1_n * c2_{p-n}
/// The order of each coefficient product is preserved.
template <class C1, class C2>
auto cauchy_product(const MomentSeries<C1>& s1, const MomentSeries<C2>& s2)
{
    using S = typename coeff_traits<C1>::scalar;
    static_assert(std::is_same_v<S, typename coeff_traits<C2>::scalar>,
                  "series backends differ");
    using R = decltype(std::declval<const C1&>() * std::declval<const C2&>());

    if (!(s1.sequence() == s2.sequence())) {
        throw SequenceMismatch("cannot multiply series over '" + s1.sequence().specifier() +
                               "' and '" + s2.sequence().specifier() + "'");
    }
    const auto& seq = s1.sequence();
    const std::size_t order = std::min(s1.order(), s2.order());
    std::vector<R> out;
    out.reserve(order + 1);
    for (std::size_t p = 0; p <= order; ++p) {
        R acc = s1[0] * s2[p];
        acc *= seq.template weight_as<S>(p, 0);
        for (std::size_t n = 1; n <= p; ++n) {
            R term = s1[n] * s2[p - n];
            term *= seq.template weight_as<S>(p, n);
            acc += term;
        }
        out.push_back(std::move(acc));
    }
    return MomentSeries<R>(seq, std::move(out));
}

/// Coefficients of the multiplicative inverse of E(z) in the moment basis:
/// phi_0 = 1, phi_p = -sum_{j<p} m(p) / (m(j) m(p-j)) phi_j.
template <Scalar S>
std::vector<S> phi_coefficients(const MomentSequence& seq, std::size_t order)
{
    std::vector<S> phi;
    phi.reserve(order + 1);
    phi.push_back(scalar_traits<S>::one());
    for (std::size_t p = 1; p <= order; ++p) {
        S acc = scalar_traits<S>::zero();
        for (std::size_t j = 0; j < p; ++j) acc += seq.template weight_as<S>(p, j) * phi[j];
        phi.push_back(-acc);
    }
    return phi;
}

/// Moment-basis series of E(Az): coefficients A^0 .. A^N.
template <Scalar S>
MomentSeries<Matrix<S>> exp_series(const Matrix<S>& a, const MomentSequence& seq, std::size_t order)
{
    std::vector<Matrix<S>> c;
    c.reserve(order + 1);
    c.push_back(Matrix<S>::identity(a.n()));
    for (std::size_t p = 1; p <= order; ++p) c.push_back(c.back() * a);
    return MomentSeries<Matrix<S>>(seq, std::move(c));
}

/// Moment-basis series of E(Az)^{-1}: coefficients phi_p A^p.
template <Scalar S>
MomentSeries<Matrix<S>> inverse_series(const Matrix<S>& a, const MomentSequence& seq,
                                       std::size_t order)
{
    const auto phi = phi_coefficients<S>(seq, order);
    std::vector<Matrix<S>> c;
    c.reserve(order + 1);
    Matrix<S> power = Matrix<S>::identity(a.n());
    for (std::size_t p = 0; p <= order; ++p) {
        if (p > 0) power = power * a;
        c.push_back(power * phi[p]);
    }
    return MomentSeries<Matrix<S>>(seq, std::move(c));
}

/// The multiplicative unit: c_0 = I, c_p = O for p >= 1.
template <Scalar S>
MomentSeries<Matrix<S>> unit_series(std::size_t n, const MomentSequence& seq, std::size_t order)
{
    std::vector<Matrix<S>> c(order + 1, Matrix<S>(n));
    c[0] = Matrix<S>::identity(n);
    return MomentSeries<Matrix<S>>(seq, std::move(c));
}

/// Largest coefficient-wise difference norm over the common order.
template <class C>
double max_coefficient_diff(const MomentSeries<C>& a, const MomentSeries<C>& b)
{
    const std::size_t order = std::min(a.order(), b.order());
    double worst = 0.0;
    for (std::size_t p = 0; p <= order; ++p) {
        worst = std::max(worst, coeff_traits<C>::norm(a[p] - b[p]));
    }
    return worst;
}

/// Float comparison contract: absolute tolerance 1e-12 scaled by the largest coefficient norm.
template <class C>
bool series_close(const MomentSeries<C>& a, const MomentSeries<C>& b, double rel = 1e-12)
{
    double scale = 0.0;
    for (const auto& c : a.coeffs()) scale = std::max(scale, coeff_traits<C>::norm(c));
    for (const auto& c : b.coeffs()) scale = std::max(scale, coeff_traits<C>::norm(c));
    return max_coefficient_diff(a, b) <= rel * scale;
}

} // namespace momexp
