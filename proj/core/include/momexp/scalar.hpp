#pragma once

#include <complex>
#include <concepts>
#include <string>
#include <string_view>

#include <gmpxx.h>

namespace momexp {

/// Complex binary64 scalar (the float backend).
using Float = std::complex<double>;

/// Gaussian rational re + i*im with arbitrary-precision rational parts
/// (the exact backend). Arithmetic is exact; division by zero throws.
class GaussianRational {
public:
    GaussianRational() = default;
    GaussianRational(long re) : re_(re) {}  // NOLINT(google-explicit-constructor)
    GaussianRational(mpq_class re) : re_(std::move(re)) { re_.canonicalize(); }  // NOLINT
    GaussianRational(mpq_class re, mpq_class im) : re_(std::move(re)), im_(std::move(im))
    {
        re_.canonicalize();
        im_.canonicalize();
    }

    const mpq_class& real() const noexcept { return re_; }
    const mpq_class& imag() const noexcept { return im_; }

    bool is_zero() const noexcept { return sgn(re_) == 0 && sgn(im_) == 0; }
    bool is_real() const noexcept { return sgn(im_) == 0; }

    GaussianRational conj() const { return {re_, -im_}; }
    /// |z|^2, exact.
    mpq_class norm() const { return re_ * re_ + im_ * im_; }

    GaussianRational& operator+=(const GaussianRational& o)
    {
        re_ += o.re_;
        im_ += o.im_;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o)
    {
        re_ -= o.re_;
        im_ -= o.im_;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o);
    GaussianRational& operator/=(const GaussianRational& o);

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }
    GaussianRational operator-() const { return {-re_, -im_}; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b)
    {
        return a.re_ == b.re_ && a.im_ == b.im_;
    }

private:
    mpq_class re_{0};
    mpq_class im_{0};
};

using Exact = GaussianRational;

/// Parses "p/q", "p" or "-p/q" into a canonical rational. Throws InputError.
mpq_class parse_rational(std::string_view text);
/// Canonical "p/q" (or "p" for integers).
std::string format_rational(const mpq_class& q);

/// Explicit, lossy conversion to the float backend.
Float to_float(const Exact& z);
inline Float to_float(const Float& z) { return z; }

std::string to_string(const Exact& z);
std::string to_string(const Float& z);

template <class S>
struct scalar_traits;

template <>
struct scalar_traits<Float> {
    static constexpr bool exact = false;
    static constexpr const char* name = "float";
    static Float zero() { return {0.0, 0.0}; }
    static Float one() { return {1.0, 0.0}; }
    static Float from_int(long v) { return {static_cast<double>(v), 0.0}; }
    static Float from_rational(const mpq_class& q) { return {q.get_d(), 0.0}; }
    static double modulus(const Float& z) { return std::abs(z); }
    static bool is_zero(const Float& z) { return z == Float{}; }
};

template <>
struct scalar_traits<Exact> {
    static constexpr bool exact = true;
    static constexpr const char* name = "exact";
    static Exact zero() { return {}; }
    static Exact one() { return Exact{1}; }
    static Exact from_int(long v) { return Exact{v}; }
    static Exact from_rational(const mpq_class& q) { return Exact{q}; }
    static double modulus(const Exact& z) { return std::abs(to_float(z)); }
    static bool is_zero(const Exact& z) { return z.is_zero(); }
};

template <class S>
concept Scalar = std::same_as<S, Float> || std::same_as<S, Exact>;

template <Scalar S>
inline constexpr bool is_exact_v = scalar_traits<S>::exact;

} // namespace momexp
