#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

#include "momexp/errors.hpp"
#include "momexp/scalar.hpp"

namespace momexp {

/// Dense column vector over one scalar backend.
template <Scalar S>
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t n) : data_(n, scalar_traits<S>::zero()) {}
    explicit Vector(std::vector<S> data) : data_(std::move(data)) {}
    Vector(std::initializer_list<S> init) : data_(init) {}

    std::size_t size() const noexcept { return data_.size(); }
    S& operator[](std::size_t i) { return data_[i]; }
    const S& operator[](std::size_t i) const { return data_[i]; }
    const std::vector<S>& data() const noexcept { return data_; }

    Vector& operator+=(const Vector& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Vector& operator-=(const Vector& o)
    {
        check_same(o);
        for (std::size_t i = 0; i < size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Vector& operator*=(const S& s)
    {
        for (auto& x : data_) x *= s;
        return *this;
    }
    friend Vector operator+(Vector a, const Vector& b) { return a += b; }
    friend Vector operator-(Vector a, const Vector& b) { return a -= b; }
    friend Vector operator*(Vector a, const S& s) { return a *= s; }
    friend Vector operator*(const S& s, Vector a) { return a *= s; }
    friend bool operator==(const Vector& a, const Vector& b) { return a.data_ == b.data_; }

private:
    void check_same(const Vector& o) const
    {
        if (o.size() != size()) {
            throw DimensionMismatch("vector sizes differ: " + std::to_string(size()) + " vs " +
                                    std::to_string(o.size()));
        }
    }

    std::vector<S> data_;
};

/// Max modulus of the entries.
template <Scalar S>
double inf_norm(const Vector<S>& v)
{
    double r = 0.0;
    for (const auto& x : v.data()) r = std::max(r, scalar_traits<S>::modulus(x));
    return r;
}

/// Dense n x n matrix, row-major storage. n >= 1.
template <Scalar S>
class Matrix {
public:
    using scalar_type = S;

    explicit Matrix(std::size_t n) : n_(n), data_(n * n, scalar_traits<S>::zero())
    {
        if (n == 0) throw DimensionMismatch("matrix dimension must be positive");
    }
    Matrix(std::size_t n, std::vector<S> row_major) : n_(n), data_(std::move(row_major))
    {
        if (n == 0) throw DimensionMismatch("matrix dimension must be positive");
        if (data_.size() != n * n) {
            throw DimensionMismatch("expected " + std::to_string(n * n) + " entries, got " +
                                    std::to_string(data_.size()));
        }
    }
    Matrix(std::initializer_list<std::initializer_list<S>> rows) : Matrix(rows.size())
    {
        std::size_t i = 0;
        for (const auto& row : rows) {
            if (row.size() != n_) throw DimensionMismatch("matrix literal is not square");
            std::size_t j = 0;
            for (const auto& x : row) (*this)(i, j++) = x;
            ++i;
        }
    }

    static Matrix zero(std::size_t n) { return Matrix(n); }
    static Matrix identity(std::size_t n)
    {
        Matrix m(n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = scalar_traits<S>::one();
        return m;
    }
    static Matrix diagonal(const std::vector<S>& d)
    {
        Matrix m(d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return m;
    }

    std::size_t n() const noexcept { return n_; }
    S& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
    const S& operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
    const std::vector<S>& data() const noexcept { return data_; }

    Vector<S> column(std::size_t j) const
    {
        Vector<S> c(n_);
        for (std::size_t i = 0; i < n_; ++i) c[i] = (*this)(i, j);
        return c;
    }
    void set_column(std::size_t j, const Vector<S>& c)
    {
        if (c.size() != n_) throw DimensionMismatch("column length differs from matrix dimension");
        for (std::size_t i = 0; i < n_; ++i) (*this)(i, j) = c[i];
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(),
                           [](const S& x) { return scalar_traits<S>::is_zero(x); });
    }

    Matrix& operator+=(const Matrix& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += o.data_[k];
        return *this;
    }
    Matrix& operator-=(const Matrix& o)
    {
        check_same(o);
        for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= o.data_[k];
        return *this;
    }
    Matrix& operator*=(const S& s)
    {
        for (auto& x : data_) x *= s;
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, const S& s) { return a *= s; }
    friend Matrix operator*(const S& s, Matrix a) { return a *= s; }
    Matrix operator-() const
    {
        Matrix r(*this);
        for (auto& x : r.data_) x = -x;
        return r;
    }
    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.n_ == b.n_ && a.data_ == b.data_;
    }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        a.check_same(b);
        const std::size_t n = a.n_;
        Matrix r(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const S& aik = a(i, k);
                if (scalar_traits<S>::is_zero(aik)) continue;
                for (std::size_t j = 0; j < n; ++j) r(i, j) += aik * b(k, j);
            }
        }
        return r;
    }

    friend Vector<S> operator*(const Matrix& a, const Vector<S>& v)
    {
        if (v.size() != a.n_) {
            throw DimensionMismatch("matrix-vector product: dimension " + std::to_string(a.n_) +
                                    " vs vector length " + std::to_string(v.size()));
        }
        Vector<S> r(a.n_);
        for (std::size_t i = 0; i < a.n_; ++i) {
            for (std::size_t j = 0; j < a.n_; ++j) r[i] += a(i, j) * v[j];
        }
        return r;
    }

private:
    void check_same(const Matrix& o) const
    {
        if (o.n_ != n_) {
            throw DimensionMismatch("matrix dimensions differ: " + std::to_string(n_) + " vs " +
                                    std::to_string(o.n_));
        }
    }

    std::size_t n_;
    std::vector<S> data_;
};

using ExactMatrix = Matrix<Exact>;
using FloatMatrix = Matrix<Float>;

template <Scalar S>
Matrix<S> mat_mul(const Matrix<S>& a, const Matrix<S>& b)
{
    return a * b;
}

/// A^p by binary exponentiation; exact backend results equal the iterated product.
template <Scalar S>
Matrix<S> mat_pow(const Matrix<S>& a, unsigned long p)
{
    Matrix<S> result = Matrix<S>::identity(a.n());
    Matrix<S> base = a;
    while (p > 0) {
        if (p & 1UL) result = result * base;
        p >>= 1;
        if (p > 0) base = base * base;
    }
    return result;
}

/// Maximum absolute row sum. Normalized (|I| = 1) and submultiplicative.
template <Scalar S>
double row_sum_norm(const Matrix<S>& a)
{
    double best = 0.0;
    for (std::size_t i = 0; i < a.n(); ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < a.n(); ++j) row += scalar_traits<S>::modulus(a(i, j));
        best = std::max(best, row);
    }
    return best;
}

/// Relative pivot threshold for float inversion: pivots below this times |A| are singular.
inline constexpr double kFloatSingularThreshold = 1e-12;

/// Gauss-Jordan inverse with partial pivoting. Exact backend: exact zero
/// test. Float backend: rejects pivots below kFloatSingularThreshold * |A|.
template <Scalar S>
Matrix<S> mat_inverse(const Matrix<S>& a)
{
    using T = scalar_traits<S>;
    const std::size_t n = a.n();
    Matrix<S> work = a;
    Matrix<S> inv = Matrix<S>::identity(n);
    const double threshold = T::exact ? 0.0 : kFloatSingularThreshold * row_sum_norm(a);

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        if constexpr (T::exact) {
            while (pivot < n && T::is_zero(work(pivot, col))) ++pivot;
            if (pivot == n) throw SingularMatrix();
        } else {
            double best = T::modulus(work(col, col));
            for (std::size_t r = col + 1; r < n; ++r) {
                const double m = T::modulus(work(r, col));
                if (m > best) {
                    best = m;
                    pivot = r;
                }
            }
            if (best == 0.0 || best < threshold) throw SingularMatrix();
        }
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(work(pivot, j), work(col, j));
                std::swap(inv(pivot, j), inv(col, j));
            }
        }
        const S scale = T::one() / work(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            work(col, j) *= scale;
            inv(col, j) *= scale;
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const S f = work(r, col);
            if (T::is_zero(f)) continue;
            for (std::size_t j = 0; j < n; ++j) {
                work(r, j) -= f * work(col, j);
                inv(r, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

/// Determinant by Gaussian elimination (exact in the exact backend).
template <Scalar S>
S determinant(const Matrix<S>& a)
{
    using T = scalar_traits<S>;
    const std::size_t n = a.n();
    Matrix<S> w = a;
    S det = T::one();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col; r < n; ++r) {
            if (T::modulus(w(r, col)) > T::modulus(w(pivot, col))) pivot = r;
        }
        if (T::is_zero(w(pivot, col))) return T::zero();
        if (pivot != col) {
            for (std::size_t j = 0; j < n; ++j) std::swap(w(pivot, j), w(col, j));
            det = -det;
        }
        det *= w(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const S f = w(r, col) / w(col, col);
            if (T::is_zero(f)) continue;
            for (std::size_t j = col; j < n; ++j) w(r, j) -= f * w(col, j);
        }
    }
    return det;
}

template <Scalar S>
S trace(const Matrix<S>& a)
{
    S t = scalar_traits<S>::zero();
    for (std::size_t i = 0; i < a.n(); ++i) t += a(i, i);
    return t;
}

/// Explicit, lossy conversion from the exact to the float backend.
inline FloatMatrix to_float(const ExactMatrix& a)
{
    std::vector<Float> d;
    d.reserve(a.data().size());
    for (const auto& x : a.data()) d.push_back(to_float(x));
    return FloatMatrix(a.n(), std::move(d));
}
inline const FloatMatrix& to_float(const FloatMatrix& a) { return a; }

inline Vector<Float> to_float(const Vector<Exact>& v)
{
    std::vector<Float> d;
    d.reserve(v.size());
    for (const auto& x : v.data()) d.push_back(to_float(x));
    return Vector<Float>(std::move(d));
}
inline const Vector<Float>& to_float(const Vector<Float>& v) { return v; }

/// Block-diagonal assembly in the given order.
template <Scalar S>
Matrix<S> block_diag(const std::vector<Matrix<S>>& blocks)
{
    std::size_t n = 0;
    for (const auto& b : blocks) n += b.n();
    Matrix<S> r(n);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.n(); ++i) {
            for (std::size_t j = 0; j < b.n(); ++j) r(off + i, off + j) = b(i, j);
        }
        off += b.n();
    }
    return r;
}

} // namespace momexp
