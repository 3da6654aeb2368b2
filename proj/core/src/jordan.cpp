#include "momexp/jordan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "momexp/errors.hpp"

namespace momexp {

template <Scalar S>
Matrix<S> jordan_matrix(const std::vector<JordanBlock<S>>& blocks)
{
    std::size_t n = 0;
    for (const auto& b : blocks) {
        if (b.size == 0) throw InputError("Jordan block size must be positive");
        n += b.size;
    }
    Matrix<S> j(n);
    std::size_t off = 0;
    for (const auto& b : blocks) {
        for (std::size_t i = 0; i < b.size; ++i) {
            j(off + i, off + i) = b.eigenvalue;
            if (i + 1 < b.size) j(off + i, off + i + 1) = scalar_traits<S>::one();
        }
        off += b.size;
    }
    return j;
}

// Faddeev-LeVerrier: M_k = A M_{k-1} + c_{n-k+1} I, c_{n-k} = -tr(A M_k) / k.
template <Scalar S>
std::vector<S> characteristic_polynomial(const Matrix<S>& a)
{
    using T = scalar_traits<S>;
    const std::size_t n = a.n();
    std::vector<S> c(n + 1, T::zero());
    c[n] = T::one();
    Matrix<S> m(n);
    for (std::size_t k = 1; k <= n; ++k) {
        m = a * m + Matrix<S>::identity(n) * c[n - k + 1];
        c[n - k] = -trace(a * m) / T::from_int(static_cast<long>(k));
    }
    return c;
}

namespace {

// Column-pivoted Gauss-Jordan on a rectangular rows x cols array. Pivots
// with modulus below `threshold` are treated as zero.
template <Scalar S>
struct Elimination {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<S> a;
    std::vector<std::size_t> pivot_cols;  // pivot column of row i, i < rank

    S& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }

    void run(double threshold)
    {
        using T = scalar_traits<S>;
        std::vector<bool> used(cols, false);
        for (std::size_t r = 0; r < rows; ++r) {
            std::size_t bi = rows;
            std::size_t bj = cols;
            double best = 0.0;
            for (std::size_t i = r; i < rows; ++i) {
                for (std::size_t j = 0; j < cols; ++j) {
                    if (used[j] || T::is_zero(at(i, j))) continue;
                    const double m = T::modulus(at(i, j));
                    if (bi == rows || m > best) {
                        best = m;
                        bi = i;
                        bj = j;
                    }
                }
            }
            if (bi == rows || (!T::exact && best <= threshold)) break;
            if (bi != r) {
                for (std::size_t j = 0; j < cols; ++j) std::swap(at(bi, j), at(r, j));
            }
            used[bj] = true;
            pivot_cols.push_back(bj);
            const S inv = T::one() / at(r, bj);
            for (std::size_t j = 0; j < cols; ++j) at(r, j) *= inv;
            for (std::size_t i = 0; i < rows; ++i) {
                if (i == r) continue;
                const S f = at(i, bj);
                if (T::is_zero(f)) continue;
                for (std::size_t j = 0; j < cols; ++j) at(i, j) -= f * at(r, j);
            }
        }
    }

    std::size_t rank() const { return pivot_cols.size(); }

    // Basis of the kernel: one vector per non-pivot column.
    std::vector<std::vector<S>> kernel()
    {
        using T = scalar_traits<S>;
        std::vector<bool> is_pivot(cols, false);
        for (auto c : pivot_cols) is_pivot[c] = true;
        std::vector<std::vector<S>> basis;
        for (std::size_t f = 0; f < cols; ++f) {
            if (is_pivot[f]) continue;
            std::vector<S> x(cols, T::zero());
            x[f] = T::one();
            for (std::size_t i = 0; i < pivot_cols.size(); ++i) x[pivot_cols[i]] = -at(i, f);
            basis.push_back(std::move(x));
        }
        return basis;
    }
};

template <Scalar S>
void normalize(Vector<S>& v)
{
    if constexpr (!is_exact_v<S>) {
        const double m = inf_norm(v);
        if (m > 0.0) v *= Float{1.0 / m, 0.0};
    }
}

// Rank of the given columns (length n each); float columns are normalized first.
template <Scalar S>
std::size_t column_rank(const std::vector<Vector<S>>& columns, std::size_t n, double tol)
{
    if (columns.empty()) return 0;
    Elimination<S> e;
    e.rows = n;
    e.cols = columns.size();
    e.a.assign(e.rows * e.cols, scalar_traits<S>::zero());
    for (std::size_t j = 0; j < columns.size(); ++j) {
        Vector<S> c = columns[j];
        normalize(c);
        for (std::size_t i = 0; i < n; ++i) e.at(i, j) = c[i];
    }
    e.run(tol);
    return e.rank();
}

// ker B^r from ker B^{r-1}: x with B x in span(prev), i.e. the x-part of ker [B | -prev].
template <Scalar S>
std::vector<Vector<S>> next_kernel(const Matrix<S>& b, const std::vector<Vector<S>>& prev, double tol)
{
    const std::size_t n = b.n();
    Elimination<S> e;
    e.rows = n;
    e.cols = n + prev.size();
    e.a.assign(e.rows * e.cols, scalar_traits<S>::zero());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) e.at(i, j) = b(i, j);
        for (std::size_t k = 0; k < prev.size(); ++k) e.at(i, n + k) = -prev[k][i];
    }
    double scale = 1.0;
    if constexpr (!is_exact_v<S>) scale = std::max(1.0, row_sum_norm(b));
    e.run(tol * scale);
    std::vector<Vector<S>> out;
    for (auto& x : e.kernel()) {
        Vector<S> v(std::vector<S>(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)));
        normalize(v);
        out.push_back(std::move(v));
    }
    return out;
}

template <Scalar S>
double residual_norm(const Matrix<S>& m)
{
    return row_sum_norm(to_float(m));
}

} // namespace

template <Scalar S>
JordanDecomposition<S> make_decomposition(const Matrix<S>& a, Matrix<S> p,
                                          std::vector<JordanBlock<S>> blocks)
{
    JordanDecomposition<S> dec{p, std::move(blocks), mat_inverse(p), 0.0};
    const Matrix<S> j = jordan_matrix(dec.blocks);
    if (j.n() != a.n() || dec.P.n() != a.n()) {
        throw DimensionMismatch("Jordan blocks and P must match the matrix dimension");
    }
    dec.residual = residual_norm(Matrix<S>(a - dec.P * j * dec.P_inv));
    return dec;
}

template <Scalar S>
JordanDecomposition<S> jordan_decompose_with(const Matrix<S>& a,
                                             const std::vector<std::pair<S, std::size_t>>& eigen,
                                             double rank_tol)
{
    const std::size_t n = a.n();
    std::size_t total = 0;
    for (const auto& e : eigen) total += e.second;
    if (total != n) {
        throw ChainConstructionFailed("eigenvalue multiplicities sum to " + std::to_string(total) +
                                      ", expected " + std::to_string(n));
    }

    Matrix<S> p(n);
    std::vector<JordanBlock<S>> blocks;
    std::size_t next_col = 0;

    for (const auto& [lambda, mult] : eigen) {
        const Matrix<S> b = a - Matrix<S>::identity(n) * lambda;

        // Nested kernels K_1 ⊂ K_2 ⊂ ... until dim = multiplicity.
        std::vector<std::vector<Vector<S>>> kernels{{}};
        while (kernels.back().size() < mult) {
            auto k = next_kernel(b, kernels.back(), rank_tol);
            if (k.size() <= kernels.back().size() || k.size() > mult) {
                throw ChainConstructionFailed(
                    "kernel dimensions of (A - lambda I)^r stalled at " + std::to_string(k.size()) +
                    " for eigenvalue " + to_string(lambda) + " of multiplicity " +
                    std::to_string(mult));
            }
            kernels.push_back(std::move(k));
        }
        const std::size_t depth = kernels.size() - 1;
        std::vector<std::size_t> weyr(depth + 2, 0);
        for (std::size_t r = 1; r <= depth; ++r) weyr[r] = kernels[r].size() - kernels[r - 1].size();
        for (std::size_t r = 1; r < depth; ++r) {
            if (weyr[r + 1] > weyr[r]) {
                throw ChainConstructionFailed("Weyr characteristic is not non-increasing for " +
                                              to_string(lambda));
            }
        }

        // Chain tops, longest first. A top of length s lies in K_s and is
        // independent of K_{s-1} plus the level-s vectors of longer chains.
        std::vector<std::pair<std::size_t, Vector<S>>> tops;
        for (std::size_t s = depth; s >= 1; --s) {
            const std::size_t wanted = weyr[s] - weyr[s + 1];
            std::vector<Vector<S>> span = kernels[s - 1];
            for (const auto& [len, top] : tops) {
                Vector<S> v = top;
                for (std::size_t t = s; t < len; ++t) v = b * v;
                span.push_back(std::move(v));
            }
            std::size_t have = column_rank(span, n, rank_tol);
            std::size_t added = 0;
            for (const auto& cand : kernels[s]) {
                if (added == wanted) break;
                span.push_back(cand);
                const std::size_t r = column_rank(span, n, rank_tol);
                if (r > have) {
                    have = r;
                    tops.emplace_back(s, cand);
                    ++added;
                } else {
                    span.pop_back();
                }
            }
            if (added != wanted) {
                throw ChainConstructionFailed("could not find " + std::to_string(wanted) +
                                              " independent chain tops of length " +
                                              std::to_string(s) + " for " + to_string(lambda));
            }
        }

        for (const auto& [len, top] : tops) {
            std::vector<Vector<S>> chain(len);
            chain[len - 1] = top;
            for (std::size_t j = len - 1; j > 0; --j) chain[j - 1] = b * chain[j];
            for (const auto& v : chain) p.set_column(next_col++, v);
            blocks.push_back({lambda, len});
        }
    }

    try {
        return make_decomposition(a, std::move(p), std::move(blocks));
    } catch (const SingularMatrix&) {
        throw ChainConstructionFailed("generalized eigenvectors are not independent");
    }
}

namespace {

// Newton inclusion radius: the disc |x - z| <= d |p(z)| / |p'(z)| contains a root
// of the degree-d polynomial p. Rounding in p(z) is added so that the radius
// stays honest for roots that the iteration accepted on backward error.
double inclusion_radius(const std::vector<Float>& poly, Float z)
{
    const double az = std::abs(z);
    Float p = poly.back();
    Float dp{};
    double bound = std::abs(poly.back());
    for (std::size_t k = poly.size() - 1; k-- > 0;) {
        dp = dp * z + p;
        p = p * z + poly[k];
        bound = bound * az + std::abs(poly[k]);
    }
    const double degree = static_cast<double>(poly.size() - 1);
    const double num = std::abs(p) + 4.0 * std::numeric_limits<double>::epsilon() * bound;
    const double den = std::abs(dp);
    return den == 0.0 ? std::numeric_limits<double>::infinity() : degree * num / den;
}

std::vector<Eigenvalue> cluster_roots(const std::vector<Float>& roots, const std::vector<Float>& poly,
                                      double eig_tol)
{
    // Single-linkage clustering; centroid of each cluster. Two roots are linked
    // when they are within eig_tol (relative) or when their inclusion discs
    // overlap: a multiple root of multiplicity m is only computed to about
    // eps^(1/m), and its copies then have large, overlapping discs. Discs are
    // capped at kMaxDisc (relative) so distinct eigenvalues stay apart.
    constexpr double kMaxDisc = 0.1;
    const std::size_t d = roots.size();
    std::vector<double> radius(d);
    for (std::size_t i = 0; i < d; ++i) {
        const double scale = std::max(1.0, std::abs(roots[i]));
        radius[i] = std::min(inclusion_radius(poly, roots[i]), kMaxDisc * scale);
    }
    std::vector<std::size_t> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t i) {
        while (parent[i] != i) i = parent[i] = parent[parent[i]];
        return i;
    };
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = i + 1; j < d; ++j) {
            const double scale = std::max({1.0, std::abs(roots[i]), std::abs(roots[j])});
            const double gap = std::abs(roots[i] - roots[j]);
            if (gap <= eig_tol * scale || gap <= radius[i] + radius[j]) parent[find(i)] = find(j);
        }
    }
    std::vector<Eigenvalue> out;
    std::vector<std::size_t> slot(d, d);
    for (std::size_t i = 0; i < d; ++i) {
        const std::size_t r = find(i);
        if (slot[r] == d) {
            slot[r] = out.size();
            out.push_back({Float{}, 0});
        }
        auto& e = out[slot[r]];
        e.value += roots[i];
        ++e.multiplicity;
    }
    for (auto& e : out) e.value /= static_cast<double>(e.multiplicity);
    return out;
}

// Real or imaginary parts below rounding level relative to |lambda| become exact
// zeros, so that ordering and output do not depend on noise.
void snap_and_sort(std::vector<Eigenvalue>& eig)
{
    constexpr double kNegligible = 64.0 * std::numeric_limits<double>::epsilon();
    for (auto& e : eig) {
        const double m = std::abs(e.value);
        double re = e.value.real();
        double im = e.value.imag();
        if (std::abs(re) <= kNegligible * m) re = 0.0;
        if (std::abs(im) <= kNegligible * m) im = 0.0;
        e.value = {re, im};
    }
    std::sort(eig.begin(), eig.end(), [](const Eigenvalue& x, const Eigenvalue& y) {
        if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
        return x.value.imag() < y.value.imag();
    });
}

// A root of multiplicity m is a simple root of the (m-1)-th derivative, where
// Newton's method converges quadratically. Cluster centroids of multiple roots
// are only accurate to about eps^(1/m); this recovers full accuracy.
void polish_clusters(std::vector<Eigenvalue>& eig, const std::vector<Float>& poly, double eig_tol)
{
    for (auto& e : eig) {
        const std::size_t m = e.multiplicity;
        if (m >= poly.size()) continue;
        std::vector<Float> d(poly.size() - (m - 1));
        for (std::size_t k = 0; k < d.size(); ++k) {
            double falling = 1.0;
            for (std::size_t t = 0; t + 1 < m; ++t) falling *= static_cast<double>(k + m - 1 - t);
            d[k] = poly[k + m - 1] * falling;
        }
        Float z = e.value;
        for (int it = 0; it < 50; ++it) {
            Float p = d.back();
            Float dp{};
            for (std::size_t k = d.size() - 1; k-- > 0;) {
                dp = dp * z + p;
                p = p * z + d[k];
            }
            if (dp == Float{}) break;
            const Float step = p / dp;
            z -= step;
            if (!(std::abs(step) > 1e-16 * std::max(1.0, std::abs(z)))) break;
        }
        const double scale = std::max(1.0, std::abs(e.value));
        if (std::isfinite(z.real()) && std::isfinite(z.imag()) && std::abs(z - e.value) <= eig_tol * scale) {
            e.value = z;
        }
    }
}

std::vector<Eigenvalue> eigen_from_polynomial(const std::vector<Float>& poly, double eig_tol)
{
    auto eig = cluster_roots(polynomial_roots(poly), poly, eig_tol);
    polish_clusters(eig, poly, eig_tol);
    snap_and_sort(eig);
    return eig;
}

// Best rational approximation with denominator <= max_den (continued fractions).
mpq_class approximate_rational(double x, long max_den)
{
    const bool neg = x < 0;
    double v = std::abs(x);
    mpz_class h_prev = 1, h = static_cast<long>(std::floor(v));
    mpz_class k_prev = 0, k = 1;
    double frac = v - std::floor(v);
    for (int it = 0; it < 40 && frac > 1e-15; ++it) {
        const double inv = 1.0 / frac;
        const long a = static_cast<long>(std::floor(inv));
        mpz_class h_next = a * h + h_prev;
        mpz_class k_next = a * k + k_prev;
        if (k_next > max_den) break;
        h_prev = h;
        h = h_next;
        k_prev = k;
        k = k_next;
        frac = inv - std::floor(inv);
    }
    mpq_class q(h, k);
    q.canonicalize();
    return neg ? mpq_class(-q) : q;
}

// Divides the exact monic polynomial by (x - lambda) while the remainder is zero.
std::size_t exact_multiplicity(std::vector<Exact>& poly, const Exact& lambda)
{
    std::size_t mult = 0;
    while (poly.size() > 1) {
        std::vector<Exact> quotient(poly.size() - 1);
        Exact carry = poly.back();
        for (std::size_t k = poly.size() - 1; k-- > 0;) {
            quotient[k] = carry;
            carry = poly[k] + carry * lambda;
        }
        if (!carry.is_zero()) break;
        poly = std::move(quotient);
        ++mult;
    }
    return mult;
}

std::vector<Float> to_float_coeffs(const std::vector<Exact>& c)
{
    std::vector<Float> out;
    out.reserve(c.size());
    for (const auto& x : c) out.push_back(to_float(x));
    return out;
}

} // namespace

std::vector<Eigenvalue> eigenvalues(const FloatMatrix& a, double eig_tol)
{
    return eigen_from_polynomial(characteristic_polynomial(a), eig_tol);
}

std::vector<Eigenvalue> eigenvalues(const ExactMatrix& a, double eig_tol)
{
    return eigen_from_polynomial(to_float_coeffs(characteristic_polynomial(a)), eig_tol);
}

JordanDecomposition<Float> jordan_decompose(const FloatMatrix& a, const JordanTolerances& tol)
{
    std::vector<std::pair<Float, std::size_t>> eigen;
    for (const auto& e : eigenvalues(a, tol.eig_tol)) eigen.emplace_back(e.value, e.multiplicity);
    return jordan_decompose_with(a, eigen, tol.rank_tol);
}

JordanDecomposition<Exact> jordan_decompose(const ExactMatrix& a, const JordanTolerances& tol)
{
    std::vector<Exact> poly = characteristic_polynomial(a);
    const auto approx = eigen_from_polynomial(to_float_coeffs(poly), tol.eig_tol);

    std::vector<std::pair<Exact, std::size_t>> eigen;
    for (const auto& e : approx) {
        for (long max_den : {1L, 16L, 1024L}) {
            const Exact guess{approximate_rational(e.value.real(), max_den),
                              approximate_rational(e.value.imag(), max_den)};
            const bool seen = std::any_of(eigen.begin(), eigen.end(),
                                          [&](const auto& x) { return x.first == guess; });
            if (seen) break;
            const std::size_t mult = exact_multiplicity(poly, guess);
            if (mult > 0) {
                eigen.emplace_back(guess, mult);
                break;
            }
        }
    }
    if (poly.size() != 1) {
        throw ChainConstructionFailed(
            "eigenvalues are not all Gaussian rationals; use the float backend");
    }
    return jordan_decompose_with(a, eigen, 0.0);
}

template <Scalar S>
VerifyResult verify_decomposition(const Matrix<S>& a, const JordanDecomposition<S>& dec, double tol)
{
    if (dec.P.n() != a.n() || dec.P_inv.n() != a.n()) {
        throw DimensionMismatch("decomposition dimension differs from matrix");
    }
    const Matrix<S> j = jordan_matrix(dec.blocks);
    if (j.n() != a.n()) throw DimensionMismatch("Jordan block sizes do not sum to the dimension");
    VerifyResult r;
    r.residual = residual_norm(Matrix<S>(a - dec.P * j * dec.P_inv));
    r.inverse_residual = residual_norm(Matrix<S>(dec.P * dec.P_inv - Matrix<S>::identity(a.n())));
    r.ok = r.residual <= tol && r.inverse_residual <= tol;
    return r;
}

JordanDecomposition<Float> to_float(const JordanDecomposition<Exact>& dec)
{
    std::vector<JordanBlock<Float>> blocks;
    blocks.reserve(dec.blocks.size());
    for (const auto& b : dec.blocks) blocks.push_back({to_float(b.eigenvalue), b.size});
    return {to_float(dec.P), std::move(blocks), to_float(dec.P_inv), dec.residual};
}

template ExactMatrix jordan_matrix(const std::vector<JordanBlock<Exact>>&);
template FloatMatrix jordan_matrix(const std::vector<JordanBlock<Float>>&);
template std::vector<Exact> characteristic_polynomial(const ExactMatrix&);
template std::vector<Float> characteristic_polynomial(const FloatMatrix&);
template JordanDecomposition<Exact> jordan_decompose_with(
    const ExactMatrix&, const std::vector<std::pair<Exact, std::size_t>>&, double);
template JordanDecomposition<Float> jordan_decompose_with(
    const FloatMatrix&, const std::vector<std::pair<Float, std::size_t>>&, double);
template VerifyResult verify_decomposition(const ExactMatrix&, const JordanDecomposition<Exact>&, double);
template VerifyResult verify_decomposition(const FloatMatrix&, const JordanDecomposition<Float>&, double);
template JordanDecomposition<Exact> make_decomposition(const ExactMatrix&, ExactMatrix,
                                                      std::vector<JordanBlock<Exact>>);
template JordanDecomposition<Float> make_decomposition(const FloatMatrix&, FloatMatrix,
                                                      std::vector<JordanBlock<Float>>);

} // namespace momexp
