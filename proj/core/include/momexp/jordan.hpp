#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "momexp/matrix.hpp"

namespace momexp {

template <Scalar S>
struct JordanBlock {
    S eigenvalue;
    std::size_t size = 1;

    friend bool operator==(const JordanBlock&, const JordanBlock&) = default;
};

/// A = P J P^{-1}, with J assembled from `blocks` in order. Columns of P are
/// generalized eigenvector chains v^1..v^s per block, (A - lambda I) v^j = v^{j-1}.
template <Scalar S>
struct JordanDecomposition {
    Matrix<S> P;
    std::vector<JordanBlock<S>> blocks;
    Matrix<S> P_inv;
    /// |A - P J P^{-1}| in the row-sum norm.
    double residual = 0.0;
};

struct Eigenvalue {
    Float value;
    std::size_t multiplicity = 1;
};

struct JordanTolerances {
    /// Rank decisions: pivots below rank_tol * scale count as zero.
    double rank_tol = 1e-8;
    /// Roots within eig_tol * max(1, |lambda|) of each other are one eigenvalue.
    double eig_tol = 1e-3;
};

struct VerifyResult {
    double residual = 0.0;
    double inverse_residual = 0.0;
    bool ok = false;
};

/// Jordan matrix: lambda on the diagonal, ones on the superdiagonal inside each block.
template <Scalar S>
Matrix<S> jordan_matrix(const std::vector<JordanBlock<S>>& blocks);

/// Characteristic polynomial det(xI - A), coefficients low to high (monic).
template <Scalar S>
std::vector<S> characteristic_polynomial(const Matrix<S>& a);

/// Eigenvalues with algebraic multiplicities from the characteristic
/// polynomial (simultaneous Aberth-Ehrlich iteration), clustered by eig_tol.
/// For exact input the polynomial is formed exactly and then rounded.
std::vector<Eigenvalue> eigenvalues(const FloatMatrix& a, double eig_tol = JordanTolerances{}.eig_tol);
std::vector<Eigenvalue> eigenvalues(const ExactMatrix& a, double eig_tol = JordanTolerances{}.eig_tol);

/// Jordan structure from kernel dimensions of (A - lambda I)^r and chains of
/// generalized eigenvectors. Throws ChainConstructionFailed on inconsistent
/// rank decisions.
JordanDecomposition<Float> jordan_decompose(const FloatMatrix& a, const JordanTolerances& tol = {});

/// Exact variant: eigenvalues found numerically are snapped to Gaussian
/// rationals and confirmed by exact polynomial division. Throws
/// ChainConstructionFailed when some eigenvalue is not a Gaussian rational.
JordanDecomposition<Exact> jordan_decompose(const ExactMatrix& a, const JordanTolerances& tol = {});

/// Same construction from user-supplied eigenvalues with multiplicities.
template <Scalar S>
JordanDecomposition<S> jordan_decompose_with(const Matrix<S>& a,
                                             const std::vector<std::pair<S, std::size_t>>& eigen,
                                             double rank_tol = JordanTolerances{}.rank_tol);

/// Recomputes |A - P J P_inv| and |P P_inv - I|; ok iff both <= tol.
template <Scalar S>
VerifyResult verify_decomposition(const Matrix<S>& a, const JordanDecomposition<S>& dec, double tol);

/// Builds a decomposition from P and blocks, computing P^{-1} (throws SingularMatrix).
template <Scalar S>
JordanDecomposition<S> make_decomposition(const Matrix<S>& a, Matrix<S> p,
                                          std::vector<JordanBlock<S>> blocks);

JordanDecomposition<Float> to_float(const JordanDecomposition<Exact>& dec);
inline const JordanDecomposition<Float>& to_float(const JordanDecomposition<Float>& dec) { return dec; }

/// Roots of sum_k coeffs[k] x^k by Aberth-Ehrlich iteration. Leading coefficient nonzero.
std::vector<Float> polynomial_roots(const std::vector<Float>& coeffs, std::size_t max_iterations = 2000);

} // namespace momexp
