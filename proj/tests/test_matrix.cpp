#include <gtest/gtest.h>

#include <random>

#include "momexp/errors.hpp"
#include "momexp/matrix.hpp"
#include "test_support.hpp"

namespace momexp {
namespace {

using testing::example1;
using testing::example1_p;
using testing::exact_from_ints;
using testing::q;

TEST(Rational, ParsesCanonicalForms)
{
    EXPECT_EQ(parse_rational("3"), mpq_class(3));
    EXPECT_EQ(parse_rational("-6/4"), mpq_class(-3, 2));
    EXPECT_EQ(parse_rational("+2/3"), mpq_class(2, 3));
    EXPECT_EQ(format_rational(mpq_class(-6, 4)), "-3/2");
    EXPECT_EQ(format_rational(mpq_class(5)), "5");
}

TEST(Rational, RejectsMalformedText)
{
    EXPECT_THROW(parse_rational("1/0"), InputError);
    EXPECT_THROW(parse_rational("1.5"), InputError);
    EXPECT_THROW(parse_rational(""), InputError);
    EXPECT_THROW(parse_rational("2/"), InputError);
    EXPECT_THROW(parse_rational("a"), InputError);
}

TEST(GaussianRational, FieldArithmeticIsExact)
{
    const Exact a{mpq_class(1, 2), mpq_class(3)};
    const Exact b{mpq_class(-2), mpq_class(1, 3)};
    EXPECT_EQ((a * b) / b, a);
    EXPECT_EQ(a - a, Exact{});
    EXPECT_EQ(Exact(0, 1) * Exact(0, 1), Exact{-1});
    EXPECT_EQ(a * a.conj(), Exact{a.norm()});
    EXPECT_THROW(a / Exact{}, NumericError);
}

TEST(MatMul, IdentityIsNeutral)
{
    const ExactMatrix a = example1();
    EXPECT_EQ(mat_mul(ExactMatrix::identity(3), a), a);
    EXPECT_EQ(mat_mul(a, ExactMatrix::identity(3)), a);
}

TEST(MatMul, NilpotentSquareShiftsToCorner)
{
    const ExactMatrix n3 = exact_from_ints({{0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
    EXPECT_EQ(mat_mul(n3, n3), exact_from_ints({{0, 0, 1}, {0, 0, 0}, {0, 0, 0}}));
}

TEST(MatMul, Example1Square)
{
    EXPECT_EQ(mat_mul(example1(), example1()), exact_from_ints({{1, 0, 2}, {3, 4, 1}, {0, 0, 1}}));
}

TEST(MatMul, DimensionMismatchThrows)
{
    EXPECT_THROW(mat_mul(ExactMatrix::identity(2), ExactMatrix::identity(3)), DimensionMismatch);
    EXPECT_THROW(ExactMatrix::identity(2) * Vector<Exact>(3), DimensionMismatch);
    EXPECT_THROW(ExactMatrix(0), DimensionMismatch);
}

TEST(MatPow, ZerothPowerIsIdentity)
{
    EXPECT_EQ(mat_pow(example1(), 0), ExactMatrix::identity(3));
}

TEST(MatPow, KnownClosedForms)
{
    EXPECT_EQ(mat_pow(example1(), 5), exact_from_ints({{1, 0, 5}, {31, 32, 26}, {0, 0, 1}}));
    EXPECT_EQ(mat_pow(testing::example2(), 4), exact_from_ints({{3, -2, 4}, {2, -1, 4}, {4, -4, 1}}));
}

TEST(MatPow, MatchesIteratedProduct)
{
    std::mt19937 rng(11);
    const ExactMatrix a = testing::random_exact(rng, 3, 3, true);
    ExactMatrix iterated = ExactMatrix::identity(3);
    for (unsigned long p = 0; p <= 12; ++p) {
        EXPECT_EQ(mat_pow(a, p), iterated) << "p = " << p;
        iterated = iterated * a;
    }
}

TEST(RowSumNorm, Examples)
{
    EXPECT_DOUBLE_EQ(row_sum_norm(ExactMatrix::identity(4)), 1.0);
    EXPECT_DOUBLE_EQ(row_sum_norm(exact_from_ints({{0, 2}, {0, 0}})), 2.0);
    // Row sums 2, 3, 1.
    EXPECT_DOUBLE_EQ(row_sum_norm(example1()), 3.0);
}

TEST(MatInverse, Examples)
{
    EXPECT_EQ(mat_inverse(ExactMatrix::identity(3)), ExactMatrix::identity(3));
    EXPECT_EQ(mat_inverse(ExactMatrix::diagonal({Exact{2}, Exact{4}})),
              ExactMatrix::diagonal({q(1, 2), q(1, 4)}));
    const ExactMatrix p = example1_p();
    EXPECT_EQ(p * mat_inverse(p), ExactMatrix::identity(3));
}

TEST(MatInverse, SingularThrowsInBothBackends)
{
    const ExactMatrix s = exact_from_ints({{1, 2}, {2, 4}});
    EXPECT_THROW(mat_inverse(s), SingularMatrix);
    EXPECT_THROW(mat_inverse(to_float(s)), SingularMatrix);
    const FloatMatrix nearly{{Float{1.0}, Float{1.0}}, {Float{1.0}, Float{1.0 + 1e-14}}};
    EXPECT_THROW(mat_inverse(nearly), SingularMatrix);
}

TEST(MatInverse, FloatResidualWithinScaledBound)
{
    std::mt19937 rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        const FloatMatrix a = testing::random_float(rng, 4, 3.0);
        const FloatMatrix r = a * mat_inverse(a) - FloatMatrix::identity(4);
        EXPECT_LE(row_sum_norm(r), 1e-12 * row_sum_norm(a) * 100);
    }
}

TEST(DeterminantTrace, SmallCases)
{
    EXPECT_EQ(determinant(example1()), Exact{2});
    EXPECT_EQ(trace(example1()), Exact{4});
    EXPECT_EQ(determinant(exact_from_ints({{1, 2}, {2, 4}})), Exact{});
}

TEST(BlockDiag, PlacesBlocksInOrder)
{
    const ExactMatrix m = block_diag<Exact>({exact_from_ints({{1, 1}, {0, 1}}), exact_from_ints({{5}})});
    EXPECT_EQ(m, exact_from_ints({{1, 1, 0}, {0, 1, 0}, {0, 0, 5}}));
}

// Properties over random matrices.

TEST(MatrixProperties, ProductIsAssociative)
{
    std::mt19937 rng(1);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = testing::random_exact(rng, 3, 4, true);
        const auto b = testing::random_exact(rng, 3, 4, true);
        const auto c = testing::random_exact(rng, 3, 4, true);
        EXPECT_EQ((a * b) * c, a * (b * c));
    }
}

TEST(MatrixProperties, PowersAdd)
{
    std::mt19937 rng(2);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = testing::random_exact(rng, 3);
        for (unsigned long p = 0; p <= 10; p += 3) {
            for (unsigned long r = 0; r <= 10; r += 2) {
                EXPECT_EQ(mat_pow(a, p + r), mat_pow(a, p) * mat_pow(a, r));
            }
        }
    }
}

TEST(MatrixProperties, RowSumNormIsSubmultiplicative)
{
    std::mt19937 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
        const auto a = testing::random_float(rng, 3, 1.0 + trial % 5);
        const auto b = testing::random_float(rng, 3, 0.5 + trial % 3);
        EXPECT_LE(row_sum_norm(a * b), row_sum_norm(a) * row_sum_norm(b) * (1 + 1e-14));
    }
}

TEST(MatrixProperties, InverseIsAnInvolution)
{
    std::mt19937 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const auto a = testing::random_invertible_exact(rng, 3);
        EXPECT_EQ(mat_inverse(mat_inverse(a)), a);
    }
}

} // namespace
} // namespace momexp
