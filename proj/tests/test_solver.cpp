#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "momexp/errors.hpp"
#include "momexp/jordan.hpp"
#include "momexp/solver.hpp"
#include "test_support.hpp"

namespace momexp {
namespace {

using testing::max_abs_diff;
using testing::q;

const auto kFactorial = MomentSequence::factorial();
const auto kMl2 = MomentSequence::mittag_leffler(2.0);
const auto kQfac2 = MomentSequence::q_factorial(mpq_class(2));

Vector<Exact> e1() { return Vector<Exact>{Exact{1}, Exact{}, Exact{}}; }

TEST(Solve, ZeroMatrixGivesConstant)
{
    const auto sol = solve(FloatMatrix(2), Vector<Float>{Float{1.0}, Float{2.0}}, kMl2);
    for (Float z : {Float{0.0}, Float{0.5}, Float{-3.0, 2.0}}) {
        EXPECT_EQ(sol(z).value, (Vector<Float>{Float{1.0}, Float{2.0}}));
    }
}

TEST(Solve, ClassicalDiagonal)
{
    const auto sol = solve(FloatMatrix::diagonal({Float{1.0}, Float{2.0}}), Vector<Float>{Float{1.0}, Float{1.0}},
                           kFactorial);
    const auto y = sol(Float{0.7});
    EXPECT_TRUE(y.converged());
    EXPECT_NEAR(std::abs(y.value[0] - std::exp(0.7)), 0.0, 1e-12);
    EXPECT_NEAR(std::abs(y.value[1] - std::exp(1.4)), 0.0, 1e-12);
}

TEST(Solve, InitialValueAtZero)
{
    std::mt19937 rng(51);
    const auto a = testing::random_exact(rng, 3, 3, true);
    const Vector<Exact> v{q(1, 2), Exact{0, 1}, Exact{-3}};
    EXPECT_EQ(solve(a, v, kQfac2)(Exact{}).value, v);
}

TEST(Solve, QExampleSeriesCoefficients)
{
    const auto sol = solve(testing::example2(), e1(), kQfac2, {}, 30);
    for (long p = 0; p <= 30; ++p) {
        const Vector<Exact> expected{q(p * p - 3 * p + 2, 2), q((p - 3) * p, 2), q(2 * p, 2)};
        EXPECT_EQ(sol.series()[static_cast<std::size_t>(p)], expected) << p;
    }
}

TEST(Solve, QExampleIsFirstColumnOfExponential)
{
    const auto a = to_float(testing::example2());
    const auto sol = solve(a, to_float(e1()), kQfac2);
    const Float z{0.3, 0.2};
    EXPECT_LE(max_abs_diff(sol(z).value, eval_exp(a, z, kQfac2).value.column(0)), 1e-14);
}

TEST(Solve, ExactEvaluationMatchesFloat)
{
    const auto sol = solve(testing::example1(), e1(), kFactorial);
    const auto exact = sol(q(1, 3));
    const auto flt = solve(to_float(testing::example1()), to_float(e1()), kFactorial)(Float{1.0 / 3.0});
    EXPECT_TRUE(exact.converged());
    EXPECT_LE(max_abs_diff(to_float(exact.value), flt.value), 1e-14);
}

TEST(Solve, DimensionMismatch)
{
    EXPECT_THROW(solve(testing::example1(), Vector<Exact>(2), kFactorial), DimensionMismatch);
}

TEST(Solve, SuperpositionIsCoefficientExact)
{
    std::mt19937 rng(52);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = testing::random_exact(rng, 3, 2, true);
        const Vector<Exact> u{Exact{1}, Exact{2}, Exact{0, 1}};
        const Vector<Exact> v{q(-1, 3), Exact{}, Exact{5}};
        const Exact alpha = q(2, 7);
        const Exact beta{mpq_class(1), mpq_class(-1)};
        const auto su = solve(a, u, kQfac2, {}, 20);
        const auto sv = solve(a, v, kQfac2, {}, 20);
        const auto sw = solve(a, Vector<Exact>(u * alpha + v * beta), kQfac2, {}, 20);
        for (std::size_t p = 0; p <= 20; ++p) EXPECT_EQ(sw.series()[p], su.series()[p] * alpha + sv.series()[p] * beta);
    }
}

TEST(Solve, JordanPathMatchesSolution)
{
    // y(z) = P E(Jz) P^{-1} v for the non-diagonalizable examples.
    for (const auto& a : {testing::example1(), testing::example2()}) {
        const auto dec = jordan_decompose(a);
        const Vector<Float> v{Float{1.0}, Float{-2.0}, Float{0.5, 1.0}};
        for (const auto& seq : {kFactorial, kMl2, kQfac2}) {
            const Float z{0.6, -0.3};
            const auto via = eval_via_jordan(dec, z, seq);
            const auto y = solve(to_float(a), v, seq)(z);
            EXPECT_LE(max_abs_diff(via.value * v, y.value), 1e-10);
        }
    }
}

TEST(ResidualCheck, ExactFactorialIsZero)
{
    std::mt19937 rng(53);
    const auto a = testing::random_exact(rng, 3, 4, true);
    const Vector<Exact> v{Exact{1}, q(-2, 5), Exact{0, 3}};
    EXPECT_EQ(residual_check(solve(a, v, kFactorial, {}, 41), 40), 0.0);
}

TEST(ResidualCheck, FloatMittagLefflerRoundoff)
{
    const auto a = to_float(testing::example1());
    const auto sol = solve(a, Vector<Float>{Float{1.0}, Float{1.0}, Float{1.0}}, kMl2, {}, 31);
    EXPECT_LE(residual_check(sol, 30), 1e-12);
}

TEST(ResidualCheck, RandomExactQFactorialThree)
{
    std::mt19937 rng(54);
    const auto qfac3 = MomentSequence::q_factorial(mpq_class(3));
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = testing::random_exact(rng, 4, 2, true);
        const Vector<Exact> v{Exact{1}, Exact{-1}, q(1, 2), Exact{0, 1}};
        EXPECT_EQ(residual_check(solve(a, v, qfac3, {}, 61), 60), 0.0);
    }
}

TEST(ResidualCheck, OrderMustFitSeries)
{
    const auto sol = solve(testing::example1(), e1(), kFactorial, {}, 10);
    EXPECT_NO_THROW(residual_check(sol, 9));
    EXPECT_THROW(residual_check(sol, 10), InputError);
}

TEST(FundamentalMatrix, IdentityInitialIsExponential)
{
    const auto a = to_float(testing::example2());
    const auto x = fundamental_matrix(a, FloatMatrix::identity(3), kMl2);
    const Float z{0.4, 0.1};
    EXPECT_LE(max_abs_diff(x(z).value, eval_exp(a, z, kMl2).value), 1e-15);
}

TEST(FundamentalMatrix, InitialValueAndColumns)
{
    std::mt19937 rng(55);
    const auto a = testing::example1();
    const auto x0 = testing::random_invertible_exact(rng, 3);
    const auto x = fundamental_matrix(a, x0, kFactorial);
    EXPECT_EQ(x(Exact{}).value, x0);
    for (std::size_t j = 0; j < 3; ++j) {
        const auto col = x.column(j, 31);
        EXPECT_EQ(col.initial(), x0.column(j));
        EXPECT_EQ(residual_check(col, 30), 0.0);
    }
    const auto xf = fundamental_matrix(to_float(a), to_float(x0), kFactorial);
    for (std::size_t j = 0; j < 3; ++j) EXPECT_LE(residual_check(xf.column(j, 31), 30), 1e-12);
}

TEST(FundamentalMatrix, SingularInitialThrows)
{
    const auto x0 = testing::exact_from_ints({{1, 0, 0}, {2, 0, 1}, {3, 0, 1}});
    EXPECT_THROW(fundamental_matrix(testing::example1(), x0, kFactorial), SingularMatrix);
    EXPECT_THROW(fundamental_matrix(to_float(testing::example1()), to_float(x0), kFactorial), SingularMatrix);
}

TEST(RecoverExponential, IdentityInitial)
{
    const auto a = testing::example1();
    const auto x = fundamental_matrix(a, ExactMatrix::identity(3), kQfac2);
    EXPECT_EQ(recover_exponential(x, ExactMatrix::identity(3), q(1, 2)).value, eval_exp(a, q(1, 2), kQfac2).value);
}

TEST(RecoverExponential, Example1MittagLeffler)
{
    const auto a = to_float(testing::example1());
    const auto x0 = to_float(testing::exact_from_ints({{2, 0, 0}, {0, 1, 1}, {1, 0, 1}}));
    const auto x = fundamental_matrix(a, x0, kMl2);
    const auto rec = recover_exponential(x, x0, Float{0.5});
    EXPECT_LE(max_abs_diff(rec.value, eval_exp(a, Float{0.5}, kMl2).value), 1e-10);
}

TEST(RecoverExponential, Example2WithKnownP)
{
    const auto a = to_float(testing::example2());
    const auto x0 = to_float(testing::example2_p());
    const auto rec = recover_exponential(fundamental_matrix(a, x0, kQfac2), x0, Float{0.4});
    EXPECT_LE(max_abs_diff(rec.value, eval_exp(a, Float{0.4}, kQfac2).value), 1e-10);
}

TEST(RecoverExponential, IndependentOfInitialMatrix)
{
    std::mt19937 rng(56);
    const auto a = to_float(testing::example1());
    const auto x1 = to_float(testing::random_invertible_exact(rng, 3));
    const auto x2 = to_float(testing::random_invertible_exact(rng, 3));
    const Float z{0.8, 0.3};
    const auto r1 = recover_exponential(fundamental_matrix(a, x1, kQfac2), x1, z);
    const auto r2 = recover_exponential(fundamental_matrix(a, x2, kQfac2), x2, z);
    EXPECT_LE(max_abs_diff(r1.value, r2.value), 1e-10);
}

TEST(QDerivativeResidual, ScalarEigenfunction)
{
    const auto sol = solve(FloatMatrix{{Float{1.0}}}, Vector<Float>{Float{1.0}}, kQfac2);
    EXPECT_LE(q_derivative_residual(sol, 2.0, {Float{0.3}}), 1e-10);
}

TEST(QDerivativeResidual, QExample)
{
    const auto sol = solve(to_float(testing::example2()), to_float(e1()), kQfac2);
    EXPECT_LE(q_derivative_residual(sol, 2.0, {Float{0.1}, Float{0.25}, Float{0.0, 0.5}}), 1e-8);
}

TEST(QDerivativeResidual, ZeroMatrix)
{
    const auto sol = solve(FloatMatrix(2), Vector<Float>{Float{1.0}, Float{-1.0}}, kQfac2);
    EXPECT_LE(q_derivative_residual(sol, 2.0, {Float{0.2}, Float{1.0, 1.0}}), 1e-15);
}

TEST(QDerivativeResidual, Preconditions)
{
    const auto wrong = solve(to_float(testing::example2()), to_float(e1()), kFactorial);
    EXPECT_THROW(q_derivative_residual(wrong, 2.0, {Float{0.1}}), SequenceMismatch);
    const auto sol = solve(to_float(testing::example2()), to_float(e1()), kQfac2);
    EXPECT_THROW(q_derivative_residual(sol, 3.0, {Float{0.1}}), SequenceMismatch);
    EXPECT_THROW(q_derivative_residual(sol, 2.0, {Float{0.1}, Float{}}), InputError);
}

TEST(QDerivativeResidual, DetectsWrongOperator)
{
    // The classical derivative residual of exp_q is not small: D_q differs from d/dz.
    const auto sol = solve(FloatMatrix{{Float{1.0}}}, Vector<Float>{Float{1.0}}, kQfac2);
    const Float z{0.5};
    const double h = 1e-6;
    const Float dy = (sol(z + h).value[0] - sol(z - h).value[0]) / (2.0 * h);
    EXPECT_GT(std::abs(dy - sol(z).value[0]), 1e-3);
}

} // namespace
} // namespace momexp
