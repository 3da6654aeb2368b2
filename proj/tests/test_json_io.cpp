#include <gtest/gtest.h>

#include <random>

#include "momexp/errors.hpp"
#include "momexp/json_io.hpp"
#include "test_support.hpp"

namespace momexp {
namespace {

using nlohmann::json;
using testing::q;

TEST(JsonScalar, ExactRoundTrip)
{
    const Exact z{mpq_class(-6, 4), mpq_class(7, 3)};
    const auto j = to_json(z);
    EXPECT_EQ(j, json::parse(R"(["-3/2", "7/3"])"));
    EXPECT_EQ(std::get<Exact>(scalar_from_json(j)), z);
}

TEST(JsonScalar, FloatRoundTripIsBitExact)
{
    const Float z{0.1, -1.0 / 3.0};
    const auto back = std::get<Float>(scalar_from_json(json::parse(to_json(z).dump())));
    EXPECT_EQ(back, z);
}

TEST(JsonScalar, RejectsMixedAndMalformed)
{
    EXPECT_THROW(scalar_from_json(json::parse(R"(["1", 0.5])")), BackendMismatch);
    EXPECT_THROW(scalar_from_json(json::parse(R"([1])")), InputError);
    EXPECT_THROW(scalar_from_json(json::parse(R"(["x", "0"])")), InputError);
    EXPECT_THROW(scalar_from_json(json::parse(R"([true, 0])")), InputError);
}

TEST(JsonMatrix, ExactRoundTripRandom)
{
    std::mt19937 rng(61);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = testing::random_exact(rng, 1 + trial % 4, 5, true);
        const auto back = matrix_from_json(json::parse(to_json(a).dump()));
        ASSERT_TRUE(std::holds_alternative<ExactMatrix>(back));
        EXPECT_EQ(std::get<ExactMatrix>(back), a);
    }
}

TEST(JsonMatrix, FloatRoundTripRandom)
{
    std::mt19937 rng(62);
    for (int trial = 0; trial < 20; ++trial) {
        const auto a = testing::random_float(rng, 1 + trial % 4, 3.7);
        const auto back = matrix_from_json(json::parse(to_json(a).dump()));
        ASSERT_TRUE(std::holds_alternative<FloatMatrix>(back));
        EXPECT_EQ(std::get<FloatMatrix>(back), a);
    }
}

TEST(JsonMatrix, FixtureFiles)
{
    EXPECT_EQ(std::get<ExactMatrix>(matrix_from_json(read_json_file(testing::data_path("example1.json")))),
              testing::example1());
    EXPECT_EQ(std::get<FloatMatrix>(matrix_from_json(read_json_file(testing::data_path("example1_float.json")))),
              to_float(testing::example1()));
    EXPECT_THROW(matrix_from_json(read_json_file(testing::data_path("mixed_backend.json"))), BackendMismatch);
}

TEST(JsonMatrix, StructuralErrors)
{
    EXPECT_THROW(matrix_from_json(json::parse(R"({"entries": []})")), InputError);
    EXPECT_THROW(matrix_from_json(json::parse(R"({"n": 0, "entries": []})")), InputError);
    EXPECT_THROW(matrix_from_json(json::parse(R"({"n": 2, "entries": [[["1","0"],["0","0"]]]})")),
                 DimensionMismatch);
    EXPECT_THROW(matrix_from_json(json::parse(R"({"n": 1, "entries": [[["1","0"],["0","0"]]]})")),
                 DimensionMismatch);
    EXPECT_THROW(matrix_from_json(json::parse(R"({"n": 2, "entries": [[["1","0"],["0","0"]],[[1,0],[0,0]]]})")),
                 BackendMismatch);
    EXPECT_THROW(read_json_file("/nonexistent/matrix.json"), InputError);
}

TEST(JsonVector, RoundTrip)
{
    const Vector<Exact> v{q(1, 2), Exact{0, -3}};
    EXPECT_EQ(std::get<Vector<Exact>>(vector_from_json(to_json(v))), v);
    const Vector<Float> w{Float{0.25, 1.0}};
    EXPECT_EQ(std::get<Vector<Float>>(vector_from_json(to_json(w))), w);
    EXPECT_THROW(vector_from_json(json::array()), InputError);
    EXPECT_THROW(vector_from_json(json::parse(R"([["1","0"],[1,0]])")), BackendMismatch);
}

TEST(ParseComplex, ExactAndFloatForms)
{
    EXPECT_EQ(std::get<Exact>(parse_complex("1/2,-3")), (Exact{mpq_class(1, 2), mpq_class(-3)}));
    EXPECT_EQ(std::get<Exact>(parse_complex("2")), Exact{2});
    EXPECT_EQ(std::get<Float>(parse_complex("0.2,0.1")), (Float{0.2, 0.1}));
    EXPECT_EQ(std::get<Float>(parse_complex("1e-3")), Float{1e-3});
    EXPECT_THROW(parse_complex(""), InputError);
    EXPECT_THROW(parse_complex("1,"), InputError);
    EXPECT_THROW(parse_complex("a,b"), InputError);
}

TEST(JsonDecomposition, ExactFixture)
{
    const AnyMatrix a = testing::example2();
    const auto dec = decomposition_from_json(read_json_file(testing::data_path("example2_decomposition.json")), a);
    const auto& d = std::get<JordanDecomposition<Exact>>(dec);
    ASSERT_EQ(d.blocks.size(), 1u);
    EXPECT_EQ(d.blocks[0].eigenvalue, Exact{1});
    EXPECT_EQ(d.blocks[0].size, 3u);
    EXPECT_EQ(d.P, testing::example2_p());
    EXPECT_EQ(d.P * d.P_inv, ExactMatrix::identity(3));
}

TEST(JsonDecomposition, RoundTripThroughEmitter)
{
    const auto dec = jordan_decompose(testing::example1());
    const AnyMatrix a = testing::example1();
    const auto back = std::get<JordanDecomposition<Exact>>(decomposition_from_json(to_json(dec), a));
    EXPECT_EQ(back.P, dec.P);
    EXPECT_EQ(back.P_inv, dec.P_inv);
    ASSERT_EQ(back.blocks.size(), dec.blocks.size());
    for (std::size_t i = 0; i < dec.blocks.size(); ++i) {
        EXPECT_EQ(back.blocks[i].eigenvalue, dec.blocks[i].eigenvalue);
        EXPECT_EQ(back.blocks[i].size, dec.blocks[i].size);
    }
}

TEST(JsonDecomposition, Errors)
{
    const AnyMatrix exact = testing::example1();
    EXPECT_THROW(
        decomposition_from_json(read_json_file(testing::data_path("example1_decomposition_perturbed.json")), exact),
        BackendMismatch);
    EXPECT_THROW(decomposition_from_json(json::parse(R"({"blocks": []})"), exact), InputError);
    const AnyMatrix flt = to_float(testing::example1());
    EXPECT_THROW(decomposition_from_json(read_json_file(testing::data_path("singular_decomposition.json")), flt),
                 SingularMatrix);
    auto bad = read_json_file(testing::data_path("example2_decomposition.json"));
    bad["blocks"][0][2] = 0;
    EXPECT_THROW(decomposition_from_json(bad, AnyMatrix{testing::example2()}), InputError);
}

TEST(JsonSeries, RoundTrip)
{
    const auto s = exp_series(testing::example1(), MomentSequence::q_factorial(mpq_class(2)), 6);
    const auto back = std::get<MomentSeries<ExactMatrix>>(series_from_json(to_json(s)));
    EXPECT_EQ(back.sequence(), s.sequence());
    EXPECT_EQ(back.coeffs(), s.coeffs());
    EXPECT_THROW(series_from_json(json::parse(R"({"sequence": "factorial", "coeffs": []})")), InputError);
}

} // namespace
} // namespace momexp
