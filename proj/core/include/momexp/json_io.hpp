#pragma once

#include <string>
#include <string_view>
#include <variant>

#include <nlohmann/json.hpp>

#include "momexp/jordan.hpp"
#include "momexp/matrix.hpp"
#include "momexp/series.hpp"

namespace momexp {

// Matrix JSON: {"n": int, "entries": [[[re, im], ...], ...]}. Parts that are
// "p/q" strings select the exact backend, JSON numbers the float backend;
// one matrix never mixes the two.

using AnyMatrix = std::variant<ExactMatrix, FloatMatrix>;
using AnyVector = std::variant<Vector<Exact>, Vector<Float>>;
using AnyScalar = std::variant<Exact, Float>;
using AnyDecomposition = std::variant<JordanDecomposition<Exact>, JordanDecomposition<Float>>;

nlohmann::json to_json(const Exact& z);
nlohmann::json to_json(const Float& z);
nlohmann::json to_json(const ExactMatrix& m);
nlohmann::json to_json(const FloatMatrix& m);
nlohmann::json to_json(const Vector<Exact>& v);
nlohmann::json to_json(const Vector<Float>& v);

template <class C>
nlohmann::json to_json(const MomentSeries<C>& s)
{
    nlohmann::json coeffs = nlohmann::json::array();
    for (const auto& c : s.coeffs()) coeffs.push_back(to_json(c));
    return {{"sequence", s.sequence().specifier()}, {"coeffs", std::move(coeffs)}};
}

/// {"blocks": [[re, im, size], ...], "P": ..., "P_inv": ..., "residual": r}
template <Scalar S>
nlohmann::json to_json(const JordanDecomposition<S>& dec)
{
    nlohmann::json blocks = nlohmann::json::array();
    for (const auto& b : dec.blocks) {
        auto z = to_json(b.eigenvalue);
        z.push_back(b.size);
        blocks.push_back(std::move(z));
    }
    return {{"blocks", std::move(blocks)},
            {"P", to_json(dec.P)},
            {"P_inv", to_json(dec.P_inv)},
            {"residual", dec.residual}};
}

AnyScalar scalar_from_json(const nlohmann::json& j);
AnyMatrix matrix_from_json(const nlohmann::json& j);
/// [[re, im], ...]
AnyVector vector_from_json(const nlohmann::json& j);

/// Decomposition file: {"P": matrix, "blocks": [[re, im, size], ...]}, with
/// optional "P_inv" (computed when absent). Backends of P and blocks must agree.
AnyDecomposition decomposition_from_json(const nlohmann::json& j, const AnyMatrix& a);

/// {"sequence": "<specifier>", "coeffs": [matrix, ...]}
std::variant<MomentSeries<ExactMatrix>, MomentSeries<FloatMatrix>> series_from_json(const nlohmann::json& j);

/// "re,im" (or "re") from the command line. Rational parts give Exact,
/// decimal parts Float.
AnyScalar parse_complex(std::string_view text);

nlohmann::json read_json_file(const std::string& path);

FloatMatrix to_float(const AnyMatrix& m);

} // namespace momexp
