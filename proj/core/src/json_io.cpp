#include "momexp/json_io.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>

#include "momexp/errors.hpp"

namespace momexp {

using nlohmann::json;

namespace {

enum class Backend { unset, exact, floating };

struct BackendTracker {
    Backend seen = Backend::unset;

    void see(Backend b)
    {
        if (seen == Backend::unset) {
            seen = b;
        } else if (seen != b) {
            throw BackendMismatch("mixed exact (\"p/q\") and float (number) entries");
        }
    }
};

Backend part_backend(const json& part)
{
    if (part.is_string()) return Backend::exact;
    if (part.is_number()) return Backend::floating;
    throw InputError("complex parts must be numbers or \"p/q\" strings, got " + part.dump());
}

const json& check_pair(const json& z)
{
    if (!z.is_array() || z.size() != 2) {
        throw InputError("expected a [re, im] pair, got " + z.dump());
    }
    return z;
}

Exact exact_from(const json& z)
{
    return Exact{parse_rational(z[0].get<std::string>()), parse_rational(z[1].get<std::string>())};
}

Float float_from(const json& z)
{
    const double re = z[0].get<double>();
    const double im = z[1].get<double>();
    if (!std::isfinite(re) || !std::isfinite(im)) throw InputError("non-finite matrix entry");
    return {re, im};
}

bool rational_text(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+')) {
            return false;
        }
    }
    return true;
}

std::string trim(std::string_view s)
{
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

double parse_double(const std::string& s)
{
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) {
        throw InputError("not a number: '" + s + "'");
    }
    return v;
}

} // namespace

json to_json(const Exact& z)
{
    return json::array({format_rational(z.real()), format_rational(z.imag())});
}

json to_json(const Float& z)
{
    return json::array({z.real(), z.imag()});
}

namespace {

template <Scalar S>
json matrix_to_json(const Matrix<S>& m)
{
    json rows = json::array();
    for (std::size_t i = 0; i < m.n(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.n(); ++j) row.push_back(to_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return {{"n", m.n()}, {"entries", std::move(rows)}};
}

template <Scalar S>
json vector_to_json(const Vector<S>& v)
{
    json out = json::array();
    for (const auto& x : v.data()) out.push_back(to_json(x));
    return out;
}

} // namespace

json to_json(const ExactMatrix& m) { return matrix_to_json(m); }
json to_json(const FloatMatrix& m) { return matrix_to_json(m); }
json to_json(const Vector<Exact>& v) { return vector_to_json(v); }
json to_json(const Vector<Float>& v) { return vector_to_json(v); }

AnyScalar scalar_from_json(const json& j)
{
    check_pair(j);
    BackendTracker t;
    t.see(part_backend(j[0]));
    t.see(part_backend(j[1]));
    if (t.seen == Backend::exact) return exact_from(j);
    return float_from(j);
}

AnyMatrix matrix_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("n") || !j.contains("entries")) {
        throw InputError("matrix JSON needs \"n\" and \"entries\"");
    }
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) {
        throw InputError("matrix \"n\" must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(j["n"].get<long long>());
    const json& rows = j["entries"];
    if (!rows.is_array() || rows.size() != n) {
        throw DimensionMismatch("matrix \"entries\" must have n = " + std::to_string(n) + " rows");
    }
    BackendTracker t;
    for (const auto& row : rows) {
        if (!row.is_array() || row.size() != n) {
            throw DimensionMismatch("every matrix row must have n = " + std::to_string(n) + " entries");
        }
        for (const auto& z : row) {
            check_pair(z);
            t.see(part_backend(z[0]));
            t.see(part_backend(z[1]));
        }
    }
    if (t.seen == Backend::exact) {
        std::vector<Exact> d;
        d.reserve(n * n);
        for (const auto& row : rows) {
            for (const auto& z : row) d.push_back(exact_from(z));
        }
        return ExactMatrix(n, std::move(d));
    }
    std::vector<Float> d;
    d.reserve(n * n);
    for (const auto& row : rows) {
        for (const auto& z : row) d.push_back(float_from(z));
    }
    return FloatMatrix(n, std::move(d));
}

AnyVector vector_from_json(const json& j)
{
    if (!j.is_array() || j.empty()) throw InputError("vector JSON must be a non-empty list of [re, im]");
    BackendTracker t;
    for (const auto& z : j) {
        check_pair(z);
        t.see(part_backend(z[0]));
        t.see(part_backend(z[1]));
    }
    if (t.seen == Backend::exact) {
        std::vector<Exact> d;
        for (const auto& z : j) d.push_back(exact_from(z));
        return Vector<Exact>(std::move(d));
    }
    std::vector<Float> d;
    for (const auto& z : j) d.push_back(float_from(z));
    return Vector<Float>(std::move(d));
}

namespace {

// Exact values may be converted (explicitly, lossily) into the float backend; never the reverse.
template <Scalar S>
Matrix<S> coerce(const AnyMatrix& m)
{
    if (const auto* same = std::get_if<Matrix<S>>(&m)) return *same;
    if constexpr (!is_exact_v<S>) {
        return to_float(std::get<ExactMatrix>(m));
    } else {
        throw BackendMismatch("an exact matrix needs exact decomposition entries");
    }
}

template <Scalar S>
S coerce(const AnyScalar& z)
{
    if (const auto* same = std::get_if<S>(&z)) return *same;
    if constexpr (!is_exact_v<S>) {
        return to_float(std::get<Exact>(z));
    } else {
        throw BackendMismatch("an exact matrix needs exact decomposition entries");
    }
}

template <Scalar S>
JordanDecomposition<S> decomposition_as(const json& j, const Matrix<S>& a)
{
    std::vector<JordanBlock<S>> blocks;
    for (const auto& b : j["blocks"]) {
        if (!b.is_array() || b.size() != 3 || !b[2].is_number_integer() || b[2].get<long long>() < 1) {
            throw InputError("Jordan blocks must be [re, im, size] with positive size");
        }
        const S lambda = coerce<S>(scalar_from_json(json::array({b[0], b[1]})));
        blocks.push_back({lambda, static_cast<std::size_t>(b[2].get<long long>())});
    }
    JordanDecomposition<S> dec = make_decomposition(a, coerce<S>(matrix_from_json(j["P"])), std::move(blocks));
    if (j.contains("P_inv")) dec.P_inv = coerce<S>(matrix_from_json(j["P_inv"]));
    return dec;
}

} // namespace

AnyDecomposition decomposition_from_json(const json& j, const AnyMatrix& a)
{
    if (!j.is_object() || !j.contains("P") || !j.contains("blocks") || !j["blocks"].is_array()) {
        throw InputError("decomposition JSON needs \"P\" and \"blocks\"");
    }
    if (const auto* e = std::get_if<ExactMatrix>(&a)) return decomposition_as(j, *e);
    return decomposition_as(j, std::get<FloatMatrix>(a));
}

std::variant<MomentSeries<ExactMatrix>, MomentSeries<FloatMatrix>> series_from_json(const json& j)
{
    if (!j.is_object() || !j.contains("sequence") || !j.contains("coeffs") || !j["coeffs"].is_array() ||
        j["coeffs"].empty()) {
        throw InputError("series JSON needs \"sequence\" and a non-empty \"coeffs\" list");
    }
    const auto seq = MomentSequence::parse(j["sequence"].get<std::string>());
    std::vector<AnyMatrix> coeffs;
    for (const auto& c : j["coeffs"]) coeffs.push_back(matrix_from_json(c));
    const auto backend = coeffs.front().index();
    for (const auto& c : coeffs) {
        if (c.index() != backend) throw BackendMismatch("series coefficients mix backends");
    }
    if (backend == 0) {
        std::vector<ExactMatrix> out;
        for (auto& c : coeffs) out.push_back(std::get<ExactMatrix>(std::move(c)));
        return MomentSeries<ExactMatrix>(seq, std::move(out));
    }
    std::vector<FloatMatrix> out;
    for (auto& c : coeffs) out.push_back(std::get<FloatMatrix>(std::move(c)));
    return MomentSeries<FloatMatrix>(seq, std::move(out));
}

AnyScalar parse_complex(std::string_view text)
{
    const auto comma = text.find(',');
    const std::string re = trim(text.substr(0, comma));
    const std::string im = comma == std::string_view::npos ? "0" : trim(text.substr(comma + 1));
    if (re.empty() || im.empty()) throw InputError("complex argument must be \"re,im\"");
    if (rational_text(re) && rational_text(im)) return Exact{parse_rational(re), parse_rational(im)};
    return Float{parse_double(re), parse_double(im)};
}

json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw InputError("'" + path + "': " + e.what());
    }
}

FloatMatrix to_float(const AnyMatrix& m)
{
    if (const auto* e = std::get_if<ExactMatrix>(&m)) return to_float(*e);
    return std::get<FloatMatrix>(m);
}

} // namespace momexp
