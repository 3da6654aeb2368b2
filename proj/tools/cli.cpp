#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <sstream>
#include <variant>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "momexp/errors.hpp"
#include "momexp/expm.hpp"
#include "momexp/jordan.hpp"
#include "momexp/json_io.hpp"
#include "momexp/moment.hpp"
#include "momexp/series.hpp"
#include "momexp/solver.hpp"

namespace momexp::cli {

namespace {

using nlohmann::json;

constexpr const char* kVersion = "momexp 0.3.0";

struct Outcome {
    json doc;
    bool numeric_failure = false;
};

struct PolicyFlags {
    double tol = TruncationPolicy{}.tol;
    std::size_t max_terms = TruncationPolicy{}.max_terms;
    std::size_t settle = TruncationPolicy{}.settle_count;

    TruncationPolicy policy() const
    {
        TruncationPolicy p;
        p.tol = tol;
        p.max_terms = max_terms;
        p.settle_count = settle;
        p.validate();
        return p;
    }
};

void add_policy_flags(CLI::App* cmd, PolicyFlags& f)
{
    cmd->add_option("--tol", f.tol, "absolute tail tolerance")->capture_default_str();
    cmd->add_option("--max-terms", f.max_terms, "maximum number of series terms")->capture_default_str();
    cmd->add_option("--settle", f.settle, "consecutive small terms before stopping")->capture_default_str();
}

// Picks the exact backend when requested, or in "auto" mode when every input permits it.
bool use_exact(const std::string& backend, const AnyMatrix& a, const MomentSequence* seq, bool z_exact)
{
    const bool matrix_exact = std::holds_alternative<ExactMatrix>(a);
    if (backend == "exact") {
        if (!matrix_exact) throw BackendMismatch("--backend exact needs \"p/q\" matrix entries");
        if (seq && !seq->exact_capable()) {
            throw BackendMismatch("sequence '" + seq->specifier() + "' has no exact values");
        }
        if (!z_exact) throw BackendMismatch("--backend exact needs rational z");
        return true;
    }
    if (backend == "float") return false;
    return matrix_exact && (!seq || seq->exact_capable()) && z_exact;
}

Float as_float(const AnyScalar& z)
{
    if (const auto* e = std::get_if<Exact>(&z)) return to_float(*e);
    return std::get<Float>(z);
}

template <class V>
json report_json(const EvalReport<V>& r)
{
    json j;
    j["value"] = to_json(r.value);
    j["terms_used"] = r.terms_used;
    j["tail_estimate"] = std::isfinite(r.tail_estimate) ? json(r.tail_estimate) : json(nullptr);
    j["status"] = std::string(to_string(r.status));
    return j;
}

std::string backend_name(bool exact) { return exact ? "exact" : "float"; }

// Jordan decomposition in the requested backend; exact falls back to float
// (with a warning) when the eigenvalues are not Gaussian rationals.
AnyDecomposition decompose(const AnyMatrix& a, bool exact, const JordanTolerances& tol, std::ostream& err,
                           bool exact_required)
{
    if (exact) {
        try {
            return jordan_decompose(std::get<ExactMatrix>(a), tol);
        } catch (const ChainConstructionFailed& e) {
            if (exact_required) throw;
            err << "warning: " << e.what() << "; falling back to the float backend\n";
        }
    }
    return jordan_decompose(to_float(a), tol);
}

Outcome cmd_eval(const std::string& backend, const std::string& matrix_path, const std::string& z_text,
                 const std::string& moment, const PolicyFlags& flags, const std::string& path,
                 const JordanTolerances& jtol, std::ostream& err)
{
    const AnyMatrix a = matrix_from_json(read_json_file(matrix_path));
    const auto seq = MomentSequence::parse(moment);
    const AnyScalar z = parse_complex(z_text);
    const auto policy = flags.policy();
    const bool exact = use_exact(backend, a, &seq, std::holds_alternative<Exact>(z));

    Outcome out;
    out.doc["sequence"] = seq.specifier();
    out.doc["path"] = path;

    std::optional<FloatMatrix> series_value;
    if (path == "series" || path == "both") {
        out.doc["backend"] = backend_name(exact);
        if (exact) {
            const auto r = eval_exp(std::get<ExactMatrix>(a), std::get<Exact>(z), seq, policy);
            out.doc.update(report_json(r));
            out.numeric_failure = !r.converged();
            series_value = to_float(r.value);
        } else {
            const auto r = eval_exp(to_float(a), as_float(z), seq, policy);
            out.doc.update(report_json(r));
            out.numeric_failure = !r.converged();
            series_value = r.value;
        }
    }
    if (path == "jordan" || path == "both") {
        const auto dec = decompose(a, exact, jtol, err, false);
        const auto r = std::visit([&](const auto& d) { return eval_via_jordan(d, as_float(z), seq, policy); }, dec);
        json j = report_json(r);
        j["backend"] = "float";
        j["decomposition_residual"] = std::visit([](const auto& d) { return d.residual; }, dec);
        if (path == "jordan") {
            out.doc.update(j);
            out.numeric_failure = !r.converged();
        } else {
            out.doc["jordan"] = j;
            out.doc["discrepancy"] = row_sum_norm(FloatMatrix(*series_value - r.value));
            out.numeric_failure = out.numeric_failure || !r.converged();
        }
    }
    return out;
}

Outcome cmd_solve(const std::string& backend, const std::string& matrix_path, const std::string& moment,
                  const std::string& v0_text, const std::vector<std::string>& zs, const std::string& check,
                  std::size_t order, const PolicyFlags& flags)
{
    const AnyMatrix a = matrix_from_json(read_json_file(matrix_path));
    const auto seq = MomentSequence::parse(moment);
    json v0_json;
    try {
        v0_json = json::parse(v0_text);
    } catch (const json::exception& e) {
        throw InputError(std::string("--v0: ") + e.what());
    }
    const AnyVector v0 = vector_from_json(v0_json);
    std::vector<AnyScalar> points;
    bool all_exact = std::holds_alternative<Vector<Exact>>(v0);
    for (const auto& t : zs) {
        points.push_back(parse_complex(t));
        all_exact = all_exact && std::holds_alternative<Exact>(points.back());
    }
    const auto policy = flags.policy();
    if (backend == "exact" && !std::holds_alternative<Vector<Exact>>(v0)) {
        throw BackendMismatch("--backend exact needs \"p/q\" entries in --v0");
    }
    const bool exact = use_exact(backend, a, &seq, all_exact);

    Outcome out;
    out.doc["sequence"] = seq.specifier();
    out.doc["backend"] = backend_name(exact);
    json solutions = json::array();

    auto run_with = [&](const auto& sol, auto convert_z) {
        for (std::size_t i = 0; i < points.size(); ++i) {
            const auto r = sol(convert_z(points[i]));
            json s;
            s["z"] = to_json(convert_z(points[i]));
            s["y"] = to_json(r.value);
            s["status"] = std::string(to_string(r.status));
            s["terms_used"] = r.terms_used;
            s["tail_estimate"] = std::isfinite(r.tail_estimate) ? json(r.tail_estimate) : json(nullptr);
            out.numeric_failure = out.numeric_failure || !r.converged();
            solutions.push_back(std::move(s));
        }
        if (check == "residual") {
            const std::size_t n = order - 1;
            out.doc["residual"] = {{"kind", "coefficient"}, {"order", n}, {"max", residual_check(sol, n)}};
        }
    };

    if (exact) {
        const auto sol = solve(std::get<ExactMatrix>(a), std::get<Vector<Exact>>(v0), seq, policy, order);
        run_with(sol, [](const AnyScalar& z) { return std::get<Exact>(z); });
        if (check == "qres") throw BackendMismatch("--check qres needs the float backend");
    } else {
        const Vector<Float> v = std::visit([](const auto& x) { return Vector<Float>(to_float(x)); }, v0);
        const auto sol = solve(to_float(a), v, seq, policy, order);
        run_with(sol, as_float);
        if (check == "qres") {
            if (seq.kind() != MomentKind::q_factorial) {
                throw SequenceMismatch("--check qres needs a qfac:q sequence");
            }
            std::vector<Float> fz;
            for (const auto& p : points) fz.push_back(as_float(p));
            if (fz.empty()) throw InputError("--check qres needs at least one --z");
            out.doc["residual"] = {{"kind", "q_derivative"},
                                   {"q", seq.parameter()},
                                   {"max", q_derivative_residual(sol, seq.parameter(), fz)}};
        }
    }
    out.doc["solutions"] = std::move(solutions);
    return out;
}

Outcome cmd_jordan(const std::string& backend, const std::string& matrix_path, const JordanTolerances& jtol,
                   std::ostream& err)
{
    const AnyMatrix a = matrix_from_json(read_json_file(matrix_path));
    const bool exact = use_exact(backend, a, nullptr, true);
    const auto dec = decompose(a, exact, jtol, err, backend == "exact");
    Outcome out;
    out.doc = std::visit([](const auto& d) { return to_json(d); }, dec);
    out.doc["backend"] = backend_name(std::holds_alternative<JordanDecomposition<Exact>>(dec));
    return out;
}

Outcome cmd_verify(const std::string& backend, const std::string& matrix_path, const std::string& dec_path,
                   double tol)
{
    AnyMatrix a = matrix_from_json(read_json_file(matrix_path));
    if (backend == "float") a = to_float(a);
    if (backend == "exact" && !std::holds_alternative<ExactMatrix>(a)) {
        throw BackendMismatch("--backend exact needs \"p/q\" matrix entries");
    }
    const auto dec = decomposition_from_json(read_json_file(dec_path), a);
    const VerifyResult r = std::visit(
        [&](const auto& d) {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, JordanDecomposition<Exact>>) {
                return verify_decomposition(std::get<ExactMatrix>(a), d, tol);
            } else {
                return verify_decomposition(std::get<FloatMatrix>(a), d, tol);
            }
        },
        dec);
    Outcome out;
    out.doc = {{"residual", r.residual},
               {"inverse_residual", r.inverse_residual},
               {"ok", r.ok},
               {"backend", backend_name(std::holds_alternative<ExactMatrix>(a))}};
    return out;
}

template <class Fn>
json with_series_backend(const std::string& backend, const AnyMatrix& a, const MomentSequence& seq, Fn&& fn)
{
    if (use_exact(backend, a, &seq, true)) return fn(std::get<ExactMatrix>(a));
    return fn(to_float(a));
}

Outcome cmd_series(const std::string& backend, const std::string& op, const std::string& matrix_path,
                   const std::string& moment, std::size_t order, const std::string& input,
                   const std::string& lhs, const std::string& rhs)
{
    Outcome out;
    if (op == "exp" || op == "inverse") {
        const AnyMatrix a = matrix_from_json(read_json_file(matrix_path));
        const auto seq = MomentSequence::parse(moment);
        out.doc = with_series_backend(backend, a, seq, [&](const auto& m) {
            return op == "exp" ? to_json(exp_series(m, seq, order)) : to_json(inverse_series(m, seq, order));
        });
    } else if (op == "phi") {
        const auto seq = MomentSequence::parse(moment);
        const bool exact = backend == "exact" || (backend == "auto" && seq.exact_capable());
        json phi = json::array();
        if (exact) {
            for (const auto& x : phi_coefficients<Exact>(seq, order)) phi.push_back(to_json(x));
        } else {
            for (const auto& x : phi_coefficients<Float>(seq, order)) phi.push_back(to_json(x));
        }
        out.doc = {{"sequence", seq.specifier()}, {"phi", std::move(phi)}};
    } else if (op == "derivative") {
        const auto s = series_from_json(read_json_file(input));
        out.doc = std::visit([](const auto& x) { return to_json(moment_derivative(x)); }, s);
    } else if (op == "product") {
        const auto s1 = series_from_json(read_json_file(lhs));
        const auto s2 = series_from_json(read_json_file(rhs));
        if (s1.index() != s2.index()) throw BackendMismatch("series operands use different backends");
        if (s1.index() == 0) {
            out.doc = to_json(cauchy_product(std::get<0>(s1), std::get<0>(s2)));
        } else {
            out.doc = to_json(cauchy_product(std::get<1>(s1), std::get<1>(s2)));
        }
    } else {
        throw InputError("unknown series operation '" + op + "'");
    }
    return out;
}

Outcome cmd_probe(const std::string& moment, std::size_t points)
{
    const auto seq = MomentSequence::parse(moment);
    const auto r = growth_probe(seq, points);
    Outcome out;
    out.doc = {{"sequence", seq.specifier()},
               {"probe_length", r.probe_length},
               {"min_root", r.min_root},
               {"trend", r.trend},
               {"finite_radius_suspected", r.finite_radius_suspected},
               {"rapid_growth_declared", r.rapid_growth_declared},
               {"roots", r.roots}};
    return out;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Generalized moment matrix exponentials and linear moment differential systems", "momexp"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string backend = "auto";
    app.add_option("--backend", backend, "scalar backend: auto, exact or float")
        ->check(CLI::IsMember({"auto", "exact", "float"}))
        ->capture_default_str();
    bool version = false;
    app.add_flag("--version", version, "print the version string and exit");

    JordanTolerances jtol;
    PolicyFlags flags;

    auto* eval = app.add_subcommand("eval", "evaluate E_m(Az)");
    std::string matrix_path;
    std::string z_text = "1,0";
    std::string moment = "factorial";
    std::string path = "series";
    eval->add_option("--matrix", matrix_path, "matrix JSON file")->required();
    eval->add_option("--z", z_text, "complex argument \"re,im\"")->capture_default_str();
    eval->add_option("--moment", moment, "moment sequence specifier")->capture_default_str();
    eval->add_option("--path", path, "series, jordan or both")
        ->check(CLI::IsMember({"series", "jordan", "both"}))
        ->capture_default_str();
    eval->add_option("--rank-tol", jtol.rank_tol, "Jordan rank tolerance")->capture_default_str();
    eval->add_option("--eig-tol", jtol.eig_tol, "eigenvalue clustering tolerance")->capture_default_str();
    add_policy_flags(eval, flags);

    auto* solve_cmd = app.add_subcommand("solve", "solve d_m y = A y with y(0) = v0");
    std::string v0_text;
    std::vector<std::string> zs;
    std::string check = "none";
    std::size_t order = kDefaultSolutionOrder;
    solve_cmd->add_option("--matrix", matrix_path, "matrix JSON file")->required();
    solve_cmd->add_option("--moment", moment, "moment sequence specifier")->capture_default_str();
    solve_cmd->add_option("--v0", v0_text, "initial vector [[re,im],...]")->required();
    solve_cmd->add_option("--z", zs, "evaluation point \"re,im\" (repeatable)");
    solve_cmd->add_option("--check", check, "residual, qres or none")
        ->check(CLI::IsMember({"residual", "qres", "none"}))
        ->capture_default_str();
    solve_cmd->add_option("--order", order, "moment-basis order of the solution series")
        ->check(CLI::Range(std::size_t{2}, std::size_t{100000}))
        ->capture_default_str();
    add_policy_flags(solve_cmd, flags);

    auto* jordan_cmd = app.add_subcommand("jordan", "Jordan decomposition A = P J P^-1");
    jordan_cmd->add_option("--matrix", matrix_path, "matrix JSON file")->required();
    jordan_cmd->add_option("--tol", jtol.rank_tol, "rank tolerance")->capture_default_str();
    jordan_cmd->add_option("--eig-tol", jtol.eig_tol, "eigenvalue clustering tolerance")->capture_default_str();

    auto* verify_cmd = app.add_subcommand("verify-jordan", "check a supplied decomposition");
    std::string dec_path;
    double verify_tol = 1e-8;
    verify_cmd->add_option("--matrix", matrix_path, "matrix JSON file")->required();
    verify_cmd->add_option("--decomposition", dec_path, "decomposition JSON file")->required();
    verify_cmd->add_option("--tol", verify_tol, "residual tolerance")->capture_default_str();

    auto* series_cmd = app.add_subcommand("series", "formal moment series operations");
    std::string op;
    std::size_t series_order = 10;
    std::string input;
    std::string lhs;
    std::string rhs;
    series_cmd->add_option("op", op, "exp, inverse, phi, derivative or product")
        ->required()
        ->check(CLI::IsMember({"exp", "inverse", "phi", "derivative", "product"}));
    series_cmd->add_option("--matrix", matrix_path, "matrix JSON file (exp, inverse)");
    series_cmd->add_option("--moment", moment, "moment sequence specifier")->capture_default_str();
    series_cmd->add_option("--order", series_order, "truncation order")->capture_default_str();
    series_cmd->add_option("--input", input, "series JSON file (derivative)");
    series_cmd->add_option("--lhs", lhs, "left series JSON file (product)");
    series_cmd->add_option("--rhs", rhs, "right series JSON file (product)");

    auto* probe_cmd = app.add_subcommand("probe", "growth diagnostics for a moment sequence");
    std::size_t points = 64;
    probe_cmd->add_option("--moment", moment, "moment sequence specifier")->capture_default_str();
    probe_cmd->add_option("--points", points, "probe length P >= 8")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        if (std::find(args.begin(), args.end(), "--version") != args.end()) {
            out << json{{"version", kVersion}}.dump(2) << "\n";
            return kExitOk;
        }
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitInput;
    }

    try {
        Outcome result;
        if (eval->parsed()) {
            result = cmd_eval(backend, matrix_path, z_text, moment, flags, path, jtol, err);
        } else if (solve_cmd->parsed()) {
            result = cmd_solve(backend, matrix_path, moment, v0_text, zs, check, order, flags);
        } else if (jordan_cmd->parsed()) {
            result = cmd_jordan(backend, matrix_path, jtol, err);
        } else if (verify_cmd->parsed()) {
            result = cmd_verify(backend, matrix_path, dec_path, verify_tol);
        } else if (series_cmd->parsed()) {
            result = cmd_series(backend, op, matrix_path, moment, series_order, input, lhs, rhs);
        } else {
            result = cmd_probe(moment, points);
        }
        out << result.doc.dump(2) << "\n";
        if (result.numeric_failure) {
            err << "error: evaluation did not converge (see \"status\")\n";
            return kExitNumeric;
        }
        return kExitOk;
    } catch (const InputError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

} // namespace momexp::cli
