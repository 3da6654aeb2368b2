#include "momexp/moment.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>

#include <nlohmann/json.hpp>

#include "momexp/errors.hpp"

namespace momexp {

namespace {

// Below this index binary64 values of exact-capable sequences are taken from
// the exact cache; above it from logarithms, so huge exact values are never
// materialized by float evaluation.
constexpr std::size_t kExactFloatCutoff = 160;

double log_of(const mpq_class& q)
{
    long exp_num = 0;
    long exp_den = 0;
    const double num = mpz_get_d_2exp(&exp_num, q.get_num_mpz_t());
    const double den = mpz_get_d_2exp(&exp_den, q.get_den_mpz_t());
    return std::log(num) - std::log(den) + static_cast<double>(exp_num - exp_den) * std::log(2.0);
}

std::string format_double(double x)
{
    // Shortest representation that round-trips.
    std::string out;
    for (int prec = 1; prec <= 17; ++prec) {
        std::ostringstream t;
        t.precision(prec);
        t << x;
        out = t.str();
        if (std::stod(out) == x) break;
    }
    return out;
}

bool looks_rational(std::string_view s)
{
    if (s.empty()) return false;
    for (char c : s) {
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '-' || c == '+')) {
            return false;
        }
    }
    return true;
}

double parse_double(std::string_view s, std::string_view what)
{
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc{} || ptr != end || !std::isfinite(v)) {
        throw InputError("invalid " + std::string(what) + " parameter '" + std::string(s) + "'");
    }
    return v;
}

} // namespace

struct MomentSequence::State {
    MomentKind kind = MomentKind::factorial;
    std::string spec;
    bool exact = true;
    bool rapid = true;
    double param = 0.0;
    mpq_class exact_param{0};
    std::vector<mpq_class> table;

    mutable std::mutex mu;
    mutable std::vector<mpq_class> exact_cache{mpq_class(1)};
    // Exact q-numbers [p]_q, index p.
    mutable std::vector<mpq_class> qnum_cache{mpq_class(0)};
    mutable std::vector<double> log_cache{0.0};

    // m(p) / m(p-1), exact. Caller holds mu.
    mpq_class exact_factor(std::size_t p) const
    {
        switch (kind) {
        case MomentKind::factorial:
            return mpq_class(static_cast<unsigned long>(p));
        case MomentKind::geometric:
            return exact_param;
        case MomentKind::q_factorial:
            while (qnum_cache.size() <= p) {
                mpq_class next = 1 + exact_param * qnum_cache.back();
                next.canonicalize();
                qnum_cache.push_back(std::move(next));
            }
            return qnum_cache[p];
        default:
            throw BackendMismatch("sequence '" + spec + "' has no exact values");
        }
    }

    // log(m(p) / m(p-1)) in binary64.
    double log_factor(std::size_t p) const
    {
        const double dp = static_cast<double>(p);
        switch (kind) {
        case MomentKind::factorial:
            return std::log(dp);
        case MomentKind::geometric:
            return std::log(param);
        case MomentKind::q_factorial: {
            // log [p]_q = p log q + log(1 - q^-p) - log(q - 1)
            const double lq = std::log(param);
            return dp * lq + std::log1p(-std::exp(-dp * lq)) - std::log(param - 1.0);
        }
        case MomentKind::mittag_leffler:
            return std::lgamma(1.0 + dp / param) - std::lgamma(1.0 + (dp - 1.0) / param);
        case MomentKind::custom:
            return log_of(table.at(p)) - log_of(table.at(p - 1));
        }
        return 0.0;
    }

    void check_index(std::size_t p) const
    {
        if (kind == MomentKind::custom && p >= table.size()) {
            throw InvalidSequence("custom sequence '" + spec + "' has no value at index " +
                                  std::to_string(p) + " (table length " +
                                  std::to_string(table.size()) + ")");
        }
    }
};

MomentSequence::MomentSequence(std::shared_ptr<State> state) : state_(std::move(state)) {}

MomentSequence MomentSequence::factorial()
{
    auto s = std::make_shared<State>();
    s->kind = MomentKind::factorial;
    s->spec = "factorial";
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::mittag_leffler(double k)
{
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("Mittag-Leffler parameter k must be positive");
    auto s = std::make_shared<State>();
    s->kind = MomentKind::mittag_leffler;
    s->spec = "ml:" + format_double(k);
    s->exact = false;
    s->param = k;
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::q_factorial(const mpq_class& q)
{
    if (!(q > 1)) throw InputError("q-factorial parameter q must exceed 1");
    auto s = std::make_shared<State>();
    s->kind = MomentKind::q_factorial;
    s->spec = "qfac:" + format_rational(q);
    s->param = q.get_d();
    s->exact_param = q;
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::q_factorial(double q)
{
    if (!(q > 1.0) || !std::isfinite(q)) throw InputError("q-factorial parameter q must exceed 1");
    auto s = std::make_shared<State>();
    s->kind = MomentKind::q_factorial;
    s->spec = "qfac:" + format_double(q);
    s->exact = false;
    s->param = q;
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::geometric(const mpq_class& b)
{
    if (!(b > 0)) throw InputError("geometric parameter b must be positive");
    auto s = std::make_shared<State>();
    s->kind = MomentKind::geometric;
    s->spec = "geom:" + format_rational(b);
    s->rapid = false;
    s->param = b.get_d();
    s->exact_param = b;
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::geometric(double b)
{
    if (!(b > 0.0) || !std::isfinite(b)) throw InputError("geometric parameter b must be positive");
    auto s = std::make_shared<State>();
    s->kind = MomentKind::geometric;
    s->spec = "geom:" + format_double(b);
    s->exact = false;
    s->rapid = false;
    s->param = b;
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::custom(std::vector<mpq_class> values, bool rapid_growth_declared,
                                      std::string label)
{
    if (values.empty() || values.front() != 1) {
        throw InvalidSequence("custom sequence must start with m(0) = 1");
    }
    for (std::size_t p = 0; p < values.size(); ++p) {
        values[p].canonicalize();
        if (!(values[p] > 0)) {
            throw InvalidSequence("custom sequence value at index " + std::to_string(p) +
                                  " is not positive");
        }
    }
    auto s = std::make_shared<State>();
    s->kind = MomentKind::custom;
    s->spec = "custom:" + label;
    s->rapid = rapid_growth_declared;
    s->table = std::move(values);
    return MomentSequence(std::move(s));
}

MomentSequence MomentSequence::parse(std::string_view spec)
{
    if (spec == "factorial") return factorial();
    const auto colon = spec.find(':');
    if (colon == std::string_view::npos) {
        throw InputError("unknown moment specifier '" + std::string(spec) + "'");
    }
    const auto head = spec.substr(0, colon);
    const auto arg = spec.substr(colon + 1);
    if (arg.empty()) throw InputError("missing parameter in '" + std::string(spec) + "'");

    if (head == "ml") {
        if (looks_rational(arg)) return mittag_leffler(parse_rational(arg).get_d());
        return mittag_leffler(parse_double(arg, "Mittag-Leffler"));
    }
    if (head == "qfac") {
        if (looks_rational(arg)) return q_factorial(parse_rational(arg));
        return q_factorial(parse_double(arg, "q-factorial"));
    }
    if (head == "geom") {
        if (looks_rational(arg)) return geometric(parse_rational(arg));
        return geometric(parse_double(arg, "geometric"));
    }
    if (head == "custom") {
        const std::string path(arg);
        std::ifstream in(path);
        if (!in) throw InputError("cannot open custom sequence file '" + path + "'");
        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(in);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("custom sequence file '" + path + "': " + e.what());
        }
        bool rapid = false;
        const nlohmann::json* list = &doc;
        if (doc.is_object()) {
            if (!doc.contains("values")) throw InputError("custom sequence object needs \"values\"");
            list = &doc["values"];
            rapid = doc.value("rapid_growth_declared", false);
        }
        if (!list->is_array()) throw InputError("custom sequence must be a JSON list of \"p/q\" strings");
        std::vector<mpq_class> values;
        for (const auto& v : *list) {
            if (!v.is_string()) throw InputError("custom sequence entries must be \"p/q\" strings");
            values.push_back(parse_rational(v.get<std::string>()));
        }
        return custom(std::move(values), rapid, path);
    }
    throw InputError("unknown moment specifier '" + std::string(spec) + "'");
}

MomentKind MomentSequence::kind() const noexcept { return state_->kind; }
const std::string& MomentSequence::specifier() const noexcept { return state_->spec; }
bool MomentSequence::exact_capable() const noexcept { return state_->exact; }
bool MomentSequence::rapid_growth_declared() const noexcept { return state_->rapid; }
double MomentSequence::parameter() const noexcept { return state_->param; }

std::optional<std::size_t> MomentSequence::max_index() const noexcept
{
    if (state_->kind != MomentKind::custom) return std::nullopt;
    return state_->table.size() - 1;
}

mpq_class MomentSequence::exact_value(std::size_t p) const
{
    const State& s = *state_;
    if (!s.exact) throw BackendMismatch("sequence '" + s.spec + "' has no exact values");
    s.check_index(p);
    if (s.kind == MomentKind::custom) return s.table[p];
    std::lock_guard lock(s.mu);
    while (s.exact_cache.size() <= p) {
        const std::size_t next = s.exact_cache.size();
        mpq_class v = s.exact_cache.back() * s.exact_factor(next);
        v.canonicalize();
        s.exact_cache.push_back(std::move(v));
    }
    return s.exact_cache[p];
}

double MomentSequence::log_value(std::size_t p) const
{
    const State& s = *state_;
    s.check_index(p);
    switch (s.kind) {
    case MomentKind::factorial:
        return std::lgamma(static_cast<double>(p) + 1.0);
    case MomentKind::mittag_leffler:
        return std::lgamma(1.0 + static_cast<double>(p) / s.param);
    case MomentKind::geometric:
        return static_cast<double>(p) * std::log(s.param);
    case MomentKind::custom:
        return log_of(s.table[p]);
    case MomentKind::q_factorial:
        break;
    }
    std::lock_guard lock(s.mu);
    while (s.log_cache.size() <= p) {
        const std::size_t next = s.log_cache.size();
        s.log_cache.push_back(s.log_cache.back() + s.log_factor(next));
    }
    return s.log_cache[p];
}

double MomentSequence::value(std::size_t p) const
{
    const State& s = *state_;
    s.check_index(p);
    if (s.kind == MomentKind::mittag_leffler) {
        return std::tgamma(1.0 + static_cast<double>(p) / s.param);
    }
    if (s.exact && p < kExactFloatCutoff) return exact_value(p).get_d();
    const double lv = log_value(p);
    if (lv > std::log(std::numeric_limits<double>::max())) {
        return std::numeric_limits<double>::infinity();
    }
    return std::exp(lv);
}

double MomentSequence::ratio(std::size_t p) const
{
    const State& s = *state_;
    if (p == 0) throw InputError("moment ratio m(p-1)/m(p) needs p >= 1");
    s.check_index(p);
    switch (s.kind) {
    case MomentKind::factorial:
        return 1.0 / static_cast<double>(p);
    case MomentKind::geometric:
        return 1.0 / s.param;
    case MomentKind::custom:
        return mpq_class(s.table[p - 1] / s.table[p]).get_d();
    case MomentKind::q_factorial:
    case MomentKind::mittag_leffler:
        break;
    }
    return std::exp(-s.log_factor(p));
}

mpq_class MomentSequence::exact_weight(std::size_t p, std::size_t n) const
{
    if (n > p) throw InputError("Cauchy weight needs n <= p");
    mpq_class w = exact_value(p) / (exact_value(n) * exact_value(p - n));
    w.canonicalize();
    return w;
}

double MomentSequence::weight(std::size_t p, std::size_t n) const
{
    if (n > p) throw InputError("Cauchy weight needs n <= p");
    if (state_->exact && p < kExactFloatCutoff) return exact_weight(p, n).get_d();
    return std::exp(log_value(p) - log_value(n) - log_value(p - n));
}

bool operator==(const MomentSequence& a, const MomentSequence& b)
{
    if (a.state_ == b.state_) return true;
    if (a.state_->kind != b.state_->kind || a.state_->spec != b.state_->spec) return false;
    if (a.state_->exact != b.state_->exact) return false;
    return a.state_->table == b.state_->table;
}

GrowthReport growth_probe(const MomentSequence& seq, std::size_t probe_length)
{
    if (probe_length < 8) throw InputError("growth probe needs at least 8 points");
    GrowthReport r;
    r.probe_length = probe_length;
    r.rapid_growth_declared = seq.rapid_growth_declared();
    r.roots.reserve(probe_length);
    for (std::size_t p = 1; p <= probe_length; ++p) {
        r.roots.push_back(std::exp(seq.log_value(p) / static_cast<double>(p)));
    }
    const std::size_t window = probe_length / 4;
    const double first = r.roots[probe_length - 1 - window];
    const double last = r.roots.back();
    r.min_root = last;
    for (std::size_t i = probe_length - 1 - window; i < probe_length; ++i) {
        r.min_root = std::min(r.min_root, r.roots[i]);
    }
    const double rel = (last - first) / first;
    if (rel >= 0.01) {
        r.trend = "increasing";
    } else if (rel <= -0.01) {
        r.trend = "decreasing";
    } else {
        r.trend = "plateau";
    }
    r.finite_radius_suspected = rel < 0.01;
    return r;
}

} // namespace momexp
