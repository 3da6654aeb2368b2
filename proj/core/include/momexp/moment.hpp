#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "momexp/scalar.hpp"

namespace momexp {

enum class MomentKind { factorial, mittag_leffler, q_factorial, geometric, custom };

/// A positive sequence m(0) = 1, m(1), m(2), ... weighting the series basis
/// z^p / m(p). Values are memoized; copies share one thread-safe cache.
///
/// Exact-capable sequences (factorial, q-factorial and geometric with a
/// rational parameter, custom tables) also yield exact rationals. The
/// Mittag-Leffler family m(p) = Gamma(1 + p/k) is float-only.
class MomentSequence {
public:
    static MomentSequence factorial();
    static MomentSequence mittag_leffler(double k);
    static MomentSequence q_factorial(const mpq_class& q);
    static MomentSequence q_factorial(double q);
    static MomentSequence geometric(const mpq_class& b);
    static MomentSequence geometric(double b);
    /// Finite table m(0..len-1). m(0) must be 1 and every value positive.
    static MomentSequence custom(std::vector<mpq_class> values, bool rapid_growth_declared,
                                 std::string label = "table");

    /// Parses "factorial", "ml:k", "qfac:q", "geom:b" or "custom:<path>".
    /// Rational parameters ("2", "3/2") give exact-capable sequences,
    /// decimal ones ("1.5") float-only sequences.
    static MomentSequence parse(std::string_view spec);

    MomentKind kind() const noexcept;
    /// Canonical specifier string; round-trips through parse() except for custom tables.
    const std::string& specifier() const noexcept;
    bool exact_capable() const noexcept;
    /// Asserts liminf m(p)^(1/p) = +inf, i.e. E(Az) is entire.
    bool rapid_growth_declared() const noexcept;
    /// Largest valid index for custom tables, nullopt otherwise.
    std::optional<std::size_t> max_index() const noexcept;
    /// The family parameter (k, q or b) as a double; 0 for factorial and custom.
    double parameter() const noexcept;

    mpq_class exact_value(std::size_t p) const;
    /// m(p) in binary64; +inf once it overflows.
    double value(std::size_t p) const;
    double log_value(std::size_t p) const;
    /// m(p-1) / m(p) for p >= 1, computed without forming m(p).
    double ratio(std::size_t p) const;
    /// m(p) / (m(n) m(p-n)), the Cauchy-product weight. 0 <= n <= p.
    mpq_class exact_weight(std::size_t p, std::size_t n) const;
    double weight(std::size_t p, std::size_t n) const;

    template <Scalar S>
    S value_as(std::size_t p) const
    {
        if constexpr (is_exact_v<S>) {
            return Exact{exact_value(p)};
        } else {
            return Float{value(p), 0.0};
        }
    }

    template <Scalar S>
    S weight_as(std::size_t p, std::size_t n) const
    {
        if constexpr (is_exact_v<S>) {
            return Exact{exact_weight(p, n)};
        } else {
            return Float{weight(p, n), 0.0};
        }
    }

    friend bool operator==(const MomentSequence& a, const MomentSequence& b);

private:
    struct State;
    explicit MomentSequence(std::shared_ptr<State> state);
    std::shared_ptr<State> state_;
};

struct GrowthReport {
    std::size_t probe_length = 0;
    /// m(p)^(1/p) for p = 1..probe_length.
    std::vector<double> roots;
    /// Minimum of the roots over the last quarter of the window.
    double min_root = 0.0;
    /// "increasing", "plateau" or "decreasing" over the last quarter.
    std::string trend;
    bool finite_radius_suspected = false;
    bool rapid_growth_declared = false;
};

/// Diagnoses the growth condition liminf m(p)^(1/p) = +inf on p <= probe_length.
/// A plateau (relative increase below 1% across the last quarter) flags a
/// suspected finite radius of convergence. Never changes the declared flag.
GrowthReport growth_probe(const MomentSequence& seq, std::size_t probe_length);

} // namespace momexp
