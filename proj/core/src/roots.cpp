#include <cmath>
#include <limits>
#include <numbers>

#include "momexp/errors.hpp"
#include "momexp/jordan.hpp"

namespace momexp {

namespace {

struct HornerResult {
    Float p;
    Float dp;
    // sum |a_k| |z|^k, the scale of the rounding error in p.
    double bound;
};

HornerResult horner(const std::vector<Float>& a, Float z)
{
    const double az = std::abs(z);
    HornerResult r{a.back(), Float{}, std::abs(a.back())};
    for (std::size_t k = a.size() - 1; k-- > 0;) {
        r.dp = r.dp * z + r.p;
        r.p = r.p * z + a[k];
        r.bound = r.bound * az + std::abs(a[k]);
    }
    return r;
}

} // namespace

std::vector<Float> polynomial_roots(const std::vector<Float>& coeffs, std::size_t max_iterations)
{
    if (coeffs.empty() || coeffs.back() == Float{}) {
        throw InputError("polynomial needs a nonzero leading coefficient");
    }
    const std::size_t degree = coeffs.size() - 1;
    if (degree == 0) return {};

    std::vector<Float> a(coeffs);
    const Float lead = a.back();
    for (auto& c : a) c /= lead;
    if (degree == 1) return {-a[0]};

    // Start on a circle around the root centroid, radius from the Fujiwara bound.
    const Float center = -a[degree - 1] / static_cast<double>(degree);
    double radius = 0.0;
    for (std::size_t k = 0; k < degree; ++k) {
        const double c = std::abs(a[k]);
        if (c == 0.0) continue;
        radius = std::max(radius, std::pow(c, 1.0 / static_cast<double>(degree - k)));
    }
    radius = std::max(2.0 * radius, 1.0);
    std::vector<Float> z(degree);
    for (std::size_t j = 0; j < degree; ++j) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(j) /
                                 static_cast<double>(degree) + 0.4;
        z[j] = center + std::polar(0.5 * radius, angle);
    }

    constexpr double eps = std::numeric_limits<double>::epsilon();
    std::vector<bool> done(degree, false);
    std::size_t remaining = degree;
    for (std::size_t it = 0; it < max_iterations && remaining > 0; ++it) {
        for (std::size_t j = 0; j < degree; ++j) {
            if (done[j]) continue;
            const auto h = horner(a, z[j]);
            if (std::abs(h.p) <= 4.0 * eps * h.bound) {
                done[j] = true;
                --remaining;
                continue;
            }
            if (h.dp == Float{}) {
                z[j] += Float{eps * (1.0 + std::abs(z[j])), eps};
                continue;
            }
            const Float newton = h.p / h.dp;
            Float repulsion{};
            for (std::size_t k = 0; k < degree; ++k) {
                if (k == j) continue;
                const Float d = z[j] - z[k];
                if (d != Float{}) repulsion += 1.0 / d;
            }
            const Float step = newton / (1.0 - newton * repulsion);
            z[j] -= step;
            if (std::abs(step) <= eps * std::abs(z[j])) {
                done[j] = true;
                --remaining;
            }
        }
    }
    if (remaining > 0) {
        throw RootFindingFailed("Aberth iteration did not converge in " +
                                std::to_string(max_iterations) + " sweeps");
    }
    return z;
}

} // namespace momexp
