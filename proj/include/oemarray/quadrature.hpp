#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oem {

// Adaptive trapezoid rule for a K-component integrand. The interval is
// seeded with `seed` uniform panels; each panel is split until halving it
// changes its contribution by less than its share of rel_tol * |I_k|.
template <std::size_t K, class F>
std::array<double, K> integrate_adaptive(F&& f, double a, double b, double rel_tol = 1e-4,
                                         std::size_t seed = 64, int max_depth = 30) {
    using Vec = std::array<double, K>;
    std::vector<double> xs(seed + 1);
    std::vector<Vec> fs(seed + 1);
    for (std::size_t i = 0; i <= seed; ++i) {
        xs[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(seed);
        fs[i] = f(xs[i]);
    }
    Vec coarse{};
    for (std::size_t i = 0; i < seed; ++i)
        for (std::size_t k = 0; k < K; ++k) coarse[k] += 0.5 * (xs[i + 1] - xs[i]) * (fs[i][k] + fs[i + 1][k]);

    const double length = b - a;
    Vec tol{};
    for (std::size_t k = 0; k < K; ++k) tol[k] = rel_tol * std::abs(coarse[k]);

    Vec total{};
    auto panel = [&](auto&& self, double x0, double x1, const Vec& f0, const Vec& f1, int depth) -> void {
        const double xm = 0.5 * (x0 + x1);
        const Vec fm = f(xm);
        const double h = x1 - x0;
        bool ok = depth >= max_depth;
        if (!ok) {
            ok = true;
            for (std::size_t k = 0; k < K; ++k) {
                const double one = 0.5 * h * (f0[k] + f1[k]);
                const double two = 0.25 * h * (f0[k] + 2.0 * fm[k] + f1[k]);
                if (std::abs(two - one) > tol[k] * h / length) ok = false;
            }
        }
        if (ok) {
            for (std::size_t k = 0; k < K; ++k) total[k] += 0.25 * h * (f0[k] + 2.0 * fm[k] + f1[k]);
            return;
        }
        self(self, x0, xm, f0, fm, depth + 1);
        self(self, xm, x1, fm, f1, depth + 1);
    };
    for (std::size_t i = 0; i < seed; ++i) panel(panel, xs[i], xs[i + 1], fs[i], fs[i + 1], 0);
    return total;
}

}  // namespace oem
