#include "oemarray/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "oemarray/errors.hpp"
#include "oemarray/parallel.hpp"

namespace oem {

namespace {

constexpr double kFeasibilitySlack = 1e-9;

struct Evaluation {
    std::vector<double> gamma1;
    double bandwidth = 0.0;
    double passband_min = 0.0;
    double peak = 0.0;
    double order_violation = 0.0;  // largest decrease of Gamma_1 between neighbours, in units of Gamma
    bool valid = false;
};

bool feasible(const Evaluation& e, double min_eff) {
    return e.valid && e.passband_min >= min_eff - kFeasibilitySlack && e.order_violation <= kFeasibilitySlack;
}

// Strict total order used for every reduction: larger bandwidth, then
// larger passband minimum, then lexicographically smaller profile.
bool better(const Evaluation& a, const Evaluation& b) {
    if (a.bandwidth != b.bandwidth) return a.bandwidth > b.bandwidth;
    if (a.passband_min != b.passband_min) return a.passband_min > b.passband_min;
    return std::lexicographical_compare(a.gamma1.begin(), a.gamma1.end(), b.gamma1.begin(), b.gamma1.end());
}

std::size_t free_count(const OptimizationProblem& p) { return p.symmetric ? p.n_sites / 2 : p.n_sites; }

std::vector<double> complete(const OptimizationProblem& p, std::span<const double> free) {
    if (p.symmetric) return mirror_complete(free, p.n_sites, p.gamma_total);
    return {free.begin(), free.end()};
}

Evaluation evaluate(const OptimizationProblem& p, std::span<const double> free) {
    Evaluation e;
    e.gamma1 = complete(p, free);
    // Swapping Gamma_1 and Gamma_2 at every site leaves |T21| unchanged
    // (the cascade is unitary); report the orientation that starts on the
    // microwave side.
    if (e.gamma1.front() > e.gamma1.back())
        for (double& g : e.gamma1) g = p.gamma_total - g;
    if (p.monotone)
        for (std::size_t j = 1; j < e.gamma1.size(); ++j)
            e.order_violation = std::max(e.order_violation, (e.gamma1[j - 1] - e.gamma1[j]) / p.gamma_total);
    try {
        const BandwidthResult r = evaluate_profile(e.gamma1, p.gamma_total);
        e.bandwidth = r.fwhm;
        e.passband_min = r.passband_min;
        e.peak = r.peak_value;
        e.valid = true;
    } catch (const NumericalError&) {
        e.valid = false;
    }
    return e;
}

// Bounded parametrization: x = Gamma sin^2(y).
double to_x(double y, double gamma) {
    const double s = std::sin(y);
    return gamma * s * s;
}
double to_y(double x, double gamma) { return std::asin(std::sqrt(std::clamp(x / gamma, 0.0, 1.0))); }

struct LocalSearch {
    const OptimizationProblem& p;
    Evaluation best;
    bool have_best = false;
    std::size_t evaluations = 0;

    double objective(const std::vector<double>& y, double weight) {
        std::vector<double> x(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) x[i] = to_x(y[i], p.gamma_total);
        Evaluation e = evaluate(p, x);
        ++evaluations;
        if (feasible(e, p.min_efficiency) && (!have_best || better(e, best))) {
            best = e;
            have_best = true;
        }
        if (!e.valid) return 1e3;
        const double violation = std::max(0.0, p.min_efficiency - e.passband_min);
        return -e.bandwidth / p.gamma_total + weight * (violation * violation + e.order_violation * e.order_violation);
    }

    // Standard Nelder-Mead (reflection 1, expansion 2, contraction 1/2,
    // shrink 1/2); returns the best vertex.
    std::vector<double> nelder_mead(std::vector<double> y0, double step, double weight, std::size_t budget) {
        const std::size_t n = y0.size();
        std::vector<std::vector<double>> v(n + 1, y0);
        std::vector<double> f(n + 1);
        for (std::size_t i = 0; i < n; ++i) v[i + 1][i] += step;
        for (std::size_t i = 0; i <= n; ++i) f[i] = objective(v[i], weight);
        std::size_t used = n + 1;
        std::vector<std::size_t> order(n + 1);

        auto point = [&](const std::vector<double>& c, const std::vector<double>& w, double t) {
            std::vector<double> r(n);
            for (std::size_t k = 0; k < n; ++k) r[k] = c[k] + t * (w[k] - c[k]);
            return r;
        };

        while (used < budget) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] < f[b]; });
            const std::size_t lo = order.front(), hi = order.back(), nh = order[n - 1];

            double size = 0.0;
            for (std::size_t i = 0; i <= n; ++i)
                for (std::size_t k = 0; k < n; ++k) size = std::max(size, std::abs(v[i][k] - v[lo][k]));
            if (size < 1e-9 && std::abs(f[hi] - f[lo]) < 1e-12) break;

            std::vector<double> c(n, 0.0);
            for (std::size_t i = 0; i <= n; ++i)
                if (i != hi)
                    for (std::size_t k = 0; k < n; ++k) c[k] += v[i][k] / static_cast<double>(n);

            const auto xr = point(c, v[hi], -1.0);
            const double fr = objective(xr, weight);
            ++used;
            if (fr < f[lo]) {
                const auto xe = point(c, v[hi], -2.0);
                const double fe = objective(xe, weight);
                ++used;
                if (fe < fr) {
                    v[hi] = xe;
                    f[hi] = fe;
                } else {
                    v[hi] = xr;
                    f[hi] = fr;
                }
            } else if (fr < f[nh]) {
                v[hi] = xr;
                f[hi] = fr;
            } else {
                const bool outside = fr < f[hi];
                const auto xc = outside ? point(c, xr, 0.5) : point(c, v[hi], 0.5);
                const double fc = objective(xc, weight);
                ++used;
                if (fc < std::min(fr, f[hi])) {
                    v[hi] = xc;
                    f[hi] = fc;
                } else {
                    for (std::size_t i = 0; i <= n; ++i) {
                        if (i == lo) continue;
                        v[i] = point(v[lo], v[i], 0.5);
                        f[i] = objective(v[i], weight);
                        ++used;
                    }
                }
            }
        }
        const auto it = std::min_element(f.begin(), f.end());
        return v[static_cast<std::size_t>(it - f.begin())];
    }
};

std::vector<std::vector<double>> starting_points(const OptimizationProblem& p) {
    const std::size_t m = free_count(p);
    const double g = p.gamma_total;
    const double n = static_cast<double>(p.n_sites);
    std::vector<std::vector<double>> starts;

    starts.emplace_back(m, 0.5 * g);  // uniform, balanced sites
    std::vector<double> lin(m);
    for (std::size_t j = 0; j < m; ++j) lin[j] = g * static_cast<double>(j + 1) / (n + 1.0);
    starts.push_back(lin);
    for (double beta : {2.0, 4.5, 8.0}) {
        std::vector<double> t(m);
        for (std::size_t j = 0; j < m; ++j) t[j] = g * tanh_fraction(static_cast<double>(j + 1) / (n + 1.0), beta);
        starts.push_back(t);
    }
    std::mt19937_64 rng(p.seed);
    std::uniform_real_distribution<double> u(0.0, g);
    for (std::size_t r = 0; r < p.random_starts; ++r) {
        std::vector<double> x(m);
        for (auto& xi : x) xi = u(rng);
        std::sort(x.begin(), x.end());
        starts.push_back(x);
    }
    return starts;
}

OptimizationResult to_result(const Evaluation& e, bool ok, std::size_t evaluations) {
    OptimizationResult r;
    r.gamma1_per_site = e.gamma1;
    r.bandwidth = e.bandwidth;
    r.passband_min = e.passband_min;
    r.peak = e.peak;
    r.converged = ok;
    r.evaluations = evaluations;
    return r;
}

}  // namespace

void OptimizationProblem::validate() const {
    if (n_sites < 1) throw ConfigError("optimization needs N >= 1");
    if (!(std::isfinite(gamma_total) && gamma_total > 0.0)) throw ConfigError("gamma_total must be > 0");
    if (!(min_efficiency > 0.0 && min_efficiency <= 1.0)) throw ConfigError("min_efficiency must be in (0, 1]");
    if (max_evaluations < 10) throw ConfigError("max_evaluations must be >= 10");
}

std::vector<EliminatedSite> eliminated_profile(std::span<const double> gamma1, double gamma_total) {
    std::vector<EliminatedSite> sites;
    sites.reserve(gamma1.size());
    for (double g1 : gamma1) {
        if (!(g1 >= -1e-15 && g1 <= gamma_total * (1.0 + 1e-12)))
            throw ConfigError("Gamma_1 = " + std::to_string(g1) + " outside [0, Gamma]");
        const double a = std::clamp(g1, 0.0, gamma_total);
        sites.push_back({a, gamma_total - a});
    }
    return sites;
}

BandwidthResult evaluate_profile(std::span<const double> gamma1, double gamma_total) {
    if (gamma1.empty()) throw ConfigError("empty profile");
    auto sites = eliminated_profile(gamma1, gamma_total);
    const double guess = 3.0 * gamma_total * static_cast<double>(sites.size());
    ConversionModel model = [sites = std::move(sites)](double w) { return eliminated_transfer(sites, w)(1, 0); };
    return adaptive_bandwidth(model, 0.0, guess, 801, Execution::Serial);
}

std::vector<double> mirror_complete(std::span<const double> free, std::size_t n_sites, double gamma_total) {
    if (free.size() != n_sites / 2)
        throw ConfigError("symmetric profile of " + std::to_string(n_sites) + " sites has " +
                          std::to_string(n_sites / 2) + " free values, got " + std::to_string(free.size()));
    std::vector<double> out(n_sites);
    for (std::size_t j = 0; j < free.size(); ++j) {
        out[j] = free[j];
        out[n_sites - 1 - j] = gamma_total - free[j];
    }
    if (n_sites % 2 == 1) out[n_sites / 2] = 0.5 * gamma_total;
    return out;
}

OptimizationResult optimize_couplings(const OptimizationProblem& problem) {
    problem.validate();
    const std::size_t m = free_count(problem);
    if (m == 0) {
        const Evaluation e = evaluate(problem, {});
        return to_result(e, feasible(e, problem.min_efficiency), 1);
    }

    const auto starts = starting_points(problem);
    std::vector<double> idx(starts.size());
    std::iota(idx.begin(), idx.end(), 0.0);
    struct StartOutcome {
        Evaluation best;
        bool ok = false;
        std::size_t evaluations = 0;
    };
    const auto outcomes = map_points<StartOutcome>(
        idx,
        [&](double di) {
            LocalSearch ls{problem, {}, false, 0};
            std::vector<double> y(m);
            for (std::size_t k = 0; k < m; ++k) y[k] = to_y(starts[static_cast<std::size_t>(di)][k], problem.gamma_total);
            // Penalty weight raised stage by stage; each stage restarts the
            // simplex at the previous stage's best vertex.
            const double weights[] = {1e2, 1e4, 1e6, 1e8};
            const std::size_t per_stage = problem.max_evaluations / 4;
            double step = 0.2;
            for (double w : weights) {
                y = ls.nelder_mead(y, step, w, per_stage);
                step *= 0.5;
            }
            return StartOutcome{ls.best, ls.have_best, ls.evaluations};
        },
        Execution::Parallel);

    Evaluation best;
    bool ok = false;
    std::size_t evaluations = 0;
    for (const auto& o : outcomes) {
        evaluations += o.evaluations;
        if (o.ok && (!ok || better(o.best, best))) {
            best = o.best;
            ok = true;
        }
    }
    if (!ok) {
        OptimizationResult r;
        r.evaluations = evaluations;
        return r;
    }
    return to_result(best, true, evaluations);
}

OptimizationResult grid_oracle(const OptimizationProblem& problem) {
    problem.validate();
    if (problem.n_sites > 3) throw ConfigError("grid_oracle supports N <= 3");
    if (!problem.symmetric) throw ConfigError("grid_oracle searches symmetric profiles only");
    const std::size_t m = free_count(problem);
    if (m == 0) {
        const Evaluation e = evaluate(problem, {});
        return to_result(e, feasible(e, problem.min_efficiency), 1);
    }
    const double g = problem.gamma_total;
    const std::size_t steps = 400;
    std::vector<double> xs(steps + 1);
    for (std::size_t i = 0; i <= steps; ++i) xs[i] = g * static_cast<double>(i) / static_cast<double>(steps);
    const auto evals = map_points<Evaluation>(
        xs, [&](double x) { return evaluate(problem, std::vector<double>{x}); }, Execution::Parallel);

    std::size_t evaluations = evals.size();
    std::ptrdiff_t ibest = -1;
    for (std::size_t i = 0; i < evals.size(); ++i)
        if (feasible(evals[i], problem.min_efficiency) &&
            (ibest < 0 || better(evals[i], evals[static_cast<std::size_t>(ibest)])))
            ibest = static_cast<std::ptrdiff_t>(i);
    if (ibest < 0) {
        OptimizationResult r;
        r.evaluations = evaluations;
        return r;
    }

    // Polish: bisect toward each infeasible neighbour (the optimum sits on
    // the constraint boundary), keep the best feasible point seen.
    Evaluation best = evals[static_cast<std::size_t>(ibest)];
    const auto i0 = static_cast<std::size_t>(ibest);
    for (int side : {-1, +1}) {
        const std::ptrdiff_t jn = static_cast<std::ptrdiff_t>(i0) + side;
        if (jn < 0 || jn > static_cast<std::ptrdiff_t>(steps)) continue;
        if (feasible(evals[static_cast<std::size_t>(jn)], problem.min_efficiency)) continue;
        double a = xs[i0], b = xs[static_cast<std::size_t>(jn)];
        for (int it = 0; it < 60 && std::abs(b - a) > 1e-14 * g; ++it) {
            const double mid = 0.5 * (a + b);
            const Evaluation e = evaluate(problem, std::vector<double>{mid});
            ++evaluations;
            if (feasible(e, problem.min_efficiency)) {
                a = mid;
                if (better(e, best)) best = e;
            } else {
                b = mid;
            }
        }
    }
    return to_result(best, true, evaluations);
}

double fit_tanh_beta(std::span<const double> gamma1, double gamma_total, bool virtual_endpoints) {
    const std::size_t n = gamma1.size();
    if (n < 3) throw ConfigError("tanh fit needs at least 3 sites");
    if (!(gamma_total > 0.0)) throw ConfigError("gamma_total must be > 0");
    for (std::size_t j = 1; j < n; ++j)
        if (gamma1[j] < gamma1[j - 1] - 1e-12 * gamma_total)
            throw ConfigError("tanh fit needs a nondecreasing profile");

    std::vector<std::pair<double, double>> pts;
    const double denom = static_cast<double>(n) + 1.0;
    if (virtual_endpoints) pts.emplace_back(0.0, 0.0);
    for (std::size_t j = 0; j < n; ++j) pts.emplace_back(static_cast<double>(j + 1) / denom, gamma1[j]);
    if (virtual_endpoints) pts.emplace_back(1.0, gamma_total);

    auto sse = [&](double beta) {
        double s = 0.0;
        for (const auto& [d, v] : pts) {
            const double r = v - gamma_total * tanh_fraction(d, beta);
            s += r * r;
        }
        return s;
    };
    // Coarse log-spaced scan, then golden section in the best bracket.
    const std::size_t scan = 400;
    const double lo = 1e-3, hi = 1e3;
    std::vector<double> bs(scan + 1), fs(scan + 1);
    for (std::size_t i = 0; i <= scan; ++i) {
        bs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(scan));
        fs[i] = sse(bs[i]);
    }
    const auto k = static_cast<std::size_t>(std::min_element(fs.begin(), fs.end()) - fs.begin());
    double a = bs[k == 0 ? 0 : k - 1], b = bs[std::min(k + 1, scan)];
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a), f1 = sse(x1), f2 = sse(x2);
    for (int it = 0; it < 300 && b - a > 1e-13 * b; ++it) {
        if (f1 < f2) {
            b = x2; x2 = x1; f2 = f1; x1 = b - r * (b - a); f1 = sse(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + r * (b - a); f2 = sse(x2);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace oem
