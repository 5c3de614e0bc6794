#include "oemarray/core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oemarray/errors.hpp"

namespace oem {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError(what);
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

void SiteParams::validate() const {
    require(finite_nonneg(g1) && finite_nonneg(g2), "site couplings must be finite and >= 0");
    require(std::isfinite(kappa1) && kappa1 > 0.0, "kappa1 must be > 0");
    require(std::isfinite(kappa2) && kappa2 > 0.0, "kappa2 must be > 0");
    require(finite_nonneg(gamma), "gamma must be >= 0");
}

CouplingProfile CouplingProfile::linear(double g_bar1, double g_bar2) {
    CouplingProfile p;
    p.kind = ProfileKind::Linear;
    p.g_bar1 = g_bar1;
    p.g_bar2 = g_bar2;
    return p;
}

CouplingProfile CouplingProfile::tanh(double g_bar1, double g_bar2, double beta) {
    CouplingProfile p;
    p.kind = ProfileKind::Tanh;
    p.g_bar1 = g_bar1;
    p.g_bar2 = g_bar2;
    p.beta = beta;
    return p;
}

CouplingProfile CouplingProfile::explicit_sites(std::vector<std::pair<double, double>> values) {
    CouplingProfile p;
    p.kind = ProfileKind::Explicit;
    p.explicit_values = std::move(values);
    for (const auto& [a, b] : p.explicit_values) {
        p.g_bar1 = std::max(p.g_bar1, a);
        p.g_bar2 = std::max(p.g_bar2, b);
    }
    return p;
}

double tanh_fraction(double d, double beta) { return 0.5 * (std::tanh(beta * (d - 0.5)) + 1.0); }

double LinewidthProfile::at(std::size_t j, std::size_t n_sites) const {
    if (n_sites <= 1) return 0.5 * (start + end);
    const double t = static_cast<double>(j - 1) / static_cast<double>(n_sites - 1);
    return start + (end - start) * t;
}

void ArrayConfig::validate() const {
    require(n_sites >= 1, "n_sites must be >= 1");
    require(std::isfinite(n_bar) && n_bar >= 0.0, "n_bar must be >= 0");
    require(finite_nonneg(gamma), "gamma must be >= 0");
    require(std::isfinite(kappa_ref) && kappa_ref > 0.0, "kappa_ref must be > 0");
    for (const auto* lw : {&kappa1, &kappa2}) {
        require(std::isfinite(lw->start) && std::isfinite(lw->end) && lw->start > 0.0 && lw->end > 0.0,
                "cavity linewidths must be > 0");
    }
    switch (profile.kind) {
        case ProfileKind::Linear:
        case ProfileKind::Tanh:
            require(finite_nonneg(profile.g_bar1) && finite_nonneg(profile.g_bar2),
                    "peak couplings must be >= 0");
            require(std::isfinite(profile.beta), "beta must be finite");
            break;
        case ProfileKind::Explicit:
            require(profile.explicit_values.size() == n_sites,
                    "explicit profile has " + std::to_string(profile.explicit_values.size()) +
                        " entries but n_sites = " + std::to_string(n_sites));
            break;
    }
    if (omega_m) require(std::isfinite(*omega_m) && *omega_m > 0.0, "omega_m must be > 0");
    require(finite_nonneg(loss.kappa_l_ratio), "kappa_l_ratio must be >= 0");
    require(finite_nonneg(loss.kappa_int), "kappa_int must be >= 0");
    require(std::isfinite(loss.epsilon) && loss.epsilon >= 0.0 && loss.epsilon < 1.0,
            "epsilon must lie in [0, 1)");
    require(std::isfinite(loss.phase) && std::isfinite(loss.delay), "propagation phase must be finite");
}

void FrequencyGrid::validate() const {
    require(std::isfinite(omega_min) && std::isfinite(omega_max) && omega_min < omega_max,
            "frequency grid requires omega_min < omega_max");
    require(n_points >= 2, "frequency grid needs at least 2 points");
}

double FrequencyGrid::at(std::size_t i) const {
    // Pin the last point exactly to omega_max.
    if (i + 1 == n_points) return omega_max;
    return omega_min + static_cast<double>(i) * step();
}

std::vector<double> FrequencyGrid::points() const {
    validate();
    std::vector<double> out(n_points);
    for (std::size_t i = 0; i < n_points; ++i) out[i] = at(i);
    return out;
}

std::vector<SiteParams> materialize_sites(const ArrayConfig& config) {
    config.validate();
    const std::size_t n = config.n_sites;
    const double nd = static_cast<double>(n);
    std::vector<SiteParams> sites(n);
    for (std::size_t j = 1; j <= n; ++j) {
        SiteParams& s = sites[j - 1];
        s.kappa1 = config.kappa1.at(j, n);
        s.kappa2 = config.kappa2.at(j, n);
        s.gamma = config.gamma;
        const double jd = static_cast<double>(j);
        switch (config.profile.kind) {
            case ProfileKind::Linear:
                s.g1 = jd * config.profile.g_bar1 / nd;
                s.g2 = config.profile.g_bar2 * (1.0 - jd / nd);
                break;
            case ProfileKind::Tanh: {
                const double f = tanh_fraction(jd / (nd + 1.0), config.profile.beta);
                s.g1 = config.profile.g_bar1 * std::sqrt(f);
                s.g2 = config.profile.g_bar2 * std::sqrt(1.0 - f);
                break;
            }
            case ProfileKind::Explicit:
                s.g1 = config.profile.explicit_values[j - 1].first;
                s.g2 = config.profile.explicit_values[j - 1].second;
                break;
        }
        s.validate();
    }
    return sites;
}

double adiabaticity_margin(const ArrayConfig& config) {
    config.validate();
    const double root_n = std::sqrt(static_cast<double>(config.n_sites));
    const double k1 = std::max(config.kappa1.start, config.kappa1.end);
    const double k2 = std::max(config.kappa2.start, config.kappa2.end);
    return std::min(config.profile.g_bar1 * root_n / k1, config.profile.g_bar2 * root_n / k2);
}

double classical_cooperativity(double g, double kappa, double gamma) {
    require(std::isfinite(kappa) && kappa > 0.0, "cooperativity requires kappa > 0");
    require(std::isfinite(gamma) && gamma > 0.0,
            "cooperativity is undefined for gamma = 0; use the gamma = 0 scattering limits");
    return 4.0 * g * g / (kappa * gamma);
}

}  // namespace oem
