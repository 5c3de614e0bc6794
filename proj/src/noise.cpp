#include "oemarray/noise.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "oemarray/errors.hpp"
#include "oemarray/quadrature.hpp"

namespace oem {

namespace {

constexpr cplx I{0.0, 1.0};

double require_omega_m(const ArrayConfig& config) {
    if (!config.omega_m) throw ConfigError("lab-frame Stokes model requires omega_m in the config");
    return *config.omega_m;
}

double max_linewidth(const ArrayConfig& c) {
    return std::max({c.kappa1.start, c.kappa1.end, c.kappa2.start, c.kappa2.end});
}

}  // namespace

Eigen::Vector2cd noise_coupling_vector(std::span<const SiteParams> sites, std::size_t j, double omega) {
    if (j < 1 || j > sites.size())
        throw ConfigError("noise_coupling_vector: site index " + std::to_string(j) + " out of range 1.." +
                          std::to_string(sites.size()));
    const SiteParams& s = sites[j - 1];
    if (s.gamma == 0.0) return Eigen::Vector2cd::Zero();
    Eigen::Matrix3cd M = drift_matrix(s);
    M.diagonal().array() += I * omega;
    const Eigen::Vector3cd E(0.0, 0.0, std::sqrt(s.gamma));
    const Eigen::Vector3cd x = M.partialPivLu().solve(E);
    return -Eigen::Vector2cd(std::sqrt(s.kappa1) * x(0), std::sqrt(s.kappa2) * x(1));
}

std::array<double, 2> noise_susceptibility_sum(std::span<const SiteParams> sites, double omega) {
    std::array<double, 2> acc{0.0, 0.0};
    ScatterMat2 downstream = ScatterMat2::Identity();
    for (std::size_t j = sites.size(); j >= 1; --j) {
        const Eigen::Vector2cd chi = downstream * noise_coupling_vector(sites, j, omega);
        acc[0] += std::norm(chi(0));
        acc[1] += std::norm(chi(1));
        downstream = downstream * scattering_full(sites[j - 1], omega);
    }
    return acc;
}

NoiseSpectrum added_noise_spectrum(const ArrayConfig& config, const FrequencyGrid& grid, Execution exec) {
    const auto sites = materialize_sites(config);
    const double force = 2.0 * config.n_bar + 1.0;
    const auto sums = map_points<std::array<double, 2>>(
        grid.points(), [&](double w) { return noise_susceptibility_sum(sites, w); }, exec);
    NoiseSpectrum out;
    out.grid = grid;
    out.s_add_1.resize(sums.size());
    out.s_add_2.resize(sums.size());
    for (std::size_t i = 0; i < sums.size(); ++i) {
        out.s_add_1[i] = force * sums[i][0];
        out.s_add_2[i] = force * sums[i][1];
    }
    return out;
}

std::array<double, 2> added_noise_resonant_analytic(double c_tilde, double n_bar, std::size_t n_sites) {
    if (n_sites < 1) throw ConfigError("added_noise_resonant_analytic needs N >= 1");
    const double n = static_cast<double>(n_sites);
    const double base = 4.0 * c_tilde * (2.0 * n_bar + 1.0) / ((c_tilde + 1.0) * (c_tilde + 1.0));
    return {base * n, base / (2.0 * n)};
}

std::array<double, 2> integrated_added_noise(const ArrayConfig& config, const IntegrationOptions& opts) {
    const auto sites = materialize_sites(config);
    const double width = opts.window ? *opts.window : array_bandwidth(config).fwhm;
    if (!(width > 0.0)) throw ConfigError("integration window must be positive");
    // Integrate the unit-force sum and scale afterwards: the result is
    // exactly linear in 2 n_bar + 1.
    const auto unit = integrate_adaptive<2>([&](double w) { return noise_susceptibility_sum(sites, w); },
                                            -0.5 * width, 0.5 * width, opts.rel_tol);
    const double force = 2.0 * config.n_bar + 1.0;
    return {force * unit[0], force * unit[1]};
}

ScatterMat4 bogoliubov_transfer(std::span<const SiteParams> sites, double omega_m, double omega) {
    if (sites.empty()) throw ConfigError("bogoliubov_transfer needs at least one site");
    ScatterMat4 T = scattering_bogoliubov({sites[0], omega_m}, omega);
    for (std::size_t j = 1; j < sites.size(); ++j) T = scattering_bogoliubov({sites[j], omega_m}, omega) * T;
    return T;
}

StokesSpectrum stokes_noise_spectrum(const ArrayConfig& config, const FrequencyGrid& grid, Execution exec) {
    const double wm = require_omega_m(config);
    const auto sites = materialize_sites(config);
    StokesSpectrum out;
    out.grid = grid;
    out.resolved_sideband = max_linewidth(config) / wm <= 0.3;
    out.density = map_points<double>(
        grid.points(),
        [&](double w) {
            const ScatterMat4 T = bogoliubov_transfer(sites, wm, w);
            return std::norm(T(1, 2)) + std::norm(T(1, 3));
        },
        exec);
    return out;
}

BandwidthResult lab_frame_bandwidth(const ArrayConfig& config) {
    const double wm = require_omega_m(config);
    auto sites = materialize_sites(config);
    // Window guess from the rotating-frame estimate.
    double gamma_eff = 0.0;
    for (const auto& s : sites)
        gamma_eff = std::max(gamma_eff, s.g1 * s.g1 / s.kappa1 + s.g2 * s.g2 / s.kappa2);
    const double guess = std::max(1.5 * 4.0 * gamma_eff * static_cast<double>(sites.size()), 1e-6);
    ConversionModel model = [sites = std::move(sites), wm](double w) {
        return bogoliubov_transfer(sites, wm, w)(1, 0);
    };
    return adaptive_bandwidth(model, wm, std::min(guess, 0.9 * wm), 801, Execution::Parallel);
}

double integrated_stokes_noise(const ArrayConfig& config, const IntegrationOptions& opts) {
    const double wm = require_omega_m(config);
    const auto sites = materialize_sites(config);
    const double width = opts.window ? *opts.window : lab_frame_bandwidth(config).fwhm;
    if (!(width > 0.0)) throw ConfigError("integration window must be positive");
    const auto r = integrate_adaptive<1>(
        [&](double w) {
            const ScatterMat4 T = bogoliubov_transfer(sites, wm, w);
            return std::array<double, 1>{std::norm(T(1, 2)) + std::norm(T(1, 3))};
        },
        wm - 0.5 * width, wm + 0.5 * width, opts.rel_tol);
    return r[0];
}

}  // namespace oem
