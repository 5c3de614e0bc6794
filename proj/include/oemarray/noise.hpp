#pragma once

// Added noise: thermal mechanical noise reaching the output ports through
// the cascade, and Stokes (counter-rotating) noise of the lab-frame model.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "oemarray/array.hpp"
#include "oemarray/core.hpp"
#include "oemarray/parallel.hpp"

namespace oem {

// Added-noise densities into the two output ports, in units of vacuum noise.
struct NoiseSpectrum {
    FrequencyGrid grid;
    std::vector<double> s_add_1;  // microwave output
    std::vector<double> s_add_2;  // optical output
};

struct StokesSpectrum {
    FrequencyGrid grid;                 // lab frame
    std::vector<double> density;        // |T23|^2 + |T24|^2
    bool resolved_sideband = true;      // false when kappa/omega_m > 0.3
};

// Coupling of site j's mechanical bath (1-based j) to that site's output
// fields: V_j = -C (A + i omega)^-1 E with E = (0, 0, sqrt(gamma)).
Eigen::Vector2cd noise_coupling_vector(std::span<const SiteParams> sites, std::size_t j, double omega);

// Unit-force-noise sum  sum_j |chi_j|^2  with chi_j = (S_N ... S_{j+1}) V_j,
// accumulated in one right-to-left sweep.
std::array<double, 2> noise_susceptibility_sum(std::span<const SiteParams> sites, double omega);

NoiseSpectrum added_noise_spectrum(const ArrayConfig& config, const FrequencyGrid& grid,
                                   Execution exec = Execution::Parallel);

// 4 C (2 n + 1)/(C + 1)^2 * (N, 1/(2N)): bright and dark port on resonance,
// first order in the adiabaticity parameter 1/N.
std::array<double, 2> added_noise_resonant_analytic(double c_tilde, double n_bar, std::size_t n_sites);

struct IntegrationOptions {
    std::optional<double> window;  // full width; default is the conversion FWHM
    double rel_tol = 1e-4;
};

// Added noise integrated over [-w/2, w/2].
std::array<double, 2> integrated_added_noise(const ArrayConfig& config, const IntegrationOptions& opts = {});

// Cascade of Bogoliubov matrices, lab frame. config.omega_m must be set.
ScatterMat4 bogoliubov_transfer(std::span<const SiteParams> sites, double omega_m, double omega);

StokesSpectrum stokes_noise_spectrum(const ArrayConfig& config, const FrequencyGrid& grid,
                                     Execution exec = Execution::Parallel);

// FWHM of the lab-frame conversion |T21|^2 around omega_m.
BandwidthResult lab_frame_bandwidth(const ArrayConfig& config);

// Stokes photons integrated over [omega_m - w/2, omega_m + w/2].
double integrated_stokes_noise(const ArrayConfig& config, const IntegrationOptions& opts = {});

}  // namespace oem
