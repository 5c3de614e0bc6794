#pragma once

// Cascaded arrays: transfer products, conversion spectra, bandwidths,
// phase winding, and the closed-form large-array results they are
// checked against.

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "oemarray/core.hpp"
#include "oemarray/parallel.hpp"
#include "oemarray/transducer.hpp"

namespace oem {

// Continuous conversion amplitude T21(omega), queried by the bandwidth
// extractor when refining crossings.
using ConversionModel = std::function<cplx(double)>;

struct Spectrum {
    FrequencyGrid grid;
    std::vector<cplx> t21;
    std::vector<ScatterMat2> full_matrices;  // empty unless requested
    ConversionModel model;

    std::vector<double> efficiency() const;  // |t21|^2
};

struct BandwidthResult {
    double fwhm = 0.0;
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    double omega_peak = 0.0;
    double peak_value = 0.0;    // max |T21|^2
    double passband_min = 0.0;  // min |T21|^2 between the outermost half-max peaks
};

struct BandwidthOptions {
    double tolerance = 1e-9;  // crossing accuracy in frequency units
};

// T = S_N ... S_1.
ScatterMat2 array_transfer(std::span<const SiteParams> sites, double omega);
ScatterMat2 eliminated_transfer(std::span<const EliminatedSite> sites, double omega);

Spectrum spectrum_from_model(ConversionModel model, const FrequencyGrid& grid,
                             Execution exec = Execution::Parallel);

Spectrum conversion_spectrum(std::vector<SiteParams> sites, const FrequencyGrid& grid,
                             Execution exec = Execution::Parallel, bool keep_matrices = false);
Spectrum conversion_spectrum(const ArrayConfig& config, const FrequencyGrid& grid,
                             Execution exec = Execution::Parallel, bool keep_matrices = false);

// Outermost half-maximum crossings, refined by bisection on spectrum.model.
// Throws NumericalError for an all-zero spectrum or when the spectrum does
// not drop below half maximum inside the grid.
BandwidthResult extract_bandwidth(const Spectrum& spectrum, const BandwidthOptions& opts = {});

// Samples the model on [center - w, center + w] and doubles w until both
// half-max crossings fall inside the window.
BandwidthResult adaptive_bandwidth(const ConversionModel& model, double center, double initial_half_width,
                                   std::size_t n_points = 801, Execution exec = Execution::Serial,
                                   const BandwidthOptions& opts = {});

// Numeric FWHM of a full-model array, choosing the window automatically.
BandwidthResult array_bandwidth(const ArrayConfig& config, std::size_t n_points = 2001,
                                Execution exec = Execution::Parallel);

// (4 sqrt(2)/3 g^2 kappa N)^(1/3).
double bandwidth_analytic(double g, double kappa, std::size_t n_sites);

// Real half-maximum roots of the weak-coupling, linear-profile conversion
// coefficient (gamma = 0). Returns (-w, +w); w = 0 for N = 1.
std::pair<double, double> halfmax_roots_analytic(double g, double kappa, std::size_t n_sites);

struct PerturbativeT21 {
    cplx value;
    double max_abs_c = 0.0;
    bool weak_coupling = true;  // false when some |c_j| >= 0.1
};

// t^(N-1) sum_j c_j with off-resonant coefficients. Requires kappa1 == kappa2
// at every site.
PerturbativeT21 perturbative_t21(const ArrayConfig& config, double omega);

// Closed form of the sum above for the linear profile.
cplx perturbative_t21_linear(double g, double kappa, double gamma, std::size_t n_sites, double omega);

// Point-to-point unwrapped phase of t21 (nearest branch).
std::vector<double> unwrapped_phase(const Spectrum& spectrum, double max_step = 0.9 * 3.14159265358979323846);

// Total unwrapped phase change across the grid. Throws NumericalError when
// t21 vanishes on the grid or a wrapped step reaches max_step (aliasing).
double phase_winding(const Spectrum& spectrum, double max_step = 0.9 * 3.14159265358979323846);

// Total unwrapped phase change of T21 over the whole real frequency line,
// sampled on omega = scale * tan(theta) with theta uniform in (-pi/2, pi/2).
// The sample count doubles (from n_points, up to 2^22) until no wrapped
// step reaches max_step.
double full_line_winding(const ConversionModel& model, double scale, std::size_t n_points = 1 << 15,
                         double max_step = 0.5);

// k = omega/v - kappa_eff^2/(v omega) for a waveguide coupled to a dense
// cavity continuum. Rejects omega = 0.
double waveguide_dispersion(double omega, double v, double kappa_eff);

}  // namespace oem
