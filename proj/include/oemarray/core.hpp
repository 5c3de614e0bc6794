#pragma once

// Domain types shared by every module. All rates and frequencies are
// expressed in units of one reference linewidth (kappa_ref); the library
// never converts units, it only records the reference for output.

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

namespace oem {

// Per-transducer rates.
struct SiteParams {
    double g1 = 0.0;      // electromechanical coupling
    double g2 = 0.0;      // optomechanical coupling
    double kappa1 = 1.0;  // microwave cavity linewidth
    double kappa2 = 1.0;  // optical cavity linewidth
    double gamma = 0.0;   // mechanical linewidth; 0 is the lossless-mechanics limit

    void validate() const;
    bool operator==(const SiteParams&) const = default;
};

enum class ProfileKind { Linear, Tanh, Explicit };

// Rule generating the per-site couplings of an array.
//
// Linear:   g1(j) = j*g_bar1/N,  g2(j) = g_bar2*(1 - j/N),  j = 1..N.
// Tanh:     defined on effective rates Gamma_i = g_i^2/kappa_i. With
//           f(d) = (tanh(beta*(d - 1/2)) + 1)/2 and d = j/(N+1),
//           Gamma_1 = (g_bar1^2/kappa1) f(d), Gamma_2 = (g_bar2^2/kappa2)(1 - f(d)),
//           which is g1 = g_bar1*sqrt(f), g2 = g_bar2*sqrt(1 - f).
// Explicit: user-supplied (g1, g2) per site.
struct CouplingProfile {
    ProfileKind kind = ProfileKind::Tanh;
    double g_bar1 = 0.0;
    double g_bar2 = 0.0;
    double beta = 4.5;
    std::vector<std::pair<double, double>> explicit_values;

    static CouplingProfile linear(double g_bar1, double g_bar2);
    static CouplingProfile tanh(double g_bar1, double g_bar2, double beta = 4.5);
    static CouplingProfile explicit_sites(std::vector<std::pair<double, double>> values);

    bool operator==(const CouplingProfile&) const = default;
};

// Fraction of the total effective rate carried by field 1 at normalized
// position d for the tanh rule.
double tanh_fraction(double d, double beta);

// Cavity linewidth varying linearly from the first to the last site.
struct LinewidthProfile {
    double start = 1.0;
    double end = 1.0;

    static LinewidthProfile constant(double value) { return {value, value}; }
    // Site j = 1..N; a single site takes the midpoint.
    double at(std::size_t j, std::size_t n_sites) const;
    bool operator==(const LinewidthProfile&) const = default;
};

// Two-sided cavity and propagation-loss extension used by the loss module.
struct LossParams {
    double kappa_l_ratio = 0.0;  // kappa_L / kappa_R, both fields
    double kappa_int = 0.0;      // intrinsic cavity loss, both fields
    double epsilon = 0.0;        // per-cell propagation loss 1 - exp(-zeta d)
    double phase = 0.0;          // common propagation phase k d per cell [rad]
    double delay = 0.0;          // frequency-proportional phase: k d += delay * omega

    bool operator==(const LossParams&) const = default;
};

struct ArrayConfig {
    std::size_t n_sites = 1;
    CouplingProfile profile;
    LinewidthProfile kappa1;
    LinewidthProfile kappa2;
    double gamma = 0.0;
    double n_bar = 0.0;
    double kappa_ref = 1.0;              // physical value of the unit, informational
    std::optional<double> omega_m;       // mechanical frequency, lab-frame models only
    LossParams loss;

    void validate() const;
    bool operator==(const ArrayConfig&) const = default;
};

// Uniform grid of Fourier frequencies relative to cavity resonance.
struct FrequencyGrid {
    double omega_min = -1.0;
    double omega_max = 1.0;
    std::size_t n_points = 2;

    void validate() const;
    double step() const { return (omega_max - omega_min) / static_cast<double>(n_points - 1); }
    double at(std::size_t i) const;
    std::vector<double> points() const;

    static FrequencyGrid symmetric(double half_width, std::size_t n_points) {
        return {-half_width, half_width, n_points};
    }
};

std::vector<SiteParams> materialize_sites(const ArrayConfig& config);

// min_i g_bar_i sqrt(N) / kappa_i, with kappa_i the largest linewidth of
// field i along the array. Above 1 the array is in the adiabatic regime.
double adiabaticity_margin(const ArrayConfig& config);

// 4 g^2 / (kappa gamma). Throws ConfigError for gamma = 0.
double classical_cooperativity(double g, double kappa, double gamma);

}  // namespace oem
