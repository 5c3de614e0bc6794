#pragma once

// Bidirectional propagation: two-sided cavities with intrinsic loss,
// propagation loss and phase between sites, and backscattering.
//
// Field vectors are ordered (a1R, a2R, a1L, a2L); R is the signal
// direction, L the backscattered direction.

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "oemarray/core.hpp"
#include "oemarray/parallel.hpp"
#include "oemarray/transducer.hpp"

namespace oem {

using TransferMat4 = Eigen::Matrix4cd;

struct LossySite {
    SiteParams site;  // site.kappa1/kappa2 are ignored; the channel rates below apply
    double kappa_r1 = 1.0, kappa_r2 = 1.0;
    double kappa_l1 = 0.0, kappa_l2 = 0.0;
    double kappa_int1 = 0.0, kappa_int2 = 0.0;

    void validate() const;

    // Right-port rates from the site, kappa_L = ratio * kappa_R.
    static LossySite from(const SiteParams& s, double kappa_l_ratio = 0.0, double kappa_int = 0.0);
};

struct CellLink {
    double zeta_d = 0.0;  // amplitude loss exponent
    double k1_d = 0.0;    // propagation phase [rad]
    double k2_d = 0.0;

    void validate() const;
    // epsilon = 1 - exp(-zeta d).
    static CellLink from_epsilon(double epsilon, double k1_d = 0.0, double k2_d = 0.0);
};

struct BiScatter {
    Eigen::Matrix4cd m;

    ScatterMat2 S_R() const { return m.topLeftCorner<2, 2>(); }
    ScatterMat2 S_RL() const { return m.topRightCorner<2, 2>(); }
    ScatterMat2 S_LR() const { return m.bottomLeftCorner<2, 2>(); }
    ScatterMat2 S_L() const { return m.bottomRightCorner<2, 2>(); }

    // Forward conversion amplitude, microwave in -> optical out.
    cplx t21() const { return m(1, 0); }
    double max_singular_value() const;
};

BiScatter scattering_two_sided(const LossySite& site, double omega);

// Throws NumericalError when S_L (resp. T22) has condition number > 1e12.
TransferMat4 scatter_to_transfer(const BiScatter& s);
BiScatter transfer_to_scatter(const TransferMat4& t);

// Transfer matrix of the waveguide between two sites. Both directions are
// attenuated along their own direction of travel.
TransferMat4 free_propagation(const CellLink& link);

// Scattering form of a link (no reflection, attenuated transmission).
BiScatter link_scattering(const CellLink& link);

// Redheffer star product: `first` followed by `second` along R.
BiScatter star_product(const BiScatter& first, const BiScatter& second);

// Product of unit-cell transfer matrices, one link after each site:
// T = (F_N T_N) ... (F_1 T_1). Throws NumericalError where a site's S_L is
// singular. The product loses accuracy where the cascade has evanescent
// (stop-band) solutions; use it for inspection, not for long lossy arrays.
TransferMat4 lossy_array_transfer(std::span<const LossySite> sites, std::span<const CellLink> links, double omega);

// Scattering matrix of the same cascade, composed with star products so the
// result stays accurate for any array length.
BiScatter lossy_array_scattering(std::span<const LossySite> sites, std::span<const CellLink> links, double omega);

std::vector<LossySite> lossy_sites(const ArrayConfig& config);
// Equal phases for both fields: phase + delay * omega.
CellLink config_link(const ArrayConfig& config, double omega);
BiScatter lossy_array_scattering(const ArrayConfig& config, double omega);

// |T21^R|^2 on a grid.
std::vector<double> lossy_efficiency_spectrum(const ArrayConfig& config, const FrequencyGrid& grid,
                                              Execution exec = Execution::Parallel);

enum class LossParameter { NSites, KappaInt, Epsilon, KappaLRatio };

struct LossSweepPoint {
    double value = 0.0;
    double efficiency = 0.0;  // |T21(0)|^2
};

std::vector<LossSweepPoint> efficiency_vs_loss(const ArrayConfig& base, LossParameter param,
                                               std::span<const double> values,
                                               Execution exec = Execution::Parallel);

struct BackscatterEfficiency {
    double ratio = 0.0;
    double envelope = 0.0;   // local maximum of |T21|^2 nearest resonance
    double lossless = 0.0;   // same quantity without backscattering
    double eta = 0.0;        // envelope / lossless
    double omega_at = 0.0;
};

// Envelope efficiency with kappa_L/kappa_R = ratio on top of config.
BackscatterEfficiency backscatter_efficiency(const ArrayConfig& config, double ratio);

struct AlphaFit {
    double alpha = 0.0;
    double stderr_ = 0.0;
    std::size_t points_used = 0;
};

// Least-squares slope of (1 - eta) against ratio through the origin.
// Requires >= 4 points with 0 <= ratio <= 0.2, not all zero.
AlphaFit backscatter_alpha_fit(std::span<const double> ratios, std::span<const double> etas);

}  // namespace oem
