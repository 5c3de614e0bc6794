#pragma once

// Single-site scattering matrices.
//
// Conventions: time dependence exp(-i omega t); 2x2 matrices act on
// (a1, a2) = (microwave, optical) and take omega relative to the cavity
// resonance (rotating frame). The Bogoliubov model alone works in the lab
// frame, where its upper-left block approximates the rotating-frame matrix
// evaluated at omega - omega_m.

#include <complex>

#include <Eigen/Dense>
#include <json.hpp>

#include "oemarray/core.hpp"

namespace oem {

using cplx = std::complex<double>;
using ScatterMat2 = Eigen::Matrix2cd;
using ScatterMat4 = Eigen::Matrix4cd;

// Site after adiabatic elimination of both cavities.
struct EliminatedSite {
    double Gamma1 = 0.0;  // g1^2 / kappa1
    double Gamma2 = 0.0;  // g2^2 / kappa2

    void validate() const;
    static EliminatedSite from(const SiteParams& s) {
        return {s.g1 * s.g1 / s.kappa1, s.g2 * s.g2 / s.kappa2};
    }
};

// Site with counter-rotating (Stokes) terms kept.
struct BogoliubovSite {
    SiteParams site;
    double omega_m = 10.0;

    void validate() const;
};

// D - C (A + i omega I)^-1 B for a linear input-output model. Throws
// NumericalError when A + i omega I is singular to working precision.
Eigen::MatrixXcd state_space_response(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                      const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D, double omega);

// Drift matrix of the rotating-frame model, mode order (c1, c2, b).
Eigen::Matrix3cd drift_matrix(const SiteParams& s);

// Exact one-sided transducer scattering matrix.
ScatterMat2 scattering_full(const SiteParams& site, double omega);

// Real on-resonance matrix from classical cooperativities.
ScatterMat2 scattering_resonant(double c1_tilde, double c2_tilde);

// Cavities eliminated, mechanical dissipation neglected; unitary for real omega.
ScatterMat2 scattering_eliminated(const EliminatedSite& site, double omega);

// Weak-coupling, off-resonant diagonal and conversion coefficients for a
// site with kappa1 == kappa2. Not valid near omega = 0.
struct OffResonantCoefficients {
    cplx t;
    cplx c;
};
OffResonantCoefficients offres_coefficients(const SiteParams& site, double omega);

// 4x4 matrix on (a1, a2, a1^dag, a2^dag), lab-frame omega.
ScatterMat4 scattering_bogoliubov(const BogoliubovSite& site, double omega);

// Debug dump: row-major [[re, im], ...] rows.
nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m);

}  // namespace oem
