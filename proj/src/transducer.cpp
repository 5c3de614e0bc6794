#include "oemarray/transducer.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "oemarray/errors.hpp"

namespace oem {

namespace {

constexpr cplx I{0.0, 1.0};

// Below this reciprocal condition number we treat the resolvent as singular.
constexpr double kSingularRcond = 1e3 * std::numeric_limits<double>::epsilon();

}  // namespace

void EliminatedSite::validate() const {
    if (!(std::isfinite(Gamma1) && std::isfinite(Gamma2) && Gamma1 >= 0.0 && Gamma2 >= 0.0))
        throw ConfigError("effective coupling rates must be finite and >= 0");
}

void BogoliubovSite::validate() const {
    site.validate();
    if (!(std::isfinite(omega_m) && omega_m > 0.0)) throw ConfigError("omega_m must be > 0");
}

Eigen::MatrixXcd state_space_response(const Eigen::MatrixXcd& A, const Eigen::MatrixXcd& B,
                                      const Eigen::MatrixXcd& C, const Eigen::MatrixXcd& D, double omega) {
    Eigen::MatrixXcd M = A;
    M.diagonal().array() += I * omega;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu(M);
    if (!(lu.rcond() > kSingularRcond))
        throw NumericalError("singular resolvent (A + i omega I) at omega = " + std::to_string(omega));
    return D - C * lu.solve(B);
}

Eigen::Matrix3cd drift_matrix(const SiteParams& s) {
    Eigen::Matrix3cd A;
    A << -s.kappa1 / 2.0, 0.0, -I * s.g1,
         0.0, -s.kappa2 / 2.0, -I * s.g2,
         -I * s.g1, -I * s.g2, -s.gamma / 2.0;
    return A;
}

ScatterMat2 scattering_full(const SiteParams& s, double omega) {
    const cplx l1 = s.kappa1 - 2.0 * I * omega;
    const cplx l2 = s.kappa2 - 2.0 * I * omega;
    ScatterMat2 S;
    if (s.g1 == 0.0 && s.g2 == 0.0) {
        // Mechanics decoupled: bare one-sided cavity reflections. Taken
        // explicitly so gamma = 0, omega = 0 does not produce 0/0.
        S << (s.kappa1 + 2.0 * I * omega) / l1, 0.0,
             0.0, (s.kappa2 + 2.0 * I * omega) / l2;
        return S;
    }
    const cplx lm = s.gamma - 2.0 * I * omega;
    const cplx D = 4.0 * s.g1 * s.g1 * l2 + 4.0 * s.g2 * s.g2 * l1 + l1 * l2 * lm;
    if (std::abs(D) <= std::numeric_limits<double>::min() * 1e6 || !std::isfinite(std::abs(D)))
        throw NumericalError("scattering_full: vanishing denominator at omega = " + std::to_string(omega));
    const cplx s11 = -1.0 + (8.0 * s.g2 * s.g2 * s.kappa1 + 2.0 * s.kappa1 * l2 * lm) / D;
    const cplx s22 = -1.0 + (8.0 * s.g1 * s.g1 * s.kappa2 + 2.0 * s.kappa2 * l1 * lm) / D;
    const cplx s12 = -8.0 * s.g1 * s.g2 * std::sqrt(s.kappa1 * s.kappa2) / D;
    S << s11, s12,
         s12, s22;
    return S;
}

ScatterMat2 scattering_resonant(double c1, double c2) {
    if (!(c1 >= 0.0 && c2 >= 0.0)) throw ConfigError("cooperativities must be >= 0");
    const double norm = 1.0 / (c1 + c2 + 1.0);
    const double off = -2.0 * std::sqrt(c1 * c2) * norm;
    ScatterMat2 S;
    S << (-c1 + c2 + 1.0) * norm, off,
         off, (c1 - c2 + 1.0) * norm;
    return S;
}

ScatterMat2 scattering_eliminated(const EliminatedSite& site, double omega) {
    site.validate();
    const double sum = site.Gamma1 + site.Gamma2;
    const double diff = site.Gamma1 - site.Gamma2;
    if (sum == 0.0 && omega == 0.0)
        throw NumericalError("scattering_eliminated: Gamma1 = Gamma2 = 0 at omega = 0 is 0/0");
    const cplx den = 2.0 * sum - I * omega;
    const cplx off = -4.0 * std::sqrt(site.Gamma1 * site.Gamma2) / den;
    ScatterMat2 S;
    S << (-2.0 * diff - I * omega) / den, off,
         off, (2.0 * diff - I * omega) / den;
    return S;
}

OffResonantCoefficients offres_coefficients(const SiteParams& s, double omega) {
    s.validate();
    if (std::abs(s.kappa1 - s.kappa2) > 1e-12 * std::max(s.kappa1, s.kappa2))
        throw ConfigError("offres_coefficients requires kappa1 == kappa2");
    const double kappa = s.kappa1;
    const cplx l = kappa - 2.0 * I * omega;
    OffResonantCoefficients out;
    out.t = (kappa + 2.0 * I * omega) / l;
    out.c = -8.0 * s.g1 * s.g2 * kappa / (l * l * (s.gamma - 2.0 * I * omega));
    return out;
}

ScatterMat4 scattering_bogoliubov(const BogoliubovSite& b, double omega) {
    b.validate();
    const SiteParams& s = b.site;
    const double wm = b.omega_m;
    const cplx g1 = I * s.g1;
    const cplx g2 = I * s.g2;
    // Mode order (c1, c2, b, c1^dag, c2^dag, b^dag).
    Eigen::Matrix<cplx, 6, 6> A;
    A << -I * wm - s.kappa1 / 2.0, 0.0, -g1, 0.0, 0.0, -g1,
         0.0, -I * wm - s.kappa2 / 2.0, -g2, 0.0, 0.0, -g2,
         -g1, -g2, -I * wm - s.gamma / 2.0, -g1, -g2, 0.0,
         0.0, 0.0, g1, I * wm - s.kappa1 / 2.0, 0.0, g1,
         0.0, 0.0, g2, 0.0, I * wm - s.kappa2 / 2.0, g2,
         g1, g2, 0.0, g1, g2, I * wm - s.gamma / 2.0;
    Eigen::Matrix<cplx, 6, 4> B = Eigen::Matrix<cplx, 6, 4>::Zero();
    const double r1 = std::sqrt(s.kappa1), r2 = std::sqrt(s.kappa2);
    B(0, 0) = r1;
    B(1, 1) = r2;
    B(3, 2) = r1;
    B(4, 3) = r2;

    A.diagonal().array() += I * omega;
    Eigen::PartialPivLU<Eigen::Matrix<cplx, 6, 6>> lu(A);
    if (!(lu.rcond() > kSingularRcond))
        throw NumericalError("scattering_bogoliubov: singular resolvent at omega = " + std::to_string(omega));
    const Eigen::Matrix<cplx, 6, 4> X = lu.solve(B);
    return -ScatterMat4::Identity() - B.transpose() * X;
}

nlohmann::json matrix_to_json(const Eigen::MatrixXcd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back({m(r, c).real(), m(r, c).imag()});
        rows.push_back(row);
    }
    return rows;
}

}  // namespace oem
