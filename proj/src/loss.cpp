#include "oemarray/loss.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>
#include <tuple>

#include "oemarray/array.hpp"
#include "oemarray/errors.hpp"

namespace oem {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kMaxCondition = 1e12;

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

ScatterMat2 checked_inverse(const ScatterMat2& m, const char* what) {
    Eigen::JacobiSVD<ScatterMat2> svd(m);
    const auto sv = svd.singularValues();
    if (!(sv(1) > 0.0) || sv(0) / sv(1) > kMaxCondition)
        throw NumericalError(std::string(what) + " is near-singular (condition number > 1e12)");
    return m.inverse();
}

}  // namespace

void LossySite::validate() const {
    const double rates[] = {kappa_r1, kappa_r2, kappa_l1, kappa_l2, kappa_int1, kappa_int2, site.g1, site.g2,
                            site.gamma};
    for (double r : rates)
        if (!finite_nonneg(r)) throw ConfigError("lossy site rates must be finite and >= 0");
    if (!(kappa_r1 + kappa_l1 + kappa_int1 > 0.0 && kappa_r2 + kappa_l2 + kappa_int2 > 0.0))
        throw ConfigError("total cavity linewidth must be > 0");
}

LossySite LossySite::from(const SiteParams& s, double kappa_l_ratio, double kappa_int) {
    LossySite out;
    out.site = s;
    out.kappa_r1 = s.kappa1;
    out.kappa_r2 = s.kappa2;
    out.kappa_l1 = kappa_l_ratio * s.kappa1;
    out.kappa_l2 = kappa_l_ratio * s.kappa2;
    out.kappa_int1 = kappa_int;
    out.kappa_int2 = kappa_int;
    return out;
}

void CellLink::validate() const {
    if (!finite_nonneg(zeta_d)) throw ConfigError("propagation loss zeta*d must be finite and >= 0");
    if (!std::isfinite(k1_d) || !std::isfinite(k2_d)) throw ConfigError("propagation phases must be finite");
}

CellLink CellLink::from_epsilon(double epsilon, double k1_d, double k2_d) {
    if (!(epsilon >= 0.0 && epsilon < 1.0)) throw ConfigError("propagation loss epsilon must be in [0, 1)");
    return {-std::log1p(-epsilon), k1_d, k2_d};
}

double BiScatter::max_singular_value() const {
    return Eigen::JacobiSVD<Eigen::Matrix4cd>(m).singularValues()(0);
}

BiScatter scattering_two_sided(const LossySite& ls, double omega) {
    ls.validate();
    SiteParams total = ls.site;
    total.kappa1 = ls.kappa_r1 + ls.kappa_l1 + ls.kappa_int1;
    total.kappa2 = ls.kappa_r2 + ls.kappa_l2 + ls.kappa_int2;
    Eigen::Matrix3cd A = drift_matrix(total);
    // Decoupled mechanics never reaches the ports; keep the resolvent regular.
    if (total.g1 == 0.0 && total.g2 == 0.0) A(2, 2) = -1.0;
    A.diagonal().array() += I * omega;

    Eigen::Matrix<cplx, 3, 4> B = Eigen::Matrix<cplx, 3, 4>::Zero();
    B(0, 0) = std::sqrt(ls.kappa_r1);
    B(1, 1) = std::sqrt(ls.kappa_r2);
    B(0, 2) = std::sqrt(ls.kappa_l1);
    B(1, 3) = std::sqrt(ls.kappa_l2);

    Eigen::PartialPivLU<Eigen::Matrix3cd> lu(A);
    if (!(lu.rcond() > 1e3 * std::numeric_limits<double>::epsilon()))
        throw NumericalError("scattering_two_sided: singular resolvent at omega = " + std::to_string(omega));
    BiScatter out;
    out.m = -Eigen::Matrix4cd::Identity() - B.transpose() * lu.solve(B);
    return out;
}

TransferMat4 scatter_to_transfer(const BiScatter& s) {
    const ScatterMat2 sl_inv = checked_inverse(s.S_L(), "S_L");
    TransferMat4 t;
    t.topLeftCorner<2, 2>() = s.S_R() - s.S_RL() * sl_inv * s.S_LR();
    t.topRightCorner<2, 2>() = s.S_RL() * sl_inv;
    t.bottomLeftCorner<2, 2>() = -sl_inv * s.S_LR();
    t.bottomRightCorner<2, 2>() = sl_inv;
    return t;
}

BiScatter transfer_to_scatter(const TransferMat4& t) {
    const ScatterMat2 t11 = t.topLeftCorner<2, 2>(), t12 = t.topRightCorner<2, 2>();
    const ScatterMat2 t21 = t.bottomLeftCorner<2, 2>();
    const ScatterMat2 t22_inv = checked_inverse(t.bottomRightCorner<2, 2>(), "T22");
    BiScatter s;
    s.m.topLeftCorner<2, 2>() = t11 - t12 * t22_inv * t21;
    s.m.topRightCorner<2, 2>() = t12 * t22_inv;
    s.m.bottomLeftCorner<2, 2>() = -t22_inv * t21;
    s.m.bottomRightCorner<2, 2>() = t22_inv;
    return s;
}

TransferMat4 free_propagation(const CellLink& link) {
    link.validate();
    const double z = link.zeta_d;
    TransferMat4 t = TransferMat4::Zero();
    t(0, 0) = std::exp(-z + I * link.k1_d);
    t(1, 1) = std::exp(-z + I * link.k2_d);
    // The transfer matrix maps left-going fields against their direction of
    // travel, so their attenuation appears as growth here.
    t(2, 2) = std::exp(z - I * link.k1_d);
    t(3, 3) = std::exp(z - I * link.k2_d);
    return t;
}

BiScatter link_scattering(const CellLink& link) {
    link.validate();
    BiScatter s;
    s.m = Eigen::Matrix4cd::Zero();
    s.m(0, 0) = std::exp(-link.zeta_d + I * link.k1_d);
    s.m(1, 1) = std::exp(-link.zeta_d + I * link.k2_d);
    s.m(2, 2) = s.m(0, 0);
    s.m(3, 3) = s.m(1, 1);
    return s;
}

BiScatter star_product(const BiScatter& a, const BiScatter& b) {
    // Internal fields between the two elements: u (right-going), v (left-going).
    //   u = A_R x + A_RL v,   v = B_LR u + B_L y.
    const ScatterMat2 id = ScatterMat2::Identity();
    const Eigen::PartialPivLU<ScatterMat2> lu(id - a.S_RL() * b.S_LR());
    const ScatterMat2 ux = lu.solve(a.S_R());
    const ScatterMat2 uy = lu.solve(a.S_RL() * b.S_L());
    BiScatter s;
    s.m.topLeftCorner<2, 2>() = b.S_R() * ux;
    s.m.topRightCorner<2, 2>() = b.S_R() * uy + b.S_RL();
    s.m.bottomLeftCorner<2, 2>() = a.S_LR() + a.S_L() * b.S_LR() * ux;
    s.m.bottomRightCorner<2, 2>() = a.S_L() * (b.S_LR() * uy + b.S_L());
    return s;
}

namespace {

void check_links(std::span<const LossySite> sites, std::span<const CellLink> links) {
    if (sites.empty()) throw ConfigError("lossy_array_scattering needs at least one site");
    if (links.size() != sites.size())
        throw ConfigError("lossy_array_scattering needs one link per site (" + std::to_string(sites.size()) +
                          "), got " + std::to_string(links.size()));
}

}  // namespace

BiScatter lossy_array_scattering(std::span<const LossySite> sites, std::span<const CellLink> links, double omega) {
    check_links(sites, links);
    BiScatter total = star_product(scattering_two_sided(sites[0], omega), link_scattering(links[0]));
    for (std::size_t j = 1; j < sites.size(); ++j)
        total = star_product(star_product(total, scattering_two_sided(sites[j], omega)), link_scattering(links[j]));
    return total;
}

TransferMat4 lossy_array_transfer(std::span<const LossySite> sites, std::span<const CellLink> links, double omega) {
    check_links(sites, links);
    TransferMat4 total = TransferMat4::Identity();
    for (std::size_t j = 0; j < sites.size(); ++j)
        total = free_propagation(links[j]) * scatter_to_transfer(scattering_two_sided(sites[j], omega)) * total;
    return total;
}

std::vector<LossySite> lossy_sites(const ArrayConfig& config) {
    const auto sites = materialize_sites(config);
    std::vector<LossySite> out;
    out.reserve(sites.size());
    for (const auto& s : sites) out.push_back(LossySite::from(s, config.loss.kappa_l_ratio, config.loss.kappa_int));
    return out;
}

CellLink config_link(const ArrayConfig& config, double omega) {
    const double phase = config.loss.phase + config.loss.delay * omega;
    return CellLink::from_epsilon(config.loss.epsilon, phase, phase);
}

BiScatter lossy_array_scattering(const ArrayConfig& config, double omega) {
    const auto sites = lossy_sites(config);
    const std::vector<CellLink> links(sites.size(), config_link(config, omega));
    return lossy_array_scattering(sites, links, omega);
}

std::vector<double> lossy_efficiency_spectrum(const ArrayConfig& config, const FrequencyGrid& grid, Execution exec) {
    config.validate();
    grid.validate();
    const auto sites = lossy_sites(config);
    return map_points<double>(
        grid.points(),
        [&](double w) {
            const std::vector<CellLink> links(sites.size(), config_link(config, w));
            return std::norm(lossy_array_scattering(sites, links, w).t21());
        },
        exec);
}

std::vector<LossSweepPoint> efficiency_vs_loss(const ArrayConfig& base, LossParameter param,
                                               std::span<const double> values, Execution exec) {
    std::vector<double> xs(values.begin(), values.end());
    auto effs = map_points<double>(
        xs,
        [&](double v) {
            ArrayConfig c = base;
            switch (param) {
                case LossParameter::NSites:
                    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("array size must be a positive integer");
                    c.n_sites = static_cast<std::size_t>(v);
                    break;
                case LossParameter::KappaInt: c.loss.kappa_int = v; break;
                case LossParameter::Epsilon: c.loss.epsilon = v; break;
                case LossParameter::KappaLRatio: c.loss.kappa_l_ratio = v; break;
            }
            c.validate();
            return std::norm(lossy_array_scattering(c, 0.0).t21());
        },
        exec);
    std::vector<LossSweepPoint> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) out[i] = {xs[i], effs[i]};
    return out;
}

namespace {

// Local maximum of |T21|^2 nearest omega = 0 within [-half_window, half_window],
// refined by golden section. Falls back to the largest sample when the
// sampled spectrum has no interior local maximum.
std::pair<double, double> envelope_near_resonance(const ArrayConfig& c, double half_window) {
    const FrequencyGrid grid = FrequencyGrid::symmetric(half_window, 2001);
    const auto p = lossy_efficiency_spectrum(c, grid);
    const auto x = grid.points();

    auto best = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    bool found = false;
    for (std::size_t i = 1; i + 1 < p.size(); ++i) {
        if (!(p[i] >= p[i - 1] && p[i] >= p[i + 1])) continue;
        const double di = std::abs(x[i]), db = std::abs(x[best]);
        if (!found || di < db - 1e-15 || (std::abs(di - db) <= 1e-15 && p[i] > p[best])) best = i;
        found = true;
    }
    double w_best = x[best], v_best = p[best];
    if (!found) return {v_best, w_best};

    const auto sites = lossy_sites(c);
    auto eff = [&](double w) {
        const std::vector<CellLink> links(sites.size(), config_link(c, w));
        return std::norm(lossy_array_scattering(sites, links, w).t21());
    };
    double a = x[best - 1], b = x[best + 1];
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - g * (b - a), x2 = a + g * (b - a), f1 = eff(x1), f2 = eff(x2);
    for (int it = 0; it < 100 && b - a > 1e-12 * half_window; ++it) {
        if (f1 > f2) {
            b = x2; x2 = x1; f2 = f1; x1 = b - g * (b - a); f1 = eff(x1);
        } else {
            a = x1; x1 = x2; f1 = f2; x2 = a + g * (b - a); f2 = eff(x2);
        }
    }
    if (std::max(f1, f2) > v_best) {
        v_best = std::max(f1, f2);
        w_best = f1 > f2 ? x1 : x2;
    }
    return {v_best, w_best};
}

}  // namespace

BackscatterEfficiency backscatter_efficiency(const ArrayConfig& config, double ratio) {
    if (!finite_nonneg(ratio)) throw ConfigError("backscatter ratio must be >= 0");
    ArrayConfig lossless = config;
    lossless.loss.kappa_l_ratio = 0.0;
    ArrayConfig c = config;
    c.loss.kappa_l_ratio = ratio;
    c.validate();

    const double half_window = 0.5 * array_bandwidth(lossless).fwhm;
    BackscatterEfficiency r;
    r.ratio = ratio;
    r.lossless = envelope_near_resonance(lossless, half_window).first;
    std::tie(r.envelope, r.omega_at) = envelope_near_resonance(c, half_window);
    r.eta = r.lossless > 0.0 ? r.envelope / r.lossless : 0.0;
    return r;
}

AlphaFit backscatter_alpha_fit(std::span<const double> ratios, std::span<const double> etas) {
    if (ratios.size() != etas.size()) throw ConfigError("alpha fit: ratio and efficiency lists differ in length");
    if (ratios.size() < 4) throw ConfigError("alpha fit needs at least 4 points");
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double x = ratios[i];
        if (!(x >= 0.0 && x <= 0.2 + 1e-12))
            throw ConfigError("alpha fit: ratio " + std::to_string(x) + " outside the linear regime [0, 0.2]");
        sxx += x * x;
        sxy += x * (1.0 - etas[i]);
    }
    if (sxx == 0.0) throw ConfigError("alpha fit is degenerate: all ratios are zero");
    AlphaFit fit;
    fit.alpha = sxy / sxx;
    fit.points_used = ratios.size();
    double rss = 0.0;
    for (std::size_t i = 0; i < ratios.size(); ++i) {
        const double res = (1.0 - etas[i]) - fit.alpha * ratios[i];
        rss += res * res;
    }
    fit.stderr_ = std::sqrt(rss / static_cast<double>(ratios.size() - 1) / sxx);
    return fit;
}

}  // namespace oem
