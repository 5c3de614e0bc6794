#include "oemarray/array.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "oemarray/errors.hpp"

namespace oem {

namespace {

constexpr cplx I{0.0, 1.0};

double abs2(cplx z) { return std::norm(z); }

// Bisection for f(x) = level between a and b, f(a) and f(b) on opposite sides.
template <class F>
double bisect_crossing(F&& f, double a, double b, double level, double tol) {
    double fa = f(a) - level;
    for (int it = 0; it < 200 && std::abs(b - a) > tol; ++it) {
        const double m = 0.5 * (a + b);
        const double fm = f(m) - level;
        if ((fm >= 0.0) == (fa >= 0.0)) {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    return 0.5 * (a + b);
}

// Golden-section search for the extremum of f on [a, b]; sign = +1 maximizes.
template <class F>
std::pair<double, double> golden_extremum(F&& f, double a, double b, double sign, double tol) {
    const double r = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - r * (b - a), x2 = a + r * (b - a);
    double f1 = sign * f(x1), f2 = sign * f(x2);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (f1 > f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = sign * f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = sign * f(x2);
        }
    }
    return f1 > f2 ? std::pair{x1, sign * f1} : std::pair{x2, sign * f2};
}

}  // namespace

std::vector<double> Spectrum::efficiency() const {
    std::vector<double> out(t21.size());
    std::transform(t21.begin(), t21.end(), out.begin(), abs2);
    return out;
}

ScatterMat2 array_transfer(std::span<const SiteParams> sites, double omega) {
    if (sites.empty()) throw ConfigError("array_transfer needs at least one site");
    ScatterMat2 T = scattering_full(sites[0], omega);
    for (std::size_t j = 1; j < sites.size(); ++j) T = scattering_full(sites[j], omega) * T;
    return T;
}

ScatterMat2 eliminated_transfer(std::span<const EliminatedSite> sites, double omega) {
    if (sites.empty()) throw ConfigError("eliminated_transfer needs at least one site");
    ScatterMat2 T = scattering_eliminated(sites[0], omega);
    for (std::size_t j = 1; j < sites.size(); ++j) T = scattering_eliminated(sites[j], omega) * T;
    return T;
}

Spectrum spectrum_from_model(ConversionModel model, const FrequencyGrid& grid, Execution exec) {
    Spectrum s;
    s.grid = grid;
    s.t21 = map_points<cplx>(grid.points(), model, exec);
    s.model = std::move(model);
    return s;
}

Spectrum conversion_spectrum(std::vector<SiteParams> sites, const FrequencyGrid& grid, Execution exec,
                             bool keep_matrices) {
    if (sites.empty()) throw ConfigError("conversion_spectrum needs at least one site");
    for (const auto& s : sites) s.validate();
    Spectrum out;
    out.grid = grid;
    auto mats = map_points<ScatterMat2>(
        grid.points(), [&](double w) { return array_transfer(sites, w); }, exec);
    out.t21.resize(mats.size());
    for (std::size_t i = 0; i < mats.size(); ++i) out.t21[i] = mats[i](1, 0);
    if (keep_matrices) out.full_matrices = std::move(mats);
    out.model = [sites = std::move(sites)](double w) { return array_transfer(sites, w)(1, 0); };
    return out;
}

Spectrum conversion_spectrum(const ArrayConfig& config, const FrequencyGrid& grid, Execution exec,
                             bool keep_matrices) {
    return conversion_spectrum(materialize_sites(config), grid, exec, keep_matrices);
}

BandwidthResult extract_bandwidth(const Spectrum& spectrum, const BandwidthOptions& opts) {
    const auto& grid = spectrum.grid;
    const auto p = spectrum.efficiency();
    const std::size_t n = p.size();
    if (n < 3 || n != grid.n_points) throw ConfigError("extract_bandwidth: spectrum/grid size mismatch");
    const auto x = grid.points();

    const auto imax = static_cast<std::size_t>(std::max_element(p.begin(), p.end()) - p.begin());
    if (!(p[imax] > 0.0)) throw NumericalError("no positive maximum in conversion spectrum");

    auto eff = [&](double w) { return spectrum.model ? abs2(spectrum.model(w)) : 0.0; };
    const bool refine = static_cast<bool>(spectrum.model);

    BandwidthResult r;
    r.omega_peak = x[imax];
    r.peak_value = p[imax];
    if (refine && imax > 0 && imax + 1 < n) {
        const auto [wp, vp] = golden_extremum(eff, x[imax - 1], x[imax + 1], +1.0, opts.tolerance);
        if (vp > r.peak_value) {
            r.peak_value = vp;
            r.omega_peak = wp;
        }
    }
    const double half = 0.5 * r.peak_value;

    std::size_t lo = 0;
    while (lo < n && p[lo] < half) ++lo;
    std::size_t hi = n - 1;
    while (hi > 0 && p[hi] < half) --hi;
    if (lo == 0 || hi == n - 1 || lo > hi)
        throw NumericalError("no half-max crossing inside grid [" + std::to_string(grid.omega_min) + ", " +
                             std::to_string(grid.omega_max) + "]");

    auto interp = [&](std::size_t i0, std::size_t i1) {
        return x[i0] + (half - p[i0]) * (x[i1] - x[i0]) / (p[i1] - p[i0]);
    };
    r.omega_lo = refine ? bisect_crossing(eff, x[lo - 1], x[lo], half, opts.tolerance) : interp(lo - 1, lo);
    r.omega_hi = refine ? bisect_crossing(eff, x[hi], x[hi + 1], half, opts.tolerance) : interp(hi, hi + 1);
    r.fwhm = r.omega_hi - r.omega_lo;

    // Ripple: lowest point between the outermost local maxima above half max.
    std::vector<std::size_t> peaks;
    for (std::size_t i = lo; i <= hi; ++i) {
        const bool left = i == 0 || p[i] >= p[i - 1];
        const bool right = i + 1 == n || p[i] >= p[i + 1];
        if (left && right && p[i] >= half) peaks.push_back(i);
    }
    r.passband_min = r.peak_value;
    if (peaks.size() >= 2) {
        std::size_t imin = peaks.front();
        for (std::size_t i = peaks.front(); i <= peaks.back(); ++i)
            if (p[i] < p[imin]) imin = i;
        double vmin = p[imin];
        if (refine && imin > 0 && imin + 1 < n) {
            const auto [wm, vm] = golden_extremum(eff, x[imin - 1], x[imin + 1], -1.0, opts.tolerance);
            (void)wm;
            vmin = std::min(vmin, vm);
        }
        r.passband_min = std::min(vmin, r.peak_value);
    }
    return r;
}

BandwidthResult adaptive_bandwidth(const ConversionModel& model, double center, double initial_half_width,
                                   std::size_t n_points, Execution exec, const BandwidthOptions& opts) {
    double w = initial_half_width;
    for (int attempt = 0; attempt < 24; ++attempt, w *= 2.0) {
        const FrequencyGrid grid{center - w, center + w, n_points};
        const Spectrum s = spectrum_from_model(model, grid, exec);
        try {
            return extract_bandwidth(s, opts);
        } catch (const NumericalError& e) {
            if (std::string(e.what()).rfind("no half-max crossing", 0) != 0) throw;
        }
    }
    throw NumericalError("no half-max crossing found while widening the frequency window");
}

BandwidthResult array_bandwidth(const ArrayConfig& config, std::size_t n_points, Execution exec) {
    auto sites = materialize_sites(config);
    double gamma_eff = 0.0;
    for (const auto& s : sites)
        gamma_eff = std::max(gamma_eff, s.g1 * s.g1 / s.kappa1 + s.g2 * s.g2 / s.kappa2);
    const double n = static_cast<double>(sites.size());
    const double kappa = std::min(config.kappa1.start, config.kappa2.start);
    const double guess = 1.5 * std::min(4.0 * gamma_eff * n, std::cbrt(4.0 * gamma_eff * kappa * kappa * n));
    ConversionModel model = [sites = std::move(sites)](double w) { return array_transfer(sites, w)(1, 0); };
    return adaptive_bandwidth(model, 0.0, std::max(guess, 1e-6), n_points, exec);
}

double bandwidth_analytic(double g, double kappa, std::size_t n_sites) {
    return std::cbrt(4.0 * std::numbers::sqrt2 / 3.0 * g * g * kappa * static_cast<double>(n_sites));
}

std::pair<double, double> halfmax_roots_analytic(double g, double kappa, std::size_t n_sites) {
    if (n_sites < 1) throw ConfigError("halfmax_roots_analytic needs N >= 1");
    const double n = static_cast<double>(n_sites);
    const double m = (n * n - 1.0) / n;
    // X = a + b with b = kappa sqrt(3 kappa^4); the numerator
    // 3^(1/3) X^(2/3) - 3^(2/3) kappa^2 equals 3^(1/3) (X^(2/3) - b^(2/3)),
    // evaluated without cancellation so that N = 1 gives exactly 0.
    const double k2 = kappa * kappa;
    const double lin = 6.0 * std::numbers::sqrt2 * g * g * kappa * m;
    const double quad = 72.0 * std::pow(g, 4) * m * m;
    const double root0 = std::sqrt(3.0) * k2;
    const double b = kappa * root0;
    const double a_minus_b = lin + kappa * quad / (std::sqrt(quad + 3.0 * k2 * k2) + root0);
    const double X = b + a_minus_b;
    const double xc = std::cbrt(X), bc = std::cbrt(b);
    // X^(2/3) - b^(2/3) = (xc - bc)(xc + bc), xc - bc = (X - b)/(xc^2 + xc bc + bc^2)
    const double diff = a_minus_b / (xc * xc + xc * bc + bc * bc) * (xc + bc);
    const double w = std::cbrt(3.0) * diff / (6.0 * xc);
    return {-w, w};
}

PerturbativeT21 perturbative_t21(const ArrayConfig& config, double omega) {
    const auto sites = materialize_sites(config);
    PerturbativeT21 out;
    cplx sum = 0.0;
    cplx t = 0.0;
    for (const auto& s : sites) {
        const auto tc = offres_coefficients(s, omega);
        if (std::abs(tc.t - t) > 1e-12 && t != cplx(0.0))
            throw ConfigError("perturbative_t21 requires the same linewidth at every site");
        t = tc.t;
        sum += tc.c;
        out.max_abs_c = std::max(out.max_abs_c, std::abs(tc.c));
    }
    out.value = std::pow(t, static_cast<int>(sites.size()) - 1) * sum;
    out.weak_coupling = out.max_abs_c < 0.1;
    return out;
}

cplx perturbative_t21_linear(double g, double kappa, double gamma, std::size_t n_sites, double omega) {
    const double n = static_cast<double>(n_sites);
    const cplx l = kappa - 2.0 * I * omega;
    const cplx t = (kappa + 2.0 * I * omega) / l;
    return std::pow(t, static_cast<int>(n_sites) - 1) * 8.0 * g * g * kappa / (l * l * (gamma - 2.0 * I * omega)) *
           (1.0 - n * n) / (6.0 * n);
}

std::vector<double> unwrapped_phase(const Spectrum& spectrum, double max_step) {
    const auto& t = spectrum.t21;
    std::vector<double> phase(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (std::abs(t[i]) == 0.0)
            throw NumericalError("phase of T21 undefined: zero amplitude at omega = " +
                                 std::to_string(spectrum.grid.at(i)));
        if (i == 0) {
            phase[i] = std::arg(t[i]);
            continue;
        }
        const double step = std::arg(t[i] / t[i - 1]);
        if (std::abs(step) >= max_step)
            throw NumericalError("aliasing: phase step " + std::to_string(step) + " at omega = " +
                                 std::to_string(spectrum.grid.at(i)) + "; refine the grid");
        phase[i] = phase[i - 1] + step;
    }
    return phase;
}

double phase_winding(const Spectrum& spectrum, double max_step) {
    const auto phase = unwrapped_phase(spectrum, max_step);
    if (phase.empty()) return 0.0;
    return phase.back() - phase.front();
}

double full_line_winding(const ConversionModel& model, double scale, std::size_t n_points, double max_step) {
    if (!(scale > 0.0)) throw ConfigError("full_line_winding needs a positive frequency scale");
    if (n_points < 16) throw ConfigError("full_line_winding needs at least 16 points");
    for (std::size_t n = n_points; n <= (std::size_t{1} << 22); n *= 2) {
        double total = 0.0;
        bool aliased = false;
        cplx prev{};
        for (std::size_t i = 0; i < n; ++i) {
            const double theta = std::numbers::pi * ((static_cast<double>(i) + 0.5) / static_cast<double>(n) - 0.5);
            const cplx t = model(scale * std::tan(theta));
            if (std::abs(t) == 0.0)
                throw NumericalError("phase of T21 undefined: zero amplitude at omega = " +
                                     std::to_string(scale * std::tan(theta)));
            if (i > 0) {
                const double step = std::arg(t / prev);
                if (std::abs(step) >= max_step) {
                    aliased = true;
                    break;
                }
                total += step;
            }
            prev = t;
        }
        if (!aliased) return total;
    }
    throw NumericalError("full_line_winding: phase still aliased at 2^22 samples");
}

double waveguide_dispersion(double omega, double v, double kappa_eff) {
    if (omega == 0.0) throw ConfigError("waveguide_dispersion has a pole at omega = 0");
    if (v == 0.0) throw ConfigError("waveguide_dispersion needs a nonzero velocity");
    return omega / v - kappa_eff * kappa_eff / (v * omega);
}

}  // namespace oem
