#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "oemarray/errors.hpp"
#include "oemarray/noise.hpp"

using namespace oem;

namespace {

const cplx I{0.0, 1.0};

ArrayConfig make_config(std::size_t n, CouplingProfile p, double gamma, double n_bar) {
    ArrayConfig c;
    c.n_sites = n;
    c.profile = std::move(p);
    c.gamma = gamma;
    c.n_bar = n_bar;
    return c;
}

// Bath coupling of site j in a symmetric linear array, closed form.
Eigen::Vector2cd linear_bath_coupling(double g, double kappa, double gamma, std::size_t n, std::size_t j,
                                      double w) {
    const double N = static_cast<double>(n), J = static_cast<double>(j);
    const cplx den = 4.0 * (g / N) * (g / N) * (N * N - 2.0 * J * N + 2.0 * J * J) +
                     (kappa - 2.0 * I * w) * (gamma - 2.0 * I * w);
    const cplx pre = -4.0 * I * g * std::sqrt(kappa * gamma) / den;
    return {pre * (J / N), pre * (1.0 - J / N)};
}

// g1 = g sin(theta_j), g2 = g cos(theta_j): equal per-site cooperativity.
ArrayConfig circular(std::size_t n, double g, double gamma, double n_bar) {
    std::vector<std::pair<double, double>> values;
    for (std::size_t j = 1; j <= n; ++j) {
        const double th = (static_cast<double>(j) - 0.5) * std::numbers::pi / (2.0 * static_cast<double>(n));
        values.emplace_back(g * std::sin(th), g * std::cos(th));
    }
    return make_config(n, CouplingProfile::explicit_sites(values), gamma, n_bar);
}

ArrayConfig fig_s4(std::size_t n) {
    return make_config(n, CouplingProfile::tanh(std::sqrt(0.02), std::sqrt(0.02)), 5e-5, 100.0);
}

ArrayConfig stokes_config(std::size_t n, double ratio) {
    auto c = make_config(n, CouplingProfile::tanh(0.08, 0.08), 5e-5, 0.0);
    c.omega_m = 1.0 / ratio;
    return c;
}

}  // namespace

TEST_CASE("bath coupling vector") {
    auto lossless = materialize_sites(make_config(4, CouplingProfile::linear(0.08, 0.08), 0.0, 0.0));
    CHECK(noise_coupling_vector(lossless, 2, 0.1).norm() == 0.0);

    auto sites = materialize_sites(make_config(7, CouplingProfile::linear(0.08, 0.08), 1e-3, 0.0));
    for (double w : {0.0, 0.1, -0.4})
        for (std::size_t j = 1; j <= 7; ++j) {
            auto v = noise_coupling_vector(sites, j, w);
            auto ref = linear_bath_coupling(0.08, 1.0, 1e-3, 7, j, w);
            CHECK((v - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
        }

    auto dark = materialize_sites(make_config(2, CouplingProfile::explicit_sites({{0.0, 0.1}, {0.1, 0.1}}), 1e-3, 0.0));
    CHECK(std::abs(noise_coupling_vector(dark, 1, 0.05)(0)) == 0.0);
    CHECK(std::abs(noise_coupling_vector(dark, 1, 0.05)(1)) > 0.0);
    CHECK_THROWS_AS(noise_coupling_vector(dark, 0, 0.0), ConfigError);
    CHECK_THROWS_AS(noise_coupling_vector(dark, 3, 0.0), ConfigError);
}

TEST_CASE("noise sum equals the explicit per-site products") {
    auto sites = materialize_sites(make_config(9, CouplingProfile::tanh(0.1, 0.1), 1e-3, 0.0));
    const std::span<const SiteParams> all(sites);
    for (double w : {0.0, 0.07}) {
        double p1 = 0.0, p2 = 0.0;
        for (std::size_t j = 1; j <= sites.size(); ++j) {
            Eigen::Vector2cd chi = noise_coupling_vector(sites, j, w);
            if (j < sites.size()) chi = array_transfer(all.subspan(j), w) * chi;
            p1 += std::norm(chi(0));
            p2 += std::norm(chi(1));
        }
        auto s = noise_susceptibility_sum(sites, w);
        CHECK(s[0] == doctest::Approx(p1).epsilon(1e-12));
        CHECK(s[1] == doctest::Approx(p2).epsilon(1e-12));
    }
}

TEST_CASE("noise vanishes without bath") {
    auto cfg = make_config(5, CouplingProfile::tanh(0.08, 0.08), 0.0, 0.0);
    auto s = added_noise_spectrum(cfg, FrequencyGrid::symmetric(0.5, 51));
    for (std::size_t i = 0; i < s.s_add_1.size(); ++i) {
        CHECK(s.s_add_1[i] == 0.0);
        CHECK(s.s_add_2[i] == 0.0);
    }
    auto total = integrated_added_noise(cfg);
    CHECK(total[0] == 0.0);
    CHECK(total[1] == 0.0);
}

TEST_CASE("noise scales with 2 n_bar + 1") {
    auto a = fig_s4(3);
    auto b = a;
    b.n_bar = 2.0 * a.n_bar + 0.5;  // doubles n_bar + 1/2
    auto ta = integrated_added_noise(a), tb = integrated_added_noise(b);
    CHECK(tb[0] == doctest::Approx(2.0 * ta[0]).epsilon(1e-12));
    CHECK(tb[1] == doctest::Approx(2.0 * ta[1]).epsilon(1e-12));
}

TEST_CASE("noise densities are nonnegative and thread independent") {
    auto cfg = fig_s4(6);
    auto grid = FrequencyGrid::symmetric(1.0, 1001);
    auto a = added_noise_spectrum(cfg, grid, Execution::Serial);
    auto b = added_noise_spectrum(cfg, grid, Execution::Parallel);
    for (std::size_t i = 0; i < a.s_add_1.size(); ++i) {
        CHECK(a.s_add_1[i] >= 0.0);
        CHECK(a.s_add_2[i] >= 0.0);
        CHECK(a.s_add_1[i] == b.s_add_1[i]);
        CHECK(a.s_add_2[i] == b.s_add_2[i]);
    }
}

TEST_CASE("mirror-symmetric array: reversed labels swap the ports") {
    auto cfg = fig_s4(5);
    auto sites = materialize_sites(cfg);
    std::vector<std::pair<double, double>> swapped;
    for (auto it = sites.rbegin(); it != sites.rend(); ++it) swapped.emplace_back(it->g1, it->g2);
    auto rev = cfg;
    rev.profile = CouplingProfile::explicit_sites(swapped);
    auto grid = FrequencyGrid::symmetric(0.3, 61);
    auto a = added_noise_spectrum(cfg, grid), b = added_noise_spectrum(rev, grid);
    for (std::size_t i = 0; i < a.s_add_1.size(); ++i) {
        CHECK(b.s_add_1[i] == doctest::Approx(a.s_add_2[i]).epsilon(1e-10));
        CHECK(b.s_add_2[i] == doctest::Approx(a.s_add_1[i]).epsilon(1e-10));
    }
    std::vector<std::pair<double, double>> fields;
    for (const auto& s : sites) fields.emplace_back(s.g2, s.g1);
    auto flip = cfg;
    flip.profile = CouplingProfile::explicit_sites(fields);
    auto c = added_noise_spectrum(flip, grid);
    for (std::size_t i = 0; i < a.s_add_1.size(); ++i) {
        CHECK(c.s_add_1[i] == doctest::Approx(b.s_add_1[i]).epsilon(1e-10));
        CHECK(c.s_add_2[i] == doctest::Approx(b.s_add_2[i]).epsilon(1e-10));
    }
}

TEST_CASE("resonant analytic noise") {
    auto v = added_noise_resonant_analytic(800.0, 100.0, 10);
    CHECK(v[1] == doctest::Approx(4.0 * 800 * 201 / (801.0 * 801.0) / 20.0));
    CHECK(v[1] == doctest::Approx(0.0501).epsilon(1e-3));
    CHECK(v[0] == doctest::Approx(v[1] * 200.0));
    auto big = added_noise_resonant_analytic(1e15, 0.0, 3);
    CHECK(big[0] < 1e-13);
}

TEST_CASE("single linear site on resonance") {
    auto cfg = make_config(1, CouplingProfile::linear(0.1, 0.1), 5e-5, 100.0);
    auto s = added_noise_spectrum(cfg, FrequencyGrid::symmetric(1e-3, 3));
    const double c = 800.0;
    CHECK(s.s_add_1[1] == doctest::Approx(4.0 * c * 201.0 / ((c + 1.0) * (c + 1.0))).epsilon(1e-10));
    CHECK(s.s_add_2[1] == 0.0);
}

TEST_CASE("equal-cooperativity arrays follow the dark-mode analytics") {
    // Dark port: the smooth rotation sum gives pi^2/8 times the analytic value.
    // Bright port: analytic value times the attenuation (1 - e^-x)/x, x = 4N/C.
    for (std::size_t n : {10u, 50u, 200u}) {
        auto cfg = circular(n, 0.1, 5e-5, 100.0);
        auto s = added_noise_spectrum(cfg, FrequencyGrid::symmetric(1e-3, 3));
        auto an = added_noise_resonant_analytic(800.0, 100.0, n);
        const double x = 4.0 * static_cast<double>(n) / 800.0;
        CHECK(s.s_add_2[1] / an[1] == doctest::Approx(std::numbers::pi * std::numbers::pi / 8.0).epsilon(5e-3));
        CHECK(s.s_add_1[1] / an[0] == doctest::Approx((1.0 - std::exp(-x)) / x).epsilon(5e-3));
    }
}

TEST_CASE("growing arrays shift noise from the dark to the bright port") {
    std::vector<double> bright, dark, totals;
    for (std::size_t n = 1; n <= 6; ++n) {
        auto cfg = fig_s4(n);
        auto s = added_noise_spectrum(cfg, FrequencyGrid::symmetric(1e-3, 3));
        bright.push_back(s.s_add_1[1]);
        dark.push_back(s.s_add_2[1]);
        totals.push_back(integrated_added_noise(cfg)[1]);
    }
    for (std::size_t i = 1; i < 6; ++i) {
        CHECK(bright[i] > bright[i - 1]);
        CHECK(totals[i] > totals[i - 1]);
        // Dark-port density falls overall; small ripple between neighbours is allowed.
        CHECK(dark[i] < dark[0]);
        CHECK(dark[i] <= 1.02 * dark[i - 1]);
    }
    CHECK(*std::min_element(dark.begin(), dark.end()) == dark.back());
    CHECK(totals.back() / totals.front() < 6.0);
}

TEST_CASE("integration window override") {
    auto cfg = fig_s4(3);
    auto narrow = integrated_added_noise(cfg, {0.01, 1e-6});
    auto wide = integrated_added_noise(cfg, {0.1, 1e-6});
    CHECK(wide[1] > narrow[1]);
    auto s = added_noise_spectrum(cfg, FrequencyGrid::symmetric(0.005, 2001));
    double trap = 0.0;
    for (std::size_t i = 1; i < s.s_add_2.size(); ++i)
        trap += 0.5 * (s.s_add_2[i] + s.s_add_2[i - 1]) * s.grid.step();
    CHECK(narrow[1] == doctest::Approx(trap).epsilon(1e-4));
}

TEST_CASE("stokes noise vanishes without coupling") {
    auto cfg = stokes_config(4, 0.1);
    cfg.profile = CouplingProfile::linear(0.0, 0.0);
    auto s = stokes_noise_spectrum(cfg, {9.5, 10.5, 101});
    for (double d : s.density) CHECK(d == 0.0);
}

TEST_CASE("stokes noise decreases with the sideband ratio") {
    double previous = 1e300;
    for (double ratio : {0.1, 0.05, 0.025}) {
        const double n = integrated_stokes_noise(stokes_config(10, ratio));
        CHECK(n * 4.0 < previous);
        previous = n;
    }
    CHECK(stokes_noise_spectrum(stokes_config(2, 0.1), {9.0, 11.0, 11}).resolved_sideband);
    CHECK_FALSE(stokes_noise_spectrum(stokes_config(2, 0.5), {1.0, 3.0, 11}).resolved_sideband);
}

TEST_CASE("stokes noise for moderate arrays stays near the single-site value") {
    const double one = integrated_stokes_noise(stokes_config(1, 0.1));
    const double ten = integrated_stokes_noise(stokes_config(10, 0.1));
    CHECK(ten <= one);
}

TEST_CASE("stokes spectrum is thread independent and nonnegative") {
    auto cfg = stokes_config(20, 0.1);
    FrequencyGrid grid{9.0, 11.0, 801};
    auto a = stokes_noise_spectrum(cfg, grid, Execution::Serial);
    auto b = stokes_noise_spectrum(cfg, grid, Execution::Parallel);
    for (std::size_t i = 0; i < a.density.size(); ++i) {
        CHECK(a.density[i] >= 0.0);
        CHECK(a.density[i] == b.density[i]);
    }
}

TEST_CASE("lab-frame bandwidth is centred at the mechanical frequency") {
    auto bw = lab_frame_bandwidth(stokes_config(10, 0.1));
    CHECK(std::abs(0.5 * (bw.omega_lo + bw.omega_hi) - 10.0) < 0.05);
    auto cfg = stokes_config(3, 0.1);
    cfg.omega_m.reset();
    CHECK_THROWS_AS(lab_frame_bandwidth(cfg), ConfigError);
}
