#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "oemarray/array.hpp"
#include "oemarray/errors.hpp"
#include "oemarray/loss.hpp"

using namespace oem;

namespace {

const cplx I{0.0, 1.0};

ArrayConfig make_config(std::size_t n) {
    ArrayConfig c;
    c.n_sites = n;
    c.profile = CouplingProfile::tanh(0.08, 0.08);
    return c;
}

double max_abs(const Eigen::MatrixXcd& m) { return m.cwiseAbs().maxCoeff(); }

std::size_t count_local_maxima(const std::vector<double>& v) {
    std::size_t n = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i)
        if (v[i] > v[i - 1] && v[i] >= v[i + 1]) ++n;
    return n;
}

LossySite random_site(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    LossySite s;
    s.site = {0.2 * u(rng), 0.2 * u(rng), 1.0, 1.0, 1e-3 * u(rng)};
    s.kappa_r1 = 0.5 + u(rng);
    s.kappa_r2 = 0.5 + u(rng);
    s.kappa_l1 = 0.5 * u(rng);
    s.kappa_l2 = 0.5 * u(rng);
    s.kappa_int1 = 0.05 * u(rng);
    s.kappa_int2 = 0.05 * u(rng);
    return s;
}

}  // namespace

TEST_CASE("one-sided limit of the two-sided site") {
    SiteParams p{0.07, 0.05, 1.0, 1.4, 1e-4};
    for (double w : {-0.3, 0.0, 0.2}) {
        auto s = scattering_two_sided(LossySite::from(p), w);
        CHECK(max_abs(s.S_R() - scattering_full(p, w)) < 1e-12);
        CHECK(max_abs(s.S_RL()) == 0.0);
        CHECK(max_abs(s.S_LR()) == 0.0);
        CHECK(max_abs(s.S_L() + ScatterMat2::Identity()) == 0.0);
    }
}

TEST_CASE("symmetric two-sided site converts equally in both directions") {
    auto s = scattering_two_sided(LossySite::from({0.08, 0.08, 1.0, 1.0, 1e-4}, 1.0), 0.0);
    CHECK(std::abs(s.m(1, 0)) == doctest::Approx(std::abs(s.m(3, 0))).epsilon(1e-12));
    CHECK(std::abs(s.m(3, 2)) == doctest::Approx(std::abs(s.m(1, 2))).epsilon(1e-12));
}

TEST_CASE("intrinsic loss on a bare cavity") {
    LossySite s = LossySite::from({0.0, 0.0, 1.0, 1.0, 0.0}, 0.0, 0.01);
    for (double w : {-0.5, 0.0, 0.3}) {
        auto m = scattering_two_sided(s, w);
        const double expected = std::norm((1.0 - 0.01 - 2.0 * I * w) / (1.0 + 0.01 - 2.0 * I * w));
        CHECK(std::norm(m.m(0, 0)) == doctest::Approx(expected).epsilon(1e-12));
        CHECK(std::abs(m.m(0, 0)) < 1.0);
        CHECK(m.max_singular_value() <= 1.0 + 1e-12);
    }
}

TEST_CASE("scattering and transfer forms") {
    BiScatter d;
    d.m.setZero();
    d.m.topLeftCorner<2, 2>() << 0.3, cplx(0.1, 0.2), cplx(0.1, 0.2), -0.5;
    d.m.bottomRightCorner<2, 2>() << cplx(0.2, 0.6), 0.1, 0.1, 0.7;
    auto t = scatter_to_transfer(d);
    CHECK(max_abs(t.topLeftCorner<2, 2>() - d.S_R()) < 1e-15);
    CHECK(max_abs(t.bottomRightCorner<2, 2>() - d.S_L().inverse()) < 1e-14);
    CHECK(max_abs(t.topRightCorner<2, 2>()) == 0.0);

    std::mt19937_64 rng(5);
    for (int k = 0; k < 200; ++k) {
        auto s = scattering_two_sided(random_site(rng), std::uniform_real_distribution<double>(-1, 1)(rng));
        auto back = transfer_to_scatter(scatter_to_transfer(s));
        CHECK(max_abs(back.m - s.m) < 1e-10);
        auto t2 = scatter_to_transfer(s);
        CHECK(max_abs(scatter_to_transfer(transfer_to_scatter(t2)) - t2) < 1e-10 * std::max(1.0, max_abs(t2)));
    }

    BiScatter singular;
    singular.m.setZero();
    singular.m(0, 0) = 1.0;
    CHECK_THROWS_AS(scatter_to_transfer(singular), NumericalError);
}

TEST_CASE("one-sided transfer keeps the forward block") {
    auto s = scattering_two_sided(LossySite::from({0.05, 0.05, 1.0, 1.0, 1e-4}), 0.1);
    CHECK(max_abs(scatter_to_transfer(s).topLeftCorner<2, 2>() - s.S_R()) < 1e-15);
}

TEST_CASE("free propagation") {
    CHECK(max_abs(free_propagation({}) - TransferMat4::Identity()) == 0.0);
    auto f = free_propagation(CellLink::from_epsilon(0.01));
    CHECK(std::abs(f(0, 0)) == doctest::Approx(0.99));
    CHECK(std::abs(f(1, 1)) == doctest::Approx(0.99));
    // Backward travel is attenuated along its own direction.
    CHECK(std::abs(link_scattering(CellLink::from_epsilon(0.01)).m(2, 2)) == doctest::Approx(0.99));
    CHECK_THROWS_AS(CellLink::from_epsilon(1.0).validate(), ConfigError);
    CHECK_THROWS_AS((CellLink{-0.1, 0.0, 0.0}).validate(), ConfigError);
}

TEST_CASE("common propagation phase leaves conversion magnitude unchanged") {
    auto cfg = make_config(10);
    cfg.loss.kappa_l_ratio = 0.2;
    for (double w : {-0.2, 0.0, 0.15}) {
        const double base = std::norm(lossy_array_scattering(cfg, w).t21());
        auto shifted = cfg;
        shifted.loss.phase = std::numbers::pi;
        CHECK(std::norm(lossy_array_scattering(shifted, w).t21()) == doctest::Approx(base).epsilon(1e-10));
    }
}

TEST_CASE("lossless reduction") {
    for (std::size_t n : {1u, 5u, 30u}) {
        auto cfg = make_config(n);
        cfg.gamma = 1e-4;
        auto sites = materialize_sites(cfg);
        for (double w : {-0.4, 0.0, 0.05, 0.3}) {
            auto lossy = lossy_array_scattering(cfg, w);
            CHECK(max_abs(lossy.S_R() - array_transfer(sites, w)) < 1e-10);
            CHECK(max_abs(lossy.S_RL()) < 1e-10);
            CHECK(max_abs(lossy.S_LR()) < 1e-10);
        }
    }
}

TEST_CASE("assembled arrays are passive") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 60; ++k) {
        const std::size_t n = 1 + static_cast<std::size_t>(12 * u(rng));
        std::vector<LossySite> sites;
        std::vector<CellLink> links;
        for (std::size_t j = 0; j < n; ++j) {
            sites.push_back(random_site(rng));
            links.push_back(CellLink::from_epsilon(0.05 * u(rng), 6.0 * u(rng), 6.0 * u(rng)));
        }
        const double w = 2.0 * (u(rng) - 0.5);
        CHECK(lossy_array_scattering(sites, links, w).max_singular_value() <= 1.0 + 1e-10);
    }
}

TEST_CASE("transfer product and star-product composition agree") {
    std::mt19937_64 rng(13);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 40; ++k) {
        std::vector<LossySite> sites;
        std::vector<CellLink> links;
        for (int j = 0; j < 6; ++j) {
            LossySite s = random_site(rng);
            s.kappa_l1 *= 0.2;
            s.kappa_l2 *= 0.2;
            sites.push_back(s);
            links.push_back(CellLink::from_epsilon(0.02 * u(rng), 3.0 * u(rng), 3.0 * u(rng)));
        }
        const double w = u(rng) - 0.5;
        auto a = lossy_array_scattering(sites, links, w);
        auto b = transfer_to_scatter(lossy_array_transfer(sites, links, w));
        CHECK(max_abs(a.m - b.m) < 1e-9);
    }
    std::vector<LossySite> sites(2);
    std::vector<CellLink> links(1);
    CHECK_THROWS_AS(lossy_array_scattering(sites, links, 0.0), ConfigError);
    CHECK_THROWS_AS(lossy_array_transfer(sites, links, 0.0), ConfigError);
}

TEST_CASE("strong backscatter in long arrays stays unitary") {
    for (std::size_t n : {10u, 50u})
        for (double r : {0.5, 1.0}) {
            auto cfg = make_config(n);
            cfg.loss.kappa_l_ratio = r;
            cfg.loss.phase = 0.7;
            for (double w : {-0.3, 0.01, 0.2}) {
                auto m = lossy_array_scattering(cfg, w).m;
                CHECK(max_abs(m.adjoint() * m - Eigen::Matrix4cd::Identity()) < 1e-10);
            }
        }
}

TEST_CASE("lossless cascades are unitary") {
    auto cfg = make_config(10);
    cfg.loss.kappa_l_ratio = 0.5;
    cfg.loss.phase = 0.7;
    for (double w : {-0.3, 0.01, 0.2}) {
        auto m = lossy_array_scattering(cfg, w).m;
        CHECK(max_abs(m.adjoint() * m - Eigen::Matrix4cd::Identity()) < 1e-10);
    }
}

TEST_CASE("backscattering lowers the resonant envelope") {
    auto cfg = make_config(10);
    auto grid = FrequencyGrid::symmetric(0.25, 501);
    double previous_peak = 2.0;
    for (double r : {0.1, 0.2, 0.5, 0.9}) {
        cfg.loss.kappa_l_ratio = r;
        auto e = lossy_efficiency_spectrum(cfg, grid);
        const double peak = *std::max_element(e.begin(), e.end());
        CHECK(peak < previous_peak);
        previous_peak = peak;
    }
}

TEST_CASE("equal left and right decay interferes destructively") {
    auto cfg = make_config(10);
    cfg.loss.kappa_l_ratio = 1.0;
    auto e = lossy_efficiency_spectrum(cfg, FrequencyGrid::symmetric(0.2, 4001));
    const double lossless = std::norm(array_transfer(materialize_sites(make_config(10)), 0.0)(1, 0));
    CHECK(*std::min_element(e.begin(), e.end()) < 1e-2 * lossless);
}

TEST_CASE("ripple count grows with array size") {
    std::size_t counts[2];
    std::size_t k = 0;
    for (std::size_t n : {10u, 50u}) {
        auto cfg = make_config(n);
        cfg.loss.kappa_l_ratio = 0.5;
        counts[k++] = count_local_maxima(lossy_efficiency_spectrum(cfg, FrequencyGrid::symmetric(0.3, 6001)));
    }
    CHECK(counts[1] > counts[0]);
}

TEST_CASE("efficiency decreases with loss") {
    auto base = make_config(20);
    const std::vector<double> kint{0.0, 0.001, 0.01, 0.05, 0.1};
    auto a = efficiency_vs_loss(base, LossParameter::KappaInt, kint);
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i].efficiency < a[i - 1].efficiency);

    const std::vector<double> eps{0.0, 0.001, 0.01, 0.05};
    auto b = efficiency_vs_loss(base, LossParameter::Epsilon, eps);
    for (std::size_t i = 1; i < b.size(); ++i) CHECK(b[i].efficiency < b[i - 1].efficiency);
    CHECK(b[1].efficiency > 0.95 * b[0].efficiency);

    auto large = make_config(100);
    const std::vector<double> five{0.05};
    CHECK(efficiency_vs_loss(large, LossParameter::Epsilon, five)[0].efficiency < 0.05);

    const std::vector<double> sizes{5, 10, 20, 40};
    auto cfg = base;
    cfg.loss.epsilon = 0.01;
    auto c = efficiency_vs_loss(cfg, LossParameter::NSites, sizes);
    CHECK(c.back().efficiency < c.front().efficiency);
    const std::vector<double> bad{2.5};
    CHECK_THROWS_AS(efficiency_vs_loss(cfg, LossParameter::NSites, bad), ConfigError);
}

TEST_CASE("backscatter efficiency is size independent") {
    auto a = backscatter_efficiency(make_config(10), 0.1);
    auto b = backscatter_efficiency(make_config(50), 0.1);
    CHECK(a.eta < 1.0);
    CHECK(std::abs(a.eta / b.eta - 1.0) < 0.10);
    CHECK(backscatter_efficiency(make_config(10), 0.0).eta == doctest::Approx(1.0));
}

TEST_CASE("alpha fit") {
    const std::vector<double> r{0.02, 0.05, 0.1, 0.15, 0.2};
    std::vector<double> eta;
    for (double x : r) eta.push_back(1.0 - 1.6 * x);
    auto fit = backscatter_alpha_fit(r, eta);
    CHECK(fit.alpha == doctest::Approx(1.6).epsilon(1e-12));
    CHECK(fit.stderr_ < 1e-12);
    CHECK(fit.points_used == 5);

    const std::vector<double> three{0.05, 0.1, 0.2}, three_eta{0.9, 0.8, 0.7};
    CHECK_THROWS_AS(backscatter_alpha_fit(three, three_eta), ConfigError);
    const std::vector<double> wide{0.05, 0.1, 0.2, 0.5}, wide_eta{0.9, 0.8, 0.7, 0.4};
    CHECK_THROWS_AS(backscatter_alpha_fit(wide, wide_eta), ConfigError);
    const std::vector<double> zeros{0.0, 0.0, 0.0, 0.0}, ones{1.0, 1.0, 1.0, 1.0};
    CHECK_THROWS_AS(backscatter_alpha_fit(zeros, ones), ConfigError);
}
