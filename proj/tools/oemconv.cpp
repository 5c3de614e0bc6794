// oemconv: command-line front end for the transducer-array library.
//
// Every command reads an optional JSON config (--config), applies flag
// overrides, writes its data files into --out-dir and a manifest
// <command>_manifest.json next to them.
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical error,
// 4 infeasible optimization.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "oemarray/array.hpp"
#include "oemarray/config_io.hpp"
#include "oemarray/errors.hpp"
#include "oemarray/loss.hpp"
#include "oemarray/noise.hpp"
#include "oemarray/optimize.hpp"
#include "oemarray/output.hpp"
#include "oemarray/parallel.hpp"
#include "oemarray/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace oem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitInfeasible = 4;

class Infeasible : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags shared by all commands. Each maps onto a config or "run" key.
struct Overrides {
    std::optional<long long> n;
    std::optional<std::string> profile;
    std::optional<double> g, g1, g2, beta, kappa1, kappa2, gamma, n_bar, omega_m;
    std::optional<double> kappa_l_ratio, kappa_int, epsilon, phase, delay;
};

struct Context {
    std::string config_path;
    std::string out_dir = ".";
    int threads = 0;
    Overrides ov;
};

void add_config_flags(CLI::App* cmd, Overrides& o) {
    cmd->add_option("--n", o.n, "array size (n_sites)");
    cmd->add_option("--profile", o.profile, "coupling profile: linear | tanh")->check(CLI::IsMember({"linear", "tanh"}));
    cmd->add_option("--g", o.g, "peak coupling for both fields (profile.g_bar1 = g_bar2)");
    cmd->add_option("--g1", o.g1, "profile.g_bar1");
    cmd->add_option("--g2", o.g2, "profile.g_bar2");
    cmd->add_option("--beta", o.beta, "profile.beta");
    cmd->add_option("--kappa1", o.kappa1, "kappa1 (constant)");
    cmd->add_option("--kappa2", o.kappa2, "kappa2 (constant)");
    cmd->add_option("--gamma", o.gamma, "mechanical linewidth");
    cmd->add_option("--n-bar", o.n_bar, "thermal occupation");
    cmd->add_option("--omega-m", o.omega_m, "mechanical frequency");
    cmd->add_option("--kappa-l-ratio", o.kappa_l_ratio, "loss.kappa_l_ratio");
    cmd->add_option("--kappa-int", o.kappa_int, "loss.kappa_int");
    cmd->add_option("--epsilon", o.epsilon, "loss.epsilon");
    cmd->add_option("--phase", o.phase, "loss.phase");
    cmd->add_option("--delay", o.delay, "loss.delay");
}

json default_config() {
    return {{"schema_version", std::string(kSchemaVersion)},
            {"n_sites", 1},
            {"profile", {{"kind", "tanh"}, {"g_bar1", 0.08}, {"g_bar2", 0.08}, {"beta", 4.5}}}};
}

json resolve_json(const Context& ctx) {
    json j = ctx.config_path.empty() ? default_config() : load_json_file(ctx.config_path);
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    const Overrides& o = ctx.ov;
    if (o.n) j["n_sites"] = *o.n;
    if (!j.contains("profile") || !j["profile"].is_object()) j["profile"] = default_config()["profile"];
    json& p = j["profile"];
    if (o.profile) {
        p["kind"] = *o.profile;
        p.erase("values");
    }
    if (o.g) p["g_bar1"] = p["g_bar2"] = *o.g;
    if (o.g1) p["g_bar1"] = *o.g1;
    if (o.g2) p["g_bar2"] = *o.g2;
    if (o.beta) p["beta"] = *o.beta;
    if (o.kappa1) j["kappa1"] = *o.kappa1;
    if (o.kappa2) j["kappa2"] = *o.kappa2;
    if (o.gamma) j["gamma"] = *o.gamma;
    if (o.n_bar) j["n_bar"] = *o.n_bar;
    if (o.omega_m) j["omega_m"] = *o.omega_m;
    auto set_loss = [&](const char* key, const std::optional<double>& v) {
        if (v) j["loss"][key] = *v;
    };
    set_loss("kappa_l_ratio", o.kappa_l_ratio);
    set_loss("kappa_int", o.kappa_int);
    set_loss("epsilon", o.epsilon);
    set_loss("phase", o.phase);
    set_loss("delay", o.delay);
    return j;
}

// Run settings: the config's "run" object with flag overrides on top.
template <class T>
T run_value(const json& j, const char* key, const std::optional<T>& flag, T fallback) {
    if (flag) return *flag;
    if (j.contains("run") && j["run"].contains(key)) {
        try {
            return j["run"][key].get<T>();
        } catch (const json::exception& e) {
            throw ConfigError(std::string("invalid run.") + key + ": " + e.what());
        }
    }
    return fallback;
}

struct Run {
    std::string command;
    json config_json;
    ArrayConfig config;
    json settings = json::object();
    std::vector<std::string> outputs;
    fs::path dir;
    std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();

    fs::path file(const std::string& name) {
        outputs.push_back(name);
        return dir / name;
    }

    void finish() {
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        json m = {{"command", command},
                  {"tool_version", std::string(kToolVersion)},
                  {"schema_version", std::string(kSchemaVersion)},
                  {"config", config_to_json(config)},
                  {"run", settings},
                  {"threads", max_threads()},
                  {"wall_clock_seconds", secs},
                  {"outputs", outputs}};
        write_json(dir / (command + "_manifest.json"), m);
    }
};

Run start_run(const std::string& command, const Context& ctx) {
    Run r;
    r.command = command;
    r.config_json = resolve_json(ctx);
    r.config = config_from_json(r.config_json);
    r.dir = ctx.out_dir;
    std::error_code ec;
    fs::create_directories(r.dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + ctx.out_dir + "': " + ec.message());
    return r;
}

json bandwidth_json(const BandwidthResult& b) {
    return {{"fwhm", b.fwhm},       {"omega_lo", b.omega_lo},         {"omega_hi", b.omega_hi},
            {"omega_peak", b.omega_peak}, {"peak_efficiency", b.peak_value}, {"passband_min", b.passband_min}};
}

FrequencyGrid grid_from(const json& cfg, std::optional<double> wmin, std::optional<double> wmax,
                        std::optional<long long> points, double default_max, json& settings) {
    const double hi = run_value<double>(cfg, "omega_max", wmax, default_max);
    const double lo = run_value<double>(cfg, "omega_min", wmin, -hi);
    const long long n = run_value<long long>(cfg, "points", points, 2001);
    if (n < 2) throw ConfigError("--points must be >= 2");
    FrequencyGrid g{lo, hi, static_cast<std::size_t>(n)};
    g.validate();
    settings["omega_min"] = lo;
    settings["omega_max"] = hi;
    settings["points"] = n;
    return g;
}

// ---------------------------------------------------------------- commands

struct GridFlags {
    std::optional<double> omega_min, omega_max;
    std::optional<long long> points;
};

void add_grid_flags(CLI::App* cmd, GridFlags& g) {
    cmd->add_option("--omega-min", g.omega_min, "lower grid edge (default -omega-max)");
    cmd->add_option("--omega-max", g.omega_max, "upper grid edge");
    cmd->add_option("--points", g.points, "grid points");
}

void cmd_spectrum(const Context& ctx, const GridFlags& gf) {
    Run r = start_run("spectrum", ctx);
    const auto grid = grid_from(r.config_json, gf.omega_min, gf.omega_max, gf.points, 2.0, r.settings);
    const Spectrum s = conversion_spectrum(r.config, grid);
    std::vector<double> phase(s.t21.size(), std::numeric_limits<double>::quiet_NaN());
    try {
        phase = unwrapped_phase(s);
    } catch (const NumericalError&) {
    }
    CsvTable t({"omega", "re_t21", "im_t21", "abs2_t21", "phase_unwrapped"});
    for (std::size_t i = 0; i < s.t21.size(); ++i)
        t.add_row({grid.at(i), s.t21[i].real(), s.t21[i].imag(), std::norm(s.t21[i]), phase[i]});
    t.write(r.file("spectrum.csv"));

    json bw = bandwidth_json(array_bandwidth(r.config));
    bw["n_sites"] = r.config.n_sites;
    bw["adiabaticity_margin"] = adiabaticity_margin(r.config);
    const auto& p = r.config.profile;
    if (p.kind != ProfileKind::Explicit && p.g_bar1 == p.g_bar2 && r.config.kappa1 == r.config.kappa2 &&
        r.config.kappa1.start == r.config.kappa1.end)
        bw["fwhm_eq4"] = bandwidth_analytic(p.g_bar1, r.config.kappa1.start, r.config.n_sites);
    write_json(r.file("bandwidth.json"), bw);
    r.finish();
}

void cmd_bandwidth_scan(const Context& ctx, std::optional<long long> nmin_f, std::optional<long long> nmax_f,
                        std::optional<long long> nstep_f, bool asymmetric_flag) {
    Run r = start_run("bandwidth-scan", ctx);
    const long long nmin = run_value<long long>(r.config_json, "n_min", nmin_f, 1);
    const long long nmax = run_value<long long>(r.config_json, "n_max", nmax_f, nmin);
    const long long step = run_value<long long>(r.config_json, "n_step", nstep_f, 1);
    const bool asym = asymmetric_flag || run_value<bool>(r.config_json, "asymmetric", std::nullopt, false);
    if (nmin < 1 || nmax < nmin || step < 1) throw ConfigError("need 1 <= n_min <= n_max and n_step >= 1");
    const auto& p = r.config.profile;
    if (p.kind == ProfileKind::Explicit) throw ConfigError("bandwidth-scan needs a linear or tanh profile");
    if (p.g_bar1 != p.g_bar2 || !(r.config.kappa1 == r.config.kappa2))
        throw ConfigError("bandwidth-scan compares against the symmetric closed forms; use g_bar1 = g_bar2, kappa1 = kappa2");
    const double g = p.g_bar1, kappa = r.config.kappa1.start;
    r.settings.update({{"n_min", nmin}, {"n_max", nmax}, {"n_step", step}, {"asymmetric", asym}});

    std::vector<std::string> cols{"n", "fwhm_numeric", "fwhm_eq4", "fwhm_linear_fit"};
    if (asym) cols.emplace_back("fwhm_asymmetric");
    CsvTable t(cols);
    for (long long n = nmin; n <= nmax; n += step) {
        ArrayConfig c = r.config;
        c.n_sites = static_cast<std::size_t>(n);
        std::vector<double> row{static_cast<double>(n), array_bandwidth(c).fwhm,
                                bandwidth_analytic(g, kappa, c.n_sites),
                                4.0 * g * g * static_cast<double>(n) / kappa};
        if (asym) {
            c.kappa2 = LinewidthProfile::constant(10.0 * kappa);
            row.push_back(array_bandwidth(c).fwhm);
        }
        t.add_row(std::move(row));
    }
    t.write(r.file("bandwidth_scan.csv"));
    r.finish();
}

void cmd_noise(const Context& ctx, const GridFlags& gf, std::optional<double> window) {
    Run r = start_run("noise", ctx);
    const auto grid = grid_from(r.config_json, gf.omega_min, gf.omega_max, gf.points, 1.0, r.settings);
    const NoiseSpectrum s = added_noise_spectrum(r.config, grid);
    CsvTable t({"omega", "s_add_port1", "s_add_port2"});
    for (std::size_t i = 0; i < s.s_add_1.size(); ++i) t.add_row({grid.at(i), s.s_add_1[i], s.s_add_2[i]});
    t.write(r.file("noise.csv"));

    IntegrationOptions opts;
    opts.window = window;
    if (!window && r.config_json.contains("run") && r.config_json["run"].contains("window"))
        opts.window = r.config_json["run"]["window"].get<double>();
    const double w = opts.window ? *opts.window : array_bandwidth(r.config).fwhm;
    opts.window = w;
    const auto tot = integrated_added_noise(r.config, opts);
    r.settings["window"] = w;
    write_json(r.file("noise_integrated.json"),
               {{"window", w}, {"integrated_port1", tot[0]}, {"integrated_port2", tot[1]}});
    r.finish();
}

void cmd_stokes(const Context& ctx, std::optional<double> half_width_f, std::optional<long long> points_f) {
    Run r = start_run("stokes", ctx);
    if (!r.config.omega_m) throw ConfigError("stokes needs omega_m (--omega-m or config)");
    const double wm = *r.config.omega_m;
    const double hw = run_value<double>(r.config_json, "half_width", half_width_f, 0.5 * wm);
    const long long n = run_value<long long>(r.config_json, "points", points_f, 2001);
    if (n < 2 || !(hw > 0.0)) throw ConfigError("stokes needs --half-width > 0 and --points >= 2");
    r.settings.update({{"half_width", hw}, {"points", n}});
    const FrequencyGrid grid{wm - hw, wm + hw, static_cast<std::size_t>(n)};
    const StokesSpectrum s = stokes_noise_spectrum(r.config, grid);
    if (!s.resolved_sideband)
        std::cerr << "warning: kappa/omega_m > 0.3, outside the resolved-sideband regime\n";
    CsvTable t({"omega", "stokes_density"});
    for (std::size_t i = 0; i < s.density.size(); ++i) t.add_row({grid.at(i), s.density[i]});
    t.write(r.file("stokes.csv"));
    const BandwidthResult lb = lab_frame_bandwidth(r.config);
    const double total = integrated_stokes_noise(r.config, {.window = lb.fwhm});
    write_json(r.file("stokes_integrated.json"), {{"window", lb.fwhm},
                                                   {"n_stokes", total},
                                                   {"resolved_sideband", s.resolved_sideband}});
    r.finish();
}

std::optional<LossParameter> loss_param(const std::string& s) {
    if (s == "n") return LossParameter::NSites;
    if (s == "kappa-int") return LossParameter::KappaInt;
    if (s == "epsilon") return LossParameter::Epsilon;
    if (s == "kappa-l-ratio") return LossParameter::KappaLRatio;
    return std::nullopt;
}

ArrayConfig with_param(ArrayConfig c, LossParameter p, double v) {
    switch (p) {
        case LossParameter::NSites: c.n_sites = static_cast<std::size_t>(v); break;
        case LossParameter::KappaInt: c.loss.kappa_int = v; break;
        case LossParameter::Epsilon: c.loss.epsilon = v; break;
        case LossParameter::KappaLRatio: c.loss.kappa_l_ratio = v; break;
    }
    c.validate();
    return c;
}

void cmd_loss(const Context& ctx, std::optional<std::string> param_f, std::optional<std::vector<double>> values_f,
              const GridFlags& gf) {
    Run r = start_run("loss", ctx);
    const std::string pname = run_value<std::string>(r.config_json, "param", param_f, "kappa-int");
    const auto param = loss_param(pname);
    if (!param) throw ConfigError("--param must be one of n, kappa-int, epsilon, kappa-l-ratio");
    const auto values = run_value<std::vector<double>>(r.config_json, "values", values_f, {0.0, 0.001, 0.005, 0.01});
    if (values.empty()) throw ConfigError("--values must not be empty");
    r.settings.update({{"param", pname}, {"values", values}});
    if (*param == LossParameter::NSites)
        for (double v : values)
            if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("array sizes must be positive integers");

    const auto grid = grid_from(r.config_json, gf.omega_min, gf.omega_max, gf.points, 1.0, r.settings);
    CsvTable spec({"param", "omega", "abs2_t21"});
    for (double v : values) {
        const auto p = lossy_efficiency_spectrum(with_param(r.config, *param, v), grid);
        for (std::size_t i = 0; i < p.size(); ++i) spec.add_row({v, grid.at(i), p[i]});
    }
    spec.write(r.file("loss_spectra.csv"));

    CsvTable res({"param", "efficiency"});
    for (const auto& pt : efficiency_vs_loss(r.config, *param, values)) res.add_row({pt.value, pt.efficiency});
    res.write(r.file("loss_resonant.csv"));
    r.finish();
}

void cmd_backscatter(const Context& ctx, std::optional<std::vector<double>> ratios_f, bool fit_flag,
                     const GridFlags& gf) {
    Run r = start_run("backscatter", ctx);
    const auto ratios =
        run_value<std::vector<double>>(r.config_json, "ratios", ratios_f, {0.0, 0.1, 0.2, 0.5, 0.9});
    const bool fit = fit_flag || run_value<bool>(r.config_json, "fit_alpha", std::nullopt, false);
    if (ratios.empty()) throw ConfigError("--ratios must not be empty");
    r.settings.update({{"ratios", ratios}, {"fit_alpha", fit}});
    const auto grid = grid_from(r.config_json, gf.omega_min, gf.omega_max, gf.points, 0.5, r.settings);

    CsvTable spec({"param", "omega", "abs2_t21"});
    for (double v : ratios) {
        const auto p = lossy_efficiency_spectrum(with_param(r.config, LossParameter::KappaLRatio, v), grid);
        for (std::size_t i = 0; i < p.size(); ++i) spec.add_row({v, grid.at(i), p[i]});
    }
    spec.write(r.file("backscatter_spectra.csv"));

    CsvTable eff({"ratio", "eta", "envelope", "omega_envelope"});
    std::vector<double> etas;
    for (double v : ratios) {
        const auto b = backscatter_efficiency(r.config, v);
        etas.push_back(b.eta);
        eff.add_row({v, b.eta, b.envelope, b.omega_at});
    }
    eff.write(r.file("backscatter_efficiency.csv"));
    if (fit) {
        const AlphaFit f = backscatter_alpha_fit(ratios, etas);
        write_json(r.file("alpha_fit.json"),
                   {{"alpha", f.alpha}, {"stderr", f.stderr_}, {"points_used", f.points_used}});
        std::cout << "alpha = " << format_number(f.alpha) << " +- " << format_number(f.stderr_) << "\n";
    }
    r.finish();
}

struct OptimizeFlags {
    std::optional<double> gamma_total, min_eff;
    std::optional<unsigned long long> seed;
    std::optional<long long> random_starts, max_evals;
    bool asymmetric = false;
    bool monotone = false;
    bool grid = false;
};

void cmd_optimize(const Context& ctx, const OptimizeFlags& f) {
    Run r = start_run("optimize", ctx);
    OptimizationProblem p;
    p.n_sites = r.config.n_sites;
    p.gamma_total = run_value<double>(r.config_json, "gamma_total", f.gamma_total, 0.05);
    p.min_efficiency = run_value<double>(r.config_json, "min_efficiency", f.min_eff, 0.99);
    p.seed = run_value<unsigned long long>(r.config_json, "seed", f.seed, p.seed);
    p.random_starts = static_cast<std::size_t>(
        run_value<long long>(r.config_json, "random_starts", f.random_starts, static_cast<long long>(p.random_starts)));
    p.max_evaluations = static_cast<std::size_t>(
        run_value<long long>(r.config_json, "max_evaluations", f.max_evals, static_cast<long long>(p.max_evaluations)));
    p.symmetric = !(f.asymmetric || run_value<bool>(r.config_json, "asymmetric", std::nullopt, false));
    p.monotone = f.monotone || run_value<bool>(r.config_json, "monotone", std::nullopt, false);
    const bool grid = f.grid || run_value<bool>(r.config_json, "grid_oracle", std::nullopt, false);
    r.settings.update({{"gamma_total", p.gamma_total},
                       {"min_efficiency", p.min_efficiency},
                       {"seed", p.seed},
                       {"random_starts", p.random_starts},
                       {"max_evaluations", p.max_evaluations},
                       {"symmetric", p.symmetric},
                       {"monotone", p.monotone},
                       {"grid_oracle", grid}});

    const OptimizationResult res = grid ? grid_oracle(p) : optimize_couplings(p);
    json out = {{"n", p.n_sites},
                {"gamma_total", p.gamma_total},
                {"min_efficiency", p.min_efficiency},
                {"gamma1", res.gamma1_per_site},
                {"bandwidth", res.bandwidth},
                {"passband_min", res.passband_min},
                {"converged", res.converged},
                {"evaluations", res.evaluations},
                {"beta_fit", nullptr}};
    if (res.converged && p.n_sites >= 3) {
        try {
            out["beta_fit"] = fit_tanh_beta(res.gamma1_per_site, p.gamma_total);
        } catch (const ConfigError&) {
            // non-monotone optimum: no tanh fit
        }
    }
    write_json(r.file("optimize.json"), out);
    r.finish();
    if (!res.converged) throw Infeasible("no feasible profile found for min_efficiency " + format_number(p.min_efficiency));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Conversion spectra, noise, loss and optimization for optoelectromechanical transducer arrays"};
    app.set_version_flag("--version", std::string("oemconv ") + std::string(kToolVersion) + " (config schema " +
                                          std::string(kSchemaVersion) + ")");
    app.require_subcommand(1);
    app.fallthrough();  // global options may follow the subcommand

    Context ctx;
    app.add_option("--config", ctx.config_path, "JSON config file")->check(CLI::ExistingFile);
    app.add_option("--out-dir", ctx.out_dir, "directory for output files");
    app.add_option("--threads", ctx.threads, "cap on worker threads (default: all cores)")->check(CLI::NonNegativeNumber);

    auto* spectrum = app.add_subcommand("spectrum", "conversion spectrum and bandwidth");
    GridFlags spectrum_grid;
    add_grid_flags(spectrum, spectrum_grid);
    add_config_flags(spectrum, ctx.ov);

    auto* scan = app.add_subcommand("bandwidth-scan", "FWHM versus array size");
    std::optional<long long> n_min, n_max, n_step;
    bool asymmetric = false;
    scan->add_option("--n-min", n_min, "first array size");
    scan->add_option("--n-max", n_max, "last array size");
    scan->add_option("--n-step", n_step, "array size step");
    scan->add_flag("--asymmetric", asymmetric, "add a kappa2 = 10 kappa1 column");
    add_config_flags(scan, ctx.ov);

    auto* noise = app.add_subcommand("noise", "thermal added-noise spectra");
    GridFlags noise_grid;
    std::optional<double> noise_window;
    add_grid_flags(noise, noise_grid);
    noise->add_option("--window", noise_window, "integration window (default: conversion FWHM)");
    add_config_flags(noise, ctx.ov);

    auto* stokes = app.add_subcommand("stokes", "Stokes-scattering noise (lab frame)");
    std::optional<double> stokes_hw;
    std::optional<long long> stokes_points;
    stokes->add_option("--half-width", stokes_hw, "grid half width around omega_m");
    stokes->add_option("--points", stokes_points, "grid points");
    add_config_flags(stokes, ctx.ov);

    auto* loss = app.add_subcommand("loss", "efficiency with intrinsic or propagation loss");
    std::optional<std::string> loss_param_flag;
    std::optional<std::vector<double>> loss_values;
    GridFlags loss_grid;
    loss->add_option("--param", loss_param_flag, "n | kappa-int | epsilon | kappa-l-ratio");
    loss->add_option("--values", loss_values, "comma-separated sweep values")->delimiter(',');
    add_grid_flags(loss, loss_grid);
    add_config_flags(loss, ctx.ov);

    auto* back = app.add_subcommand("backscatter", "backscattering spectra and efficiency slope");
    std::optional<std::vector<double>> ratios;
    bool fit_alpha = false;
    GridFlags back_grid;
    back->add_option("--ratios", ratios, "comma-separated kappa_L/kappa_R values")->delimiter(',');
    back->add_flag("--fit-alpha", fit_alpha, "fit eta = 1 - alpha kappa_L/kappa_R");
    add_grid_flags(back, back_grid);
    add_config_flags(back, ctx.ov);

    auto* opt = app.add_subcommand("optimize", "constrained bandwidth maximization");
    OptimizeFlags of;
    opt->add_option("--gamma-total", of.gamma_total, "Gamma_1 + Gamma_2 per site");
    opt->add_option("--min-eff", of.min_eff, "minimum passband efficiency");
    opt->add_option("--seed", of.seed, "seed for randomized starts");
    opt->add_option("--random-starts", of.random_starts, "randomized starts");
    opt->add_option("--max-evals", of.max_evals, "evaluations per start");
    opt->add_flag("--asymmetric", of.asymmetric, "do not impose mirror symmetry");
    opt->add_flag("--monotone", of.monotone, "require Gamma_1 nondecreasing along the array");
    opt->add_flag("--grid", of.grid, "exhaustive grid search (N <= 3)");
    add_config_flags(opt, ctx.ov);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (ctx.threads > 0) set_threads(ctx.threads);
        if (*spectrum) cmd_spectrum(ctx, spectrum_grid);
        else if (*scan) cmd_bandwidth_scan(ctx, n_min, n_max, n_step, asymmetric);
        else if (*noise) cmd_noise(ctx, noise_grid, noise_window);
        else if (*stokes) cmd_stokes(ctx, stokes_hw, stokes_points);
        else if (*loss) cmd_loss(ctx, loss_param_flag, loss_values, loss_grid);
        else if (*back) cmd_backscatter(ctx, ratios, fit_alpha, back_grid);
        else if (*opt) cmd_optimize(ctx, of);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumeric;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const Infeasible& e) {
        std::cerr << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    }
    return 0;
}
