#include "heavytail/cli_io.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "heavytail/deformed.hpp"
#include "heavytail/free_levy.hpp"
#include "heavytail/matrix_mc.hpp"
#include "heavytail/mc_runner.hpp"
#include "heavytail/numerics.hpp"
#include "heavytail/sha256.hpp"
#include "heavytail/wigner_levy.hpp"

namespace heavytail {

std::string to_string(EnsembleKind k) {
    switch (k) {
        case EnsembleKind::wigner_levy: return "wigner-levy";
        case EnsembleKind::goe: return "goe";
        case EnsembleKind::free_sum_diag: return "free-sum-diag";
        case EnsembleKind::free_sum_wl: return "free-sum-wl";
        case EnsembleKind::deformed_wigner: return "deformed-wigner";
        case EnsembleKind::wishart_student: return "wishart-student";
    }
    throw ConfigError("unknown ensemble kind");
}

EnsembleKind ensemble_kind_from_string(const std::string& s) {
    if (s == "wigner-levy") return EnsembleKind::wigner_levy;
    if (s == "goe") return EnsembleKind::goe;
    if (s == "free-sum-diag") return EnsembleKind::free_sum_diag;
    if (s == "free-sum-wl") return EnsembleKind::free_sum_wl;
    if (s == "deformed-wigner") return EnsembleKind::deformed_wigner;
    if (s == "wishart-student") return EnsembleKind::wishart_student;
    throw ConfigError("unknown ensemble kind: " + s);
}

void EnsembleConfig::validate() const {
    if (N < 1) throw ConfigError("config: N >= 1 required");
    if (trials < 1) throw ConfigError("config: trials >= 1 required");
    switch (kind) {
        case EnsembleKind::wigner_levy:
            if (!(alpha > 0.0 && alpha <= 2.0))
                throw ConfigError("config: wigner-levy needs alpha in (0, 2]");
            if (!(beta >= -1.0 && beta <= 1.0))
                throw ConfigError("config: beta in [-1, 1]");
            if (!(range > 0.0)) throw ConfigError("config: range > 0");
            break;
        case EnsembleKind::goe:
            if (!(sigma > 0.0)) throw ConfigError("config: goe needs sigma > 0");
            break;
        case EnsembleKind::free_sum_diag:
        case EnsembleKind::free_sum_wl:
            if (K < 1) throw ConfigError("config: K >= 1 required");
            if (!(alpha > 0.0 && alpha <= 2.0))
                throw ConfigError("config: alpha in (0, 2]");
            break;
        case EnsembleKind::deformed_wigner:
            if (!(alpha > 0.0) || !(a > 0.0))
                throw ConfigError("config: deformed-wigner needs alpha > 0, a > 0");
            break;
        case EnsembleKind::wishart_student:
            if (T < 1 || N > T)
                throw ConfigError("config: wishart-student needs 1 <= N <= T");
            if (!(alpha > 0.0) || !(a > 0.0))
                throw ConfigError("config: wishart-student needs alpha > 0, a > 0");
            break;
    }
}

}  // namespace heavytail

namespace heavytail::io {

namespace {

using nlohmann::json;

json config_json_obj(const EnsembleConfig& c) {
    return json{{"kind", to_string(c.kind)},
                {"N", c.N},
                {"T", c.T},
                {"K", c.K},
                {"alpha", c.alpha},
                {"beta", c.beta},
                {"range", c.range},
                {"sigma", c.sigma},
                {"a", c.a},
                {"ratio", c.ratio},
                {"scaling_exponent", c.scaling_exponent},
                {"trials", c.trials}};
}

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

void RunManifest::write(const std::string& path) const {
    json j;
    j["command"] = command;
    j["config"] = json::parse(config_json);
    j["seed"] = seed;
    j["workers"] = workers;
    j["tool_version"] = tool_version;
    j["seed_derivation"] =
        "trial seed i = splitmix64(splitmix64(root ^ (0x9e3779b97f4a7c15 * (i+1))))";
    json outs = json::array();
    for (const auto& [p, h] : outputs) outs.push_back({{"path", p}, {"sha256", h}});
    j["outputs"] = outs;
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << j.dump(2) << "\n";
}

std::string config_to_json(const EnsembleConfig& cfg) {
    return config_json_obj(cfg).dump(2);
}

void save_config(const EnsembleConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << config_to_json(cfg) << "\n";
}

EnsembleConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    static const char* known[] = {"kind", "N", "T", "K", "alpha", "beta",
                                  "range", "sigma", "a", "ratio",
                                  "scaling_exponent", "trials"};
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* k : known) ok = ok || it.key() == k;
        if (!ok) throw ConfigError("config: unknown key '" + it.key() + "'");
    }
    EnsembleConfig c;
    try {
        c.kind = ensemble_kind_from_string(j.at("kind").get<std::string>());
        c.N = j.value("N", 0);
        c.T = j.value("T", 0);
        c.K = j.value("K", 0);
        c.alpha = j.value("alpha", 2.0);
        c.beta = j.value("beta", 0.0);
        c.range = j.value("range", 1.0);
        c.sigma = j.value("sigma", 1.0);
        c.a = j.value("a", 1.0);
        c.ratio = j.value("ratio", 0.0);
        c.scaling_exponent = j.value("scaling_exponent", 0.5);
        c.trials = j.value("trials", 1);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

void CsvWriter::add_row(const std::vector<double>& row) {
    if (row.size() != header_.size())
        throw ConfigError("csv: row width mismatch");
    rows_.push_back(row);
}

void CsvWriter::write(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    for (std::size_t i = 0; i < header_.size(); ++i)
        out << header_[i] << (i + 1 < header_.size() ? "," : "\n");
    for (const auto& r : rows_) {
        for (std::size_t i = 0; i < r.size(); ++i)
            out << fmt17(r[i]) << (i + 1 < r.size() ? "," : "\n");
    }
}

namespace {

struct Ctx {
    std::string out_prefix = "out";
    std::uint64_t seed = 1;
    int workers = 0;
    std::string command_line;
    std::vector<std::pair<std::string, std::string>> outputs;

    int eff_workers() const { return workers > 0 ? workers : default_workers(); }

    void ensure_dir() const {
        auto dir = std::filesystem::path(out_prefix).parent_path();
        if (!dir.empty()) std::filesystem::create_directories(dir);
    }

    std::string emit_csv(const CsvWriter& w, const std::string& suffix) {
        std::string path = out_prefix + suffix;
        w.write(path);
        outputs.emplace_back(path, sha256_file(path));
        return path;
    }

    void finish(const std::string& cfg_json) {
        RunManifest m;
        m.command = command_line;
        m.config_json = cfg_json;
        m.seed = seed;
        m.workers = eff_workers();
        m.outputs = outputs;
        m.write(out_prefix + "_manifest.json");
    }
};

double semicircle_cdf(double x) {
    if (x <= -2.0) return 0.0;
    if (x >= 2.0) return 1.0;
    return 0.5 + (x * std::sqrt(4.0 - x * x)) / (4.0 * kPi) +
           std::asin(0.5 * x) / kPi;
}

double semicircle_draw(Rng& rng) {
    double u = rng.uniform();
    double lo = -2.0, hi = 2.0;
    for (int i = 0; i < 60; ++i) {
        double m = 0.5 * (lo + hi);
        (semicircle_cdf(m) < u ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

// Parallel trial loop collecting SpectralSamples in trial order.
template <class F>
std::vector<mc::SpectralSample> run_trials(int trials, std::uint64_t seed,
                                           int workers, F&& one_trial) {
    std::vector<mc::SpectralSample> out(trials);
    parallel_for(trials, workers, [&](int t) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(t)));
        out[t] = one_trial(t, rng);
        out[t].seed = seed;
    });
    return out;
}

void emit_histogram_csv(Ctx& ctx, const mc::Histogram& h,
                        const std::vector<double>* reference,
                        const std::string& refname,
                        const std::vector<std::vector<double>>* extra = nullptr,
                        const std::vector<std::string>* extra_names = nullptr) {
    std::vector<std::string> header = {"bin_lo", "bin_hi", "bin_center",
                                       "mc_density", "mc_stderr"};
    if (reference) header.insert(header.begin() + 3, refname);
    if (extra_names)
        for (const auto& nm : *extra_names) header.push_back(nm);
    CsvWriter w(header);
    for (std::size_t i = 0; i + 1 < h.edges.size(); ++i) {
        std::vector<double> row = {h.edges[i], h.edges[i + 1],
                                   0.5 * (h.edges[i] + h.edges[i + 1])};
        if (reference) row.push_back((*reference)[i]);
        row.push_back(h.density[i]);
        row.push_back(h.stderr_[i]);
        if (extra)
            for (const auto& col : *extra) row.push_back(col[i]);
        w.add_row(row);
    }
    ctx.emit_csv(w, ".csv");
}

// ---- subcommand handlers -------------------------------------------------

void cmd_stable_pdf(Ctx& ctx, double alpha, double beta, double range,
                    double xmin, double xmax, int points) {
    stable::StableParams p{alpha, beta, range};
    p.validate();
    CsvWriter w({"x", "pdf"});
    for (int i = 0; i < points; ++i) {
        double x = xmin + (xmax - xmin) * i / std::max(1, points - 1);
        w.add_row({x, stable::pdf(x, p)});
    }
    ctx.emit_csv(w, ".csv");
    json cfg{{"alpha", alpha}, {"beta", beta}, {"range", range},
             {"xmin", xmin},   {"xmax", xmax}, {"points", points}};
    ctx.finish(cfg.dump(2));
}

wl::RunningParams solve_wl_cached(double alpha, const wl::SolveConfig& scfg,
                                  const std::string& cache) {
    if (!cache.empty() && std::filesystem::exists(cache)) {
        auto rp = wl::load_json(cache);
        if (std::abs(rp.alpha - alpha) < 1e-12 && rp.residual <= scfg.tol &&
            rp.grid.size() == static_cast<std::size_t>(scfg.grid.nodes) &&
            std::abs(rp.grid.back() - scfg.grid.x_max) < 1e-9)
            return rp;
    }
    auto rp = wl::solve_running_params(alpha, scfg);
    if (!cache.empty()) wl::save_json(rp, cache);
    return rp;
}

void cmd_wl_density(Ctx& ctx, double alpha, double range, double xmin,
                    double xmax, int points, const wl::SolveConfig& scfg,
                    const std::string& cache) {
    auto rp = solve_wl_cached(alpha, scfg, cache);
    CsvWriter w({"lambda", "density"});
    for (int i = 0; i < points; ++i) {
        double l = xmin + (xmax - xmin) * i / std::max(1, points - 1);
        w.add_row({l, wl::density(l, alpha, range, rp)});
    }
    ctx.emit_csv(w, ".csv");
    wl::save_csv(rp, ctx.out_prefix + "_params.csv");
    ctx.outputs.emplace_back(ctx.out_prefix + "_params.csv",
                             sha256_file(ctx.out_prefix + "_params.csv"));
    json cfg{{"alpha", alpha},        {"range", range},
             {"xmin", xmin},          {"xmax", xmax},
             {"points", points},      {"grid_x_max", scfg.grid.x_max},
             {"grid_nodes", scfg.grid.nodes}, {"tol", scfg.tol},
             {"residual", rp.residual}, {"iterations", rp.iterations}};
    ctx.finish(cfg.dump(2));
}

void cmd_free_density(Ctx& ctx, double alpha, double beta, double range,
                      double xmin, double xmax, int points, bool want_potential) {
    freelevy::FreeStableParams p{alpha, beta, range};
    p.validate();
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i)
        xs[i] = xmin + (xmax - xmin) * i / std::max(1, points - 1);
    CsvWriter w({"lambda", want_potential ? "potential" : "density"});
    if (want_potential) {
        for (double x : xs) w.add_row({x, freelevy::potential(x, p)});
    } else {
        auto gv = freelevy::resolvent_curve(xs, p);
        for (int i = 0; i < points; ++i)
            w.add_row({xs[i], std::max(0.0, -gv[i].g.imag() / kPi)});
    }
    ctx.emit_csv(w, ".csv");
    json cfg{{"alpha", alpha}, {"beta", beta}, {"range", range},
             {"xmin", xmin},   {"xmax", xmax}, {"points", points}};
    ctx.finish(cfg.dump(2));
}

void cmd_free_add(Ctx& ctx, std::vector<double> p1, std::vector<double> p2,
                  double xmin, double xmax, int points) {
    freelevy::FreeStableParams a{p1[0], p1[1], p1[2]};
    freelevy::FreeStableParams b{p2[0], p2[1], p2[2]};
    a.validate();
    b.validate();
    auto r = freelevy::free_add(
        [a](freelevy::Complex z) { return freelevy::stable_r_transform(z, a); },
        [b](freelevy::Complex z) { return freelevy::stable_r_transform(z, b); });
    std::vector<double> xs(points);
    for (int i = 0; i < points; ++i)
        xs[i] = xmin + (xmax - xmin) * i / std::max(1, points - 1);
    auto dens = freelevy::density_from_r(r, xs);
    CsvWriter w({"lambda", "density"});
    for (int i = 0; i < points; ++i) w.add_row({xs[i], dens[i]});
    ctx.emit_csv(w, ".csv");
    json cfg{{"alpha1", p1[0]}, {"beta1", p1[1]}, {"range1", p1[2]},
             {"alpha2", p2[0]}, {"beta2", p2[1]}, {"range2", p2[2]},
             {"xmin", xmin},    {"xmax", xmax},   {"points", points}};
    ctx.finish(cfg.dump(2));
}

std::vector<mc::SpectralSample> sample_ensemble(const EnsembleConfig& cfg,
                                                std::uint64_t seed, int workers) {
    switch (cfg.kind) {
        case EnsembleKind::wigner_levy:
            return run_trials(cfg.trials, seed, workers, [&](int, Rng& rng) {
                Mat a = mc::sample_wigner_levy(
                    cfg.N, {cfg.alpha, cfg.beta, cfg.range}, rng);
                auto s = mc::eigen_sym_sample(a, false);
                s.config = cfg;
                return s;
            });
        case EnsembleKind::goe:
            return run_trials(cfg.trials, seed, workers, [&](int, Rng& rng) {
                Mat a = mc::sample_goe(cfg.N, cfg.sigma, rng);
                auto s = mc::eigen_sym_sample(a, false);
                s.config = cfg;
                return s;
            });
        case EnsembleKind::free_sum_diag:
            return run_trials(cfg.trials, seed, workers, [&](int, Rng& rng) {
                auto s = freelevy::free_sum_diagonal(
                    cfg.N, cfg.K, cfg.alpha,
                    [](Rng& r) { return semicircle_draw(r); }, rng);
                s.config.trials = cfg.trials;
                return s;
            });
        case EnsembleKind::free_sum_wl:
            return run_trials(cfg.trials, seed, workers, [&](int, Rng& rng) {
                return freelevy::free_sum_wigner_levy(
                    cfg.N, cfg.K, {cfg.alpha, cfg.beta, cfg.range}, rng);
            });
        case EnsembleKind::deformed_wigner:
            return run_trials(cfg.trials, seed, workers, [&](int, Rng& rng) {
                return deformed::deformed_wigner_sample(
                    cfg.N, {cfg.alpha, cfg.a}, rng);
            });
        case EnsembleKind::wishart_student: {
            deformed::WishartConfig wc;
            wc.N = cfg.N;
            wc.T = cfg.T;
            wc.mixture = {cfg.alpha, cfg.a};
            return run_trials(cfg.trials, seed, workers, [&](int, Rng& rng) {
                return deformed::sample_deformed_wishart(wc, rng);
            });
        }
    }
    throw ConfigError("unknown ensemble kind");
}

void cmd_mc_spectrum(Ctx& ctx, const EnsembleConfig& cfg, double hmin,
                     double hmax, int bins, bool dump_eigenvalues) {
    cfg.validate();
    auto samples = sample_ensemble(cfg, ctx.seed, ctx.eff_workers());
    auto h = mc::spectral_histogram(samples, cfg.scaling_exponent, hmin, hmax, bins);
    emit_histogram_csv(ctx, h, nullptr, "");
    if (dump_eigenvalues) {
        for (std::size_t t = 0; t < samples.size(); ++t) {
            CsvWriter w({"eigenvalue"});
            for (double ev : samples[t].eigenvalues) w.add_row({ev});
            ctx.emit_csv(w, "_trial" + std::to_string(t) + ".csv");
        }
    }
    ctx.finish(config_to_json(cfg));
}

void cmd_mc_spacing(Ctx& ctx, const EnsembleConfig& cfg, double bulk_fraction,
                    int bins, double smax) {
    cfg.validate();
    auto samples = sample_ensemble(cfg, ctx.seed, ctx.eff_workers());
    auto h = mc::spacing_histogram(samples, bulk_fraction, bins, smax);
    std::vector<double> poisson(bins), surmise(bins);
    for (int i = 0; i < bins; ++i) {
        double s = 0.5 * (h.edges[i] + h.edges[i + 1]);
        poisson[i] = std::exp(-s);
        surmise[i] = 0.5 * kPi * s * std::exp(-0.25 * kPi * s * s);
    }
    std::vector<std::vector<double>> extra = {poisson, surmise};
    std::vector<std::string> names = {"poisson", "wigner_surmise"};
    emit_histogram_csv(ctx, h, nullptr, "", &extra, &names);
    ctx.finish(config_to_json(cfg));
}

void cmd_mc_ipr(Ctx& ctx, const std::string& mode, const EnsembleConfig& cfg,
                int bins, double span) {
    cfg.validate();
    if (mode == "elements") {
        std::vector<double> y2(cfg.trials);
        parallel_for(cfg.trials, ctx.eff_workers(), [&](int t) {
            Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(t)));
            Mat a = mc::sample_wigner_levy(cfg.N, {cfg.alpha, cfg.beta, cfg.range},
                                           rng);
            y2[t] = mc::ipr_elements(a);
        });
        CsvWriter w({"trial", "y2_elements"});
        double mean = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            w.add_row({static_cast<double>(t), y2[t]});
            mean += y2[t];
        }
        ctx.emit_csv(w, ".csv");
        std::cout << "mean Y2 = " << mean / cfg.trials << "\n";
    } else if (mode == "eigenvector") {
        // Pool (lambda, y2) over trials, then bin-average the y2 profile.
        std::vector<std::vector<std::pair<double, double>>> per(cfg.trials);
        double exponent = 1.0 / cfg.alpha;
        parallel_for(cfg.trials, ctx.eff_workers(), [&](int t) {
            Rng rng(derive_seed(ctx.seed, static_cast<std::uint64_t>(t)));
            Mat a = mc::sample_wigner_levy(cfg.N, {cfg.alpha, cfg.beta, cfg.range},
                                           rng);
            double scale = std::pow(static_cast<double>(cfg.N), exponent);
            for (auto& v : a.a) v /= scale;
            auto s = mc::eigen_sym_sample(a, true);
            for (int j = 0; j < cfg.N; ++j) {
                std::vector<double> v(cfg.N);
                for (int i = 0; i < cfg.N; ++i) v[i] = s.eigenvectors(i, j);
                per[t].push_back({s.eigenvalues[j], mc::ipr_eigenvector(v)});
            }
        });
        std::vector<double> sum(bins, 0.0);
        std::vector<long> cnt(bins, 0);
        for (const auto& rows : per)
            for (auto [lam, y2] : rows) {
                if (lam < -span || lam >= span) continue;
                int b = static_cast<int>((lam + span) / (2 * span) * bins);
                b = std::clamp(b, 0, bins - 1);
                sum[b] += y2;
                cnt[b] += 1;
            }
        CsvWriter w({"lambda", "mean_y2", "count"});
        for (int b = 0; b < bins; ++b) {
            double lam = -span + (b + 0.5) * 2 * span / bins;
            w.add_row({lam, cnt[b] ? sum[b] / cnt[b] : 0.0,
                       static_cast<double>(cnt[b])});
        }
        ctx.emit_csv(w, ".csv");
    } else {
        throw ConfigError("mc-ipr: mode must be elements or eigenvector");
    }
    ctx.finish(config_to_json(cfg));
}

void cmd_deformed_density(Ctx& ctx, const std::string& model, double alpha,
                          double a, double ratio, double xmin, double xmax,
                          int points) {
    CsvWriter w({"lambda", "density"});
    deformed::MixtureParams m{alpha, a};
    for (int i = 0; i < points; ++i) {
        double x = xmin + (xmax - xmin) * i / std::max(1, points - 1);
        double d;
        if (model == "student") {
            d = deformed::student_pdf(x, m);
        } else if (model == "wigner") {
            d = deformed::deformed_wigner_density(x, m);
        } else if (model == "wishart") {
            d = x > 0 ? deformed::deformed_wishart_density(x, alpha, ratio) : 0.0;
        } else if (model == "mp") {
            d = deformed::marchenko_pastur_density(x, ratio);
        } else {
            throw ConfigError("deformed-density: unknown model " + model);
        }
        w.add_row({x, d});
    }
    ctx.emit_csv(w, ".csv");
    json cfg{{"model", model}, {"alpha", alpha}, {"a", a},
             {"ratio", ratio}, {"xmin", xmin},   {"xmax", xmax},
             {"points", points}};
    ctx.finish(cfg.dump(2));
}

void cmd_fig1(Ctx& ctx, double alpha, int n, int trials, int bins, double span,
              const wl::SolveConfig& scfg, const std::string& cache) {
    auto rp = solve_wl_cached(alpha, scfg, cache);
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::wigner_levy;
    cfg.N = n;
    cfg.alpha = alpha;
    cfg.beta = 0.0;
    cfg.range = 1.0;
    cfg.trials = trials;
    cfg.scaling_exponent = 1.0 / alpha;
    auto samples = sample_ensemble(cfg, ctx.seed, ctx.eff_workers());
    auto h = mc::spectral_histogram(samples, cfg.scaling_exponent, -span, span,
                                    bins);
    std::vector<double> rho(bins);
    for (int i = 0; i < bins; ++i) {
        double lam = 0.5 * (h.edges[i] + h.edges[i + 1]);
        rho[i] = wl::density(lam, alpha, 1.0, rp);
    }
    emit_histogram_csv(ctx, h, &rho, "rho_analytic");
    json j = json::parse(config_to_json(cfg));
    j["solver_residual"] = rp.residual;
    j["solver_iterations"] = rp.iterations;
    ctx.finish(j.dump(2));
}

void cmd_fig2(Ctx& ctx, int k, int n, int trials, double bulk_fraction,
              int bins, double smax) {
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::free_sum_diag;
    cfg.N = n;
    cfg.K = k;
    cfg.alpha = 2.0;  // semicircle-distributed diagonals
    cfg.trials = trials;
    cmd_mc_spacing(ctx, cfg, bulk_fraction, bins, smax);
}

void cmd_fig3(Ctx& ctx, double alpha, int k, int n, int trials, int bins,
              double span) {
    EnsembleConfig cfg;
    cfg.kind = EnsembleKind::free_sum_wl;
    cfg.N = n;
    cfg.K = k;
    cfg.alpha = alpha;
    cfg.beta = 0.0;
    cfg.range = std::pow(std::tgamma(1.0 + alpha), -1.0 / alpha);
    cfg.trials = trials;
    cfg.scaling_exponent = 0.0;  // summands are scaled inside the sampler
    auto samples = sample_ensemble(cfg, ctx.seed, ctx.eff_workers());
    auto h = mc::spectral_histogram(samples, 0.0, -span, span, bins);
    freelevy::FreeStableParams p{alpha, 0.0, 1.0};
    std::vector<double> centers(bins), rho(bins);
    for (int i = 0; i < bins; ++i)
        centers[i] = 0.5 * (h.edges[i] + h.edges[i + 1]);
    auto gv = freelevy::resolvent_curve(centers, p);
    for (int i = 0; i < bins; ++i)
        rho[i] = std::max(0.0, -gv[i].g.imag() / kPi);
    emit_histogram_csv(ctx, h, &rho, "rho_free");
    ctx.finish(config_to_json(cfg));
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"heavytail: spectra of heavy-tailed random matrix ensembles"};
    app.require_subcommand(1);
    app.fallthrough();

    Ctx ctx;
    for (int i = 0; i < argc; ++i) {
        if (i) ctx.command_line += ' ';
        ctx.command_line += argv[i];
    }
    app.add_option("--out", ctx.out_prefix, "output path prefix");
    app.add_option("--seed", ctx.seed, "root seed");
    app.add_option("--workers", ctx.workers, "worker threads (0 = auto)");

    double alpha = 1.5, beta = 0.0, range = 1.0, sigma = 1.0, aconst = 1.0;
    double xmin = -5.0, xmax = 5.0, smax = 4.0, span = 5.0, ratio = 0.25;
    double bulk = 0.5, hmin = -5.0, hmax = 5.0, exponent = 0.5;
    int points = 201, n = 200, trials = 100, k = 1, bins = 100, t_cols = 800;
    std::string cache, config_path, model = "student", mode = "elements";
    wl::SolveConfig scfg;

    auto add_wl_opts = [&](CLI::App* c) {
        c->add_option("--grid-xmax", scfg.grid.x_max, "solver grid half-span");
        c->add_option("--grid-nodes", scfg.grid.nodes, "solver grid nodes (odd)");
        c->add_option("--tol", scfg.tol, "fixed-point tolerance");
        c->add_option("--max-iter", scfg.max_iter, "iteration cap");
        c->add_option("--cache", cache, "running-parameter cache file (json)");
    };

    auto* c_stable = app.add_subcommand("stable-pdf", "stable density table");
    c_stable->add_option("--alpha", alpha)->required();
    c_stable->add_option("--beta", beta);
    c_stable->add_option("--range", range);
    c_stable->add_option("--xmin", xmin);
    c_stable->add_option("--xmax", xmax);
    c_stable->add_option("--points", points);

    auto* c_wl = app.add_subcommand("wl-density", "heavy-tailed Wigner limiting density");
    c_wl->add_option("--alpha", alpha)->required();
    c_wl->add_option("--range", range);
    c_wl->add_option("--xmin", xmin);
    c_wl->add_option("--xmax", xmax);
    c_wl->add_option("--points", points);
    add_wl_opts(c_wl);

    auto* c_free = app.add_subcommand("free-density", "free stable density");
    c_free->add_option("--alpha", alpha)->required();
    c_free->add_option("--beta", beta);
    c_free->add_option("--range", range);
    c_free->add_option("--xmin", xmin);
    c_free->add_option("--xmax", xmax);
    c_free->add_option("--points", points);

    auto* c_pot = app.add_subcommand("free-potential", "free stable matrix potential");
    c_pot->add_option("--alpha", alpha)->required();
    c_pot->add_option("--beta", beta);
    c_pot->add_option("--range", range);
    c_pot->add_option("--xmin", xmin);
    c_pot->add_option("--xmax", xmax);
    c_pot->add_option("--points", points);

    std::vector<double> law1 = {2.0, 0.0, 1.0}, law2 = {2.0, 0.0, 1.0};
    auto* c_add = app.add_subcommand("free-add", "density of a free sum of two stable laws");
    c_add->add_option("--law1", law1, "alpha beta range")->expected(3);
    c_add->add_option("--law2", law2, "alpha beta range")->expected(3);
    c_add->add_option("--xmin", xmin);
    c_add->add_option("--xmax", xmax);
    c_add->add_option("--points", points);

    EnsembleConfig ecfg;
    std::string ensemble = "goe";
    auto* c_spec = app.add_subcommand("mc-spectrum", "pooled eigenvalue histogram");
    c_spec->add_option("--config", config_path, "ensemble config json");
    c_spec->add_option("--ensemble", ensemble);
    c_spec->add_option("--N", n);
    c_spec->add_option("--T", t_cols);
    c_spec->add_option("--K", k);
    c_spec->add_option("--trials", trials);
    c_spec->add_option("--alpha", alpha);
    c_spec->add_option("--beta", beta);
    c_spec->add_option("--range", range);
    c_spec->add_option("--sigma", sigma);
    c_spec->add_option("--a", aconst);
    c_spec->add_option("--exponent", exponent);
    c_spec->add_option("--hmin", hmin);
    c_spec->add_option("--hmax", hmax);
    c_spec->add_option("--bins", bins);
    bool dump_ev = false;
    c_spec->add_flag("--dump-eigenvalues", dump_ev,
                     "write one raw eigenvalue CSV per trial");

    auto* c_spac = app.add_subcommand("mc-spacing", "unfolded level-spacing histogram");
    c_spac->add_option("--ensemble", ensemble);
    c_spac->add_option("--N", n);
    c_spac->add_option("--K", k);
    c_spac->add_option("--trials", trials);
    c_spac->add_option("--sigma", sigma);
    c_spac->add_option("--alpha", alpha);
    c_spac->add_option("--bulk-fraction", bulk);
    c_spac->add_option("--bins", bins);
    c_spac->add_option("--smax", smax);

    auto* c_ipr = app.add_subcommand("mc-ipr", "inverse participation ratios");
    c_ipr->add_option("--mode", mode, "elements | eigenvector");
    c_ipr->add_option("--N", n);
    c_ipr->add_option("--trials", trials);
    c_ipr->add_option("--alpha", alpha);
    c_ipr->add_option("--beta", beta);
    c_ipr->add_option("--range", range);
    c_ipr->add_option("--bins", bins);
    c_ipr->add_option("--span", span);

    auto* c_def = app.add_subcommand("deformed-density", "scale-mixture densities");
    c_def->add_option("--model", model, "student | wigner | wishart | mp");
    c_def->add_option("--alpha", alpha);
    c_def->add_option("--a", aconst);
    c_def->add_option("--ratio", ratio);
    c_def->add_option("--xmin", xmin);
    c_def->add_option("--xmax", xmax);
    c_def->add_option("--points", points);

    auto* c_f1 = app.add_subcommand("fig1", "limiting density vs MC histogram");
    c_f1->add_option("--alpha", alpha)->required();
    c_f1->add_option("--N", n);
    c_f1->add_option("--trials", trials)->default_val(500);
    c_f1->add_option("--bins", bins);
    c_f1->add_option("--span", span);
    add_wl_opts(c_f1);

    auto* c_f2 = app.add_subcommand("fig2", "free-sum level-spacing statistics");
    c_f2->add_option("--K", k);
    c_f2->add_option("--N", n);
    c_f2->add_option("--trials", trials);
    c_f2->add_option("--bulk-fraction", bulk);
    c_f2->add_option("--bins", bins)->default_val(40);
    c_f2->add_option("--smax", smax);

    auto* c_f3 = app.add_subcommand("fig3", "free stable density vs free-sum MC");
    c_f3->add_option("--alpha", alpha)->required();
    c_f3->add_option("--K", k)->default_val(32);
    c_f3->add_option("--N", n);
    c_f3->add_option("--trials", trials);
    c_f3->add_option("--bins", bins);
    c_f3->add_option("--span", span);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        ctx.ensure_dir();
        if (*c_stable) {
            cmd_stable_pdf(ctx, alpha, beta, range, xmin, xmax, points);
        } else if (*c_wl) {
            scfg.workers = ctx.eff_workers();
            cmd_wl_density(ctx, alpha, range, xmin, xmax, points, scfg, cache);
        } else if (*c_free) {
            cmd_free_density(ctx, alpha, beta, range, xmin, xmax, points, false);
        } else if (*c_pot) {
            cmd_free_density(ctx, alpha, beta, range, xmin, xmax, points, true);
        } else if (*c_add) {
            cmd_free_add(ctx, law1, law2, xmin, xmax, points);
        } else if (*c_spec) {
            if (!config_path.empty()) {
                ecfg = load_config(config_path);
            } else {
                ecfg.kind = ensemble_kind_from_string(ensemble);
                ecfg.N = n;
                ecfg.T = t_cols;
                ecfg.K = k;
                ecfg.trials = trials;
                ecfg.alpha = alpha;
                ecfg.beta = beta;
                ecfg.range = range;
                ecfg.sigma = sigma;
                ecfg.a = aconst;
                ecfg.ratio = t_cols > 0 ? static_cast<double>(n) / t_cols : 0.0;
                ecfg.scaling_exponent = exponent;
            }
            cmd_mc_spectrum(ctx, ecfg, hmin, hmax, bins, dump_ev);
        } else if (*c_spac) {
            ecfg.kind = ensemble_kind_from_string(ensemble);
            ecfg.N = n;
            ecfg.K = k;
            ecfg.trials = trials;
            ecfg.sigma = sigma;
            ecfg.alpha = ecfg.kind == EnsembleKind::free_sum_diag ? 2.0 : alpha;
            cmd_mc_spacing(ctx, ecfg, bulk, bins, smax);
        } else if (*c_ipr) {
            ecfg.kind = EnsembleKind::wigner_levy;
            ecfg.N = n;
            ecfg.trials = trials;
            ecfg.alpha = alpha;
            ecfg.beta = beta;
            ecfg.range = range;
            cmd_mc_ipr(ctx, mode, ecfg, bins, span);
        } else if (*c_def) {
            cmd_deformed_density(ctx, model, alpha, aconst, ratio, xmin, xmax,
                                 points);
        } else if (*c_f1) {
            scfg.workers = ctx.eff_workers();
            cmd_fig1(ctx, alpha, n, trials, bins, span, scfg, cache);
        } else if (*c_f2) {
            cmd_fig2(ctx, k, n, trials, bulk, bins, smax);
        } else if (*c_f3) {
            cmd_fig3(ctx, alpha, k, n, trials, bins, span);
        }
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const ConvergenceError& e) {
        json diag{{"error", e.what()},
                  {"residual_history", e.residual_history}};
        std::ofstream out(ctx.out_prefix + "_diagnostics.json");
        out << diag.dump(2) << "\n";
        std::cerr << "convergence failure: " << e.what() << " (diagnostics in "
                  << ctx.out_prefix << "_diagnostics.json)\n";
        return 2;
    } catch (const Error& e) {
        json diag{{"error", e.what()}};
        std::ofstream out(ctx.out_prefix + "_diagnostics.json");
        out << diag.dump(2) << "\n";
        std::cerr << "numerical failure: " << e.what() << " (diagnostics in "
                  << ctx.out_prefix << "_diagnostics.json)\n";
        return 2;
    }
}

}  // namespace heavytail::io
