#include "heavytail/deformed.hpp"

#include <cmath>

#include "json.hpp"

#include "heavytail/numerics.hpp"

namespace heavytail::deformed {

void MixtureParams::validate() const {
    if (!(alpha > 0.0)) throw DomainError("mixture: alpha > 0 required");
    if (!(a > 0.0)) throw DomainError("mixture: a > 0 required");
}

void WishartConfig::validate() const {
    if (N < 1 || T < 1) throw DomainError("wishart: N, T >= 1 required");
    if (N > T) throw DomainError("wishart: ratio N/T must be <= 1");
    mixture.validate();
    if (scale_model == ScaleModel::rotated_scales) {
        if (static_cast<int>(S.size()) != N)
            throw DomainError("wishart: S must have N entries");
        for (double s : S)
            if (!(s > 0.0)) throw DomainError("wishart: S entries must be positive");
        if (O && (O->rows != N || O->cols != N))
            throw DomainError("wishart: O must be N x N");
    }
}

double scale_frequency_pdf(double sigma, const MixtureParams& m) {
    m.validate();
    if (!(sigma > 0.0)) throw DomainError("scale_frequency_pdf: sigma > 0");
    double z = m.a * m.a / (2.0 * sigma * sigma);
    return 2.0 / (sigma * std::tgamma(0.5 * m.alpha)) *
           std::pow(z, 0.5 * m.alpha) * std::exp(-z);
}

double sample_sigma(const MixtureParams& m, Rng& rng) {
    m.validate();
    // a^2/(2 sigma^2) is Gamma(alpha/2)-distributed.
    double z = rng.gamma(0.5 * m.alpha);
    return m.a / std::sqrt(2.0 * z);
}

double student_pdf(double x, const MixtureParams& m) {
    m.validate();
    double t = x / m.a;
    return std::tgamma(0.5 * (m.alpha + 1.0)) /
           (m.a * std::sqrt(kPi) * std::tgamma(0.5 * m.alpha)) *
           std::pow(1.0 + t * t, -0.5 * (m.alpha + 1.0));
}

double deformed_wigner_density(double lambda, const MixtureParams& m,
                               double abs_tol) {
    m.validate();
    const double l2 = lambda * lambda;
    const double a2 = 2.0 * m.a * m.a;
    double upper = l2 > 0.0 ? a2 / l2 : std::numeric_limits<double>::infinity();
    upper = std::min(upper, 0.5 * m.alpha + 40.0 * std::sqrt(m.alpha) + 60.0);
    auto f = [&](double z) {
        double arg = 1.0 - z * l2 / a2;
        if (arg <= 0.0) return 0.0;
        return std::pow(z, 0.5 * (m.alpha - 1.0)) * std::exp(-z) * std::sqrt(arg);
    };
    auto r = quad::adaptive(f, 0.0, upper, abs_tol, 1e-11, 4000);
    if (r.error > 100.0 * abs_tol + 1e-10 * std::abs(r.value))
        throw AccuracyError("deformed_wigner_density: quadrature failure", r.error);
    return std::sqrt(2.0) / (m.a * kPi * std::tgamma(0.5 * m.alpha)) * r.value;
}

double marchenko_pastur_density(double lambda, double ratio) {
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw DomainError("marchenko_pastur_density: ratio in (0, 1]");
    double sq = std::sqrt(ratio);
    double lm = (1.0 - sq) * (1.0 - sq);
    double lp = (1.0 + sq) * (1.0 + sq);
    if (lambda <= lm || lambda >= lp) return 0.0;
    return std::sqrt((lp - lambda) * (lambda - lm)) / (2.0 * kPi * ratio * lambda);
}

double deformed_wishart_density(double lambda, double alpha, double ratio,
                                double abs_tol) {
    if (!(alpha > 0.0)) throw DomainError("deformed_wishart_density: alpha > 0");
    if (!(ratio > 0.0 && ratio <= 1.0))
        throw DomainError("deformed_wishart_density: ratio in (0, 1]");
    if (!(lambda > 0.0)) throw DomainError("deformed_wishart_density: lambda > 0");
    double sq = std::sqrt(ratio);
    double lm = (1.0 - sq) * (1.0 - sq);
    double lp = (1.0 + sq) * (1.0 + sq);
    // zeta = lm + (lp - lm) sin^2 t removes both square-root endpoints.
    auto f = [&](double t) {
        double st = std::sin(t), ct = std::cos(t);
        double zeta = lm + (lp - lm) * st * st;
        double jac = 2.0 * (lp - lm) * st * ct;
        double root = (lp - lm) * st * ct;
        double e = -0.5 * alpha * zeta / lambda;
        if (e < -700.0) return 0.0;
        return jac * root * std::exp(e) * std::pow(zeta, 0.5 * alpha - 1.0);
    };
    auto r = quad::adaptive(f, 0.0, 0.5 * kPi, abs_tol, 1e-11, 4000);
    if (r.error > 100.0 * abs_tol + 1e-10 * std::abs(r.value))
        throw AccuracyError("deformed_wishart_density: quadrature failure", r.error);
    double pref = std::pow(0.5 * alpha, 0.5 * alpha) /
                  (2.0 * kPi * ratio * std::tgamma(0.5 * alpha)) *
                  std::pow(lambda, -0.5 * alpha - 1.0);
    return pref * r.value;
}

double student_measure_log_norm(int nt, const MixtureParams& m) {
    m.validate();
    if (nt < 1) throw DomainError("student_measure_log_norm: NT >= 1");
    return std::lgamma(0.5 * (m.alpha + nt)) - std::lgamma(0.5 * m.alpha) -
           nt * std::log(m.a * std::sqrt(kPi));
}

double student_measure_density(double tr_aat, int nt, const MixtureParams& m) {
    if (tr_aat < 0.0) throw DomainError("student_measure_density: tr AA^T >= 0");
    double logv = student_measure_log_norm(nt, m) -
                  0.5 * (m.alpha + nt) * std::log1p(tr_aat / (m.a * m.a));
    return std::exp(logv);
}

std::string wishart_config_to_json(const WishartConfig& cfg) {
    nlohmann::json j;
    j["N"] = cfg.N;
    j["T"] = cfg.T;
    switch (cfg.scale_model) {
        case ScaleModel::global_sigma: j["scale_model"] = "global-sigma"; break;
        case ScaleModel::per_row_sigma: j["scale_model"] = "per-row-sigma"; break;
        case ScaleModel::rotated_scales: j["scale_model"] = "rotated-scales"; break;
    }
    j["alpha"] = cfg.mixture.alpha;
    j["a"] = cfg.mixture.a;
    if (!cfg.S.empty()) j["S"] = cfg.S;
    if (cfg.O) {
        nlohmann::json rows = nlohmann::json::array();
        for (int i = 0; i < cfg.O->rows; ++i) {
            std::vector<double> row(cfg.O->cols);
            for (int k = 0; k < cfg.O->cols; ++k) row[k] = (*cfg.O)(i, k);
            rows.push_back(row);
        }
        j["O"] = rows;
    }
    return j.dump(2);
}

WishartConfig wishart_config_from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    WishartConfig cfg;
    cfg.N = j.at("N").get<int>();
    cfg.T = j.at("T").get<int>();
    std::string s = j.value("scale_model", "global-sigma");
    if (s == "global-sigma") {
        cfg.scale_model = ScaleModel::global_sigma;
    } else if (s == "per-row-sigma") {
        cfg.scale_model = ScaleModel::per_row_sigma;
    } else if (s == "rotated-scales") {
        cfg.scale_model = ScaleModel::rotated_scales;
    } else {
        throw DomainError("wishart config: unknown scale_model " + s);
    }
    cfg.mixture.alpha = j.at("alpha").get<double>();
    cfg.mixture.a = j.at("a").get<double>();
    if (j.contains("S")) cfg.S = j.at("S").get<std::vector<double>>();
    if (j.contains("O")) {
        auto rows = j.at("O");
        Mat o(static_cast<int>(rows.size()),
              static_cast<int>(rows.empty() ? 0 : rows[0].size()));
        for (int i = 0; i < o.rows; ++i)
            for (int k = 0; k < o.cols; ++k) o(i, k) = rows[i][k].get<double>();
        cfg.O = std::move(o);
    }
    cfg.validate();
    return cfg;
}

mc::SpectralSample sample_deformed_wishart(const WishartConfig& cfg, Rng& rng) {
    cfg.validate();
    const int n = cfg.N, t = cfg.T;
    Mat a(n, t);
    switch (cfg.scale_model) {
        case ScaleModel::global_sigma: {
            double sigma = sample_sigma(cfg.mixture, rng);
            for (auto& v : a.a) v = sigma * rng.normal();
            break;
        }
        case ScaleModel::per_row_sigma: {
            for (int i = 0; i < n; ++i) {
                double sigma = sample_sigma(cfg.mixture, rng);
                for (int j = 0; j < t; ++j) a(i, j) = sigma * rng.normal();
            }
            break;
        }
        case ScaleModel::rotated_scales: {
            double sigma = sample_sigma(cfg.mixture, rng);
            Mat xi(n, t);
            for (auto& v : xi.a) v = rng.normal();
            Mat b = cfg.O ? matmul(*cfg.O, xi) : std::move(xi);
            for (int i = 0; i < n; ++i) {
                double row_scale = sigma * cfg.S[i];
                for (int j = 0; j < t; ++j) a(i, j) = row_scale * b(i, j);
            }
            break;
        }
    }
    Mat w = matmul_abt(a, a);
    for (auto& v : w.a) v /= t;
    auto s = mc::eigen_sym_sample(w, false);
    s.config.kind = EnsembleKind::wishart_student;
    s.config.N = n;
    s.config.T = t;
    s.config.alpha = cfg.mixture.alpha;
    s.config.a = cfg.mixture.a;
    s.config.ratio = cfg.ratio();
    s.config.scaling_exponent = 0.0;
    return s;
}

mc::SpectralSample deformed_wigner_sample(int n, const MixtureParams& m,
                                          Rng& rng) {
    if (n < 1) throw DomainError("deformed_wigner_sample: N >= 1");
    m.validate();
    double sigma = sample_sigma(m, rng);
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = sigma * rng.normal();
            a(i, j) = a(j, i) = v;
        }
    double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (auto& v : a.a) v *= scale;
    auto s = mc::eigen_sym_sample(a, false);
    s.config.kind = EnsembleKind::deformed_wigner;
    s.config.N = n;
    s.config.alpha = m.alpha;
    s.config.a = m.a;
    s.config.scaling_exponent = 0.0;
    return s;
}

}  // namespace heavytail::deformed
