#include "heavytail/stable_table.hpp"

#include <algorithm>
#include <cmath>

#include "heavytail/mc_runner.hpp"
#include "heavytail/numerics.hpp"

namespace heavytail::stable {

namespace {

// Local 4-point Lagrange interpolation; xs strictly increasing.
double lagrange4(const double* xs, const double* ys, double x) {
    double out = 0.0;
    for (int i = 0; i < 4; ++i) {
        double w = 1.0;
        for (int j = 0; j < 4; ++j)
            if (j != i) w *= (x - xs[j]) / (xs[i] - xs[j]);
        out += w * ys[i];
    }
    return out;
}

}  // namespace

StableDensityTable::StableDensityTable(double alpha, const Options& opt)
    : alpha_(alpha), stretch_(opt.stretch), n_u_(opt.n_u), n_beta_(opt.n_beta) {
    if (!(alpha > 0.0 && alpha < 2.0))
        throw DomainError("StableDensityTable: alpha must be in (0, 2)");
    if (n_u_ < 8 || n_beta_ < 8)
        throw DomainError("StableDensityTable: grid too small");
    tan_half_ = std::tan(0.5 * kPi * alpha);
    // Window must cover the intrinsic scale of the most skewed member,
    // which blows up like sec(pi alpha/2)^{1/alpha} as alpha -> 1.
    double scale = std::pow(std::hypot(1.0, tan_half_), 1.0 / alpha);
    u_max_ = std::max(80.0, 8.0 * scale);
    // The bulk drifts by ~tan(pi alpha/2) per unit of asymmetry, so the
    // beta grid must keep the per-node drift below a fraction of the width.
    int need = 1 + 2 * static_cast<int>(std::ceil(tan_half_ / 0.15));
    n_beta_ = std::min(401, std::max(n_beta_, need | 1));

    u_.resize(n_u_);
    const double sh = std::sinh(stretch_);
    for (int i = 0; i < n_u_; ++i) {
        double t = -1.0 + 2.0 * i / (n_u_ - 1);
        u_[i] = u_max_ * std::sinh(stretch_ * t) / sh;
    }
    // Rows hold the S1 density on a shared argument grid, so the sharp
    // structure near the origin stays aligned across asymmetry nodes and
    // the cross-beta interpolation only sees smooth profiles.
    values_.assign(static_cast<std::size_t>(n_u_) * n_beta_, 0.0);
    const double tol = opt.build_tol;
    parallel_for(n_beta_, opt.workers, [&](int j) {
        double beta = -1.0 + 2.0 * j / (n_beta_ - 1.0);
        for (int i = 0; i < n_u_; ++i) {
            double v = pdf_std(u_[i], alpha_, beta, tol);
            values_[static_cast<std::size_t>(j) * n_u_ + i] = std::max(0.0, v);
        }
    });
}

double StableDensityTable::interp(double u, double beta) const {
    // Invert the sinh map for O(1) node lookup.
    double t = std::asinh(u * std::sinh(stretch_) / u_max_) / stretch_;
    int iu = static_cast<int>((t + 1.0) * 0.5 * (n_u_ - 1));
    iu = std::clamp(iu - 1, 0, n_u_ - 4);
    double bpos = (beta + 1.0) * 0.5 * (n_beta_ - 1);
    int jb = std::clamp(static_cast<int>(bpos) - 1, 0, n_beta_ - 4);

    double bs[4], fs[4];
    for (int j = 0; j < 4; ++j) {
        bs[j] = -1.0 + 2.0 * (jb + j) / (n_beta_ - 1.0);
        fs[j] = lagrange4(&u_[iu], &values_[static_cast<std::size_t>(jb + j) * n_u_ + iu], u);
    }
    return std::max(0.0, lagrange4(bs, fs, beta));
}

double StableDensityTable::density(double y, double beta, double range) const {
    if (!(range > 0.0)) throw DomainError("StableDensityTable: range must be > 0");
    beta = std::clamp(beta, -1.0, 1.0);
    double ys = y / range;
    if (std::abs(ys) <= u_[n_u_ - 3]) return interp(ys, beta) / range;
    double v = ys > 0 ? detail::tail_series_std(ys, alpha_, beta, 8)
                      : detail::tail_series_std(-ys, alpha_, -beta, 8);
    return std::max(0.0, v) / range;
}

}  // namespace heavytail::stable
