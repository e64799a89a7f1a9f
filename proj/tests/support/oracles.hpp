#pragma once

// Test-side oracles: independent routes used to pin expected values. These
// deliberately avoid the code paths they are checking.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "heavytail/numerics.hpp"
#include "heavytail/stable.hpp"

namespace oracles {

using heavytail::kPi;

inline double gaussian_pdf(double x, double sd) {
    return std::exp(-0.5 * x * x / (sd * sd)) / (sd * std::sqrt(2.0 * kPi));
}

inline double gaussian_cdf(double x, double sd) {
    return 0.5 * std::erfc(-x / (sd * std::sqrt(2.0)));
}

inline double cauchy_pdf(double x, double scale) {
    return scale / (kPi * (x * x + scale * scale));
}

inline double cauchy_cdf(double x, double scale) {
    return 0.5 + std::atan(x / scale) / kPi;
}

inline double semicircle_pdf(double x, double sigma) {
    double r2 = 4.0 * sigma * sigma - x * x;
    return r2 > 0 ? std::sqrt(r2) / (2.0 * kPi * sigma * sigma) : 0.0;
}

// Hill tail-index estimator from the k largest of |x|.
inline double hill_estimate(std::vector<double> absx, int k) {
    std::sort(absx.begin(), absx.end(), std::greater<>());
    if (k + 1 > static_cast<int>(absx.size()))
        throw heavytail::InsufficientDataError("hill: k too large");
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += std::log(absx[i] / absx[k]);
    return k / s;
}

// Log-log slope of f between x0 and x1 (n probe points).
inline double loglog_slope(const std::function<double(double)>& f, double x0,
                           double x1, int n = 12) {
    std::vector<double> lx(n), ly(n);
    for (int i = 0; i < n; ++i) {
        double x = x0 * std::pow(x1 / x0, static_cast<double>(i) / (n - 1));
        lx[i] = std::log(x);
        ly[i] = std::log(f(x));
    }
    return heavytail::ls_slope(lx, ly);
}

// Numeric CDF of a stable law, for KS tests: cumulative quadrature on a
// sinh-spaced grid wide enough that the truncated tail mass is negligible,
// then normalized.
class TabulatedStableCdf {
public:
    explicit TabulatedStableCdf(const heavytail::stable::StableParams& p,
                                double x_max = 300.0, int nodes = 1601)
        : p_(p) {
        std::vector<double> x(nodes), c(nodes, 0.0);
        double stretch = 5.0;
        double sh = std::sinh(stretch);
        for (int i = 0; i < nodes; ++i) {
            double t = -1.0 + 2.0 * i / (nodes - 1);
            x[i] = p.range * x_max * std::sinh(stretch * t) / sh;
        }
        auto f = [&](double v) { return heavytail::stable::pdf(v, p_, 1e-11); };
        for (int i = 0; i + 1 < nodes; ++i)
            c[i + 1] = c[i] + heavytail::quad::gl8(f, x[i], x[i + 1]);
        total_ = c.back();
        x_ = std::move(x);
        c_ = std::move(c);
        interp_ = heavytail::Pchip(x_, c_);
    }

    double operator()(double v) const {
        if (v <= x_.front()) return 0.0;
        if (v >= x_.back()) return 1.0;
        return std::clamp(interp_(v) / total_, 0.0, 1.0);
    }

private:
    heavytail::stable::StableParams p_;
    std::vector<double> x_, c_;
    double total_ = 1.0;
    heavytail::Pchip interp_;
};

// Total mass of a stable pdf: adaptive quadrature over [-X, X] plus
// term-by-term integration of the tail expansion.
inline double stable_total_mass(const heavytail::stable::StableParams& p,
                                double x_cut = 200.0) {
    namespace hs = heavytail::stable;
    if (p.alpha == 1.0) x_cut = 4000.0;  // one-term completion needs distance
    auto f = [&](double x) { return hs::pdf(x, p, 1e-11); };
    // piecewise so the adaptive rule never straddles bulk and far tail
    std::vector<double> seg = {0.0};
    for (double b = 2.0; b < x_cut; b *= 2.0) seg.push_back(b);
    seg.push_back(x_cut);
    double core = 0.0;
    for (std::size_t i = 0; i + 1 < seg.size(); ++i) {
        core += heavytail::quad::adaptive(f, seg[i] * p.range,
                                          seg[i + 1] * p.range, 1e-10, 1e-11, 4000)
                    .value;
        core += heavytail::quad::adaptive(f, -seg[i + 1] * p.range,
                                          -seg[i] * p.range, 1e-10, 1e-11, 4000)
                    .value;
    }
    if (p.alpha == 2.0) return core;
    if (p.alpha == 1.0) {
        // logarithmic family: leading tails (1 +- beta)/(pi x^2) only
        return core + (1.0 + p.beta) / (kPi * x_cut) +
               (1.0 - p.beta) / (kPi * x_cut);
    }
    double tails = 0.0;
    // integral of sum c_m x^{-m a - 1} from X: sum c_m X^{-m a}/(m a);
    // recover the c_m from tail_series differences at two radii.
    for (double side : {1.0, -1.0}) {
        double beta_eff = side > 0 ? p.beta : -p.beta;
        const std::complex<double> i(0.0, 1.0);
        double t = p.alpha == 2.0 ? 0.0 : std::tan(0.5 * kPi * p.alpha);
        std::complex<double> q =
            std::exp(-i * (0.5 * kPi * p.alpha)) * (1.0 - i * beta_eff * t);
        std::complex<double> mq(1.0, 0.0);
        double lfac = 0.0;
        double xs = x_cut;  // standardized radius
        for (int m = 1; m <= 6; ++m) {
            mq *= -q;
            lfac += std::log(static_cast<double>(m));
            double ln_mag = std::lgamma(m * p.alpha + 1.0) - lfac -
                            (m * p.alpha) * std::log(xs);
            double term = std::exp(ln_mag) * mq.imag() / kPi / (m * p.alpha);
            tails += term;
        }
    }
    return core + tails;
}

}  // namespace oracles

#include "heavytail/matrix_mc.hpp"

namespace oracles {

// Fraction of histogram bins whose MC density sits within n_sigma Poisson
// error bars of the reference density; the per-bin sigma uses the larger of
// the observed and expected counts so empty bins are judged fairly.
inline double fraction_within_bands(const heavytail::mc::Histogram& h,
                                    const std::vector<double>& ref,
                                    double n_sigma) {
    int ok = 0;
    const int nbins = static_cast<int>(h.counts.size());
    for (int i = 0; i < nbins; ++i) {
        double w = h.edges[i + 1] - h.edges[i];
        double expected = ref[i] * h.n_total * w;
        double cnt = std::max(static_cast<double>(h.counts[i]), expected);
        double sigma = std::sqrt(std::max(cnt, 1.0)) / (h.n_total * w);
        if (std::abs(h.density[i] - ref[i]) <= n_sigma * sigma) ++ok;
    }
    return static_cast<double>(ok) / nbins;
}

}  // namespace oracles
