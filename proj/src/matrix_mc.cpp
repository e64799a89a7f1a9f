#include "heavytail/matrix_mc.hpp"

#include <algorithm>
#include <cmath>

namespace heavytail::mc {

Histogram make_histogram(std::span<const double> values, double lo, double hi,
                         int nbins) {
    if (!(hi > lo) || nbins < 1) throw ConfigError("make_histogram: bad range");
    Histogram h;
    h.edges.resize(nbins + 1);
    for (int i = 0; i <= nbins; ++i)
        h.edges[i] = lo + (hi - lo) * i / nbins;
    h.counts.assign(nbins, 0);
    const double w = (hi - lo) / nbins;
    for (double v : values) {
        if (v < lo) {
            ++h.n_below;
        } else if (v >= hi) {
            if (v == hi) {
                ++h.counts[nbins - 1];
            } else {
                ++h.n_above;
            }
        } else {
            int b = std::min(nbins - 1, static_cast<int>((v - lo) / w));
            ++h.counts[b];
        }
    }
    h.n_total = static_cast<long>(values.size());
    h.density.resize(nbins);
    h.stderr_.resize(nbins);
    for (int i = 0; i < nbins; ++i) {
        double c = static_cast<double>(h.counts[i]);
        h.density[i] = c / (h.n_total * w);
        h.stderr_[i] = std::sqrt(c) / (h.n_total * w);
    }
    return h;
}

Mat sample_wigner_levy(int n, const stable::StableParams& p, Rng& rng) {
    if (n < 1) throw DomainError("sample_wigner_levy: N >= 1 required");
    p.validate();
    Mat A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = stable::sample(p, rng);
            A(i, j) = A(j, i) = v;
        }
    return A;
}

Mat sample_goe(int n, double sigma, Rng& rng) {
    if (n < 1) throw DomainError("sample_goe: N >= 1 required");
    if (!(sigma > 0)) throw DomainError("sample_goe: sigma > 0 required");
    Mat A(n, n);
    const double diag_sd = sigma * std::sqrt(2.0);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double v = rng.normal() * (i == j ? diag_sd : sigma);
            A(i, j) = A(j, i) = v;
        }
    return A;
}

SpectralSample eigen_sym_sample(const Mat& A, bool want_vectors) {
    EigenResult r = eigen_sym(A, want_vectors);
    SpectralSample s;
    s.eigenvalues = std::move(r.eigenvalues);
    s.eigenvectors = std::move(r.eigenvectors);
    return s;
}

double ipr_elements(const Mat& A) {
    if (A.rows != A.cols) throw DomainError("ipr_elements: square input required");
    double total = 0.0;
    for (int i = 0; i < A.rows; ++i)
        for (int j = i; j < A.cols; ++j) total += std::abs(A(i, j));
    if (total == 0.0)
        throw DegenerateTailError("ipr_elements: all-zero matrix");
    double y2 = 0.0;
    for (int i = 0; i < A.rows; ++i)
        for (int j = i; j < A.cols; ++j) {
            double w = std::abs(A(i, j)) / total;
            y2 += w * w;
        }
    return y2;
}

double ipr_eigenvector(std::span<const double> v) {
    double n2 = 0.0;
    for (double x : v) n2 += x * x;
    if (std::abs(n2 - 1.0) > 1e-8)
        throw DomainError("ipr_eigenvector: vector not unit-normalized");
    double y2 = 0.0;
    for (double x : v) y2 += x * x * x * x;
    return y2;
}

std::vector<double> unfolded_spacings(std::span<const double> ev,
                                      double bulk_fraction) {
    const int n = static_cast<int>(ev.size());
    if (!(bulk_fraction > 0.0 && bulk_fraction <= 1.0))
        throw ConfigError("unfolded_spacings: bulk_fraction in (0, 1]");
    int m = std::max(2, static_cast<int>(n * bulk_fraction));
    m = std::min(m, n);
    int start = (n - m) / 2;
    const int w = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    if (m < 2 * w + 2)
        throw ConfigError("unfolded_spacings: bulk too small for the unfolding window");
    std::vector<double> s(m - 1);
    for (int i = 0; i < m - 1; ++i) s[i] = ev[start + i + 1] - ev[start + i];
    std::vector<double> out(m - 1);
    for (int i = 0; i < m - 1; ++i) {
        int lo = std::max(0, i - w);
        int hi = std::min(m - 2, i + w);
        double mean = 0.0;
        for (int k = lo; k <= hi; ++k) mean += s[k];
        mean /= (hi - lo + 1);
        out[i] = mean > 0 ? s[i] / mean : 0.0;
    }
    return out;
}

Histogram spacing_histogram(std::span<const SpectralSample> samples,
                            double bulk_fraction, int nbins, double s_max) {
    if (samples.empty()) throw ConfigError("spacing_histogram: no samples");
    std::vector<double> pooled;
    for (const auto& smp : samples) {
        auto u = unfolded_spacings(smp.eigenvalues, bulk_fraction);
        pooled.insert(pooled.end(), u.begin(), u.end());
    }
    return make_histogram(pooled, 0.0, s_max, nbins);
}

Histogram spectral_histogram(std::span<const SpectralSample> samples,
                             double scaling_exponent, double lo, double hi,
                             int nbins) {
    if (samples.empty()) throw ConfigError("spectral_histogram: no samples");
    std::vector<double> pooled;
    for (const auto& s : samples) {
        double scale = std::pow(static_cast<double>(s.config.N > 0
                                                        ? s.config.N
                                                        : s.eigenvalues.size()),
                                scaling_exponent);
        for (double ev : s.eigenvalues) pooled.push_back(ev / scale);
    }
    return make_histogram(pooled, lo, hi, nbins);
}

}  // namespace heavytail::mc
