#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "heavytail/config.hpp"
#include "heavytail/linalg.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/stable.hpp"

namespace heavytail::mc {

// Eigen data of one sampled matrix plus enough metadata to regenerate it.
struct SpectralSample {
    std::vector<double> eigenvalues;  // ascending
    Mat eigenvectors;                 // columns; empty unless requested
    EnsembleConfig config;
    std::uint64_t seed = 0;
};

// Binned empirical density with MC error bars. `density` and `stderr_` are
// normalized by the total number of pooled values (including the
// out-of-range ones tracked by n_below/n_above), so in-range bins estimate
// the underlying density directly.
struct Histogram {
    std::vector<double> edges;    // size nbins + 1
    std::vector<long> counts;     // size nbins
    std::vector<double> density;
    std::vector<double> stderr_;
    long n_total = 0;
    long n_below = 0;
    long n_above = 0;
};

Histogram make_histogram(std::span<const double> values, double lo, double hi,
                         int nbins);

// Symmetric matrix with i.i.d. stable entries for i <= j. The N^{1/alpha}
// scaling is left to the caller (spectral_histogram's exponent).
Mat sample_wigner_levy(int n, const stable::StableParams& p, Rng& rng);

// Gaussian symmetric matrix, off-diagonal variance sigma^2, diagonal 2 sigma^2.
Mat sample_goe(int n, double sigma, Rng& rng);

SpectralSample eigen_sym_sample(const Mat& A, bool want_vectors);

// Element inverse participation ratio: sum of squared normalized weights
// w_ij = |a_ij| / sum_{i<=j} |a_ij| over the upper triangle (per matrix;
// ensemble averaging is the caller's job).
double ipr_elements(const Mat& A);

// Eigenvector inverse participation ratio sum_i v_i^4; v must be unit norm.
double ipr_eigenvector(std::span<const double> v);

// Nearest-neighbor spacings from the central bulk_fraction of a spectrum,
// each divided by the local mean spacing over a sliding window of
// 2*ceil(sqrt(N)) neighboring spacings.
std::vector<double> unfolded_spacings(std::span<const double> eigenvalues,
                                      double bulk_fraction);

Histogram spacing_histogram(std::span<const SpectralSample> samples,
                            double bulk_fraction, int nbins = 40,
                            double s_max = 4.0);

// Histogram of eigenvalues of A / N^{scaling_exponent} pooled over samples.
Histogram spectral_histogram(std::span<const SpectralSample> samples,
                             double scaling_exponent, double lo, double hi,
                             int nbins);

}  // namespace heavytail::mc
