#pragma once

#include <optional>
#include <vector>

#include "heavytail/linalg.hpp"
#include "heavytail/matrix_mc.hpp"
#include "heavytail/rng.hpp"

namespace heavytail::deformed {

// Inverse-gamma-type scale mixture: f(sigma) gives x = sigma * xi a
// power-law tail with index alpha; `a` is the scale constant.
struct MixtureParams {
    double alpha = 3.0;
    double a = 1.0;

    void validate() const;
};

enum class ScaleModel { global_sigma, per_row_sigma, rotated_scales };

// Wishart-type sample covariance config. For rotated_scales the data matrix
// is A_it = sigma * sum_j S_i O_ij xi_jt with fixed S and orthogonal O.
struct WishartConfig {
    int N = 0;
    int T = 0;
    ScaleModel scale_model = ScaleModel::global_sigma;
    MixtureParams mixture;
    std::vector<double> S;  // rotated_scales only
    std::optional<Mat> O;   // rotated_scales only; identity when absent

    double ratio() const { return static_cast<double>(N) / T; }
    void validate() const;
};

// Frequency function of the fluctuating scale.
double scale_frequency_pdf(double sigma, const MixtureParams& m);

// One draw of sigma from scale_frequency_pdf (exact gamma transform).
double sample_sigma(const MixtureParams& m, Rng& rng);

// Element-level law of sigma * xi: the Student-type density with power tail
// |x|^{-alpha-1} and variance a^2/(alpha-2) for alpha > 2.
double student_pdf(double x, const MixtureParams& m);

// Scale mixture of semicircles (one sigma per matrix).
double deformed_wigner_density(double lambda, const MixtureParams& m,
                               double abs_tol = 1e-10);

// Marchenko-Pastur density for ratio = N/T in (0, 1], edges (1 +- sqrt r)^2.
double marchenko_pastur_density(double lambda, double ratio);

// Scale mixture of Marchenko-Pastur laws in the standardization that makes
// the density free of `a` (the mixture is taken at a^2 = alpha); tail
// exponent alpha/2.
double deformed_wishart_density(double lambda, double alpha, double ratio,
                                double abs_tol = 1e-10);

// Log normalizing constant of the matrix-level Student measure on the N x T
// data entries; at NT = 1 the measure reduces to student_pdf.
double student_measure_log_norm(int nt, const MixtureParams& m);
double student_measure_density(double tr_aat, int nt, const MixtureParams& m);

// JSON round trip for WishartConfig; S and O are included when present.
std::string wishart_config_to_json(const WishartConfig& cfg);
WishartConfig wishart_config_from_json(const std::string& text);

// Eigenvalues of (1/T) A A^T for the configured scale model.
mc::SpectralSample sample_deformed_wishart(const WishartConfig& cfg, Rng& rng);

// Symmetric Gaussian matrix with one random scale per matrix; eigenvalues
// of A/sqrt(N) are returned (config.scaling_exponent = 0).
mc::SpectralSample deformed_wigner_sample(int n, const MixtureParams& m,
                                          Rng& rng);

}  // namespace heavytail::deformed
