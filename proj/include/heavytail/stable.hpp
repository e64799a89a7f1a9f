#pragma once

#include <complex>
#include <span>
#include <vector>

#include "heavytail/errors.hpp"
#include "heavytail/rng.hpp"

namespace heavytail::stable {

// One-dimensional alpha-stable law with stability index alpha, asymmetry
// beta and range (scale) R.
//
// Convention: the triple coincides with the S1 ("1") parameterization of
// Samorodnitsky-Taqqu / Nolan with sigma = range and zero shift, stated for
// the transform pair chat(k) = <exp(-ikX)>, i.e.
//     ln chat(k) = -R^alpha |k|^alpha (1 + i beta sgn(k) tan(pi alpha / 2))
// for alpha != 1. Under this convention beta > 0 gives the heavier right
// tail:  pdf(x) -> (1 + beta) gamma_alpha R^alpha / x^{alpha+1}, x -> +inf,
// with gamma_alpha = Gamma(1+alpha) sin(pi alpha/2) / pi. At alpha = 1 the
// log-characteristic function picks up the usual logarithmic term,
//     -R|k| (1 + i (2 beta / pi) sgn(k) ln(R|k|)),
// whose ln(R|k|) (rather than ln|k|) fixes the scaling family x = R x_*.
// At alpha = 2 the law is Gaussian with sigma = sqrt(2) R for every beta.
struct StableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double range = 1.0;

    void validate() const;
};

// Tail amplitudes C+/C- of a density p(x) -> C±/|x|^{1+alpha}.
struct TailAmplitudes {
    double c_plus = 0.0;
    double c_minus = 0.0;
};

// gamma_alpha = Gamma(1+alpha) sin(pi alpha / 2) / pi.
double gamma_alpha(double alpha);

// Log-characteristic function ("c-transform").
std::complex<double> c_transform(double k, const StableParams& p);

// Density, evaluated through the real integral representation of stable
// densities (no oscillatory Fourier quadrature). abs_tol is the absolute
// accuracy target; failure to reach it raises AccuracyError.
double pdf(double x, const StableParams& p, double abs_tol = 1e-8);

// Standardized density (range = 1).
double pdf_std(double x, double alpha, double beta, double abs_tol = 1e-8);

// Leading tail term (1 ± beta) gamma_alpha R^alpha / |x|^{alpha+1};
// alpha = 2 has no power tail and raises TailUndefinedError.
double tail_asymptote(double x, const StableParams& p);

// Multi-term tail expansion; `terms` capped by the optimal truncation of
// the asymptotic series. Requires alpha < 2 and x != 0.
double tail_series(double x, const StableParams& p, int terms = 6);

// One exact variate per call (Chambers-Mallows-Stuck transform).
double sample(const StableParams& p, Rng& rng);

// Parameters of the sum of two independent stable variates.
StableParams add_params(const StableParams& p1, const StableParams& p2);

// Stable parameters of the basin of attraction fixed by tail amplitudes.
StableParams tail_to_stable_params(double alpha, const TailAmplitudes& t);

// Inverse map: tail amplitudes of a given stable law (alpha < 2).
TailAmplitudes tail_amplitudes(const StableParams& p);

// Least-squares slope of log(max-entry) against log(matrix size); the
// expected value for entries in the alpha-stable basin is 2/alpha.
// Entries may repeat sizes (several Monte Carlo draws per size); at least
// three distinct sizes are required.
double frechet_max_check(std::span<const int> sizes,
                         std::span<const double> max_abs_entries);

namespace detail {

// Standardized S0 (shift-adjusted) density; the S1 density used by pdf()
// is pdf_s1(x) = pdf_s0(x + zeta) with zeta = -beta tan(pi alpha / 2).
double pdf_s0(double u, double alpha, double beta, double abs_tol);

// Standardized tail series evaluated at x > 0 for the right tail.
double tail_series_std(double x, double alpha, double beta, int terms);

// True when the tail series at |x| delivers the requested relative error;
// used to switch the far-tail evaluation away from quadrature.
bool tail_series_adequate(double x, double alpha, double beta, double rel_tol);

}  // namespace detail

}  // namespace heavytail::stable
