#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "heavytail/grid.hpp"
#include "heavytail/linalg.hpp"
#include "heavytail/matrix_mc.hpp"
#include "heavytail/rng.hpp"

namespace heavytail::freelevy {

using Complex = std::complex<double>;

// Stable law in free probability: index alpha, asymmetry beta, range r.
// The standardized member (r = 1) has R-transform b z^{alpha-1}; general r
// follows from R_r(z) = r R(r z). At alpha = 2 the density is the
// semicircle for every beta.
struct FreeStableParams {
    double alpha = 2.0;
    double beta = 0.0;
    double range = 1.0;

    void validate() const;
};

// Green function value at one point and its Herglotz sanity bound.
struct GreenValue {
    Complex z;
    Complex g;
};

// Unit-modulus phase of the standardized stable R-transform.
struct BCoefficient {
    Complex value;
};
BCoefficient b_coefficient(double alpha, double beta);

// R-transform of a free stable law; principal branches throughout,
// arguments on the negative real axis raise BranchError.
Complex stable_r_transform(Complex z, const FreeStableParams& p);

// Herglotz-branch resolvent at z = lambda + i 0^+, found by complex Newton
// continuation seeded from G ~ 1/z at large |lambda|.
Complex resolvent(double lambda, const FreeStableParams& p, double tol = 1e-12);

// Resolvent along a lambda grid, sharing one continuation sweep per side.
std::vector<GreenValue> resolvent_curve(std::span<const double> lambdas,
                                        const FreeStableParams& p,
                                        double tol = 1e-12);

// Spectral density -(1/pi) Im G(lambda + i0^+).
double density(double lambda, const FreeStableParams& p);

// Large-|lambda| tail (1/pi) sin(pi alpha/2) r^alpha |lambda|^{-alpha-1};
// stated for the symmetric case (beta = 0).
double density_tail(double lambda, const FreeStableParams& p);

// Confining potential with V(0) = 0 gauge: V'(lambda) = 2 Re G(lambda+i0^+).
// Beyond |lambda| = 60 the asymptotic form 2 ln|l| - (2/alpha) Re(b l^-alpha)
// is matched continuously at the edge.
double potential(double lambda, const FreeStableParams& p);

// Green function of a tabulated density by quadrature (plus power-tail
// completion when the curve carries one). Real z on the support raises
// DomainError.
Complex green_from_density(const DensityCurve& rho, Complex z);
Complex green_prime_from_density(const DensityCurve& rho, Complex z);

// Green-function evaluator bundle used by the inversion helpers.
struct GreenEvaluator {
    std::function<Complex(Complex)> value;
    std::function<Complex(Complex)> derivative;
};
GreenEvaluator make_green_evaluator(const DensityCurve& rho);

// R(z) = w - 1/z where G(w) = z, solved by Newton seeded from w ~ 1/z.
Complex r_from_green(const GreenEvaluator& g, Complex z, double tol = 1e-10);

using RTransform = std::function<Complex(Complex)>;

// Pointwise sum of R-transforms (free additive convolution).
RTransform free_add(RTransform r1, RTransform r2);

// Density of the law with the given R-transform, via the same Herglotz
// continuation as `resolvent` applied to R(G) + 1/G = z.
std::vector<double> density_from_r(const RTransform& r,
                                   std::span<const double> lambdas,
                                   double tol = 1e-10);

// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
// R-diagonal sign fix).
Mat haar_orthogonal(int n, Rng& rng);

// K-fold free sum of diagonal matrices with i.i.d. eigenvalues drawn by
// `draw`, rotated by independent Haar matrices and scaled by K^{-1/alpha}.
mc::SpectralSample free_sum_diagonal(int n, int k, double alpha,
                                     const std::function<double(Rng&)>& draw,
                                     Rng& rng);

// Same construction with heavy-tailed symmetric-matrix summands
// (entries i.i.d. stable, each summand scaled by N^{-1/alpha}).
mc::SpectralSample free_sum_wigner_levy(int n, int k,
                                        const stable::StableParams& entry_law,
                                        Rng& rng);

}  // namespace heavytail::freelevy
