#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "heavytail/errors.hpp"

namespace heavytail {

inline constexpr double kPi = 3.14159265358979323846;

struct QuadResult {
    double value = 0.0;
    double error = 0.0;
    long evals = 0;
};

namespace quad {

// Single Gauss-Kronrod 7-15 panel on [a, b].
QuadResult gk15(const std::function<double(double)>& f, double a, double b);

// Adaptive bisection on top of the 7-15 panel. Stops when the summed error
// estimate drops below max(abs_tol, rel_tol * |value|).
QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, double rel_tol = 1e-12,
                    int max_intervals = 4000);

// Fixed-order Gauss-Legendre panels.
double gl4(const std::function<double(double)>& f, double a, double b);
double gl8(const std::function<double(double)>& f, double a, double b);
double gl16(const std::function<double(double)>& f, double a, double b);

extern const double kGl4Nodes[2];
extern const double kGl4Weights[2];

}  // namespace quad

// Monotone cubic (Fritsch-Carlson) interpolant on a strictly increasing grid.
class Pchip {
public:
    Pchip() = default;
    Pchip(std::vector<double> x, std::vector<double> y);

    // Evaluates with constant extension beyond the grid ends.
    double operator()(double x) const;
    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    bool empty() const { return x_.empty(); }

private:
    std::vector<double> x_, y_, m_;
};

// Bisection for a continuous scalar function with a sign change on [a, b].
double bisect(const std::function<double(double)>& f, double a, double b,
              int iters = 200);

// Least-squares slope of y against x.
double ls_slope(std::span<const double> x, std::span<const double> y);

// Complement of the Kolmogorov distribution, Q(t) = 2 sum (-1)^{k-1} e^{-2k^2t^2}.
double kolmogorov_q(double t);

// One-sample KS statistic against a cdf; `sorted` must be ascending.
double ks_statistic(std::span<const double> sorted,
                    const std::function<double(double)>& cdf);

// p-value of the one-sample KS test (asymptotic).
double ks_pvalue(std::span<const double> sorted,
                 const std::function<double(double)>& cdf);

// Two-sample KS distance; both inputs ascending.
double ks_two_sample(std::span<const double> a, std::span<const double> b);

}  // namespace heavytail
