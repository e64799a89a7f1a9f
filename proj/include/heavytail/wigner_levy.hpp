#pragma once

#include <string>
#include <vector>

#include "heavytail/stable.hpp"
#include "heavytail/stable_table.hpp"

namespace heavytail::wl {

// Scale factor Lambda = R (Gamma(1+a) cos(pi a/4) / Gamma(1+a/2))^{1/a}.
struct LambdaScale {
    double value;
};
LambdaScale lambda_scale(double alpha, double range);

struct GridConfig {
    double x_max = 50.0;
    int nodes = 801;       // odd, symmetric about 0
    double stretch = 5.0;  // sinh clustering toward 0
};

struct SolveConfig {
    GridConfig grid;
    double tol = 1e-7;
    int max_iter = 400;
    double damping = 0.5;
    int workers = 0;  // 0: default_workers()
    int table_n_u = 1401;
    int table_n_beta = 41;
};

enum class Validity {
    standard,            // alpha in (1, 2)
    symmetric_extended,  // alpha <= 1: symmetric-entry regime, numerically extended
};

// Effective running range/asymmetry solving the coupled kernel equations.
struct RunningParams {
    double alpha = 0.0;
    std::vector<double> grid;
    std::vector<double> r_hat;
    std::vector<double> beta_hat;
    double residual = 0.0;
    int iterations = 0;
    std::vector<double> residual_history;
    Validity validity = Validity::standard;
    double tol = 0.0;
};

// Damped fixed-point solve of the running-parameter system. The entry-law
// asymmetry never enters: the equations depend on alpha only.
RunningParams solve_running_params(double alpha, const SolveConfig& cfg = {});

// Limiting spectral density at (physical) lambda for entry range `range`.
// Off-grid arguments switch to the analytic tail when tail_fallback is set,
// otherwise raise ExtrapolationError.
double density(double lambda, double alpha, double range,
               const RunningParams& rp, bool tail_fallback = true);

// Analytic tail gamma_alpha R^alpha / |lambda|^{alpha+1}.
double density_tail(double lambda, double alpha, double range);

// Grid integral of the solved density plus analytic tail completion.
double normalization_check(const RunningParams& rp, double alpha, double range);

void save_csv(const RunningParams& rp, const std::string& path);
void save_json(const RunningParams& rp, const std::string& path);
RunningParams load_json(const std::string& path);

namespace detail {

// Kernel integrals (D, N) at one target for the given running parameters;
// exposed so tests can pin the composite quadrature against brute force.
std::pair<double, double> kernel_integrals(const RunningParams& rp,
                                           double lambda, double x_max,
                                           const stable::StableDensityTable& table);

}  // namespace detail

}  // namespace heavytail::wl
