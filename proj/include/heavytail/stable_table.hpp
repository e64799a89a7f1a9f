#pragma once

#include <vector>

#include "heavytail/stable.hpp"

namespace heavytail::stable {

// Precomputed standardized stable density for one stability index, indexed
// by the asymmetry. Lookup is a local cubic in both directions on a
// shift-adjusted (S0) argument grid, with the analytic tail expansion taking
// over beyond the tabulated window. Immutable after construction, safe for
// concurrent reads.
struct StableTableOptions {
    int n_u = 1401;        // argument nodes (sinh-spaced)
    int n_beta = 41;       // asymmetry nodes (uniform on [-1, 1])
    double stretch = 5.0;  // sinh grid stretch
    double build_tol = 1e-12;
    int workers = 1;
};

class StableDensityTable {
public:
    using Options = StableTableOptions;

    explicit StableDensityTable(double alpha,
                                const Options& opt = StableTableOptions());

    double alpha() const { return alpha_; }
    double u_max() const { return u_max_; }

    // Density of the S1 law with the given asymmetry and range at y.
    double density(double y, double beta, double range) const;

private:
    double interp(double u, double beta) const;

    double alpha_;
    double u_max_;
    double stretch_;
    double tan_half_;
    int n_u_, n_beta_;
    std::vector<double> u_;               // argument grid
    std::vector<double> values_;          // n_beta x n_u, row-major
};

}  // namespace heavytail::stable
