#pragma once

#include <optional>
#include <string>
#include <vector>

#include "heavytail/numerics.hpp"
#include "heavytail/rng.hpp"

namespace heavytail {

// Tabulated real function on a 1-D grid.
struct GridFunction {
    std::vector<double> x;
    std::vector<double> y;

    void validate() const;
};

// Power-law tail model: f(x) ~ c_plus * x^{-exponent-1} as x -> +inf and
// c_minus * |x|^{-exponent-1} as x -> -inf, beyond the tabulated grid.
struct PowerTail {
    double c_plus = 0.0;
    double c_minus = 0.0;
    double exponent = 0.0;  // tail index, density falls as |x|^{-exponent-1}
};

// Density samples plus optional analytic tail completion.
struct DensityCurve {
    GridFunction grid;
    std::optional<PowerTail> tail;
};

void write_grid_csv(const GridFunction& g, const std::string& path,
                    const std::string& xname, const std::string& yname);
GridFunction read_grid_csv(const std::string& path);

// Draws i.i.d. variates from a tabulated density by inversion of the
// tabulated cumulative; power-law tails are inverted in closed form.
class InverseCdfSampler {
public:
    explicit InverseCdfSampler(const DensityCurve& curve);

    double operator()(Rng& rng) const;

    // Cumulative distribution of the (normalized) curve.
    double cdf(double x) const;

private:
    std::vector<double> x_, c_;
    std::optional<PowerTail> tail_;
    double mass_left_ = 0.0, mass_right_ = 0.0, total_ = 1.0;
    Pchip density_;
};

}  // namespace heavytail
