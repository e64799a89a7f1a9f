#include "heavytail/grid.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "heavytail/errors.hpp"

namespace heavytail {

void GridFunction::validate() const {
    if (x.size() != y.size() || x.size() < 2)
        throw DomainError("GridFunction: mismatched or too-short grid");
    for (std::size_t i = 0; i + 1 < x.size(); ++i)
        if (!(x[i] < x[i + 1])) throw DomainError("GridFunction: grid not increasing");
}

void write_grid_csv(const GridFunction& g, const std::string& path,
                    const std::string& xname, const std::string& yname) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open " + path);
    out << xname << "," << yname << "\n";
    char buf[64];
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", g.x[i]);
        out << buf << ",";
        std::snprintf(buf, sizeof buf, "%.17g", g.y[i]);
        out << buf << "\n";
    }
}

GridFunction read_grid_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    std::string line;
    std::getline(in, line);  // header
    GridFunction g;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string a, b;
        std::getline(ss, a, ',');
        std::getline(ss, b, ',');
        g.x.push_back(std::stod(a));
        g.y.push_back(std::stod(b));
    }
    g.validate();
    return g;
}

InverseCdfSampler::InverseCdfSampler(const DensityCurve& curve)
    : tail_(curve.tail) {
    curve.grid.validate();
    x_ = curve.grid.x;
    density_ = Pchip(curve.grid.x, curve.grid.y);
    const std::size_t n = x_.size();
    c_.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        double s = quad::gl4([this](double t) { return std::max(0.0, density_(t)); },
                             x_[i], x_[i + 1]);
        c_[i + 1] = c_[i] + std::max(0.0, s);
    }
    if (tail_) {
        double a = tail_->exponent;
        if (a <= 0) throw DomainError("InverseCdfSampler: tail exponent must be > 0");
        mass_left_ = tail_->c_minus / a * std::pow(std::abs(x_.front()), -a);
        mass_right_ = tail_->c_plus / a * std::pow(x_.back(), -a);
    }
    total_ = mass_left_ + c_.back() + mass_right_;
    if (!(total_ > 0)) throw DomainError("InverseCdfSampler: zero total mass");
}

double InverseCdfSampler::cdf(double x) const {
    double a = tail_ ? tail_->exponent : 0.0;
    if (x <= x_.front()) {
        if (!tail_ || x >= 0) return 0.0;
        return tail_->c_minus / a * std::pow(-x, -a) / total_;
    }
    if (x >= x_.back()) {
        if (!tail_) return 1.0;
        return 1.0 - tail_->c_plus / a * std::pow(x, -a) / total_;
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    double seg = quad::gl4([this](double t) { return std::max(0.0, density_(t)); },
                           x_[i], x);
    return (mass_left_ + c_[i] + std::max(0.0, seg)) / total_;
}

double InverseCdfSampler::operator()(Rng& rng) const {
    double u = rng.uniform() * total_;
    if (tail_ && u < mass_left_) {
        double a = tail_->exponent;
        // u = c_minus/a * |x|^{-a}  =>  |x| = (c_minus/(a u))^{1/a}
        return -std::pow(tail_->c_minus / (a * u), 1.0 / a);
    }
    if (tail_ && u > total_ - mass_right_) {
        double a = tail_->exponent;
        double v = total_ - u;
        if (v <= 0) v = 1e-300;
        return std::pow(tail_->c_plus / (a * v), 1.0 / a);
    }
    double target = u - mass_left_;
    std::size_t lo = 0, hi = x_.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = (lo + hi) / 2;
        if (c_[mid] <= target)
            lo = mid;
        else
            hi = mid;
    }
    // Local inversion within the cell by bisection on the cumulative.
    double need = target - c_[lo];
    double a = x_[lo], b = x_[hi];
    for (int it = 0; it < 60; ++it) {
        double m = 0.5 * (a + b);
        double s = quad::gl4([this](double t) { return std::max(0.0, density_(t)); },
                             x_[lo], m);
        if (s < need)
            a = m;
        else
            b = m;
    }
    return 0.5 * (a + b);
}

}  // namespace heavytail
