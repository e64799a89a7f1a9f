#include "heavytail/free_levy.hpp"

#include <algorithm>
#include <cmath>

#include "heavytail/numerics.hpp"

namespace heavytail::freelevy {

namespace {

constexpr double kImOffset = 1e-8;   // i 0^+ stand-in
constexpr double kHerglotzTol = 1e-10;

const Complex kI(0.0, 1.0);

}  // namespace

void FreeStableParams::validate() const {
    if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("free stable: alpha in (0, 2]");
    if (!(beta >= -1.0 && beta <= 1.0)) throw DomainError("free stable: beta in [-1, 1]");
    if (!(range > 0.0)) throw DomainError("free stable: range > 0");
}

BCoefficient b_coefficient(double alpha, double beta) {
    FreeStableParams{alpha, beta, 1.0}.validate();
    if (alpha == 1.0) throw DomainError("b_coefficient: alpha = 1 has no power form");
    if (alpha < 1.0)
        return {-std::exp(kI * (alpha * (1.0 + beta) * 0.5 * kPi))};
    return {std::exp(kI * ((alpha - 2.0) * (1.0 + beta) * 0.5 * kPi))};
}

Complex stable_r_transform(Complex z, const FreeStableParams& p) {
    p.validate();
    const double a = p.alpha;
    const double r = p.range;
    if (a == 2.0) return r * r * z;
    if (z.imag() == 0.0 && z.real() < 0.0)
        throw BranchError("stable_r_transform: argument on the negative real axis");
    Complex zr = r * z;
    if (a == 1.0) {
        if (zr == Complex(0.0, 0.0))
            throw DomainError("stable_r_transform: z = 0 at alpha = 1");
        return r * (-kI * (1.0 + p.beta) -
                    (2.0 * p.beta / kPi) * std::log(zr));
    }
    if (a < 1.0 && zr == Complex(0.0, 0.0))
        throw DomainError("stable_r_transform: z = 0 for alpha < 1");
    Complex b = b_coefficient(a, p.beta).value;
    return r * b * std::pow(zr, a - 1.0);
}

namespace {

// Residual of the resolvent equation for a stable R-transform with range r:
// b r^alpha G^alpha - z G + 1 = 0 (alpha != 1), or R(G) + 1/G - z = 0.
struct StableResolventEq {
    double alpha;
    double beta;
    double range;
    Complex b_eff;  // b * r^alpha for alpha != 1

    Complex f(Complex g, Complex z) const {
        if (alpha == 1.0) {
            Complex rg = range * g;
            return range * (-kI * (1.0 + beta) - (2.0 * beta / kPi) * std::log(rg)) +
                   1.0 / g - z;
        }
        return b_eff * std::pow(g, alpha) - z * g + 1.0;
    }
    Complex df(Complex g, Complex z) const {
        if (alpha == 1.0)
            return -(2.0 * beta / kPi) * range / g - 1.0 / (g * g);
        return alpha * b_eff * std::pow(g, alpha - 1.0) - z;
    }
};

Complex newton_resolvent(const StableResolventEq& eq, Complex z, Complex seed,
                         double tol) {
    Complex g = seed;
    for (int it = 0; it < 80; ++it) {
        Complex f = eq.f(g, z);
        if (std::abs(f) < tol) return g;
        Complex d = eq.df(g, z);
        if (d == Complex(0.0, 0.0) || !std::isfinite(std::abs(d)))
            throw RootTrackingError("resolvent: singular Newton derivative", g);
        Complex step = f / d;
        // Keep the iterate in the closed lower half-plane.
        for (int half = 0; half < 30; ++half) {
            Complex cand = g - step;
            if (cand.imag() <= 1e-14 && std::isfinite(std::abs(cand))) {
                g = cand;
                break;
            }
            step *= 0.5;
        }
    }
    if (std::abs(eq.f(g, z)) < 100.0 * tol) return g;
    throw RootTrackingError("resolvent: Newton stagnation", g);
}


// Herglotz-branch resolvent at a list of targets on one side of the axis,
// all with the same sign, sorted by decreasing |lambda| for the sweep.
void resolvent_sweep(const StableResolventEq& eq, std::span<const double> lams,
                     double tol, std::vector<Complex>& out) {
    if (lams.empty()) return;
    double amax = 0.0;
    for (double l : lams) amax = std::max(amax, std::abs(l));
    double lam_far = std::max(60.0, 4.0 * amax);
    double sgn = lams[0] < 0 ? -1.0 : 1.0;

    std::vector<int> order(lams.size());
    for (std::size_t i = 0; i < lams.size(); ++i) order[i] = static_cast<int>(i);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        return std::abs(lams[i]) > std::abs(lams[j]);
    });

    double x = lam_far;
    Complex g = 1.0 / Complex(sgn * x, kImOffset);
    auto advance_to = [&](double ax) {
        while (x > ax + 1e-15) {
            double nxt = std::max(ax, x > 1.2 * ax + 0.05 ? x * 0.9 : x - 0.05);
            x = nxt;
            Complex z(sgn * x, kImOffset);
            g = newton_resolvent(eq, z, g, tol);
        }
    };
    for (int idx : order) {
        advance_to(std::abs(lams[idx]));
        Complex z(lams[idx], kImOffset);
        Complex gv = newton_resolvent(eq, z, g, tol);
        if (gv.imag() > kHerglotzTol)
            throw BranchError("resolvent: Herglotz bound violated");
        out[idx] = gv;
        g = gv;
    }
}

StableResolventEq make_eq(const FreeStableParams& p) {
    StableResolventEq eq{p.alpha, p.beta, p.range, Complex(1.0, 0.0)};
    if (p.alpha != 1.0)
        eq.b_eff = b_coefficient(p.alpha, p.beta).value *
                   std::pow(p.range, p.alpha);
    return eq;
}

}  // namespace

std::vector<GreenValue> resolvent_curve(std::span<const double> lambdas,
                                        const FreeStableParams& p, double tol) {
    p.validate();
    if (p.alpha == 2.0) {
        // Quadratic case: closed-form Herglotz root.
        std::vector<GreenValue> out(lambdas.size());
        double b = p.range * p.range;
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            Complex z(lambdas[i], kImOffset);
            Complex s = std::sqrt(z * z - 4.0 * b);
            if (s.real() * z.real() + s.imag() * z.imag() < 0.0) s = -s;
            out[i] = {z, (z - s) / (2.0 * b)};
        }
        return out;
    }
    StableResolventEq eq = make_eq(p);
    std::vector<Complex> g(lambdas.size());
    std::vector<double> pos, neg;
    std::vector<int> ipos, ineg;
    for (std::size_t i = 0; i < lambdas.size(); ++i) {
        if (lambdas[i] >= 0) {
            pos.push_back(lambdas[i]);
            ipos.push_back(static_cast<int>(i));
        } else {
            neg.push_back(lambdas[i]);
            ineg.push_back(static_cast<int>(i));
        }
    }
    std::vector<Complex> gp(pos.size()), gn(neg.size());
    resolvent_sweep(eq, pos, tol, gp);
    resolvent_sweep(eq, neg, tol, gn);
    std::vector<GreenValue> out(lambdas.size());
    for (std::size_t i = 0; i < pos.size(); ++i)
        out[ipos[i]] = {Complex(pos[i], kImOffset), gp[i]};
    for (std::size_t i = 0; i < neg.size(); ++i)
        out[ineg[i]] = {Complex(neg[i], kImOffset), gn[i]};
    return out;
}

Complex resolvent(double lambda, const FreeStableParams& p, double tol) {
    double l = lambda;
    return resolvent_curve(std::span<const double>(&l, 1), p, tol)[0].g;
}

double density(double lambda, const FreeStableParams& p) {
    Complex g = resolvent(lambda, p);
    return std::max(0.0, -g.imag() / kPi);
}

double density_tail(double lambda, const FreeStableParams& p) {
    p.validate();
    if (p.beta != 0.0)
        throw DomainError("density_tail: stated for the symmetric case only");
    if (p.alpha == 2.0) return 0.0;
    if (lambda == 0.0) throw DomainError("density_tail: lambda must be nonzero");
    return std::sin(0.5 * kPi * p.alpha) / kPi *
           std::pow(p.range, p.alpha) /
           std::pow(std::abs(lambda), p.alpha + 1.0);
}

double potential(double lambda, const FreeStableParams& p) {
    p.validate();
    const double edge = 60.0;
    double target = std::min(std::abs(lambda), edge);
    const int n = std::max(64, static_cast<int>(target / 0.01));
    // Simpson nodes from 0 to min(|lambda|, edge), one continuation sweep.
    std::vector<double> xs(n + 1);
    for (int i = 0; i <= n; ++i)
        xs[i] = std::copysign(target * i / n, lambda);
    auto gv = resolvent_curve(xs, p);
    auto vp = [&](int i) { return 2.0 * gv[i].g.real(); };
    double v = 0.0;
    double h = target / n;
    for (int i = 0; i + 2 <= n; i += 2)
        v += h / 3.0 * (vp(i) + 4.0 * vp(i + 1) + vp(i + 2));
    if (n % 2 == 1) v += 0.5 * h * (vp(n - 1) + vp(n));
    v *= std::copysign(1.0, lambda);
    if (std::abs(lambda) <= edge) return v;
    // Asymptotic continuation matched at the edge.
    auto asym = [&](double l) {
        double t = 2.0 * std::log(l);
        if (p.alpha != 1.0) {
            Complex b = b_coefficient(p.alpha, p.beta).value *
                        std::pow(p.range, p.alpha);
            t -= 2.0 / p.alpha * (b * std::pow(l, -p.alpha)).real();
        }
        return t;
    };
    return v + asym(std::abs(lambda)) - asym(edge);
}

namespace {

Complex cauchy_kernel_integral(const DensityCurve& rho, Complex z, int order) {
    // order 1: int rho/(z - l); order 2: int rho/(z - l)^2.
    rho.grid.validate();
    Pchip f(rho.grid.x, rho.grid.y);
    auto re_im = [&](double l) -> Complex {
        double d = std::max(0.0, f(l));
        Complex den = z - l;
        return order == 1 ? d / den : d / (den * den);
    };
    Complex total(0.0, 0.0);
    const auto& xs = rho.grid.x;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
        auto fr = [&](double l) { return re_im(l).real(); };
        auto fi = [&](double l) { return re_im(l).imag(); };
        total += Complex(quad::gl4(fr, xs[i], xs[i + 1]),
                         quad::gl4(fi, xs[i], xs[i + 1]));
    }
    if (rho.tail) {
        const PowerTail& t = *rho.tail;
        double a = t.exponent;
        // Right tail: int_X^inf c l^{-a-1}/(z - l)^order dl with l = X/s^{1/a}.
        for (double side : {1.0, -1.0}) {
            double c = side > 0 ? t.c_plus : t.c_minus;
            if (c == 0.0) continue;
            double X = side > 0 ? xs.back() : -xs.front();
            auto fker = [&](double s) -> Complex {
                double l = side * X * std::pow(s, -1.0 / a);
                Complex den = z - l;
                Complex k = order == 1 ? 1.0 / den : 1.0 / (den * den);
                return k;  // measure handled below
            };
            auto fr = [&](double s) { return fker(s).real(); };
            auto fi = [&](double s) { return fker(s).imag(); };
            // c l^{-a-1} dl = -(c/a) X^{-a} ds under s = (X/|l|)^a.
            Complex integral(quad::gl16(fr, 0.0, 1.0), quad::gl16(fi, 0.0, 1.0));
            total += c / a * std::pow(X, -a) * integral;
        }
    }
    return total;
}

}  // namespace

Complex green_from_density(const DensityCurve& rho, Complex z) {
    if (z.imag() == 0.0) {
        bool inside = z.real() >= rho.grid.x.front() &&
                      z.real() <= rho.grid.x.back();
        if (inside || rho.tail)
            throw DomainError("green_from_density: real z on the support");
    }
    return cauchy_kernel_integral(rho, z, 1);
}

Complex green_prime_from_density(const DensityCurve& rho, Complex z) {
    return -cauchy_kernel_integral(rho, z, 2);
}

GreenEvaluator make_green_evaluator(const DensityCurve& rho) {
    GreenEvaluator g;
    g.value = [rho](Complex z) { return green_from_density(rho, z); };
    g.derivative = [rho](Complex z) { return green_prime_from_density(rho, z); };
    return g;
}

Complex r_from_green(const GreenEvaluator& g, Complex z, double tol) {
    if (z == Complex(0.0, 0.0))
        throw DomainError("r_from_green: z = 0");
    Complex w = 1.0 / z;
    double res = 0.0;
    for (int it = 0; it < 100; ++it) {
        Complex f = g.value(w) - z;
        res = std::abs(f);
        if (res < tol) return w - 1.0 / z;
        Complex d = g.derivative(w);
        if (d == Complex(0.0, 0.0))
            throw InversionError("r_from_green: zero derivative", res);
        w -= f / d;
        if (!std::isfinite(std::abs(w)))
            throw InversionError("r_from_green: diverged", res);
    }
    throw InversionError("r_from_green: no convergence", res);
}

RTransform free_add(RTransform r1, RTransform r2) {
    return [r1 = std::move(r1), r2 = std::move(r2)](Complex z) {
        return r1(z) + r2(z);
    };
}

namespace {

struct GenericResolventEq {
    const RTransform& r;

    Complex f(Complex g, Complex z) const { return r(g) + 1.0 / g - z; }
    Complex df(Complex g, Complex /*z*/) const {
        double h = 1e-6 * std::max(1.0, std::abs(g));
        Complex dr = (r(g + h) - r(g - h)) / (2.0 * h);
        return dr - 1.0 / (g * g);
    }
};

}  // namespace

std::vector<double> density_from_r(const RTransform& r,
                                   std::span<const double> lambdas,
                                   double tol) {
    GenericResolventEq eq{r};
    double amax = 1.0;
    for (double l : lambdas) amax = std::max(amax, std::abs(l));
    std::vector<double> out(lambdas.size());

    for (double sgn : {1.0, -1.0}) {
        std::vector<int> idx;
        for (std::size_t i = 0; i < lambdas.size(); ++i)
            if ((sgn > 0 && lambdas[i] >= 0) || (sgn < 0 && lambdas[i] < 0))
                idx.push_back(static_cast<int>(i));
        if (idx.empty()) continue;
        std::sort(idx.begin(), idx.end(), [&](int i, int j) {
            return std::abs(lambdas[i]) > std::abs(lambdas[j]);
        });
        double far = std::max(30.0, 4.0 * amax);
        double x = far;
        Complex g = 1.0 / Complex(sgn * x, kImOffset);
        // Newton refine along a descending path, reusing the previous root.
        auto newton_at = [&](Complex z, Complex seed) {
            Complex gg = seed;
            for (int it = 0; it < 80; ++it) {
                Complex f = eq.f(gg, z);
                if (std::abs(f) < tol) return gg;
                Complex d = eq.df(gg, z);
                Complex step = f / d;
                for (int half = 0; half < 30; ++half) {
                    Complex cand = gg - step;
                    if (cand.imag() <= 1e-14 && std::isfinite(std::abs(cand))) {
                        gg = cand;
                        break;
                    }
                    step *= 0.5;
                }
            }
            if (std::abs(eq.f(gg, z)) < 100.0 * tol) return gg;
            throw RootTrackingError("density_from_r: Newton stagnation", gg);
        };
        auto advance_to = [&](double target) {
            while (x > target + 1e-15) {
                x = std::max(target, x > 1.2 * target + 0.05 ? x * 0.9 : x - 0.05);
                g = newton_at(Complex(sgn * x, kImOffset), g);
            }
        };
        for (int i : idx) {
            advance_to(std::abs(lambdas[i]));
            Complex gv = newton_at(Complex(lambdas[i], kImOffset), g);
            if (gv.imag() > kHerglotzTol)
                throw BranchError("density_from_r: Herglotz bound violated");
            out[i] = std::max(0.0, -gv.imag() / kPi);
            g = gv;
        }
    }
    return out;
}

Mat haar_orthogonal(int n, Rng& rng) {
    if (n < 1) throw DomainError("haar_orthogonal: N >= 1 required");
    Mat g(n, n);
    for (auto& v : g.a) v = rng.normal();
    return householder_q(std::move(g));
}

mc::SpectralSample free_sum_diagonal(int n, int k, double alpha,
                                     const std::function<double(Rng&)>& draw,
                                     Rng& rng) {
    if (n < 1 || k < 1) throw DomainError("free_sum_diagonal: N, K >= 1");
    if (!(alpha > 0.0 && alpha <= 2.0))
        throw DomainError("free_sum_diagonal: alpha in (0, 2]");
    Mat sum(n, n);
    std::vector<double> d(n);
    for (int term = 0; term < k; ++term) {
        for (int i = 0; i < n; ++i) d[i] = draw(rng);
        Mat o = haar_orthogonal(n, rng);
        Mat rot = rotate_diag(o, d);
        for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += rot.a[i];
    }
    double scale = std::pow(static_cast<double>(k), -1.0 / alpha);
    for (auto& v : sum.a) v *= scale;
    auto s = mc::eigen_sym_sample(sum, false);
    s.config.kind = EnsembleKind::free_sum_diag;
    s.config.N = n;
    s.config.K = k;
    s.config.alpha = alpha;
    s.config.scaling_exponent = 0.0;
    return s;
}

mc::SpectralSample free_sum_wigner_levy(int n, int k,
                                        const stable::StableParams& entry_law,
                                        Rng& rng) {
    if (n < 1 || k < 1) throw DomainError("free_sum_wigner_levy: N, K >= 1");
    entry_law.validate();
    const double alpha = entry_law.alpha;
    Mat sum(n, n);
    const double nscale = std::pow(static_cast<double>(n), -1.0 / alpha);
    for (int term = 0; term < k; ++term) {
        Mat a = mc::sample_wigner_levy(n, entry_law, rng);
        for (auto& v : a.a) v *= nscale;
        Mat o = haar_orthogonal(n, rng);
        Mat rot = rotate_sym(o, a);
        for (std::size_t i = 0; i < sum.a.size(); ++i) sum.a[i] += rot.a[i];
    }
    double scale = std::pow(static_cast<double>(k), -1.0 / alpha);
    for (auto& v : sum.a) v *= scale;
    auto s = mc::eigen_sym_sample(sum, false);
    s.config.kind = EnsembleKind::free_sum_wl;
    s.config.N = n;
    s.config.K = k;
    s.config.alpha = alpha;
    s.config.beta = entry_law.beta;
    s.config.range = entry_law.range;
    s.config.scaling_exponent = 0.0;
    return s;
}

}  // namespace heavytail::freelevy
