#include "doctest.h"

#include <cmath>
#include <complex>
#include <numeric>

#include "heavytail/free_levy.hpp"
#include "heavytail/mc_runner.hpp"
#include "support/oracles.hpp"

using namespace heavytail;
using namespace heavytail::freelevy;

namespace {

const Complex kI(0.0, 1.0);

DensityCurve semicircle_curve(double sigma, int nodes = 4001) {
    DensityCurve c;
    c.grid.x.resize(nodes);
    c.grid.y.resize(nodes);
    for (int i = 0; i < nodes; ++i) {
        double x = -2.0 * sigma + 4.0 * sigma * i / (nodes - 1);
        c.grid.x[i] = x;
        c.grid.y[i] = oracles::semicircle_pdf(x, sigma);
    }
    return c;
}

DensityCurve cauchy_curve(double scale, double span = 400.0, int nodes = 4001) {
    DensityCurve c;
    c.grid.x.resize(nodes);
    c.grid.y.resize(nodes);
    double stretch = 6.0, sh = std::sinh(stretch);
    for (int i = 0; i < nodes; ++i) {
        double t = -1.0 + 2.0 * i / (nodes - 1);
        double x = span * std::sinh(stretch * t) / sh;
        c.grid.x[i] = x;
        c.grid.y[i] = oracles::cauchy_pdf(x, scale);
    }
    c.tail = PowerTail{scale / kPi, scale / kPi, 1.0};
    return c;
}

double semicircle_inverse_cdf(double u) {
    double lo = -2.0, hi = 2.0;
    auto cdf = [](double x) {
        return 0.5 + (x * std::sqrt(4.0 - x * x)) / (4.0 * kPi) +
               std::asin(0.5 * x) / kPi;
    };
    for (int i = 0; i < 60; ++i) {
        double m = 0.5 * (lo + hi);
        (cdf(m) < u ? lo : hi) = m;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("b coefficient and stable R-transform pinned values") {
    CHECK(b_coefficient(2.0, 0.3).value == Complex(1.0, 0.0));
    auto b15 = b_coefficient(1.5, 0.0).value;
    CHECK(b15.real() == doctest::Approx(std::cos(-0.25 * kPi)).epsilon(1e-14));
    CHECK(b15.imag() == doctest::Approx(std::sin(-0.25 * kPi)).epsilon(1e-14));
    CHECK(std::abs(b_coefficient(0.7, 0.4).value) == doctest::Approx(1.0));
    CHECK(std::abs(b_coefficient(1.3, -0.8).value) == doctest::Approx(1.0));

    // alpha = 2: R(z) = z for every beta (range-squared scaling in general)
    for (double beta : {-1.0, 0.0, 0.6}) {
        Complex z(0.3, 0.2);
        CHECK(std::abs(stable_r_transform(z, {2.0, beta, 1.0}) - z) < 1e-14);
    }
    // alpha = 1, beta = 0: constant -i
    CHECK(std::abs(stable_r_transform(Complex(0.2, 0.1), {1.0, 0.0, 1.0}) -
                   Complex(0.0, -1.0)) < 1e-14);

    // rescaling law R_r(z) = r R(rz)
    FreeStableParams p{1.5, 0.3, 1.0};
    FreeStableParams pr{1.5, 0.3, 1.7};
    Complex z(0.11, 0.23);
    CHECK(std::abs(stable_r_transform(z, pr) -
                   1.7 * stable_r_transform(1.7 * z, p)) < 1e-13);

    CHECK_THROWS_AS(stable_r_transform(Complex(-0.5, 0.0), {1.5, 0.2, 1.0}),
                    BranchError);
}

TEST_CASE("resolvent closed forms") {
    // semicircle: G(0 + i0+) = -i
    Complex g0 = resolvent(0.0, {2.0, 0.0, 1.0});
    CHECK(std::abs(g0 - Complex(0.0, -1.0)) < 1e-7);
    for (double lam : {-1.8, -0.6, 0.4, 1.5}) {
        Complex z(lam, 1e-8);
        Complex s = std::sqrt(z * z - 4.0);
        if (s.real() * z.real() + s.imag() * z.imag() < 0.0) s = -s;
        Complex expect = (z - s) / 2.0;
        CHECK(std::abs(resolvent(lam, {2.0, 0.0, 1.0}) - expect) < 1e-10);
    }

    // Cauchy: G(z) = 1/(z + i)
    for (double lam : {-4.0, -0.3, 0.0, 2.2}) {
        Complex z(lam, 1e-8);
        CHECK(std::abs(resolvent(lam, {1.0, 0.0, 1.0}) - 1.0 / (z + kI)) < 1e-10);
    }

    // normalization G ~ 1/lambda at large |lambda| for any alpha
    for (double a : {0.8, 1.3, 1.7}) {
        Complex g = resolvent(1000.0, {a, 0.0, 1.0});
        CHECK(std::abs(g - Complex(1e-3, 0.0)) < 1e-5);
    }

    // Herglotz bound holds along a sweep
    FreeStableParams p{1.5, 0.4, 1.0};
    std::vector<double> lams;
    for (int i = 0; i <= 100; ++i) lams.push_back(-8.0 + 16.0 * i / 100);
    for (auto& gv : resolvent_curve(lams, p)) CHECK(gv.g.imag() <= 1e-10);
}

TEST_CASE("free stable density") {
    // pinned peak values
    CHECK(density(0.0, {2.0, 0.0, 1.0}) ==
          doctest::Approx(1.0 / kPi).epsilon(1e-7));
    for (double lam : {-3.0, -0.5, 0.0, 1.0}) {
        CHECK(density(lam, {1.0, 0.0, 1.0}) ==
              doctest::Approx(oracles::cauchy_pdf(lam, 1.0)).epsilon(1e-8));
    }

    SUBCASE("small-lambda expansion coefficient (3 - alpha) / (2 alpha^2)") {
        for (double a : {1.25, 1.5}) {
            FreeStableParams p{a, 0.0, 1.0};
            // rho = (1/pi)(1 - c lam^2 + O(lam^4)): fit c by Richardson
            auto c_of = [&](double lam) {
                return (1.0 / kPi - density(lam, p)) / (lam * lam) * kPi;
            };
            double c1 = c_of(0.1), c2 = c_of(0.05);
            double c = (4.0 * c2 - c1) / 3.0;
            double expect = (3.0 - a) / (2.0 * a * a);
            INFO("alpha=" << a << " c=" << c << " expect=" << expect);
            CHECK(c == doctest::Approx(expect).epsilon(0.01));
        }
    }

    SUBCASE("tail formula and solver agreement at |lambda| = 50") {
        CHECK(density_tail(7.0, {1.0, 0.0, 1.0}) ==
              doctest::Approx(1.0 / (kPi * 49.0)).epsilon(1e-3));
        CHECK(density_tail(5.0, {2.0, 0.0, 1.0}) == 0.0);
        FreeStableParams p{1.5, 0.0, 1.0};
        CHECK(density(50.0, p) / density_tail(50.0, p) ==
              doctest::Approx(1.0).epsilon(0.05));
        CHECK_THROWS_AS(density_tail(3.0, {1.5, 0.3, 1.0}), DomainError);
    }

    SUBCASE("density nonnegative and normalized with tail completion") {
        for (double a : {1.0, 1.25, 1.5, 2.0}) {
            FreeStableParams p{a, 0.0, 1.0};
            double span = 40.0;
            auto f = [&](double l) { return density(l, p); };
            double mass = quad::adaptive(f, -span, span, 1e-7, 1e-8, 2000).value;
            if (a < 2.0) {
                // tail integral of (1/pi) sin(pi a/2) |l|^{-a-1}
                mass += 2.0 * std::sin(0.5 * kPi * a) / (kPi * a) *
                        std::pow(span, -a);
            }
            INFO("alpha=" << a << " mass=" << mass);
            CHECK(std::abs(mass - 1.0) < 1e-3);
        }
    }
}

TEST_CASE("potential") {
    // quadratic at alpha = 2, logarithmic at alpha = 1 (V(0) = 0 gauge)
    for (double lam : {0.5, 1.2, 1.9}) {
        CHECK(potential(lam, {2.0, 0.0, 1.0}) ==
              doctest::Approx(0.5 * lam * lam).epsilon(1e-5));
        CHECK(potential(lam, {1.0, 0.0, 1.0}) ==
              doctest::Approx(std::log(1.0 + lam * lam)).epsilon(1e-5));
        CHECK(potential(-lam, {1.5, 0.0, 1.0}) ==
              doctest::Approx(potential(lam, {1.5, 0.0, 1.0})).epsilon(1e-6));
    }

    SUBCASE("large-lambda behavior beyond the integration window") {
        // V(l) - 2 ln l approaches a constant plus -(2/alpha) Re(b l^-alpha);
        // difference out the constant between two radii.
        FreeStableParams p{1.5, 0.0, 1.0};
        Complex b = b_coefficient(1.5, 0.0).value;
        double v50 = potential(80.0, p) - 2.0 * std::log(80.0);
        double v100 = potential(160.0, p) - 2.0 * std::log(160.0);
        double got = v50 - v100;
        double expect = -2.0 / 1.5 *
                        ((b * std::pow(Complex(80.0, 0), -1.5)).real() -
                         (b * std::pow(Complex(160.0, 0), -1.5)).real());
        INFO("got=" << got << " expect=" << expect);
        CHECK(got == doctest::Approx(expect).epsilon(0.05));
    }
}

TEST_CASE("green_from_density") {
    SUBCASE("semicircle at z = 2i") {
        auto c = semicircle_curve(1.0, 8001);
        Complex g = green_from_density(c, Complex(0.0, 2.0));
        Complex expect = kI * (1.0 - std::sqrt(2.0));
        CHECK(std::abs(g - expect) < 1e-5);
    }

    SUBCASE("narrow bump behaves like a point mass") {
        DensityCurve c;
        int n = 2001;
        c.grid.x.resize(n);
        c.grid.y.resize(n);
        double w = 1e-3;
        for (int i = 0; i < n; ++i) {
            double x = -5 * w + 10 * w * i / (n - 1);
            c.grid.x[i] = x;
            c.grid.y[i] = oracles::gaussian_pdf(x, w);
        }
        Complex z(0.7, 0.9);
        CHECK(std::abs(green_from_density(c, z) - 1.0 / z) < 1e-5);
    }

    SUBCASE("Cauchy with tail completion at z = 2i") {
        auto c = cauchy_curve(1.0);
        Complex g = green_from_density(c, Complex(0.0, 2.0));
        CHECK(std::abs(g - (-kI / 3.0)) < 1e-5);
    }

    SUBCASE("real z on the support is rejected") {
        auto c = semicircle_curve(1.0, 801);
        CHECK_THROWS_AS(green_from_density(c, Complex(0.5, 0.0)), DomainError);
    }
}

TEST_CASE("r_from_green recovers stable R-transforms") {
    SUBCASE("semicircle gives R(z) = z") {
        auto g = make_green_evaluator(semicircle_curve(1.0, 8001));
        for (Complex z : {Complex(0.2, 0.1), Complex(-0.1, 0.25), Complex(0.0, 0.3)}) {
            CHECK(std::abs(r_from_green(g, z) - z) < 1e-5);
        }
    }

    SUBCASE("Cauchy gives R(z) = -i") {
        auto g = make_green_evaluator(cauchy_curve(1.0));
        for (Complex z : {Complex(0.15, 0.1), Complex(-0.05, 0.2)}) {
            CHECK(std::abs(r_from_green(g, z) - Complex(0.0, -1.0)) < 1e-4);
        }
    }

    SUBCASE("translation covariance: shifted density adds a constant") {
        const double m = 0.8;
        auto base = semicircle_curve(1.0, 8001);
        DensityCurve shifted = base;
        for (auto& x : shifted.grid.x) x += m;
        auto g0 = make_green_evaluator(base);
        auto g1 = make_green_evaluator(shifted);
        Complex z(0.1, 0.2);
        CHECK(std::abs(r_from_green(g1, z) - (r_from_green(g0, z) + m)) < 1e-5);
    }
}

TEST_CASE("free additive convolution") {
    SUBCASE("semicircle plus semicircle rescales the semicircle") {
        RTransform r1 = [](Complex z) { return z; };
        auto r = free_add(r1, r1);
        std::vector<double> lams;
        for (int i = 0; i <= 80; ++i) lams.push_back(-2.3 + 4.6 * i / 80);
        auto dens = density_from_r(r, lams);
        double peak_err = 0.0;
        for (std::size_t i = 0; i < lams.size(); ++i) {
            double expect = oracles::semicircle_pdf(lams[i], std::sqrt(2.0));
            peak_err = std::max(peak_err, std::abs(dens[i] - expect));
        }
        CHECK(peak_err < 1e-6);
        CHECK(dens[40] == doctest::Approx(1.0 / (kPi * std::sqrt(2.0))).epsilon(1e-6));
    }

    SUBCASE("Cauchy plus Cauchy doubles the scale") {
        RTransform rc = [](Complex) { return Complex(0.0, -1.0); };
        auto r = free_add(rc, rc);
        std::vector<double> lams = {0.0, 1.0, -2.0};
        auto dens = density_from_r(r, lams);
        CHECK(dens[0] == doctest::Approx(1.0 / (2.0 * kPi)).epsilon(1e-7));
        CHECK(dens[1] == doctest::Approx(oracles::cauchy_pdf(1.0, 2.0)).epsilon(1e-7));
        CHECK(dens[2] == doctest::Approx(oracles::cauchy_pdf(-2.0, 2.0)).epsilon(1e-7));
    }

    SUBCASE("zero law is the neutral element") {
        RTransform rz = [](Complex) { return Complex(0.0, 0.0); };
        RTransform r1 = [](Complex z) { return z; };
        auto r = free_add(r1, rz);
        std::vector<double> lams = {0.0, 0.9};
        auto dens = density_from_r(r, lams);
        CHECK(dens[0] == doctest::Approx(1.0 / kPi).epsilon(1e-7));
        CHECK(dens[1] == doctest::Approx(oracles::semicircle_pdf(0.9, 1.0)).epsilon(1e-7));
    }

    SUBCASE("full quadrature pipeline matches the analytic free sum") {
        // density -> Green -> R, added, then back to a density
        auto g = make_green_evaluator(semicircle_curve(1.0, 8001));
        RTransform r_num = [g](Complex z) { return r_from_green(g, z, 1e-11); };
        auto r_sum = free_add(r_num, r_num);
        std::vector<double> lams;
        for (int i = 0; i <= 46; ++i) lams.push_back(-2.3 + 4.6 * i / 46);
        auto dens = density_from_r(r_sum, lams);
        double worst = 0.0;
        for (std::size_t i = 0; i < lams.size(); ++i)
            worst = std::max(worst, std::abs(dens[i] - oracles::semicircle_pdf(
                                                           lams[i], std::sqrt(2.0))));
        INFO("sup deviation " << worst);
        CHECK(worst < 1e-4);
    }
}

TEST_CASE("haar_orthogonal") {
    Rng rng(1234);
    Mat o = haar_orthogonal(60, rng);
    double worst = 0.0;
    for (int i = 0; i < 60; ++i)
        for (int j = 0; j < 60; ++j) {
            double s = 0.0;
            for (int k = 0; k < 60; ++k) s += o(i, k) * o(j, k);
            worst = std::max(worst, std::abs(s - (i == j ? 1.0 : 0.0)));
        }
    CHECK(worst < 1e-12);

    SUBCASE("first column is uniform on the sphere: E[O11^2] = 1/N") {
        const int n = 25, reps = 4000;
        double m2 = 0.0;
        for (int t = 0; t < reps; ++t) {
            Mat q = haar_orthogonal(n, rng);
            m2 += q(0, 0) * q(0, 0);
        }
        m2 /= reps;
        CHECK(m2 == doctest::Approx(1.0 / n).epsilon(0.1));
    }

    SUBCASE("N = 1 gives +-1 with both signs occurring") {
        int plus = 0, minus = 0;
        for (int t = 0; t < 200; ++t) {
            Mat q = haar_orthogonal(1, rng);
            CHECK(std::abs(std::abs(q(0, 0)) - 1.0) < 1e-15);
            (q(0, 0) > 0 ? plus : minus)++;
        }
        CHECK(plus > 50);
        CHECK(minus > 50);
    }
}

TEST_CASE("free sums of diagonal ensembles") {
    auto draw_semi = [](Rng& r) { return semicircle_inverse_cdf(r.uniform()); };

    SUBCASE("K = 1 spacings are Poissonian, K = 2 show repulsion") {
        const int n = 200, trials = 30;
        for (int k : {1, 2}) {
            std::vector<mc::SpectralSample> samples(trials);
            parallel_for(trials, default_workers(), [&](int t) {
                Rng rng(derive_seed(4000 + k, t));
                samples[t] = free_sum_diagonal(n, k, 2.0, draw_semi, rng);
            });
            std::vector<double> pooled;
            for (const auto& s : samples) {
                auto u = mc::unfolded_spacings(s.eigenvalues, 0.5);
                pooled.insert(pooled.end(), u.begin(), u.end());
            }
            std::sort(pooled.begin(), pooled.end());
            double d_poisson = ks_statistic(pooled, [](double s) {
                return s <= 0 ? 0.0 : 1.0 - std::exp(-s);
            });
            double d_surmise = ks_statistic(pooled, [](double s) {
                return s <= 0 ? 0.0 : 1.0 - std::exp(-0.25 * kPi * s * s);
            });
            INFO("K=" << k << " dP=" << d_poisson << " dW=" << d_surmise);
            if (k == 1) {
                CHECK(d_poisson < 0.08);
                CHECK(d_surmise > 0.15);
            } else {
                CHECK(d_surmise < 0.08);
                CHECK(d_poisson > 0.15);
            }
        }
    }

    SUBCASE("spectral density is K-independent (free stability)") {
        // Cauchy-distributed diagonals: alpha = 1 free stable law
        auto cc = cauchy_curve(1.0);
        InverseCdfSampler cauchy_draw(cc);
        const int n = 150, trials = 24;
        std::vector<double> ev1, ev8;
        for (int k : {1, 8}) {
            std::vector<mc::SpectralSample> samples(trials);
            parallel_for(trials, default_workers(), [&](int t) {
                Rng rng(derive_seed(5000 + k, t));
                samples[t] = free_sum_diagonal(
                    n, k, 1.0, [&](Rng& r) { return cauchy_draw(r); }, rng);
            });
            auto& dst = (k == 1 ? ev1 : ev8);
            for (const auto& s : samples)
                dst.insert(dst.end(), s.eigenvalues.begin(), s.eigenvalues.end());
        }
        std::sort(ev1.begin(), ev1.end());
        std::sort(ev8.begin(), ev8.end());
        double d = ks_two_sample(ev1, ev8);
        double n_eff = ev1.size() * ev8.size() /
                       static_cast<double>(ev1.size() + ev8.size());
        INFO("two-sample KS " << d << " threshold " << 1.63 / std::sqrt(n_eff));
        CHECK(d < 1.63 / std::sqrt(n_eff));  // 1% level
    }
}

TEST_CASE("free sum of heavy-tailed Wigner matrices approaches the free law") {
    const double alpha = 1.5;
    const double range = std::pow(std::tgamma(1.0 + alpha), -1.0 / alpha);
    const int n = 100, k = 16, trials = 40;
    std::vector<mc::SpectralSample> samples(trials);
    parallel_for(trials, default_workers(), [&](int t) {
        Rng rng(derive_seed(6000, t));
        samples[t] = free_sum_wigner_levy(n, k, {alpha, 0.0, range}, rng);
    });
    auto h = mc::spectral_histogram(samples, 0.0, -4.0, 4.0, 40);
    FreeStableParams p{alpha, 0.0, 1.0};
    std::vector<double> centers(40);
    for (int i = 0; i < 40; ++i) centers[i] = 0.5 * (h.edges[i] + h.edges[i + 1]);
    auto gv = resolvent_curve(centers, p);
    std::vector<double> ref(40);
    for (int i = 0; i < 40; ++i) ref[i] = std::max(0.0, -gv[i].g.imag() / kPi);
    double frac = oracles::fraction_within_bands(h, ref, 3.0);
    INFO("fraction within bands " << frac);
    CHECK(frac >= 0.85);
}
