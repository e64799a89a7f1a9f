#include "doctest.h"

#include <cmath>
#include <numeric>

#include "heavytail/matrix_mc.hpp"
#include "heavytail/mc_runner.hpp"
#include "support/oracles.hpp"

using namespace heavytail;
using namespace heavytail::mc;

namespace {

double eig_residual(const Mat& a, const SpectralSample& s) {
    const int n = a.rows;
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            double av = 0.0;
            for (int k = 0; k < n; ++k) av += a(i, k) * s.eigenvectors(k, j);
            worst = std::max(worst,
                             std::abs(av - s.eigenvalues[j] * s.eigenvectors(i, j)));
        }
    }
    return worst;
}

}  // namespace

TEST_CASE("eigen_sym pinned spectra") {
    Mat a(2, 2);
    a(0, 0) = 2;
    a(0, 1) = a(1, 0) = 1;
    a(1, 1) = 2;
    auto r = eigen_sym(a, true);
    CHECK(r.eigenvalues[0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.eigenvalues[1] == doctest::Approx(3.0).epsilon(1e-14));

    auto id = eigen_sym(Mat::identity(5), false);
    for (double v : id.eigenvalues) CHECK(v == doctest::Approx(1.0));
}

TEST_CASE("eigen_sym residual, trace and orthonormality on random input") {
    Rng rng(421);
    const int n = 50;
    Mat a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) a(i, j) = a(j, i) = rng.normal();
    auto s = eigen_sym_sample(a, true);

    CHECK(eig_residual(a, s) < 1e-10);

    double tr = 0, tr2 = 0, st = 0, st2 = 0;
    for (int i = 0; i < n; ++i) {
        tr += a(i, i);
        st += s.eigenvalues[i];
        st2 += s.eigenvalues[i] * s.eigenvalues[i];
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) tr2 += a(i, j) * a(i, j);
    CHECK(std::abs(tr - st) <= 1e-10 * std::max(1.0, std::abs(tr)));
    CHECK(std::abs(tr2 - st2) <= 1e-10 * tr2);

    for (int j = 0; j < n; ++j) {
        double nrm = 0;
        for (int i = 0; i < n; ++i) nrm += s.eigenvectors(i, j) * s.eigenvectors(i, j);
        CHECK(nrm == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("wigner-levy sampler") {
    Rng rng(7);
    stable::StableParams p{1.5, 0.0, 1.0};
    Mat a = sample_wigner_levy(40, p, rng);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j) CHECK(a(i, j) == a(j, i));

    SUBCASE("entries follow the stable law") {
        oracles::TabulatedStableCdf cdf(p);
        std::vector<double> entries;
        Rng rng2(8);
        Mat b = sample_wigner_levy(150, p, rng2);
        for (int i = 0; i < b.rows; ++i)
            for (int j = i; j < b.cols; ++j) entries.push_back(b(i, j));
        std::sort(entries.begin(), entries.end());
        CHECK(ks_pvalue(entries, [&](double x) { return cdf(x); }) > 0.01);
    }

    SUBCASE("alpha = 2 spectra approach the semicircle of radius 2 sqrt(2)") {
        stable::StableParams g2{2.0, 0.0, 1.0};
        std::vector<SpectralSample> samples(60);
        for (int t = 0; t < 60; ++t) {
            Rng r(derive_seed(11, t));
            Mat m = sample_wigner_levy(100, g2, r);
            samples[t] = eigen_sym_sample(m, false);
            samples[t].config.N = 100;
        }
        auto h = spectral_histogram(samples, 0.5, -3.0, 3.0, 40);
        std::vector<double> ref(40);
        for (int i = 0; i < 40; ++i)
            ref[i] = oracles::semicircle_pdf(0.5 * (h.edges[i] + h.edges[i + 1]),
                                             std::sqrt(2.0));
        // finite-N edge bins wobble; the bulk must sit in the bands
        CHECK(oracles::fraction_within_bands(h, ref, 3.0) >= 0.85);
    }
}

TEST_CASE("goe sampler variances and spectrum") {
    Rng rng(313);
    const int reps = 4000;
    double vdiag = 0, voff = 0;
    for (int t = 0; t < reps; ++t) {
        Mat a = sample_goe(4, 1.3, rng);
        vdiag += a(2, 2) * a(2, 2);
        voff += a(0, 1) * a(0, 1);
    }
    vdiag /= reps;
    voff /= reps;
    CHECK(vdiag / voff == doctest::Approx(2.0).epsilon(0.15));
    CHECK(voff == doctest::Approx(1.3 * 1.3).epsilon(0.1));

    SUBCASE("N = 1 reduces to a single Gaussian of variance 2 sigma^2") {
        Rng r(14);
        double v = 0;
        for (int t = 0; t < 20000; ++t) {
            Mat a = sample_goe(1, 0.7, r);
            v += a(0, 0) * a(0, 0);
        }
        CHECK(v / 20000 == doctest::Approx(2 * 0.7 * 0.7).epsilon(0.05));
    }

    SUBCASE("A/sqrt(N) spectra approach the semicircle of radius 2 sigma") {
        std::vector<SpectralSample> samples(50);
        for (int t = 0; t < 50; ++t) {
            Rng r(derive_seed(15, t));
            Mat m = sample_goe(120, 1.0, r);
            samples[t] = eigen_sym_sample(m, false);
            samples[t].config.N = 120;
        }
        auto h = spectral_histogram(samples, 0.5, -2.2, 2.2, 30);
        std::vector<double> ref(30);
        for (int i = 0; i < 30; ++i)
            ref[i] = oracles::semicircle_pdf(0.5 * (h.edges[i] + h.edges[i + 1]),
                                             1.0);
        CHECK(oracles::fraction_within_bands(h, ref, 3.0) >= 0.85);
    }
}

TEST_CASE("ipr_elements") {
    Mat a(3, 3);
    a(1, 2) = a(2, 1) = 4.0;
    CHECK(ipr_elements(a) == doctest::Approx(1.0));

    Mat b(4, 4);
    for (auto& v : b.a) v = -0.7;
    CHECK(ipr_elements(b) == doctest::Approx(2.0 / (4 * 5)));

    Mat z(3, 3);
    CHECK_THROWS_AS(ipr_elements(z), DegenerateTailError);

    SUBCASE("ensemble mean approaches 1 - alpha for alpha < 1") {
        // reduced size here; the full-size run is an acceptance criterion
        const double alpha = 0.5;
        const int trials = 40, n = 400;
        std::vector<double> y2(trials);
        parallel_for(trials, default_workers(), [&](int t) {
            Rng rng(derive_seed(1000, t));
            Mat m = sample_wigner_levy(n, {alpha, 0.0, 1.0}, rng);
            y2[t] = ipr_elements(m);
        });
        double mean = std::accumulate(y2.begin(), y2.end(), 0.0) / trials;
        CHECK(mean > 0.40);
        CHECK(mean < 0.60);
    }
}

TEST_CASE("ipr_eigenvector") {
    std::vector<double> basis = {0, 0, 1, 0};
    CHECK(ipr_eigenvector(basis) == doctest::Approx(1.0));

    std::vector<double> flat(16, 0.25);
    CHECK(ipr_eigenvector(flat) == doctest::Approx(1.0 / 16));

    std::vector<double> bad = {0.5, 0.5};
    CHECK_THROWS_AS(ipr_eigenvector(bad), DomainError);
}

TEST_CASE("eigenvector localization grows toward the spectral tail") {
    const double alpha = 1.25;
    const int n = 200, trials = 12;
    std::vector<double> top_sum(trials, 0.0), mid_sum(trials, 0.0);
    std::vector<int> top_cnt(trials, 0), mid_cnt(trials, 0);
    parallel_for(trials, default_workers(), [&](int t) {
        Rng rng(derive_seed(2000, t));
        Mat a = sample_wigner_levy(n, {alpha, 0.0, 1.0}, rng);
        double scale = std::pow(n, 1.0 / alpha);
        for (auto& v : a.a) v /= scale;
        auto s = eigen_sym_sample(a, true);
        std::vector<int> order(n);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int i, int j) {
            return std::abs(s.eigenvalues[i]) < std::abs(s.eigenvalues[j]);
        });
        std::vector<double> v(n);
        for (int q = 0; q < n / 10; ++q) {
            int j_mid = order[q];
            int j_top = order[n - 1 - q];
            for (int i = 0; i < n; ++i) v[i] = s.eigenvectors(i, j_mid);
            mid_sum[t] += ipr_eigenvector(v);
            ++mid_cnt[t];
            for (int i = 0; i < n; ++i) v[i] = s.eigenvectors(i, j_top);
            top_sum[t] += ipr_eigenvector(v);
            ++top_cnt[t];
        }
    });
    double top = std::accumulate(top_sum.begin(), top_sum.end(), 0.0) /
                 std::accumulate(top_cnt.begin(), top_cnt.end(), 0);
    double mid = std::accumulate(mid_sum.begin(), mid_sum.end(), 0.0) /
                 std::accumulate(mid_cnt.begin(), mid_cnt.end(), 0);
    INFO("top=" << top << " mid=" << mid);
    CHECK(top > mid);
}

TEST_CASE("unfolded spacings and spacing_histogram") {
    SUBCASE("Poisson-process levels give exponential spacings") {
        std::vector<SpectralSample> samples(50);
        for (int t = 0; t < 50; ++t) {
            Rng rng(derive_seed(3000, t));
            std::vector<double> ev(400);
            double x = 0.0;
            for (auto& v : ev) v = (x += rng.exponential());
            samples[t].eigenvalues = std::move(ev);
        }
        std::vector<double> pooled;
        for (const auto& s : samples) {
            auto u = unfolded_spacings(s.eigenvalues, 0.8);
            pooled.insert(pooled.end(), u.begin(), u.end());
        }
        std::sort(pooled.begin(), pooled.end());
        double d = ks_statistic(pooled, [](double s) {
            return s <= 0 ? 0.0 : 1.0 - std::exp(-s);
        });
        CHECK(d < 0.05);
        double mean = std::accumulate(pooled.begin(), pooled.end(), 0.0) /
                      pooled.size();
        CHECK(mean == doctest::Approx(1.0).epsilon(0.01));
    }

    SUBCASE("GOE spacings follow the surmise") {
        std::vector<SpectralSample> samples(50);
        parallel_for(50, default_workers(), [&](int t) {
            Rng rng(derive_seed(3100, t));
            samples[t] = eigen_sym_sample(sample_goe(200, 1.0, rng), false);
        });
        std::vector<double> pooled;
        for (const auto& s : samples) {
            auto u = unfolded_spacings(s.eigenvalues, 0.5);
            pooled.insert(pooled.end(), u.begin(), u.end());
        }
        std::sort(pooled.begin(), pooled.end());
        double d = ks_statistic(pooled, [](double s) {
            return s <= 0 ? 0.0 : 1.0 - std::exp(-0.25 * kPi * s * s);
        });
        CHECK(d < 0.05);
    }

    SUBCASE("window validation") {
        std::vector<double> few = {1.0, 2.0, 3.0};
        CHECK_THROWS_AS(unfolded_spacings(few, 1.0), ConfigError);
    }
}

TEST_CASE("histograms") {
    SUBCASE("auto-covering histogram integrates to one") {
        Rng rng(5);
        std::vector<double> vals(5000);
        for (auto& v : vals) v = rng.normal();
        auto h = make_histogram(vals, -6.0, 6.0, 37);
        double mass = 0.0;
        for (std::size_t i = 0; i < h.density.size(); ++i)
            mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(h.n_below + h.n_above == 0);
    }

    SUBCASE("stderr formula and empty bins") {
        std::vector<double> vals = {0.5, 0.5, 2.5};
        auto h = make_histogram(vals, 0.0, 3.0, 3);
        CHECK(h.counts[0] == 2);
        CHECK(h.counts[1] == 0);
        CHECK(h.density[1] == 0.0);
        CHECK(h.stderr_[1] == 0.0);
        CHECK(h.stderr_[0] == doctest::Approx(std::sqrt(2.0) / 3.0));
    }

    SUBCASE("out-of-range values are tracked, in-range mass matches") {
        std::vector<double> vals = {-10.0, 0.5, 1.5, 99.0};
        auto h = make_histogram(vals, 0.0, 2.0, 2);
        CHECK(h.n_below == 1);
        CHECK(h.n_above == 1);
        double mass = 0.0;
        for (std::size_t i = 0; i < h.density.size(); ++i)
            mass += h.density[i] * (h.edges[i + 1] - h.edges[i]);
        CHECK(mass == doctest::Approx(0.5));
    }
}

TEST_CASE("determinism: identical seed and config give identical spectra") {
    auto run_once = [](int workers) {
        std::vector<SpectralSample> out(8);
        parallel_for(8, workers, [&](int t) {
            Rng rng(derive_seed(90, t));
            out[t] = eigen_sym_sample(
                sample_wigner_levy(30, {1.5, 0.0, 1.0}, rng), false);
        });
        std::vector<double> flat;
        for (const auto& s : out)
            flat.insert(flat.end(), s.eigenvalues.begin(), s.eigenvalues.end());
        return flat;
    };
    auto a = run_once(1);
    auto b = run_once(4);
    auto c = run_once(4);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i] == b[i]);
        CHECK(b[i] == c[i]);
    }
}
