#include "heavytail/numerics.hpp"

#include <limits>

namespace heavytail {

namespace quad {

namespace {

// Gauss-Kronrod 7-15 nodes/weights on [-1, 1].
const double kXgk[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
const double kWgk[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
const double kWg[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

}  // namespace

QuadResult gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    double fc = f(c);
    double res_k = kWgk[7] * fc;
    double res_g = kWg[3] * fc;
    for (int i = 0; i < 7; ++i) {
        double x = h * kXgk[i];
        double fs = f(c - x) + f(c + x);
        res_k += kWgk[i] * fs;
        if (i % 2 == 1) res_g += kWg[i / 2] * fs;
    }
    QuadResult r;
    r.value = res_k * h;
    r.error = std::abs((res_k - res_g) * h);
    // Standard Kronrod error tightening.
    double scale = std::abs(r.value) + 1e-300;
    double e = r.error / scale;
    r.error = scale * std::min(1.0, std::pow(200.0 * e, 1.5));
    r.evals = 15;
    return r;
}

QuadResult adaptive(const std::function<double(double)>& f, double a, double b,
                    double abs_tol, double rel_tol, int max_intervals) {
    struct Seg {
        double a, b, value, error;
    };
    std::vector<Seg> segs;
    QuadResult first = gk15(f, a, b);
    segs.push_back({a, b, first.value, first.error});
    long evals = first.evals;

    auto total = [&segs] {
        double v = 0, e = 0;
        for (const auto& s : segs) {
            v += s.value;
            e += s.error;
        }
        return std::pair<double, double>(v, e);
    };

    while (static_cast<int>(segs.size()) < max_intervals) {
        auto [v, e] = total();
        if (e <= std::max(abs_tol, rel_tol * std::abs(v))) break;
        std::size_t worst = 0;
        for (std::size_t i = 1; i < segs.size(); ++i)
            if (segs[i].error > segs[worst].error) worst = i;
        Seg s = segs[worst];
        if (s.b - s.a < 1e-15 * (std::abs(s.a) + std::abs(s.b) + 1.0)) break;
        double mid = 0.5 * (s.a + s.b);
        QuadResult l = gk15(f, s.a, mid);
        QuadResult r = gk15(f, mid, s.b);
        evals += l.evals + r.evals;
        segs[worst] = {s.a, mid, l.value, l.error};
        segs.push_back({mid, s.b, r.value, r.error});
    }
    auto [v, e] = total();
    return {v, e, evals};
}

const double kGl4Nodes[2] = {0.3399810435848562648026658, 0.8611363115940525752239465};
const double kGl4Weights[2] = {0.6521451548625461426269361, 0.3478548451374538573730639};

namespace {
const double kGl8Nodes[4] = {0.1834346424956498049394761, 0.5255324099163289858177390,
                             0.7966664774136267395915539, 0.9602898564975362316835609};
const double kGl8Weights[4] = {0.3626837833783619829651504, 0.3137066458778872873379622,
                               0.2223810344533744705443560, 0.1012285362903762591525314};
const double kGl16Nodes[8] = {0.0950125098376374401853193, 0.2816035507792589132304605,
                              0.4580167776572273863424194, 0.6178762444026437484466718,
                              0.7554044083550030338951012, 0.8656312023878317438804679,
                              0.9445750230732325760779884, 0.9894009349916499325961542};
const double kGl16Weights[8] = {0.1894506104550684962853967, 0.1826034150449235888667637,
                                0.1691565193950025381893121, 0.1495959888165767320815017,
                                0.1246289712555338720524763, 0.0951585116824927848099251,
                                0.0622535239386478928628438, 0.0271524594117540948517806};
}  // namespace

double gl4(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 2; ++i)
        s += kGl4Weights[i] * (f(c - h * kGl4Nodes[i]) + f(c + h * kGl4Nodes[i]));
    return s * h;
}

double gl8(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 4; ++i)
        s += kGl8Weights[i] * (f(c - h * kGl8Nodes[i]) + f(c + h * kGl8Nodes[i]));
    return s * h;
}

double gl16(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 8; ++i)
        s += kGl16Weights[i] * (f(c - h * kGl16Nodes[i]) + f(c + h * kGl16Nodes[i]));
    return s * h;
}

}  // namespace quad

Pchip::Pchip(std::vector<double> x, std::vector<double> y)
    : x_(std::move(x)), y_(std::move(y)) {
    const std::size_t n = x_.size();
    if (n != y_.size() || n < 2) throw DomainError("pchip: need matching grids, n >= 2");
    m_.assign(n, 0.0);
    std::vector<double> h(n - 1), d(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x_[i + 1] - x_[i];
        if (h[i] <= 0) throw DomainError("pchip: grid not strictly increasing");
        d[i] = (y_[i + 1] - y_[i]) / h[i];
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m_[i] = 0.0;
        } else {
            double w1 = 2.0 * h[i] + h[i - 1];
            double w2 = h[i] + 2.0 * h[i - 1];
            m_[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    auto end_slope = [](double h0, double h1, double d0, double d1) {
        double m = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
        if (m * d0 <= 0.0) return 0.0;
        if (d0 * d1 < 0.0 && std::abs(m) > 3.0 * std::abs(d0)) return 3.0 * d0;
        return m;
    };
    m_[0] = (n == 2) ? d[0] : end_slope(h[0], h[1], d[0], d[1]);
    m_[n - 1] = (n == 2) ? d[0] : end_slope(h[n - 2], h[n - 3], d[n - 2], d[n - 3]);
}

double Pchip::operator()(double x) const {
    if (x <= x_.front()) return y_.front();
    if (x >= x_.back()) return y_.back();
    auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
    double h = x_[i + 1] - x_[i];
    double t = (x - x_[i]) / h;
    double t2 = t * t, t3 = t2 * t;
    double h00 = 2 * t3 - 3 * t2 + 1;
    double h10 = t3 - 2 * t2 + t;
    double h01 = -2 * t3 + 3 * t2;
    double h11 = t3 - t2;
    return h00 * y_[i] + h10 * h * m_[i] + h01 * y_[i + 1] + h11 * h * m_[i + 1];
}

double bisect(const std::function<double(double)>& f, double a, double b, int iters) {
    double fa = f(a);
    double fb = f(b);
    if (fa == 0) return a;
    if (fb == 0) return b;
    if (fa * fb > 0) throw DomainError("bisect: no sign change");
    for (int i = 0; i < iters; ++i) {
        double c = 0.5 * (a + b);
        double fc = f(c);
        if (fc == 0 || 0.5 * (b - a) < 1e-16 * (1.0 + std::abs(c))) return c;
        if (fa * fc < 0) {
            b = c;
            fb = fc;
        } else {
            a = c;
            fa = fc;
        }
    }
    return 0.5 * (a + b);
}

double ls_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw InsufficientDataError("ls_slope: need >= 2 points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double den = n * sxx - sx * sx;
    if (den == 0) return 0.0;
    return (n * sxy - sx * sy) / den;
}

double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    if (t < 0.18) return 1.0;
    double s = 0.0;
    for (int k = 1; k <= 200; ++k) {
        double term = std::exp(-2.0 * k * k * t * t);
        s += (k % 2 == 1) ? term : -term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * s, 0.0, 1.0);
}

double ks_statistic(std::span<const double> sorted,
                    const std::function<double(double)>& cdf) {
    const std::size_t n = sorted.size();
    if (n == 0) throw InsufficientDataError("ks_statistic: empty sample");
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double c = cdf(sorted[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::abs(c - lo), std::abs(hi - c)));
    }
    return d;
}

double ks_pvalue(std::span<const double> sorted,
                 const std::function<double(double)>& cdf) {
    double d = ks_statistic(sorted, cdf);
    double n = static_cast<double>(sorted.size());
    double t = (std::sqrt(n) + 0.12 + 0.11 / std::sqrt(n)) * d;
    return kolmogorov_q(t);
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw InsufficientDataError("ks_two_sample: empty sample");
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                                 static_cast<double>(j) / b.size()));
    }
    return d;
}

}  // namespace heavytail
