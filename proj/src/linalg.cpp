#include "heavytail/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heavytail {

Mat matmul(const Mat& A, const Mat& B) {
    if (A.cols != B.rows) throw DomainError("matmul: shape mismatch");
    Mat C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) {
        double* ci = &C.a[static_cast<std::size_t>(i) * C.cols];
        const double* ai = &A.a[static_cast<std::size_t>(i) * A.cols];
        for (int k = 0; k < A.cols; ++k) {
            double aik = ai[k];
            if (aik == 0.0) continue;
            const double* bk = &B.a[static_cast<std::size_t>(k) * B.cols];
            for (int j = 0; j < B.cols; ++j) ci[j] += aik * bk[j];
        }
    }
    return C;
}

Mat matmul_abt(const Mat& A, const Mat& B) {
    if (A.cols != B.cols) throw DomainError("matmul_abt: shape mismatch");
    Mat C(A.rows, B.rows);
    for (int i = 0; i < A.rows; ++i) {
        const double* ai = &A.a[static_cast<std::size_t>(i) * A.cols];
        for (int j = 0; j < B.rows; ++j) {
            const double* bj = &B.a[static_cast<std::size_t>(j) * B.cols];
            double s = 0.0;
            for (int k = 0; k < A.cols; ++k) s += ai[k] * bj[k];
            C(i, j) = s;
        }
    }
    return C;
}

Mat rotate_sym(const Mat& O, const Mat& A) {
    Mat T = matmul_abt(A, O);   // A * O^T
    Mat C = matmul(O, T);       // O * A * O^T
    for (int i = 0; i < C.rows; ++i)
        for (int j = i + 1; j < C.cols; ++j) {
            double v = 0.5 * (C(i, j) + C(j, i));
            C(i, j) = C(j, i) = v;
        }
    return C;
}

Mat rotate_diag(const Mat& O, const std::vector<double>& d) {
    int n = O.rows;
    if (static_cast<int>(d.size()) != n || O.cols != n)
        throw DomainError("rotate_diag: shape mismatch");
    Mat C(n, n);
    for (int i = 0; i < n; ++i) {
        const double* oi = &O.a[static_cast<std::size_t>(i) * n];
        for (int j = i; j < n; ++j) {
            const double* oj = &O.a[static_cast<std::size_t>(j) * n];
            double s = 0.0;
            for (int k = 0; k < n; ++k) s += oi[k] * d[k] * oj[k];
            C(i, j) = C(j, i) = s;
        }
    }
    return C;
}

Mat householder_q(Mat A) {
    if (A.rows != A.cols) throw DomainError("householder_q: square input required");
    const int n = A.rows;
    std::vector<std::vector<double>> vs;
    std::vector<double> rdiag(n, 1.0);
    for (int k = 0; k < n; ++k) {
        double norm = 0.0;
        for (int i = k; i < n; ++i) norm += A(i, k) * A(i, k);
        norm = std::sqrt(norm);
        if (norm == 0.0) {
            vs.emplace_back();
            continue;
        }
        double akk = A(k, k);
        double alpha = akk >= 0 ? -norm : norm;
        std::vector<double> v(n - k, 0.0);
        v[0] = akk - alpha;
        for (int i = k + 1; i < n; ++i) v[i - k] = A(i, k);
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 > 0.0) {
            for (int j = k; j < n; ++j) {
                double s = 0.0;
                for (int i = k; i < n; ++i) s += v[i - k] * A(i, j);
                s *= 2.0 / vnorm2;
                for (int i = k; i < n; ++i) A(i, j) -= s * v[i - k];
            }
        }
        rdiag[k] = A(k, k) >= 0 ? 1.0 : -1.0;
        vs.push_back(std::move(v));
    }
    // Accumulate Q = H_0 H_1 ... H_{n-1} applied to I, then fix signs so
    // that the R factor has a positive diagonal (uniqueness of QR).
    Mat Q = Mat::identity(n);
    for (int k = n - 1; k >= 0; --k) {
        const auto& v = vs[k];
        if (v.empty()) continue;
        double vnorm2 = 0.0;
        for (double x : v) vnorm2 += x * x;
        if (vnorm2 == 0.0) continue;
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int i = k; i < n; ++i) s += v[i - k] * Q(i, j);
            s *= 2.0 / vnorm2;
            for (int i = k; i < n; ++i) Q(i, j) -= s * v[i - k];
        }
    }
    for (int j = 0; j < n; ++j)
        if (rdiag[j] < 0)
            for (int i = 0; i < n; ++i) Q(i, j) = -Q(i, j);
    return Q;
}

namespace {

// Householder reduction of a symmetric matrix to tridiagonal form with
// optional accumulation of the orthogonal transform (EISPACK tred2 layout).
void tridiagonalize(Mat& z, std::vector<double>& d, std::vector<double>& e,
                    bool vectors) {
    const int n = z.rows;
    d.assign(n, 0.0);
    e.assign(n, 0.0);
    for (int i = n - 1; i >= 1; --i) {
        int l = i - 1;
        double h = 0.0, scale = 0.0;
        if (l > 0) {
            for (int k = 0; k <= l; ++k) scale += std::abs(z(i, k));
            if (scale == 0.0) {
                e[i] = z(i, l);
            } else {
                for (int k = 0; k <= l; ++k) {
                    z(i, k) /= scale;
                    h += z(i, k) * z(i, k);
                }
                double f = z(i, l);
                double g = f >= 0 ? -std::sqrt(h) : std::sqrt(h);
                e[i] = scale * g;
                h -= f * g;
                z(i, l) = f - g;
                f = 0.0;
                for (int j = 0; j <= l; ++j) {
                    if (vectors) z(j, i) = z(i, j) / h;
                    g = 0.0;
                    for (int k = 0; k <= j; ++k) g += z(j, k) * z(i, k);
                    for (int k = j + 1; k <= l; ++k) g += z(k, j) * z(i, k);
                    e[j] = g / h;
                    f += e[j] * z(i, j);
                }
                double hh = f / (h + h);
                for (int j = 0; j <= l; ++j) {
                    f = z(i, j);
                    e[j] = g = e[j] - hh * f;
                    for (int k = 0; k <= j; ++k)
                        z(j, k) -= f * e[k] + g * z(i, k);
                }
            }
        } else {
            e[i] = z(i, l);
        }
        d[i] = h;
    }
    if (vectors) d[0] = 0.0;
    e[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        if (vectors) {
            int l = i - 1;
            if (d[i] != 0.0) {
                for (int j = 0; j <= l; ++j) {
                    double g = 0.0;
                    for (int k = 0; k <= l; ++k) g += z(i, k) * z(k, j);
                    for (int k = 0; k <= l; ++k) z(k, j) -= g * z(k, i);
                }
            }
            d[i] = z(i, i);
            z(i, i) = 1.0;
            for (int j = 0; j <= l; ++j) z(j, i) = z(i, j) = 0.0;
        } else {
            d[i] = z(i, i);
        }
    }
}

double pythag(double a, double b) { return std::hypot(a, b); }

// Implicit-shift QL on a tridiagonal (d, e); rotations applied to columns of
// z when vectors are tracked.
void ql_implicit(std::vector<double>& d, std::vector<double>& e, Mat* z) {
    const int n = static_cast<int>(d.size());
    for (int i = 1; i < n; ++i) e[i - 1] = e[i];
    e[n - 1] = 0.0;
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                double dd = std::abs(d[m]) + std::abs(d[m + 1]);
                if (std::abs(e[m]) <= 1e-300 || std::abs(e[m]) <= 2.3e-16 * dd)
                    break;
            }
            if (m != l) {
                if (iter++ == 60)
                    throw EigensolverError("ql_implicit: too many sweeps");
                double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                double r = pythag(g, 1.0);
                g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
                double s = 1.0, c = 1.0, p = 0.0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    double f = s * e[i];
                    double b = c * e[i];
                    r = pythag(f, g);
                    e[i + 1] = r;
                    if (r == 0.0) {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                    if (z) {
                        for (int k = 0; k < n; ++k) {
                            double fv = (*z)(k, i + 1);
                            (*z)(k, i + 1) = s * (*z)(k, i) + c * fv;
                            (*z)(k, i) = c * (*z)(k, i) - s * fv;
                        }
                    }
                }
                if (r == 0.0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        } while (m != l);
    }
}

}  // namespace

EigenResult eigen_sym(const Mat& A, bool want_vectors) {
    if (A.rows != A.cols) throw DomainError("eigen_sym: square input required");
    const int n = A.rows;
    if (n == 0) return {};
    Mat z = A;
    std::vector<double> d, e;
    tridiagonalize(z, d, e, want_vectors);
    ql_implicit(d, e, want_vectors ? &z : nullptr);

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](int i, int j) { return d[i] < d[j]; });
    EigenResult out;
    out.eigenvalues.resize(n);
    for (int i = 0; i < n; ++i) out.eigenvalues[i] = d[order[i]];
    if (want_vectors) {
        out.eigenvectors = Mat(n, n);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i)
                out.eigenvectors(i, j) = z(i, order[j]);
    }
    return out;
}

}  // namespace heavytail
