#pragma once

#include <vector>

#include "heavytail/errors.hpp"

namespace heavytail {

// Dense row-major matrix.
struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> a;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * cols + j]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * cols + j]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

Mat matmul(const Mat& A, const Mat& B);       // A * B
Mat matmul_abt(const Mat& A, const Mat& B);   // A * B^T

// O * A * O^T for square A; symmetrizes the result.
Mat rotate_sym(const Mat& O, const Mat& A);

// O * diag(d) * O^T, symmetrized.
Mat rotate_diag(const Mat& O, const std::vector<double>& d);

// Explicit Q of the Householder QR of A (square), with the sign convention
// that makes the factorization unique (diag(R) > 0).
Mat householder_q(Mat A);

struct EigenResult {
    std::vector<double> eigenvalues;  // ascending
    Mat eigenvectors;                 // columns, empty unless requested
};

// Dense symmetric eigensolver: Householder tridiagonalization followed by
// implicit-shift QL sweeps.
EigenResult eigen_sym(const Mat& A, bool want_vectors);

}  // namespace heavytail
