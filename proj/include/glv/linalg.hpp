#pragma once

// Minimal dense linear algebra for small systems (n <= 10 or so in practice).
// Row-major matrices, 0-based indexing. Nothing here is tuned for size; the
// library works on systems whose dimension is a single digit.

#include <algorithm>
#include <cmath>
#include <vector>

#include "glv/errors.hpp"

namespace glv {

using Vec = std::vector<double>;

struct Mat {
    int rows = 0, cols = 0;
    std::vector<double> data;

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, 0.0) {}

    double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Vec matvec(const Mat& m, const Vec& x) {
    Vec y(static_cast<std::size_t>(m.rows), 0.0);
    for (int r = 0; r < m.rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < m.cols; ++c) s += m(r, c) * x[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = s;
    }
    return y;
}

inline Mat matmul(const Mat& a, const Mat& b) {
    Mat r(a.rows, b.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int k = 0; k < a.cols; ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < b.cols; ++j) r(i, j) += aik * b(k, j);
        }
    return r;
}

inline Mat transpose(const Mat& a) {
    Mat r(a.cols, a.rows);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j) r(j, i) = a(i, j);
    return r;
}

inline double norm2(const Vec& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return std::sqrt(s);
}

inline double frobenius(const Mat& m) {
    double s = 0.0;
    for (double v : m.data) s += v * v;
    return std::sqrt(s);
}

inline double max_abs(const Mat& m) {
    double s = 0.0;
    for (double v : m.data) s = std::max(s, std::abs(v));
    return s;
}

// Solves M y = b by LU with partial pivoting. Throws SingularSystem when a
// pivot falls below 1e-12 relative to the largest entry of M.
inline Vec lu_solve(Mat m, Vec b) {
    const int n = m.rows;
    const double scale = max_abs(m);
    if (scale == 0.0) throw SingularSystem(0.0);
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(m(r, col)) > std::abs(m(piv, col))) piv = r;
        if (std::abs(m(piv, col)) <= 1e-12 * scale)
            throw SingularSystem(std::abs(m(piv, col)) / scale);
        if (piv != col) {
            for (int c = 0; c < n; ++c) std::swap(m(piv, c), m(col, c));
            std::swap(b[static_cast<std::size_t>(piv)], b[static_cast<std::size_t>(col)]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = m(r, col) / m(col, col);
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) m(r, c) -= f * m(col, c);
            b[static_cast<std::size_t>(r)] -= f * b[static_cast<std::size_t>(col)];
        }
    }
    Vec y(static_cast<std::size_t>(n));
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<std::size_t>(r)];
        for (int c = r + 1; c < n; ++c) s -= m(r, c) * y[static_cast<std::size_t>(c)];
        y[static_cast<std::size_t>(r)] = s / m(r, r);
    }
    return y;
}

// Singular values by one-sided Jacobi, descending order. Works on A^T so the
// rotated matrix is tall; no squaring of the condition number is involved.
inline std::vector<double> singular_values(const Mat& a) {
    Mat b = a.rows >= a.cols ? a : transpose(a);
    const int nr = b.rows, nc = b.cols;
    for (int sweep = 0; sweep < 60; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < nc - 1; ++p)
            for (int q = p + 1; q < nc; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int r = 0; r < nr; ++r) {
                    app += b(r, p) * b(r, p);
                    aqq += b(r, q) * b(r, q);
                    apq += b(r, p) * b(r, q);
                }
                if (std::abs(apq) <= 1e-30 + 1e-16 * std::sqrt(app * aqq)) continue;
                rotated = true;
                const double zeta = (aqq - app) / (2.0 * apq);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t), s = c * t;
                for (int r = 0; r < nr; ++r) {
                    const double bp = b(r, p), bq = b(r, q);
                    b(r, p) = c * bp - s * bq;
                    b(r, q) = s * bp + c * bq;
                }
            }
        if (!rotated) break;
    }
    std::vector<double> sv(static_cast<std::size_t>(nc));
    for (int c = 0; c < nc; ++c) {
        double s = 0.0;
        for (int r = 0; r < nr; ++r) s += b(r, c) * b(r, c);
        sv[static_cast<std::size_t>(c)] = std::sqrt(s);
    }
    std::sort(sv.begin(), sv.end(), std::greater<double>());
    return sv;
}

} // namespace glv
