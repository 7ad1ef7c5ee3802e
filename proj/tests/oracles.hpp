#pragma once

// Reference implementations for the test suite, kept independent of the
// library's computation paths: plain finite differences, elementwise loops,
// and Gaussian elimination. Where the library uses a closed form, the oracle
// here uses brute force, so agreement is evidence rather than tautology.

#include <glv/glv.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

inline double rel_err(double got, double want) {
    return std::abs(got - want) / (1.0 + std::abs(want));
}

inline double max_rel_err(const glv::Vec& got, const glv::Vec& want) {
    double worst = 0.0;
    for (std::size_t i = 0; i < want.size(); ++i) worst = std::max(worst, rel_err(got[i], want[i]));
    return worst;
}

// Central-difference gradient, step tuned per component.
inline glv::Vec fd_gradient(const std::function<double(const glv::Vec&)>& f, const glv::Vec& x) {
    const double cube = std::cbrt(std::numeric_limits<double>::epsilon());
    glv::Vec g(x.size());
    for (std::size_t q = 0; q < x.size(); ++q) {
        const double h = cube * std::max(1.0, std::abs(x[q]));
        glv::Vec xp = x, xm = x;
        xp[q] += h;
        xm[q] -= h;
        g[q] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

// Bracket evaluated from first principles: FD gradients contracted against
// the elementwise structure matrix sign(j - i) x_i x_j.
inline double fd_bracket(const std::function<double(const glv::Vec&)>& f,
                         const std::function<double(const glv::Vec&)>& g, const glv::Vec& x) {
    const glv::Vec gf = fd_gradient(f, x), gg = fd_gradient(g, x);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = 0; j < x.size(); ++j) {
            const double sign = i < j ? 1.0 : (i > j ? -1.0 : 0.0);
            s += gf[i] * sign * x[i] * x[j] * gg[j];
        }
    return s;
}

// Rank via Gaussian elimination with full pivoting.
inline int echelon_rank(glv::Mat m, double tol) {
    const double scale = glv::max_abs(m);
    if (scale == 0.0) return 0;
    int rank = 0;
    int r0 = 0, c0 = 0;
    while (r0 < m.rows && c0 < m.cols) {
        int pr = r0, pc = c0;
        double best = 0.0;
        for (int r = r0; r < m.rows; ++r)
            for (int c = c0; c < m.cols; ++c)
                if (std::abs(m(r, c)) > best) { best = std::abs(m(r, c)); pr = r; pc = c; }
        if (best <= tol * scale) break;
        for (int r = 0; r < m.rows; ++r) std::swap(m(r, c0), m(r, pc));
        for (int c = 0; c < m.cols; ++c) std::swap(m(r0, c), m(pr, c));
        for (int r = r0 + 1; r < m.rows; ++r) {
            const double f = m(r, c0) / m(r0, c0);
            for (int c = c0; c < m.cols; ++c) m(r, c) -= f * m(r0, c);
        }
        ++rank;
        ++r0;
        ++c0;
    }
    return rank;
}

// Every zero/nonzero coefficient pattern for dimension n except all-zero,
// nonzero entries drawn from a fixed palette of distinct values.
inline std::vector<std::vector<double>> coefficient_patterns(int n) {
    static const double palette[] = {1.0, 2.0, -3.0, 1.5, -2.5, 0.5, 3.0, -1.25};
    std::vector<std::vector<double>> out;
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<double> a(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i)
            if (mask & (1u << i)) a[static_cast<std::size_t>(i)] = palette[i];
        out.push_back(std::move(a));
    }
    return out;
}

// Smallest index with a nonzero coefficient, found by scan; 1-based - 1.
inline int ell_by_scan(const std::vector<double>& a) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != 0.0) return static_cast<int>(i);
    return static_cast<int>(a.size());
}

} // namespace oracle
