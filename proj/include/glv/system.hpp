#pragma once

// Core definition of the antisymmetric Lotka-Volterra system
//
//     x_i' = x_i * sum_j A_ij x_j,   A_ij = a_j (j > i), -a_j (j < i), 0 (i = j),
//
// for a coefficient vector a in R^n, a != 0. With the cumulative sums
// v_i = a_1 x_1 + ... + a_i x_i (v_0 = 0) and the Hamiltonian H = v_n = a.x
// the same field reads x_i' = x_i (H - v_i - v_{i-1}), which is the form used
// everywhere in this library (the matrix form is kept for cross-checks).
//
// Index convention: all public index arguments are 1-based, matching the
// formulas above; the mapping to 0-based storage happens in exactly one place,
// the coeff()/comp() accessors below. Cumulative sums are stored padded,
// v[i] == v_i with v[0] == 0.

#include <cmath>
#include <cstdlib>
#include <vector>

#include "glv/errors.hpp"
#include "glv/linalg.hpp"

namespace glv {

// 1-based component access; the single 0-based boundary.
inline double comp(const Vec& x, int i) { return x[static_cast<std::size_t>(i) - 1]; }
inline double& comp(Vec& x, int i) { return x[static_cast<std::size_t>(i) - 1]; }

struct SystemParams {
    std::vector<double> a; // coefficients, a[i-1] == a_i
    int n = 0;
    int ell = 0;    // smallest index with a_{ell+1} != 0, in [0, n-1]
    int lambda = 0; // floor(ell / 2)

    // Index partition: A = {1..ell} (leading zero coefficients), B = {i : a_i != 0},
    // C = {i > ell+1 : a_i = 0}. Disjoint, union {1..n}, ell+1 in B.
    std::vector<int> A, B, C;

    double coeff(int i) const { return comp(a, i); } // a_i, 1-based
};

inline void check_dimension(const SystemParams& p, const Vec& x) {
    if (static_cast<int>(x.size()) != p.n) throw DimensionMismatch(p.n, static_cast<int>(x.size()));
}

// Classifies the zero pattern of a once so every other operation can rely on
// ell, lambda and the partition. Zero means exactly 0.0; the pattern is a
// structural property, not a numerical one.
inline SystemParams build_system(const std::vector<double>& a) {
    SystemParams p;
    p.a = a;
    p.n = static_cast<int>(a.size());
    if (p.n == 0) throw EmptyDimension();
    int first_nonzero = -1;
    for (int i = 1; i <= p.n; ++i)
        if (p.coeff(i) != 0.0) { first_nonzero = i; break; }
    if (first_nonzero < 0) throw ZeroCoefficients();
    p.ell = first_nonzero - 1;
    p.lambda = p.ell / 2;
    for (int i = 1; i <= p.n; ++i) {
        if (i <= p.ell) p.A.push_back(i);
        if (p.coeff(i) != 0.0) p.B.push_back(i);
        else if (i > p.ell + 1) p.C.push_back(i);
    }
    return p;
}

inline Mat interaction_matrix(const SystemParams& p) {
    Mat m(p.n, p.n);
    for (int i = 1; i <= p.n; ++i)
        for (int j = 1; j <= p.n; ++j) {
            if (j > i) m(i - 1, j - 1) = p.coeff(j);
            else if (j < i) m(i - 1, j - 1) = -p.coeff(j);
        }
    return m;
}

struct CumulativeSums {
    Vec v;    // padded: v[i] == v_i, v[0] == 0, size n+1
    double h; // H = v_n

    double at(int i) const { return v[static_cast<std::size_t>(i)]; } // v_i, 0 <= i <= n
};

inline CumulativeSums cumulative_sums(const SystemParams& p, const Vec& x) {
    check_dimension(p, x);
    CumulativeSums cs;
    cs.v.assign(static_cast<std::size_t>(p.n) + 1, 0.0);
    for (int i = 1; i <= p.n; ++i) cs.v[static_cast<std::size_t>(i)] = cs.at(i - 1) + p.coeff(i) * comp(x, i);
    cs.h = cs.at(p.n);
    return cs;
}

inline double hamiltonian(const SystemParams& p, const Vec& x) {
    return cumulative_sums(p, x).h;
}

// H - v_i summed directly over k > i. Algebraically equal to the subtraction,
// but free of cancellation on the positive cone, where long Kahan orbits push
// v_i toward H geometrically.
inline double tail_sum(const SystemParams& p, const Vec& x, int i) {
    double s = 0.0;
    for (int k = p.n; k > i; --k) s += p.coeff(k) * comp(x, k);
    return s;
}

// x_i' = x_i (H - v_i - v_{i-1}). O(n); agrees with the matrix form exactly
// up to rounding, which the test suite pins down.
inline Vec vector_field(const SystemParams& p, const Vec& x) {
    const CumulativeSums cs = cumulative_sums(p, x);
    Vec dx(static_cast<std::size_t>(p.n));
    for (int i = 1; i <= p.n; ++i) comp(dx, i) = comp(x, i) * (cs.h - cs.at(i) - cs.at(i - 1));
    return dx;
}

// Componentwise rescaling x -> x / c conjugates the system onto coefficients
// a_i c_i. The zero pattern (hence ell and the partition) is unchanged.
struct Rescaling {
    SystemParams params;
    Vec scale; // the c that produced params

    Vec apply(const Vec& x) const {
        Vec y(x.size());
        for (int i = 1; i <= params.n; ++i) comp(y, i) = comp(x, i) / comp(scale, i);
        return y;
    }
};

inline Rescaling rescale(const SystemParams& p, const Vec& c) {
    check_dimension(p, c);
    std::vector<double> b(static_cast<std::size_t>(p.n));
    for (int i = 1; i <= p.n; ++i) {
        if (comp(c, i) == 0.0) throw ZeroScale(i);
        comp(b, i) = p.coeff(i) * comp(c, i);
    }
    return Rescaling{build_system(b), c};
}

} // namespace glv
