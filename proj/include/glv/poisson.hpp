#pragma once

// The quadratic Poisson structure {x_i, x_j} = x_i x_j (i < j), its bracket on
// first integrals, involutivity and Casimir checks, a finite-difference test
// for the Poisson property of a map, and the wider family of diagonal brackets
// {x_i, x_j} = b_ij x_i x_j, b skew, which satisfy Jacobi for every choice
// of b.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "glv/errors.hpp"
#include "glv/integrals.hpp"
#include "glv/linalg.hpp"
#include "glv/system.hpp"

namespace glv {

// P(x)_ij = x_i x_j sign(j - i); exactly skew by construction.
inline Mat structure_matrix(const Vec& x) {
    const int n = static_cast<int>(x.size());
    Mat pm(n, n);
    for (int i = 1; i <= n; ++i)
        for (int j = i + 1; j <= n; ++j) {
            const double v = comp(x, i) * comp(x, j);
            pm(i - 1, j - 1) = v;
            pm(j - 1, i - 1) = -v;
        }
    return pm;
}

// {f, g}(x) = grad f . P(x) grad g.
inline double bracket(const SystemParams& p, const Integral& f, const Integral& g, const Vec& x) {
    const Vec gf = gradient(p, f, x), gg = gradient(p, g, x);
    const Mat pm = structure_matrix(x);
    double s = 0.0;
    for (int r = 0; r < pm.rows; ++r)
        for (int c = 0; c < pm.cols; ++c)
            s += gf[static_cast<std::size_t>(r)] * pm(r, c) * gg[static_cast<std::size_t>(c)];
    return s;
}

struct InvolutionReport {
    struct PairResult {
        Integral f, g;
        double worst = 0.0; // scaled residual, max over usable points
    };
    std::vector<PairResult> pairs;
    int points_used = 0;
    int points_skipped = 0; // points where some member of the set has a pole
    double tol = 0.0;
    double worst = 0.0;
    bool pass = false;
};

// All pairwise brackets of a set over the given points. The residual of a pair
// at a point is |{f,g}| / (1 + |grad f| |P|_F |grad g|), so the threshold is
// meaningful across scales. Points where any member has a pole are skipped and
// counted; at least one point must survive for a pass.
inline InvolutionReport check_involution(const SystemParams& p, const std::vector<Integral>& set,
                                         const std::vector<Vec>& points, double tol = 1e-9) {
    if (set.empty()) throw EmptySet();
    if (points.empty()) throw Error("check_involution: no evaluation points");
    InvolutionReport rep;
    rep.tol = tol;
    for (std::size_t i = 0; i < set.size(); ++i)
        for (std::size_t j = i + 1; j < set.size(); ++j)
            rep.pairs.push_back({set[i], set[j], 0.0});
    for (const Vec& x : points) {
        std::vector<Vec> grads;
        grads.reserve(set.size());
        try {
            for (const Integral& d : set) grads.push_back(gradient(p, d, x));
        } catch (const PoleError&) {
            ++rep.points_skipped;
            continue;
        }
        ++rep.points_used;
        const Mat pm = structure_matrix(x);
        const double pn = frobenius(pm);
        std::size_t pair = 0;
        for (std::size_t i = 0; i < set.size(); ++i)
            for (std::size_t j = i + 1; j < set.size(); ++j, ++pair) {
                double s = 0.0;
                for (int r = 0; r < pm.rows; ++r)
                    for (int c = 0; c < pm.cols; ++c)
                        s += grads[i][static_cast<std::size_t>(r)] * pm(r, c) *
                             grads[j][static_cast<std::size_t>(c)];
                const double scaled =
                    std::abs(s) / (1.0 + norm2(grads[i]) * pn * norm2(grads[j]));
                if (scaled > rep.pairs[pair].worst) rep.pairs[pair].worst = scaled;
            }
    }
    for (const auto& pr : rep.pairs) rep.worst = std::max(rep.worst, pr.worst);
    rep.pass = rep.points_used > 0 && rep.worst <= tol;
    return rep;
}

// C is a Casimir for odd n: P(x) grad C vanishes identically, i.e. {C, f} = 0
// for every f, not just for first integrals.
inline bool check_casimir(const Vec& x, double tol = 1e-9) {
    const int n = static_cast<int>(x.size());
    if (n % 2 == 0) throw EvenDimension(n);
    std::vector<double> ones(static_cast<std::size_t>(n), 1.0);
    const SystemParams p = build_system(ones); // C does not depend on a; any params do
    const Vec gc = gradient(p, Integral::C(), x);
    const Mat pm = structure_matrix(x);
    const Vec r = matvec(pm, gc);
    double worst = 0.0;
    for (double v : r) worst = std::max(worst, std::abs(v));
    return worst <= tol * (1.0 + norm2(gc) * frobenius(pm));
}

// Central-difference Jacobian with step cbrt(eps) * max(1, |x_q|) per column.
// Any failure of the map near x (pole, non-finite output) is reported as
// NumericalJacobianFailure rather than propagated raw.
inline Mat fd_jacobian(const std::function<Vec(const Vec&)>& map, const Vec& x) {
    const int n = static_cast<int>(x.size());
    const double base = std::cbrt(std::numeric_limits<double>::epsilon());
    Mat jac(n, n);
    for (int q = 0; q < n; ++q) {
        const double h = base * std::max(1.0, std::abs(x[static_cast<std::size_t>(q)]));
        Vec xp = x, xm = x;
        xp[static_cast<std::size_t>(q)] += h;
        xm[static_cast<std::size_t>(q)] -= h;
        Vec fp, fm;
        try {
            fp = map(xp);
            fm = map(xm);
        } catch (const Error& e) {
            throw NumericalJacobianFailure(std::string("map failed while differencing: ") + e.what());
        }
        if (static_cast<int>(fp.size()) != n || static_cast<int>(fm.size()) != n)
            throw NumericalJacobianFailure("map changed dimension");
        for (int r = 0; r < n; ++r) {
            const double d = (fp[static_cast<std::size_t>(r)] - fm[static_cast<std::size_t>(r)]) / (2.0 * h);
            if (!std::isfinite(d)) throw NumericalJacobianFailure("non-finite difference quotient");
            jac(r, q) = d;
        }
    }
    return jac;
}

struct PoissonMapReport {
    Mat jacobian;
    Mat residual; // M P(x) M^T - P(map(x))
    double worst = 0.0;
    bool pass = false;
};

// A map y = m(x) preserves the bracket iff M P(x) M^T = P(y) with M = dm/dx.
// The Jacobian here is finite-difference, so tolerances of about 1e-6 are the
// realistic floor.
inline PoissonMapReport poisson_map_check(const std::function<Vec(const Vec&)>& map, const Vec& x,
                                          double tol = 1e-6) {
    PoissonMapReport rep;
    rep.jacobian = fd_jacobian(map, x);
    const Mat px = structure_matrix(x);
    const Mat py = structure_matrix(map(x));
    const Mat lhs = matmul(matmul(rep.jacobian, px), transpose(rep.jacobian));
    rep.residual = Mat(px.rows, px.cols);
    for (int r = 0; r < px.rows; ++r)
        for (int c = 0; c < px.cols; ++c) rep.residual(r, c) = lhs(r, c) - py(r, c);
    rep.worst = max_abs(rep.residual) / (1.0 + std::max(max_abs(lhs), max_abs(py)));
    rep.pass = rep.worst <= tol;
    return rep;
}

// Skew coefficient table for {x_i, x_j} = b_ij x_i x_j.
struct DiagonalBracket {
    Mat coef;

    explicit DiagonalBracket(Mat m) : coef(std::move(m)) {
        for (int i = 0; i < coef.rows; ++i)
            for (int j = 0; j <= i; ++j)
                if (coef(i, j) != -coef(j, i))
                    throw Error("diagonal bracket coefficients must be skew with zero diagonal");
    }

    double at(int i, int j) const { return coef(i - 1, j - 1); } // 1-based
    int n() const { return coef.rows; }
};

// The bracket of the system itself: b_ij = sign(j - i).
inline DiagonalBracket default_diagonal_bracket(int n) {
    Mat m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = j > i ? 1.0 : (j < i ? -1.0 : 0.0);
    return DiagonalBracket(std::move(m));
}

// {{x_i,x_j},x_k} + {{x_j,x_k},x_i} + {{x_k,x_i},x_j} under a diagonal
// bracket. Each nested term is expanded by the product rule,
//   {{x_i,x_j},x_k} = b_ij (b_ik + b_jk) x_i x_j x_k,
// and the three generally nonzero terms are summed as written; the Jacobi
// identity makes the sum cancel, which is exactly what callers verify.
inline double jacobiator(const DiagonalBracket& b, const Vec& x, int i, int j, int k) {
    const int n = static_cast<int>(x.size());
    if (b.n() != n) throw DimensionMismatch(b.n(), n);
    for (int idx : {i, j, k})
        if (idx < 1 || idx > n) throw IndexOutOfRange("index", idx, 1, n);
    const double xyz = comp(x, i) * comp(x, j) * comp(x, k);
    const double t1 = b.at(i, j) * (b.at(i, k) + b.at(j, k)) * xyz;
    const double t2 = b.at(j, k) * (b.at(j, i) + b.at(k, i)) * xyz;
    const double t3 = b.at(k, i) * (b.at(k, j) + b.at(i, j)) * xyz;
    return t1 + t2 + t3;
}

// A diagonal bracket may deviate from the default only on pairs whose
// coefficients both vanish; such pairs contribute nothing to the Hamiltonian
// field, so the equations of motion are untouched. Deviations anywhere else
// are rejected. Returns whether the field induced by b matches vector_field.
inline bool diagonal_vector_field_invariance(const SystemParams& p, const DiagonalBracket& b,
                                             const Vec& x, double tol = 1e-12) {
    check_dimension(p, x);
    if (b.n() != p.n) throw DimensionMismatch(p.n, b.n());
    for (int i = 1; i <= p.n; ++i)
        for (int j = i + 1; j <= p.n; ++j)
            if (b.at(i, j) != 1.0 && (p.coeff(i) != 0.0 || p.coeff(j) != 0.0))
                throw IllegalOverride(i, j);
    const Vec ref = vector_field(p, x);
    double worst = 0.0, scale = 0.0;
    for (int i = 1; i <= p.n; ++i) {
        double dxi = 0.0;
        for (int j = 1; j <= p.n; ++j) dxi += b.at(i, j) * p.coeff(j) * comp(x, i) * comp(x, j);
        worst = std::max(worst, std::abs(dxi - comp(ref, i)));
        scale = std::max(scale, std::abs(comp(ref, i)));
    }
    return worst <= tol * (1.0 + scale);
}

} // namespace glv
