#pragma once

// First integrals of the system and the machinery around them: evaluation,
// analytic gradients, assembly of the Liouville and superintegrable sets, and
// a singular-value based functional-independence report.
//
// The families, with v_i the cumulative sums and H = v_n:
//
//   J_k = (x_1 x_3 ... x_{2k-1}) / (x_2 x_4 ... x_{2k}),      1 <= k <= n/2
//   F_k = v_{2k-1} (x_{2k+1} x_{2k+3} ... x_n) / (x_{2k} ... x_{n-1})   (n odd)
//       = v_{2k}   (x_{2k+2} x_{2k+4} ... x_n) / (x_{2k+1} ... x_{n-1}) (n even)
//   C   = (x_1 x_3 ... x_n) / (x_2 x_4 ... x_{n-1})           (n odd, a Casimir)
//   K_i = (H - a_{l+1} x_{l+1}) x_i / x_{l+1}                 (i in A)
//       = (H - a_{l+1} x_{l+1}) v_i^2 / (x_i x_{l+1})         (i in C)
//   G_ij = v_i (H - v_j) / (v_j (H - v_i))
//
// where l = ell is the number of leading zero coefficients. F_{(n+1)/2} (n odd)
// and F_{n/2} (n even) both reduce to H. Gradients of the product families are
// computed with leave-one-out products, so states where a numerator factor
// vanishes are handled exactly; only denominator zeros are poles.

#include <cstdio>
#include <string>
#include <vector>

#include "glv/errors.hpp"
#include "glv/linalg.hpp"
#include "glv/system.hpp"

namespace glv {

enum class IntegralKind { H, J, F, C, K, G, Ratio, Product, Coordinate, PrefixSum };

// Value-type descriptor; (i, j) are 1-based and their meaning depends on the
// kind: the family index k for J/F, the coordinate index for K/Coordinate, the
// cumulative-sum indices for G/PrefixSum, the coordinate pair for Ratio
// (x_i / x_j) and Product (x_i x_j).
struct Integral {
    IntegralKind kind = IntegralKind::H;
    int i = 0, j = 0;

    bool operator==(const Integral&) const = default;

    static Integral H() { return {IntegralKind::H, 0, 0}; }
    static Integral J(int k) { return {IntegralKind::J, k, 0}; }
    static Integral F(int k) { return {IntegralKind::F, k, 0}; }
    static Integral C() { return {IntegralKind::C, 0, 0}; }
    static Integral K(int i) { return {IntegralKind::K, i, 0}; }
    static Integral G(int i, int j) { return {IntegralKind::G, i, j}; }
    static Integral ratio(int i, int j) { return {IntegralKind::Ratio, i, j}; }
    static Integral product(int i, int j) { return {IntegralKind::Product, i, j}; }
    static Integral coordinate(int i) { return {IntegralKind::Coordinate, i, 0}; }
    static Integral prefix_sum(int i) { return {IntegralKind::PrefixSum, i, 0}; }

    std::string name() const {
        switch (kind) {
            case IntegralKind::H: return "H";
            case IntegralKind::J: return "J" + std::to_string(i);
            case IntegralKind::F: return "F" + std::to_string(i);
            case IntegralKind::C: return "C";
            case IntegralKind::K: return "K" + std::to_string(i);
            case IntegralKind::G: return "G" + std::to_string(i) + "_" + std::to_string(j);
            case IntegralKind::Ratio: return "x" + std::to_string(i) + "/x" + std::to_string(j);
            case IntegralKind::Product: return "x" + std::to_string(i) + "*x" + std::to_string(j);
            case IntegralKind::Coordinate: return "x" + std::to_string(i);
            case IntegralKind::PrefixSum: return "v" + std::to_string(i);
        }
        return "?";
    }
};

namespace detail {

// Monomials x^e with e in {-1, 0, +1}^n, represented by the index lists of the
// numerator and denominator factors.
inline double monomial_eval(const Vec& x, const std::vector<int>& num,
                            const std::vector<int>& den, const char* fn) {
    double d = 1.0;
    for (int i : den) {
        if (comp(x, i) == 0.0) throw PoleError(fn, "x_" + std::to_string(i), i);
        d *= comp(x, i);
    }
    double nv = 1.0;
    for (int i : num) nv *= comp(x, i);
    return nv / d;
}

// Accumulates w * grad(monomial) into g. Numerator partials use leave-one-out
// products so zeros among the numerator coordinates are exact, not 0/0.
inline void monomial_grad(const Vec& x, const std::vector<int>& num,
                          const std::vector<int>& den, const char* fn, double w, Vec& g) {
    double d = 1.0;
    for (int i : den) {
        if (comp(x, i) == 0.0) throw PoleError(fn, "x_" + std::to_string(i), i);
        d *= comp(x, i);
    }
    double nv = 1.0;
    for (int i : num) nv *= comp(x, i);
    for (int i : num) {
        double loo = 1.0;
        for (int m : num)
            if (m != i) loo *= comp(x, m);
        comp(g, i) += w * loo / d;
    }
    for (int i : den) comp(g, i) -= w * (nv / d) / comp(x, i);
}

inline void j_ranges(int k, std::vector<int>& num, std::vector<int>& den) {
    for (int i = 1; i <= 2 * k - 1; i += 2) num.push_back(i);
    for (int i = 2; i <= 2 * k; i += 2) den.push_back(i);
}

inline void c_ranges(int n, std::vector<int>& num, std::vector<int>& den) {
    for (int i = 1; i <= n; i += 2) num.push_back(i);
    for (int i = 2; i <= n - 1; i += 2) den.push_back(i);
}

// F_k = v_p * (monomial); returns p and fills the monomial index lists.
inline int f_ranges(int n, int k, std::vector<int>& num, std::vector<int>& den) {
    if (n % 2 == 1) {
        for (int i = 2 * k + 1; i <= n; i += 2) num.push_back(i);
        for (int i = 2 * k; i <= n - 1; i += 2) den.push_back(i);
        return 2 * k - 1;
    }
    for (int i = 2 * k + 2; i <= n; i += 2) num.push_back(i);
    for (int i = 2 * k + 1; i <= n - 1; i += 2) den.push_back(i);
    return 2 * k;
}

// grad v_p = (a_1, ..., a_p, 0, ..., 0); accumulated with weight w.
inline void prefix_grad(const SystemParams& p, int idx, double w, Vec& g) {
    for (int m = 1; m <= idx; ++m) comp(g, m) += w * p.coeff(m);
}

} // namespace detail

inline double eval_J(const Vec& x, int k) {
    const int n = static_cast<int>(x.size());
    if (k < 1 || k > n / 2) throw IndexOutOfRange("k", k, 1, n / 2);
    std::vector<int> num, den;
    detail::j_ranges(k, num, den);
    return detail::monomial_eval(x, num, den, "J");
}

inline double eval_C(const Vec& x) {
    const int n = static_cast<int>(x.size());
    if (n % 2 == 0) throw EvenDimension(n);
    std::vector<int> num, den;
    detail::c_ranges(n, num, den);
    return detail::monomial_eval(x, num, den, "C");
}

inline double eval_F(const SystemParams& p, const Vec& x, int k) {
    if (k < 1 || k > (p.n + 1) / 2) throw IndexOutOfRange("k", k, 1, (p.n + 1) / 2);
    std::vector<int> num, den;
    const int pi = detail::f_ranges(p.n, k, num, den);
    return cumulative_sums(p, x).at(pi) * detail::monomial_eval(x, num, den, "F");
}

inline double eval_K(const SystemParams& p, const Vec& x, int i) {
    if (i < 1 || i > p.n) throw IndexOutOfRange("i", i, 1, p.n);
    if (static_cast<int>(p.B.size()) < 2)
        throw NotApplicable("K_i requires at least two nonzero coefficients");
    const int l1 = p.ell + 1;
    if (p.coeff(i) != 0.0) throw NotApplicable("K_" + std::to_string(i) + ": index has a nonzero coefficient");
    // a_1..a_ell vanish, so H - a_{ell+1} x_{ell+1} is exactly the tail sum.
    const double w = tail_sum(p, x, l1);
    if (i <= p.ell) return w * detail::monomial_eval(x, {i}, {l1}, "K");
    const double vi = cumulative_sums(p, x).at(i);
    return w * vi * vi * detail::monomial_eval(x, {}, {i, l1}, "K");
}

inline double eval_G(const SystemParams& p, const Vec& x, int i, int j) {
    if (i < 1 || i > p.n) throw IndexOutOfRange("i", i, 1, p.n);
    if (j < 1 || j > p.n) throw IndexOutOfRange("j", j, 1, p.n);
    const CumulativeSums cs = cumulative_sums(p, x);
    const double vi = cs.at(i), vj = cs.at(j);
    // H - v as a tail sum: no cancellation when v approaches H.
    const double wi = tail_sum(p, x, i), wj = tail_sum(p, x, j);
    if (vi == 0.0) throw PoleError("G", "v_" + std::to_string(i), i);
    if (vj == 0.0) throw PoleError("G", "v_" + std::to_string(j), j);
    if (wi == 0.0) throw PoleError("G", "H - v_" + std::to_string(i), i);
    if (wj == 0.0) throw PoleError("G", "H - v_" + std::to_string(j), j);
    return (vi * wj) / (vj * wi);
}

inline double eval(const SystemParams& p, const Integral& d, const Vec& x) {
    check_dimension(p, x);
    switch (d.kind) {
        case IntegralKind::H: return cumulative_sums(p, x).h;
        case IntegralKind::J: return eval_J(x, d.i);
        case IntegralKind::F: return eval_F(p, x, d.i);
        case IntegralKind::C: return eval_C(x);
        case IntegralKind::K: return eval_K(p, x, d.i);
        case IntegralKind::G: return eval_G(p, x, d.i, d.j);
        case IntegralKind::Ratio:
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            if (d.j < 1 || d.j > p.n) throw IndexOutOfRange("j", d.j, 1, p.n);
            return detail::monomial_eval(x, {d.i}, {d.j}, "Ratio");
        case IntegralKind::Product:
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            if (d.j < 1 || d.j > p.n) throw IndexOutOfRange("j", d.j, 1, p.n);
            return comp(x, d.i) * comp(x, d.j);
        case IntegralKind::Coordinate:
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            return comp(x, d.i);
        case IntegralKind::PrefixSum:
            if (d.i < 0 || d.i > p.n) throw IndexOutOfRange("i", d.i, 0, p.n);
            return cumulative_sums(p, x).at(d.i);
    }
    throw Error("unknown integral kind");
}

inline Vec gradient(const SystemParams& p, const Integral& d, const Vec& x) {
    check_dimension(p, x);
    Vec g(static_cast<std::size_t>(p.n), 0.0);
    switch (d.kind) {
        case IntegralKind::H:
            g = p.a;
            break;
        case IntegralKind::J: {
            if (d.i < 1 || d.i > p.n / 2) throw IndexOutOfRange("k", d.i, 1, p.n / 2);
            std::vector<int> num, den;
            detail::j_ranges(d.i, num, den);
            detail::monomial_grad(x, num, den, "J", 1.0, g);
            break;
        }
        case IntegralKind::F: {
            if (d.i < 1 || d.i > (p.n + 1) / 2) throw IndexOutOfRange("k", d.i, 1, (p.n + 1) / 2);
            std::vector<int> num, den;
            const int pi = detail::f_ranges(p.n, d.i, num, den);
            const double vp = cumulative_sums(p, x).at(pi);
            const double ratio = detail::monomial_eval(x, num, den, "F");
            detail::monomial_grad(x, num, den, "F", vp, g);
            detail::prefix_grad(p, pi, ratio, g);
            break;
        }
        case IntegralKind::C: {
            if (p.n % 2 == 0) throw EvenDimension(p.n);
            std::vector<int> num, den;
            detail::c_ranges(p.n, num, den);
            detail::monomial_grad(x, num, den, "C", 1.0, g);
            break;
        }
        case IntegralKind::K: {
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            if (static_cast<int>(p.B.size()) < 2)
                throw NotApplicable("K_i requires at least two nonzero coefficients");
            if (p.coeff(d.i) != 0.0)
                throw NotApplicable("K_" + std::to_string(d.i) + ": index has a nonzero coefficient");
            const int l1 = p.ell + 1;
            const CumulativeSums cs = cumulative_sums(p, x);
            const double w = tail_sum(p, x, l1);
            // grad w = a with the (l+1) entry cancelled.
            auto add_w_grad = [&](double scale) {
                for (int m = 1; m <= p.n; ++m)
                    if (m != l1) comp(g, m) += scale * p.coeff(m);
            };
            if (d.i <= p.ell) {
                const double r = detail::monomial_eval(x, {d.i}, {l1}, "K");
                add_w_grad(r);
                detail::monomial_grad(x, {d.i}, {l1}, "K", w, g);
            } else {
                const double vi = cs.at(d.i);
                const double r = detail::monomial_eval(x, {}, {d.i, l1}, "K");
                add_w_grad(vi * vi * r);
                detail::prefix_grad(p, d.i, 2.0 * w * vi * r, g);
                detail::monomial_grad(x, {}, {d.i, l1}, "K", w * vi * vi, g);
            }
            break;
        }
        case IntegralKind::G: {
            const double gv = eval_G(p, x, d.i, d.j); // also validates and checks poles
            const CumulativeSums cs = cumulative_sums(p, x);
            const double vi = cs.at(d.i), vj = cs.at(d.j);
            const double wi = tail_sum(p, x, d.i), wj = tail_sum(p, x, d.j);
            // log-derivative: all four factors are nonzero past eval_G.
            detail::prefix_grad(p, d.i, gv / vi, g);
            detail::prefix_grad(p, d.j, -gv / vj, g);
            for (int m = d.j + 1; m <= p.n; ++m) comp(g, m) += gv * p.coeff(m) / wj;
            for (int m = d.i + 1; m <= p.n; ++m) comp(g, m) -= gv * p.coeff(m) / wi;
            break;
        }
        case IntegralKind::Ratio:
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            if (d.j < 1 || d.j > p.n) throw IndexOutOfRange("j", d.j, 1, p.n);
            detail::monomial_grad(x, {d.i}, {d.j}, "Ratio", 1.0, g);
            break;
        case IntegralKind::Product:
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            if (d.j < 1 || d.j > p.n) throw IndexOutOfRange("j", d.j, 1, p.n);
            detail::monomial_grad(x, {d.i, d.j}, {}, "Product", 1.0, g);
            break;
        case IntegralKind::Coordinate:
            if (d.i < 1 || d.i > p.n) throw IndexOutOfRange("i", d.i, 1, p.n);
            comp(g, d.i) = 1.0;
            break;
        case IntegralKind::PrefixSum:
            if (d.i < 0 || d.i > p.n) throw IndexOutOfRange("i", d.i, 0, p.n);
            detail::prefix_grad(p, d.i, 1.0, g);
            break;
    }
    return g;
}

// Coordinates whose vanishing makes the integral singular. G is the one family
// whose poles are not coordinate hyperplanes (they sit on v_i = 0, v_j = 0,
// H = v_i, H = v_j), so it contributes nothing here.
inline std::vector<int> singular_coordinates(const SystemParams& p, const Integral& d) {
    std::vector<int> out, num;
    switch (d.kind) {
        case IntegralKind::J: detail::j_ranges(d.i, num, out); break;
        case IntegralKind::C: detail::c_ranges(p.n, num, out); break;
        case IntegralKind::F: detail::f_ranges(p.n, d.i, num, out); break;
        case IntegralKind::K:
            if (d.i > p.ell + 1) out.push_back(d.i);
            out.push_back(p.ell + 1);
            break;
        case IntegralKind::Ratio: out.push_back(d.j); break;
        default: break;
    }
    return out;
}

// The involutive family: n/2 members for even n, (n+1)/2 for odd n.
// For odd n the F chain starts at lambda + 2; F_{lambda+1} is skipped.
// n = 1 is degenerate (C and H are proportional): the set is just {H}.
inline std::vector<Integral> liouville_set(const SystemParams& p) {
    std::vector<Integral> set;
    for (int k = 1; k <= p.lambda; ++k) set.push_back(Integral::J(k));
    set.push_back(Integral::H());
    if (p.n % 2 == 0) {
        for (int k = p.lambda + 1; k <= p.n / 2 - 1; ++k) set.push_back(Integral::F(k));
    } else {
        for (int k = p.lambda + 2; k <= (p.n - 1) / 2; ++k) set.push_back(Integral::F(k));
        // ell = n-1 leaves only x_n with a nonzero coefficient; there
        // C = J_lambda H / a_n is dependent on the rest, so it is omitted
        // and the set is the J-ladder plus H, as in the even case.
        if (p.ell < p.n - 1) set.push_back(Integral::C());
    }
    return set;
}

// n - 1 integrals. With a single nonzero coefficient the field is a scaling
// flow and the set is H plus coordinate ratios/products; otherwise H, the
// chain of G over adjacent nonzero-coefficient indices (the last one is
// excluded since v there equals H identically), and one K per index in A u C.
inline std::vector<Integral> superintegrable_set(const SystemParams& p) {
    std::vector<Integral> set;
    if (p.n == 1) return set;
    set.push_back(Integral::H());
    const int m = static_cast<int>(p.B.size());
    if (m == 1) {
        if (p.ell == 0) {
            for (int i = 3; i <= p.n; ++i) set.push_back(Integral::ratio(i, 2));
        } else {
            for (int i = 2; i <= p.ell; ++i) set.push_back(Integral::ratio(i, 1));
            for (int i = p.ell + 2; i <= p.n; ++i) set.push_back(Integral::product(1, i));
        }
        return set;
    }
    for (int t = 0; t + 2 < m; ++t)
        set.push_back(Integral::G(p.B[static_cast<std::size_t>(t)], p.B[static_cast<std::size_t>(t) + 1]));
    for (int i : p.A) set.push_back(Integral::K(i));
    for (int i : p.C) set.push_back(Integral::K(i));
    return set;
}

struct IndependenceReport {
    Mat jacobian;                        // one gradient per row
    std::vector<double> singular_values; // descending
    int rank = 0;
    double tol = 0.0;
};

// Numerical rank of the gradient stack: count of singular values above
// tol * sigma_max.
inline IndependenceReport independence_rank(const SystemParams& p, const std::vector<Integral>& set,
                                            const Vec& x, double tol = 1e-8) {
    if (set.empty()) throw EmptySet();
    check_dimension(p, x);
    IndependenceReport rep;
    rep.tol = tol;
    rep.jacobian = Mat(static_cast<int>(set.size()), p.n);
    for (int r = 0; r < rep.jacobian.rows; ++r) {
        const Vec g = gradient(p, set[static_cast<std::size_t>(r)], x);
        for (int c = 0; c < p.n; ++c) rep.jacobian(r, c) = g[static_cast<std::size_t>(c)];
    }
    rep.singular_values = singular_values(rep.jacobian);
    if (!rep.singular_values.empty() && rep.singular_values.front() > 0.0)
        for (double s : rep.singular_values)
            if (s > tol * rep.singular_values.front()) ++rep.rank;
    return rep;
}

// Inverse of Integral::name(); accepts exactly the forms name() produces.
inline Integral integral_from_name(const std::string& s) {
    const auto fail = [&]() -> Integral { throw Error("unknown integral name '" + s + "'"); };
    if (s == "H") return Integral::H();
    if (s == "C") return Integral::C();
    const auto parse_int = [&](std::size_t b, std::size_t e) {
        if (b >= e) fail();
        int v = 0;
        for (std::size_t t = b; t < e; ++t) {
            if (s[t] < '0' || s[t] > '9') fail();
            v = 10 * v + (s[t] - '0');
        }
        return v;
    };
    if (s.size() >= 2 && (s[0] == 'J' || s[0] == 'F' || s[0] == 'K' || s[0] == 'v')) {
        const int k = parse_int(1, s.size());
        if (s[0] == 'J') return Integral::J(k);
        if (s[0] == 'F') return Integral::F(k);
        if (s[0] == 'K') return Integral::K(k);
        return Integral::prefix_sum(k);
    }
    if (s.size() >= 2 && s[0] == 'G') {
        const auto us = s.find('_');
        if (us == std::string::npos) fail();
        return Integral::G(parse_int(1, us), parse_int(us + 1, s.size()));
    }
    if (s.size() >= 2 && s[0] == 'x') {
        const auto slash = s.find('/');
        const auto star = s.find('*');
        if (slash != std::string::npos) {
            if (slash + 2 >= s.size() || s[slash + 1] != 'x') fail();
            return Integral::ratio(parse_int(1, slash), parse_int(slash + 2, s.size()));
        }
        if (star != std::string::npos) {
            if (star + 2 >= s.size() || s[star + 1] != 'x') fail();
            return Integral::product(parse_int(1, star), parse_int(star + 2, s.size()));
        }
        return Integral::coordinate(parse_int(1, s.size()));
    }
    return fail();
}

} // namespace glv
