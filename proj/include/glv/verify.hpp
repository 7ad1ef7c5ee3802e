#pragma once

// Structural self-checks for one configured system, run over seeded random
// states in [0.5, 2)^n: involutivity of the Liouville set, the Casimir
// property (odd n), functional-independence ranks of both integral sets, the
// Poisson property of the Kahan map, the map/flow time correspondence, the
// agreement of the closed-form step with the generic quadratic-field step,
// and the closed iterate formula against actual composition.
//
// Points where a check cannot be evaluated (a pole of an integral, a map
// parameter with no real time step) are skipped and do not fail the check;
// a check with no usable points at all does fail.

#include <cstdint>
#include <string>
#include <vector>

#include "glv/dynamics.hpp"
#include "glv/integrals.hpp"
#include "glv/poisson.hpp"
#include "glv/rng.hpp"
#include "glv/system.hpp"

namespace glv {

struct Tolerances {
    double identity = 1e-9;   // chained algebraic identities (map vs flow, iterates)
    double involution = 1e-9; // bracket residuals
    double rank = 1e-8;       // singular value cutoff relative to sigma_max
    double fd = 1e-6;         // finite-difference limited checks
};

struct CheckResult {
    std::string check;
    int points = 0; // comparisons that actually ran
    double worst_residual = 0.0;
    bool pass = false;
    std::uint64_t seed = 0;
};

struct VerificationReport {
    std::vector<CheckResult> checks;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {

inline double rel_diff(const Vec& a, const Vec& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        worst = std::max(worst, std::abs(a[i] - b[i]) / (1.0 + std::abs(b[i])));
    return worst;
}

inline std::vector<Vec> sample_box(int n, std::uint64_t seed, int count) {
    std::vector<Vec> pts;
    pts.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k)
        pts.push_back(random_state(n, derive_seed(seed, {static_cast<std::uint64_t>(k)}), 0.5, 2.0));
    return pts;
}

} // namespace detail

inline VerificationReport run_verify(const SystemParams& p, std::uint64_t seed,
                                     const Tolerances& tol = {}) {
    VerificationReport rep;
    const auto check_seed = [&](int k) { return derive_seed(seed, {static_cast<std::uint64_t>(k)}); };

    { // pairwise brackets of the Liouville set
        CheckResult r{"involution", 0, 0.0, false, check_seed(1)};
        const InvolutionReport ir =
            check_involution(p, liouville_set(p), detail::sample_box(p.n, r.seed, 20), tol.involution);
        r.points = ir.points_used;
        r.worst_residual = ir.worst;
        r.pass = ir.pass;
        rep.checks.push_back(r);
    }

    if (p.n % 2 == 1 && p.n > 1) { // P grad C = 0
        CheckResult r{"casimir", 0, 0.0, false, check_seed(2)};
        for (const Vec& x : detail::sample_box(p.n, r.seed, 20)) {
            const Vec gc = gradient(p, Integral::C(), x);
            const Vec pv = matvec(structure_matrix(x), gc);
            double m = 0.0;
            for (double v : pv) m = std::max(m, std::abs(v));
            m /= 1.0 + norm2(gc) * frobenius(structure_matrix(x));
            r.worst_residual = std::max(r.worst_residual, m);
            ++r.points;
        }
        r.pass = r.points > 0 && r.worst_residual <= tol.involution;
        rep.checks.push_back(r);
    }

    const auto rank_check = [&](const char* name, const std::vector<Integral>& set, int expected,
                                std::uint64_t s) {
        CheckResult r{name, 0, 0.0, false, s};
        bool all_ok = true;
        for (const Vec& x : detail::sample_box(p.n, s, 10)) {
            try {
                const IndependenceReport ir = independence_rank(p, set, x, tol.rank);
                ++r.points;
                if (ir.rank != expected) {
                    all_ok = false;
                    r.worst_residual =
                        std::max(r.worst_residual, std::abs(double(ir.rank - expected)));
                }
            } catch (const PoleError&) {
            }
        }
        r.pass = r.points > 0 && all_ok;
        rep.checks.push_back(r);
    };
    rank_check("rank-liouville", liouville_set(p), p.n % 2 == 0 ? p.n / 2 : (p.n + 1) / 2,
               check_seed(3));
    if (p.n > 1) rank_check("rank-superintegrable", superintegrable_set(p), p.n - 1, check_seed(4));

    { // M P(x) M^T = P(map(x)) for the Kahan map, finite-difference Jacobian
        CheckResult r{"poisson-map", 0, 0.0, false, check_seed(5)};
        for (const double eps : {0.1, 0.01})
            for (const Vec& x : detail::sample_box(p.n, derive_seed(r.seed, {std::uint64_t(eps * 1000)}), 10)) {
                try {
                    const auto map = [&](const Vec& s) { return kahan_step_closed(p, s, eps); };
                    const PoissonMapReport pm = poisson_map_check(map, x, tol.fd);
                    ++r.points;
                    r.worst_residual = std::max(r.worst_residual, pm.worst);
                } catch (const Error&) {
                }
            }
        r.pass = r.points > 0 && r.worst_residual <= tol.fd;
        rep.checks.push_back(r);
    }

    { // one Kahan step lands on the exact orbit at t_eps
        CheckResult r{"time-advance", 0, 0.0, false, check_seed(6)};
        for (const double eps : {0.01, 0.05, 0.1})
            for (const Vec& x : detail::sample_box(p.n, derive_seed(r.seed, {std::uint64_t(eps * 1000)}), 20)) {
                try {
                    const double t = step_to_time(cumulative_sums(p, x).h, eps);
                    const Vec stepped = kahan_step_closed(p, x, eps);
                    const Vec flowed = exact_flow(p, x, t);
                    ++r.points;
                    r.worst_residual = std::max(r.worst_residual, detail::rel_diff(stepped, flowed));
                } catch (const Error&) {
                }
            }
        r.pass = r.points > 0 && r.worst_residual <= tol.identity;
        rep.checks.push_back(r);
    }

    { // closed-form step == generic Kahan step with h = 2 eps
        CheckResult r{"closed-vs-generic", 0, 0.0, false, check_seed(7)};
        const QuadraticField field = lv_field(p);
        for (const double eps : {0.01, 0.05, 0.1})
            for (const Vec& x : detail::sample_box(p.n, derive_seed(r.seed, {std::uint64_t(eps * 1000)}), 20)) {
                try {
                    const Vec closed = kahan_step_closed(p, x, eps);
                    const Vec generic = kahan_step_generic(field, x, 2.0 * eps);
                    ++r.points;
                    r.worst_residual = std::max(r.worst_residual, detail::rel_diff(closed, generic));
                } catch (const Error&) {
                }
            }
        r.pass = r.points > 0 && r.worst_residual <= tol.identity;
        rep.checks.push_back(r);
    }

    { // closed iterate formula == m-fold composition
        CheckResult r{"iterates", 0, 0.0, false, check_seed(8)};
        const double eps = 0.05;
        for (const long m : {1L, 2L, 7L, 31L})
            for (const Vec& x : detail::sample_box(p.n, derive_seed(r.seed, {std::uint64_t(m)}), 20)) {
                try {
                    Vec composed = x;
                    for (long k = 0; k < m; ++k) composed = kahan_step_closed(p, composed, eps);
                    const Vec direct = kahan_iterates_closed(p, x, eps, m);
                    ++r.points;
                    r.worst_residual = std::max(r.worst_residual, detail::rel_diff(direct, composed));
                } catch (const Error&) {
                }
            }
        r.pass = r.points > 0 && r.worst_residual <= tol.identity;
        rep.checks.push_back(r);
    }

    return rep;
}

} // namespace glv
