#pragma once

// Time evolution: the closed-form solution of the flow, the Kahan map of the
// system in closed form, the generic Kahan step for arbitrary quadratic
// fields, the closed form for the m-th Kahan iterate, an RK4 reference
// stepper, and a trajectory recorder.
//
// Everything is driven by the scalar profile
//
//     f(t) = tanh(h0 t / 2) / h0      (h0 != 0),      f(t) = t / 2  (h0 = 0),
//
// with h0 = H(x0): the solution through x0 is
//
//     x_i(t) = x_i(0) (1 - f h0)(1 + f h0) / (D_{i-1} D_i),
//     D_i = 1 - f h0 + 2 f v_i(0),
//
// and the Kahan map with parameter eps is the same expression with f replaced
// by eps. The map advances exact time t_eps = 2 atanh(eps h0) / h0, i.e.
// f(t_eps) = eps, which is why the discretization follows exact orbits.

#include <cmath>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "glv/errors.hpp"
#include "glv/integrals.hpp"
#include "glv/linalg.hpp"
#include "glv/system.hpp"

namespace glv {

// Below this the h0 = 0 formulas are used outright; both branches agree to
// well under double rounding at the crossover for states of order one.
inline constexpr double k_energy_zero = 1e-13;

inline double f_of_t(double h0, double t) {
    if (std::abs(h0) < k_energy_zero) return 0.5 * t;
    return std::tanh(0.5 * h0 * t) / h0;
}

// Time advanced by one Kahan step with parameter eps; the inverse of f.
inline double step_to_time(double h0, double eps) {
    if (std::abs(h0) < k_energy_zero) return 2.0 * eps;
    const double z = eps * h0;
    if (std::abs(z) >= 1.0)
        throw OutOfRange("|eps * H| = " + std::to_string(std::abs(z)) +
                         " >= 1: the step does not correspond to a real time");
    return 2.0 * std::atanh(z) / h0;
}

// Scalar logistic-type flow v' = v (h0 - v), written to stay stable for small
// h0: v(t) = h0 v0 e^{h0 t} / (h0 + v0 (e^{h0 t} - 1)).
inline double exact_v_flow(double h0, double v0, double t) {
    if (std::abs(h0) < k_energy_zero) {
        const double den = 1.0 + v0 * t; // den(0) = 1, linear in t
        if (den <= 0.0) throw BlowupError(1, -1.0 / v0);
        return v0 / den;
    }
    const double den = h0 + v0 * std::expm1(h0 * t);
    // den(0) = h0; a sign change or zero along the way is a pole crossed.
    if (den == 0.0 || (den > 0.0) != (h0 > 0.0))
        throw BlowupError(1, std::log1p(-h0 / v0) / h0);
    return h0 * v0 * std::exp(h0 * t) / den;
}

namespace detail {

// The common rational expression, with f the flow profile or the map
// parameter: x_i(0) (1 - f h0)(1 + f h0) / (D_{i-1} D_i), D_i = 1 - f h0 + 2 f v_i.
// exact_flow rules out zero denominators beforehand (crossing check), so a
// zero here is always a map pole.
inline Vec rational_update(const Vec& x0, const CumulativeSums& cs, double fh, double f) {
    const int n = static_cast<int>(x0.size());
    const double num = (1.0 - fh) * (1.0 + fh);
    std::vector<double> den(static_cast<std::size_t>(n) + 1);
    for (int i = 0; i <= n; ++i) {
        den[static_cast<std::size_t>(i)] = 1.0 - fh + 2.0 * f * cs.at(i);
        if (den[static_cast<std::size_t>(i)] == 0.0) throw MapPoleError(i);
    }
    Vec y(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i)
        comp(y, i) = comp(x0, i) * num /
                     (den[static_cast<std::size_t>(i) - 1] * den[static_cast<std::size_t>(i)]);
    return y;
}

inline double powi(double base, long e) {
    double r = 1.0, b = base;
    for (long k = e; k > 0; k >>= 1) {
        if (k & 1) r *= b;
        b *= b;
    }
    return r;
}

} // namespace detail

// Solution at time t through x0. Before evaluating, every denominator
// D_i(s) = 1 - f(s)(h0 - 2 v_i) is checked for a zero crossing with s between
// 0 and t; f is monotone in s, so this reduces to comparing f-values. If the
// solution has blown up by time t the error names the first crossing.
inline Vec exact_flow(const SystemParams& p, const Vec& x0, double t) {
    const CumulativeSums cs = cumulative_sums(p, x0);
    const double h0 = cs.h;
    const double f = f_of_t(h0, t);
    int worst_index = -1;
    double first_f = 0.0;
    for (int i = 0; i <= p.n; ++i) {
        const double slope = h0 - 2.0 * cs.at(i);
        if (slope == 0.0) continue;
        const double fstar = 1.0 / slope; // D_i(f) = 1 - f * slope = 0 here
        if ((f > 0.0 && fstar > 0.0 && fstar <= f) || (f < 0.0 && fstar < 0.0 && fstar >= f))
            if (worst_index < 0 || std::abs(fstar) < std::abs(first_f)) {
                worst_index = i;
                first_f = fstar;
            }
    }
    if (worst_index >= 0) {
        const double tstar = std::abs(h0) < k_energy_zero
                                 ? 2.0 * first_f
                                 : 2.0 * std::atanh(h0 * first_f) / h0;
        throw BlowupError(worst_index, tstar);
    }
    return detail::rational_update(x0, cs, f * h0, f);
}

// One Kahan step with parameter eps (exact time advance 2 eps when H = 0).
inline Vec kahan_step_closed(const SystemParams& p, const Vec& x, double eps) {
    const CumulativeSums cs = cumulative_sums(p, x);
    return detail::rational_update(x, cs, eps * cs.h, eps);
}

// A quadratic vector field Q_i(x) = sum_{j,k} q_ijk x_j x_k with q symmetric
// in (j, k), plus its polarization Phi_i(x, y) = sum q_ijk x_j y_k.
struct QuadraticField {
    int n = 0;
    std::vector<double> q; // n^3, symmetric in the last two slots by construction

    QuadraticField() = default;
    explicit QuadraticField(int dim)
        : n(dim), q(static_cast<std::size_t>(dim) * dim * dim, 0.0) {}

    double at(int i, int j, int k) const { // 1-based
        return q[((static_cast<std::size_t>(i) - 1) * n + (j - 1)) * n + (k - 1)];
    }

    // Q_i += c x_j x_k, stored symmetrically.
    void add_term(int i, int j, int k, double c) {
        auto& jk = q[((static_cast<std::size_t>(i) - 1) * n + (j - 1)) * n + (k - 1)];
        auto& kj = q[((static_cast<std::size_t>(i) - 1) * n + (k - 1)) * n + (j - 1)];
        if (j == k) {
            jk += c;
        } else {
            jk += 0.5 * c;
            kj += 0.5 * c;
        }
    }

    Vec operator()(const Vec& x) const { return polarization(x, x); }

    Vec polarization(const Vec& x, const Vec& y) const {
        Vec out(static_cast<std::size_t>(n), 0.0);
        for (int i = 1; i <= n; ++i) {
            double s = 0.0;
            for (int j = 1; j <= n; ++j) {
                if (comp(x, j) == 0.0) continue;
                double inner = 0.0;
                for (int k = 1; k <= n; ++k) inner += at(i, j, k) * comp(y, k);
                s += comp(x, j) * inner;
            }
            comp(out, i) = s;
        }
        return out;
    }
};

inline QuadraticField lv_field(const SystemParams& p) {
    QuadraticField f(p.n);
    for (int i = 1; i <= p.n; ++i)
        for (int m = 1; m <= p.n; ++m) {
            if (m == i) continue;
            f.add_term(i, i, m, m > i ? p.coeff(m) : -p.coeff(m));
        }
    return f;
}

// Kahan's discretization of an arbitrary quadratic field: the unique map with
// (y - x) / h = Phi(x, y), obtained by solving (I - h L(x)) y = x where
// L(x)_ik = sum_j q_ijk x_j. For the field above, the step with h = 2 eps
// reproduces kahan_step_closed with parameter eps.
inline Vec kahan_step_generic(const QuadraticField& f, const Vec& x, double h) {
    if (static_cast<int>(x.size()) != f.n) throw DimensionMismatch(f.n, static_cast<int>(x.size()));
    Mat m = Mat::identity(f.n);
    for (int i = 1; i <= f.n; ++i)
        for (int k = 1; k <= f.n; ++k) {
            double l = 0.0;
            for (int j = 1; j <= f.n; ++j) l += f.at(i, j, k) * comp(x, j);
            m(i - 1, k - 1) -= h * l;
        }
    return lu_solve(std::move(m), x);
}

// m-th Kahan iterate in closed form, with r = (1 + eps h0)/(1 - eps h0):
//
//   x_i^{(m)} = x_i(0) r^m / ((1 + q v_{i-1})(1 + q v_i)),  q = (r^m - 1)/h0,
//
// which at h0 = 0 degenerates to q = 2 m eps. Stable in the small-h0 regime
// via expm1/log1p; |eps h0| = 1 has no finite image and is rejected.
inline Vec kahan_iterates_closed(const SystemParams& p, const Vec& x0, double eps, long m) {
    if (m < 0) throw OutOfRange("iterate count must be nonnegative, got " + std::to_string(m));
    const CumulativeSums cs = cumulative_sums(p, x0);
    const double h0 = cs.h;
    double rm, qf; // r^m and (r^m - 1)/h0
    if (std::abs(h0) < k_energy_zero) {
        rm = 1.0;
        qf = 2.0 * static_cast<double>(m) * eps;
    } else {
        const double z = eps * h0;
        if (std::abs(z) == 1.0) throw OutOfRange("|eps * H| = 1: iterate map degenerates");
        if (std::abs(z) < 1.0) {
            const double rm1 = std::expm1(static_cast<double>(m) * std::log1p(2.0 * z / (1.0 - z)));
            rm = 1.0 + rm1;
            qf = rm1 / h0;
        } else {
            rm = detail::powi((1.0 + z) / (1.0 - z), m);
            qf = (rm - 1.0) / h0;
        }
    }
    std::vector<double> den(static_cast<std::size_t>(p.n) + 1);
    for (int i = 0; i <= p.n; ++i) {
        den[static_cast<std::size_t>(i)] = 1.0 + qf * cs.at(i);
        if (den[static_cast<std::size_t>(i)] == 0.0) throw MapPoleError(i);
    }
    Vec y(static_cast<std::size_t>(p.n));
    for (int i = 1; i <= p.n; ++i)
        comp(y, i) = comp(x0, i) * rm /
                     (den[static_cast<std::size_t>(i) - 1] * den[static_cast<std::size_t>(i)]);
    return y;
}

inline Vec rk4_step(const std::function<Vec(const Vec&)>& field, const Vec& x, double h) {
    const auto axpy = [](const Vec& base, double c, const Vec& d) {
        Vec r = base;
        for (std::size_t i = 0; i < r.size(); ++i) r[i] += c * d[i];
        return r;
    };
    const Vec k1 = field(x);
    const Vec k2 = field(axpy(x, 0.5 * h, k1));
    const Vec k3 = field(axpy(x, 0.5 * h, k2));
    const Vec k4 = field(axpy(x, h, k3));
    Vec y = x;
    for (std::size_t i = 0; i < y.size(); ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return y;
}

inline Vec rk4_step(const SystemParams& p, const Vec& x, double h) {
    return rk4_step([&p](const Vec& s) { return vector_field(p, s); }, x, h);
}

enum class Stepper { Exact, KahanClosed, KahanGeneric, Rk4 };

// Row m holds the state after m steps together with the value of every
// requested integral there. All row arrays stay the same length: on a pole or
// blowup the offending step is logged and the record ends at the last good
// row.
struct TrajectoryRecord {
    std::vector<double> times; // NaN where no exact time is attached
    std::vector<Vec> states;
    std::vector<std::string> integral_names;
    std::vector<Vec> integral_values; // one row per state
    Vec drift;                        // max_m |I_m - I_0| / (1 + |I_0|) per integral
    struct Event {
        long step;
        std::string message;
    };
    std::vector<Event> events;
    bool completed = true;
};

namespace detail {

inline void finish_drift(TrajectoryRecord& rec) {
    const std::size_t k = rec.integral_names.size();
    rec.drift.assign(k, 0.0);
    if (rec.integral_values.empty()) return;
    const Vec& first = rec.integral_values.front();
    for (const Vec& row : rec.integral_values)
        for (std::size_t c = 0; c < k; ++c)
            rec.drift[c] = std::max(rec.drift[c],
                                    std::abs(row[c] - first[c]) / (1.0 + std::abs(first[c])));
}

// Appends one row; false when an integral has a pole at x (event logged).
inline bool push_row(TrajectoryRecord& rec, const SystemParams& p,
                     const std::vector<Integral>& set, long step, double t, const Vec& x) {
    Vec row(set.size());
    for (std::size_t c = 0; c < set.size(); ++c) {
        try {
            row[c] = eval(p, set[c], x);
        } catch (const Error& e) {
            rec.events.push_back({step, set[c].name() + std::string(": ") + e.what()});
            return false;
        }
    }
    rec.times.push_back(t);
    rec.states.push_back(x);
    rec.integral_values.push_back(std::move(row));
    return true;
}

} // namespace detail

// Steps m times from x0. The meaning of `step` depends on the stepper: a time
// increment for Exact and Rk4, the map parameter eps for KahanClosed, and the
// Kahan step h (= 2 eps) for KahanGeneric. Kahan rows carry the exact time
// m * t_eps when |eps H| < 1 and NaN otherwise.
inline TrajectoryRecord trajectory(const SystemParams& p, Stepper st, const Vec& x0, double step,
                                   long m, const std::vector<Integral>& set) {
    if (m < 0) throw OutOfRange("step count must be nonnegative, got " + std::to_string(m));
    check_dimension(p, x0);
    TrajectoryRecord rec;
    for (const Integral& d : set) rec.integral_names.push_back(d.name());

    double dt = step; // time per step, for the time axis only
    if (st == Stepper::KahanClosed || st == Stepper::KahanGeneric) {
        const double eps = st == Stepper::KahanClosed ? step : 0.5 * step;
        const double h0 = cumulative_sums(p, x0).h;
        try {
            dt = step_to_time(h0, eps);
        } catch (const OutOfRange&) {
            dt = std::numeric_limits<double>::quiet_NaN();
        }
    }

    QuadraticField field;
    if (st == Stepper::KahanGeneric) field = lv_field(p);

    Vec x = x0;
    if (!detail::push_row(rec, p, set, 0, 0.0, x)) {
        rec.completed = false;
        detail::finish_drift(rec);
        return rec;
    }
    for (long k = 1; k <= m; ++k) {
        try {
            switch (st) {
                case Stepper::Exact: x = exact_flow(p, x, step); break;
                case Stepper::KahanClosed: x = kahan_step_closed(p, x, step); break;
                case Stepper::KahanGeneric: x = kahan_step_generic(field, x, step); break;
                case Stepper::Rk4: x = rk4_step(p, x, step); break;
            }
        } catch (const Error& e) {
            rec.events.push_back({k, e.what()});
            rec.completed = false;
            break;
        }
        if (!detail::push_row(rec, p, set, k, dt * static_cast<double>(k), x)) {
            rec.completed = false;
            break;
        }
    }
    detail::finish_drift(rec);
    return rec;
}

// Row m via the closed iterate formula straight from x0 (no composition).
inline TrajectoryRecord iterate_trajectory(const SystemParams& p, const Vec& x0, double eps,
                                           long m, const std::vector<Integral>& set) {
    if (m < 0) throw OutOfRange("step count must be nonnegative, got " + std::to_string(m));
    check_dimension(p, x0);
    TrajectoryRecord rec;
    for (const Integral& d : set) rec.integral_names.push_back(d.name());
    const double h0 = cumulative_sums(p, x0).h;
    double dt;
    try {
        dt = step_to_time(h0, eps);
    } catch (const OutOfRange&) {
        dt = std::numeric_limits<double>::quiet_NaN();
    }
    for (long k = 0; k <= m; ++k) {
        Vec x;
        try {
            x = kahan_iterates_closed(p, x0, eps, k);
        } catch (const Error& e) {
            rec.events.push_back({k, e.what()});
            rec.completed = false;
            break;
        }
        if (!detail::push_row(rec, p, set, k, dt * static_cast<double>(k), x)) {
            rec.completed = false;
            break;
        }
    }
    detail::finish_drift(rec);
    return rec;
}

} // namespace glv
