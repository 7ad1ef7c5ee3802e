#pragma once

// Config-driven workflows: load an experiment description from a JSON file,
// run a trajectory / verification / comparison, and write the outputs.
//
// Output rules that keep runs byte-reproducible: CSV cells use shortest
// round-trip formatting (std::to_chars), JSON is serialized with sorted keys
// and the same double formatting, and every random draw comes from the seeded
// generator in rng.hpp. Two runs with identical config and seed produce
// identical bytes.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "glv/dynamics.hpp"
#include "glv/errors.hpp"
#include "glv/integrals.hpp"
#include "glv/system.hpp"
#include "glv/verify.hpp"

namespace glv {

inline std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

struct ExperimentConfig {
    SystemParams system;

    // Initial state: either given in full or sampled from [lo, hi)^n.
    bool x0_explicit = false;
    Vec x0;
    bool x0_has_seed = false;
    std::uint64_t x0_seed = 0;
    double x0_lo = 0.5, x0_hi = 2.0;

    std::string mode; // flow | kahan | kahan-generic | rk4 | closed-iterates; may be empty
    bool has_step = false;
    double step = 0.0; // time step for flow/rk4, eps for kahan/closed-iterates, h for kahan-generic
    bool has_steps = false;
    long steps = 0;

    std::string integral_selection = "all"; // liouville | super | all | explicit
    std::vector<std::string> explicit_integrals;

    Tolerances tol;
    std::uint64_t seed = 0;
    std::string trajectory_path = "trajectory.csv";
    std::string report_path = "report.json";
};

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, const char* where,
                           std::initializer_list<const char*> known) {
    for (const auto& item : obj.items()) {
        bool ok = false;
        for (const char* k : known)
            if (item.key() == k) ok = true;
        if (!ok) throw ConfigError(std::string(where) + "." + item.key(), "unknown field");
    }
}

inline double require_number(const json& v, const std::string& field) {
    if (!v.is_number()) throw ConfigError(field, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(field, "must be finite");
    return d;
}

// Parsed documents store nonnegative literals as unsigned, but json built in
// code stores int literals signed, so both storage classes are accepted.
inline std::uint64_t require_seed(const json& v, const std::string& field) {
    if (v.is_number_unsigned()) return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::uint64_t>(v.get<long long>());
    throw ConfigError(field, "expected an unsigned integer");
}

inline Vec number_array(const json& v, const std::string& field) {
    if (!v.is_array() || v.empty()) throw ConfigError(field, "expected a nonempty array of numbers");
    Vec out;
    for (const auto& e : v) out.push_back(require_number(e, field));
    return out;
}

} // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::json;
    if (!j.is_object()) throw ConfigError("<document>", "expected a JSON object");
    detail::reject_unknown(j, "<config>",
                           {"system", "x0", "mode", "step", "steps", "integrals", "tolerances",
                            "seed", "output"});
    ExperimentConfig cfg;

    if (!j.contains("system") || !j["system"].is_object())
        throw ConfigError("system", "required object with the coefficient vector 'a'");
    const json& sys = j["system"];
    detail::reject_unknown(sys, "system", {"a", "n"});
    if (!sys.contains("a")) throw ConfigError("system.a", "required");
    const Vec a = detail::number_array(sys["a"], "system.a");
    try {
        cfg.system = build_system(a);
    } catch (const Error& e) {
        throw ConfigError("system.a", e.what());
    }
    if (sys.contains("n")) {
        if (!sys["n"].is_number_integer() || sys["n"].get<long>() != cfg.system.n)
            throw ConfigError("system.n", "must equal the length of 'a'");
    }

    if (j.contains("x0")) {
        const json& x0 = j["x0"];
        if (x0.is_array()) {
            cfg.x0_explicit = true;
            cfg.x0 = detail::number_array(x0, "x0");
            if (static_cast<int>(cfg.x0.size()) != cfg.system.n)
                throw ConfigError("x0", "length must equal the system dimension");
        } else if (x0.is_object()) {
            detail::reject_unknown(x0, "x0", {"seed", "lo", "hi"});
            if (x0.contains("seed")) {
                cfg.x0_has_seed = true;
                cfg.x0_seed = detail::require_seed(x0["seed"], "x0.seed");
            }
            if (x0.contains("lo")) cfg.x0_lo = detail::require_number(x0["lo"], "x0.lo");
            if (x0.contains("hi")) cfg.x0_hi = detail::require_number(x0["hi"], "x0.hi");
            if (!(cfg.x0_lo < cfg.x0_hi)) throw ConfigError("x0.lo", "must be strictly below x0.hi");
        } else {
            throw ConfigError("x0", "expected an array (explicit state) or an object (sampling spec)");
        }
    }

    if (j.contains("mode")) {
        if (!j["mode"].is_string()) throw ConfigError("mode", "expected a string");
        cfg.mode = j["mode"].get<std::string>();
        const bool known = cfg.mode == "flow" || cfg.mode == "kahan" || cfg.mode == "kahan-generic" ||
                           cfg.mode == "rk4" || cfg.mode == "closed-iterates";
        if (!known)
            throw ConfigError("mode", "expected one of flow, kahan, kahan-generic, rk4, closed-iterates");
    }
    if (j.contains("step")) {
        cfg.has_step = true;
        cfg.step = detail::require_number(j["step"], "step");
    }
    if (j.contains("steps")) {
        if (!j["steps"].is_number_integer() || j["steps"].get<long>() < 0)
            throw ConfigError("steps", "expected an integer >= 0");
        cfg.has_steps = true;
        cfg.steps = j["steps"].get<long>();
    }

    if (j.contains("integrals")) {
        const json& sel = j["integrals"];
        if (sel.is_string()) {
            cfg.integral_selection = sel.get<std::string>();
            if (cfg.integral_selection != "liouville" && cfg.integral_selection != "super" &&
                cfg.integral_selection != "all")
                throw ConfigError("integrals", "expected liouville, super, all, or a list of names");
        } else if (sel.is_array()) {
            cfg.integral_selection = "explicit";
            for (const auto& e : sel) {
                if (!e.is_string()) throw ConfigError("integrals", "list entries must be names");
                cfg.explicit_integrals.push_back(e.get<std::string>());
            }
            if (cfg.explicit_integrals.empty()) throw ConfigError("integrals", "list must be nonempty");
        } else {
            throw ConfigError("integrals", "expected liouville, super, all, or a list of names");
        }
    }

    if (j.contains("tolerances")) {
        const json& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances", "expected an object");
        detail::reject_unknown(t, "tolerances", {"identity", "involution", "rank", "fd"});
        const auto pick = [&](const char* name, double& slot) {
            if (!t.contains(name)) return;
            const double v = detail::require_number(t[name], std::string("tolerances.") + name);
            if (v <= 0.0) throw ConfigError(std::string("tolerances.") + name, "must be positive");
            slot = v;
        };
        pick("identity", cfg.tol.identity);
        pick("involution", cfg.tol.involution);
        pick("rank", cfg.tol.rank);
        pick("fd", cfg.tol.fd);
    }

    if (j.contains("seed")) cfg.seed = detail::require_seed(j["seed"], "seed");

    if (j.contains("output")) {
        const json& o = j["output"];
        if (!o.is_object()) throw ConfigError("output", "expected an object");
        detail::reject_unknown(o, "output", {"trajectory", "report"});
        const auto pick = [&](const char* name, std::string& slot) {
            if (!o.contains(name)) return;
            if (!o[name].is_string() || o[name].get<std::string>().empty())
                throw ConfigError(std::string("output.") + name, "expected a nonempty path");
            slot = o[name].get<std::string>();
        };
        pick("trajectory", cfg.trajectory_path);
        pick("report", cfg.report_path);
    }

    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path, "cannot open config");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError("<document>", e.what());
    }
    return parse_config(j);
}

inline Vec resolve_x0(const ExperimentConfig& cfg) {
    if (cfg.x0_explicit) return cfg.x0;
    return random_state(cfg.system.n, cfg.x0_has_seed ? cfg.x0_seed : cfg.seed, cfg.x0_lo, cfg.x0_hi);
}

// Union of the named selections with duplicates removed by name; explicit
// lists are validated against the system up front so a typo is a ConfigError,
// not a mid-run surprise.
inline std::vector<Integral> select_integrals(const ExperimentConfig& cfg) {
    const SystemParams& p = cfg.system;
    std::vector<Integral> out;
    const auto push_unique = [&](const Integral& d) {
        for (const auto& e : out)
            if (e == d) return;
        out.push_back(d);
    };
    if (cfg.integral_selection == "liouville" || cfg.integral_selection == "all")
        for (const auto& d : liouville_set(p)) push_unique(d);
    if (cfg.integral_selection == "super" || cfg.integral_selection == "all")
        for (const auto& d : superintegrable_set(p)) push_unique(d);
    if (cfg.integral_selection == "explicit") {
        Vec probe(static_cast<std::size_t>(p.n));
        for (int i = 1; i <= p.n; ++i) comp(probe, i) = 0.5 + static_cast<double>(i);
        for (const std::string& name : cfg.explicit_integrals) {
            try {
                const Integral d = integral_from_name(name);
                try {
                    eval(p, d, probe); // index/applicability validation
                } catch (const PoleError&) {
                }
                push_unique(d);
            } catch (const Error& e) {
                throw ConfigError("integrals", e.what());
            }
        }
    }
    if (out.empty()) throw ConfigError("integrals", "selection is empty for this system");
    return out;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    const std::filesystem::path fp(path);
    if (fp.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(fp.parent_path(), ec);
        if (ec) throw IoError(path, "cannot create parent directory: " + ec.message());
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError(path, "cannot open for writing");
    out << content;
    out.flush();
    if (!out) throw IoError(path, "write failed");
}

inline std::string trajectory_csv(const TrajectoryRecord& rec, int n) {
    std::string s = "step,t";
    for (int i = 1; i <= n; ++i) s += ",x" + std::to_string(i);
    for (const auto& name : rec.integral_names) s += "," + name;
    s += "\n";
    for (std::size_t row = 0; row < rec.states.size(); ++row) {
        s += std::to_string(row) + "," + format_double(rec.times[row]);
        for (double v : rec.states[row]) s += "," + format_double(v);
        for (double v : rec.integral_values[row]) s += "," + format_double(v);
        s += "\n";
    }
    return s;
}

struct RunOutcome {
    TrajectoryRecord record;
    nlohmann::json report;
    int exit_code = 0;
};

// One trajectory under cfg.mode; writes nothing (the CLI owns file placement).
inline RunOutcome run_trajectory(const ExperimentConfig& cfg) {
    if (cfg.mode.empty()) throw ConfigError("mode", "required for a trajectory run");
    if (!cfg.has_step) throw ConfigError("step", "required for a trajectory run");
    if (!cfg.has_steps) throw ConfigError("steps", "required for a trajectory run");
    const Vec x0 = resolve_x0(cfg);
    const std::vector<Integral> set = select_integrals(cfg);

    RunOutcome out;
    if (cfg.mode == "closed-iterates") {
        out.record = iterate_trajectory(cfg.system, x0, cfg.step, cfg.steps, set);
    } else {
        Stepper st = Stepper::Exact;
        if (cfg.mode == "kahan") st = Stepper::KahanClosed;
        else if (cfg.mode == "kahan-generic") st = Stepper::KahanGeneric;
        else if (cfg.mode == "rk4") st = Stepper::Rk4;
        out.record = trajectory(cfg.system, st, x0, cfg.step, cfg.steps, set);
    }

    nlohmann::json drift = nlohmann::json::object();
    for (std::size_t i = 0; i < out.record.integral_names.size(); ++i)
        drift[out.record.integral_names[i]] = out.record.drift[i];
    nlohmann::json events = nlohmann::json::array();
    for (const auto& e : out.record.events)
        events.push_back({{"step", e.step}, {"message", e.message}});
    out.report = {{"mode", cfg.mode},
                  {"seed", cfg.seed},
                  {"x0", x0},
                  {"steps_requested", cfg.steps},
                  {"steps_completed", static_cast<long>(out.record.states.size()) - 1},
                  {"drift", drift},
                  {"events", events},
                  {"pass", out.record.completed}};
    out.exit_code = out.record.completed ? 0 : 2;
    return out;
}

inline nlohmann::json verify_report_json(const ExperimentConfig& cfg, const VerificationReport& rep) {
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"check", c.check},
                          {"points", c.points},
                          {"worst_residual", c.worst_residual},
                          {"pass", c.pass},
                          {"seed", c.seed}});
    return {{"system", {{"a", cfg.system.a}, {"n", cfg.system.n}}},
            {"seed", cfg.seed},
            {"checks", checks},
            {"pass", rep.all_pass()}};
}

// Kahan vs RK4 at matched cost: RK4 gets the step the Kahan map actually
// advances (t_eps), then half and quarter of it with proportionally more
// steps, so all runs cover the same time span. Kahan drift should sit at
// rounding level; RK4 drift should be real and shrink like h^4.
inline RunOutcome run_compare(const ExperimentConfig& cfg) {
    if (!cfg.has_step) throw ConfigError("step", "required for a compare run");
    if (!cfg.has_steps || cfg.steps < 1) throw ConfigError("steps", "required (>= 1) for a compare run");
    const Vec x0 = resolve_x0(cfg);
    const std::vector<Integral> set = select_integrals(cfg);
    const double eps = cfg.step;
    const double t_eps = step_to_time(cumulative_sums(cfg.system, x0).h, eps);

    RunOutcome out;
    out.record = trajectory(cfg.system, Stepper::KahanClosed, x0, eps, cfg.steps, set);
    double kahan_drift = 0.0;
    for (double d : out.record.drift) kahan_drift = std::max(kahan_drift, d);

    nlohmann::json rk4_runs = nlohmann::json::array();
    std::vector<double> rk4_drift;
    for (const long div : {1L, 2L, 4L}) {
        const double h = t_eps / static_cast<double>(div);
        const TrajectoryRecord r =
            trajectory(cfg.system, Stepper::Rk4, x0, h, cfg.steps * div, set);
        double worst = 0.0;
        for (double d : r.drift) worst = std::max(worst, d);
        rk4_drift.push_back(worst);
        rk4_runs.push_back({{"h", h}, {"steps", cfg.steps * div}, {"max_drift", worst}});
    }

    nlohmann::json orders = nlohmann::json::array();
    bool orders_ok = true;
    for (std::size_t k = 0; k + 1 < rk4_drift.size(); ++k) {
        if (rk4_drift[k] <= 0.0 || rk4_drift[k + 1] <= 0.0) {
            orders_ok = false;
            orders.push_back(nullptr);
            continue;
        }
        const double ord = std::log2(rk4_drift[k] / rk4_drift[k + 1]);
        orders.push_back(ord);
        // h^4 within a factor of two on the drift ratio: 8 <= ratio <= 32.
        if (ord < 3.0 || ord > 5.0) orders_ok = false;
    }
    const bool pass = out.record.completed && kahan_drift <= cfg.tol.identity && orders_ok;
    out.report = {{"x0", x0},
                  {"seed", cfg.seed},
                  {"kahan", {{"eps", eps}, {"steps", cfg.steps}, {"max_drift", kahan_drift}, {"t_eps", t_eps}}},
                  {"rk4", rk4_runs},
                  {"orders", orders},
                  {"pass", pass}};
    out.exit_code = pass ? 0 : 1;
    return out;
}

} // namespace glv
