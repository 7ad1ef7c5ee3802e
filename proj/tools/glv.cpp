// Command-line front end. Subcommands:
//
//   flow      trajectory of the exact solution (or rk4 when the config says so)
//   kahan     trajectory of the Kahan map (closed form, or generic via config)
//   iterates  states straight from the closed m-th iterate formula
//   verify    structural checks for the configured system, JSON report
//   compare   Kahan vs RK4 integral drift at matched cost
//
// Exit codes: 0 success, 1 verification/comparison failure, 2 domain event
// (pole or blowup), 3 config or usage error.

#include <cstdio>
#include <filesystem>
#include <string>

#include <CLI11.hpp>

#include "glv/glv.hpp"

namespace {

struct CommonFlags {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool quiet = false;
};

void add_common(CLI::App* cmd, CommonFlags& fl) {
    cmd->add_option("--config", fl.config_path, "experiment config (JSON)")->required();
    cmd->add_option("--seed", fl.seed, "override the config seed")->each([&fl](const std::string&) {
        fl.seed_set = true;
    });
    cmd->add_option("--out", fl.out_dir, "directory prefixed to relative output paths");
    cmd->add_flag("--quiet", fl.quiet, "suppress progress output");
}

std::string placed(const std::string& out_dir, const std::string& path) {
    if (out_dir.empty() || std::filesystem::path(path).is_absolute()) return path;
    return (std::filesystem::path(out_dir) / path).string();
}

glv::ExperimentConfig load(const CommonFlags& fl) {
    glv::ExperimentConfig cfg = glv::load_config(fl.config_path);
    if (fl.seed_set) cfg.seed = fl.seed;
    cfg.trajectory_path = placed(fl.out_dir, cfg.trajectory_path);
    cfg.report_path = placed(fl.out_dir, cfg.report_path);
    return cfg;
}

// Subcommands pin the mode family; the config picks the variant within it.
void force_mode(glv::ExperimentConfig& cfg, std::initializer_list<const char*> allowed,
                const char* fallback) {
    if (cfg.mode.empty()) {
        cfg.mode = fallback;
        return;
    }
    for (const char* m : allowed)
        if (cfg.mode == m) return;
    throw glv::ConfigError("mode", "'" + cfg.mode + "' does not belong to this subcommand");
}

int run_trajectory_cmd(const CommonFlags& fl, std::initializer_list<const char*> allowed,
                       const char* fallback) {
    glv::ExperimentConfig cfg = load(fl);
    force_mode(cfg, allowed, fallback);
    const glv::RunOutcome out = glv::run_trajectory(cfg);
    glv::write_text_file(cfg.trajectory_path, glv::trajectory_csv(out.record, cfg.system.n));
    glv::write_text_file(cfg.report_path, out.report.dump(2) + "\n");
    if (!fl.quiet) {
        for (const auto& e : out.record.events)
            std::printf("event at step %ld: %s\n", e.step, e.message.c_str());
        double worst = 0.0;
        for (double d : out.record.drift) worst = std::max(worst, d);
        std::printf("%s: %zu states, worst integral drift %.3e\n", cfg.mode.c_str(),
                    out.record.states.size(), worst);
        std::printf("wrote %s and %s\n", cfg.trajectory_path.c_str(), cfg.report_path.c_str());
    }
    return out.exit_code;
}

int run_verify_cmd(const CommonFlags& fl) {
    const glv::ExperimentConfig cfg = load(fl);
    const glv::VerificationReport rep = glv::run_verify(cfg.system, cfg.seed, cfg.tol);
    glv::write_text_file(cfg.report_path, glv::verify_report_json(cfg, rep).dump(2) + "\n");
    if (!fl.quiet) {
        for (const auto& c : rep.checks)
            std::printf("[%s] %-22s worst %.3e over %d points\n", c.pass ? "PASS" : "FAIL",
                        c.check.c_str(), c.worst_residual, c.points);
        std::printf("wrote %s\n", cfg.report_path.c_str());
    }
    return rep.all_pass() ? 0 : 1;
}

int run_compare_cmd(const CommonFlags& fl) {
    const glv::ExperimentConfig cfg = load(fl);
    const glv::RunOutcome out = glv::run_compare(cfg);
    glv::write_text_file(cfg.report_path, out.report.dump(2) + "\n");
    if (!fl.quiet) {
        std::printf("kahan max drift %.3e\n", out.report["kahan"]["max_drift"].get<double>());
        for (const auto& r : out.report["rk4"])
            std::printf("rk4 h=%.6e max drift %.3e\n", r["h"].get<double>(),
                        r["max_drift"].get<double>());
        std::printf("wrote %s\n", cfg.report_path.c_str());
    }
    return out.exit_code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"antisymmetric Lotka-Volterra flows, Kahan maps, and their first integrals"};
    app.require_subcommand(1);

    CommonFlags fl;
    CLI::App* flow = app.add_subcommand("flow", "exact-solution (or rk4) trajectory");
    CLI::App* kahan = app.add_subcommand("kahan", "Kahan map trajectory");
    CLI::App* iterates = app.add_subcommand("iterates", "closed-form iterate trajectory");
    CLI::App* verify = app.add_subcommand("verify", "structural checks, JSON report");
    CLI::App* compare = app.add_subcommand("compare", "Kahan vs RK4 drift at matched cost");
    for (CLI::App* cmd : {flow, kahan, iterates, verify, compare}) add_common(cmd, fl);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    }

    try {
        if (flow->parsed()) return run_trajectory_cmd(fl, {"flow", "rk4"}, "flow");
        if (kahan->parsed()) return run_trajectory_cmd(fl, {"kahan", "kahan-generic"}, "kahan");
        if (iterates->parsed()) return run_trajectory_cmd(fl, {"closed-iterates"}, "closed-iterates");
        if (verify->parsed()) return run_verify_cmd(fl);
        if (compare->parsed()) return run_compare_cmd(fl);
    } catch (const glv::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const glv::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const glv::BlowupError& e) {
        std::fprintf(stderr, "domain event: %s\n", e.what());
        return 2;
    } catch (const glv::MapPoleError& e) {
        std::fprintf(stderr, "domain event: %s\n", e.what());
        return 2;
    } catch (const glv::PoleError& e) {
        std::fprintf(stderr, "domain event: %s\n", e.what());
        return 2;
    } catch (const glv::OutOfRange& e) {
        std::fprintf(stderr, "domain event: %s\n", e.what());
        return 2;
    } catch (const glv::SingularSystem& e) {
        std::fprintf(stderr, "domain event: %s\n", e.what());
        return 2;
    } catch (const glv::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 3;
}
