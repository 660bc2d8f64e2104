// eitscan CLI: synthesizes Robin-to-Dirichlet gap operators on the unit disk
// and runs the LSM / RFM sampling reconstructions against them.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure, 4 I/O.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eitscan/config.hpp"
#include "eitscan/runner.hpp"
#include "eitscan/verify/direct_ttls.hpp"
#include "eitscan/verify/fd_solver.hpp"
#include "eitscan/verify/symbolic_modes.hpp"

namespace {

struct CliOptions {
    std::string config_path;
    std::string out_dir;
    bool quiet = false;
    bool have_seed = false;
    std::uint64_t seed = 0;
    std::vector<std::string> overrides;
};

eitscan::ExperimentConfig load_config(const CliOptions& opt) {
    eitscan::ExperimentConfig cfg;
    if (!opt.config_path.empty())
        cfg = eitscan::parse_config(eitscan::read_file(opt.config_path));
    for (const std::string& kv : opt.overrides) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
            throw eitscan::config_error("--set expects KEY=VALUE, got '" + kv + "'");
        eitscan::apply_config_entry(cfg, kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opt.have_seed) cfg.seed = opt.seed;
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    return cfg;
}

void report(const CliOptions& opt, const eitscan::RunManifest& m) {
    if (opt.quiet) return;
    std::printf("%s: wrote %zu artifact(s) + manifest.json to %s (%.2fs)\n", m.command.c_str(),
                m.artifacts.size(), m.config.output_dir.c_str(), m.wall_clock_seconds);
}

// Small oracle cross-checks; the only production entry point to the
// verification module.
int self_check() {
    using namespace eitscan;
    int failures = 0;
    const auto check = [&failures](const char* name, bool ok) {
        std::printf("  [%s] %s\n", ok ? "ok" : "FAIL", name);
        if (!ok) ++failures;
    };

    const MediumConfig medium{0.4, 1.0, 1.0, 1.0};

    double mode_err = 0.0;
    for (int n : {0, 1, 3, 7, 10}) {
        const ModeCoefficients a = solve_mode(n, medium);
        const ModeCoefficients b = verify::symbolic_mode_solve(n, medium);
        mode_err = std::max({mode_err, std::abs(a.alpha - b.alpha), std::abs(a.beta - b.beta),
                             std::abs(a.omega - b.omega)});
    }
    check("mode closed form vs symbolic Cramer solve (1e-13)", mode_err < 1e-13);

    FourierData f(2);
    f.at(2) = 0.5;
    f.at(-2) = 0.5;  // f = cos(2 theta)
    const verify::PolarMesh mesh{64, 128, true};
    const std::vector<double> trace = verify::fd_forward_solve(medium, f, mesh);
    const ModeCoefficients m2 = solve_mode(2, medium);
    double fd_err = 0.0, norm = 0.0;
    for (int j = 0; j < mesh.n_theta; ++j) {
        const double th = kTwoPi * j / mesh.n_theta;
        const double exact = (m2.alpha + m2.beta) * std::cos(2.0 * th);
        fd_err += (trace[static_cast<std::size_t>(j)] - exact) * (trace[static_cast<std::size_t>(j)] - exact);
        norm += exact * exact;
    }
    check("finite-difference trace vs mode solution (64x128, 1e-2)",
          std::sqrt(fd_err / norm) < 1e-2);

    std::mt19937_64 gen(11);
    Eigen::MatrixXd a(8, 8);
    Eigen::VectorXd b(8);
    for (int i = 0; i < 8; ++i) {
        b(i) = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
        for (int j = 0; j < 8; ++j)
            a(i, j) = 2.0 * (static_cast<double>(gen() >> 11) * 0x1.0p-53) - 1.0;
    }
    const Eigen::VectorXd x1 = ttls_solve(a, b, 3);
    const Eigen::VectorXd x2 = verify::direct_ttls(a, b, 3);
    check("ttls closed form vs reference solver (1e-10)", (x1 - x2).norm() < 1e-10 * x2.norm());

    std::printf(failures == 0 ? "self-check passed\n" : "self-check FAILED\n");
    return failures == 0 ? 0 : 3;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robin-interface EIT reconstruction on the unit disk (LSM / RFM)"};
    app.require_subcommand(0, 1);

    CliOptions opt;
    bool do_self_check = false;
    app.add_option("--config", opt.config_path, "configuration file (key = value lines)");
    app.add_option("--seed", opt.seed, "override the RNG seed")->each([&opt](const std::string&) {
        opt.have_seed = true;
    });
    app.add_option("--out", opt.out_dir, "output directory");
    app.add_flag("--quiet", opt.quiet, "suppress progress output");
    app.add_option("--set", opt.overrides, "override a config key (KEY=VALUE, repeatable)");
    app.add_flag("--self-check", do_self_check, "run the oracle cross-checks and exit");

    CLI::App* cmd_forward = app.add_subcommand("forward", "synthesize the gap operator and export it");
    CLI::App* cmd_greens = app.add_subcommand("greens", "export the Robin Green's boundary trace for one point");
    CLI::App* cmd_image = app.add_subcommand("image", "compute normalized LSM/RFM indicator maps and metrics");
    CLI::App* cmd_picard = app.add_subcommand("picard", "export Picard diagnostics for the configured points");
    CLI::App* cmd_sweep = app.add_subcommand("sweep", "rerun imaging along one parameter axis");

    // let --config / --seed / --out / --quiet / --set appear after the
    // subcommand name as well
    for (CLI::App* sub : {cmd_forward, cmd_greens, cmd_image, cmd_picard, cmd_sweep})
        sub->fallthrough();

    std::string sweep_axis = "delta";
    std::vector<double> sweep_values;
    cmd_sweep->add_option("--axis", sweep_axis, "sweep axis: delta, alpha, or rho");
    cmd_sweep->add_option("--values", sweep_values, "axis values")->delimiter(',');

    CLI11_PARSE(app, argc, argv);

    try {
        if (do_self_check) return self_check();
        if (app.get_subcommands().empty()) {
            std::cerr << app.help();
            return 2;
        }
        const eitscan::ExperimentConfig cfg = load_config(opt);
        if (cmd_forward->parsed()) {
            std::string warning;
            const auto m = eitscan::run_forward(cfg, &warning);
            if (!warning.empty() && !opt.quiet) std::fprintf(stderr, "warning: %s\n", warning.c_str());
            report(opt, m);
        } else if (cmd_greens->parsed()) {
            report(opt, eitscan::run_greens(cfg));
        } else if (cmd_image->parsed()) {
            report(opt, eitscan::run_image(cfg));
        } else if (cmd_picard->parsed()) {
            report(opt, eitscan::run_picard(cfg, cfg.picard_points));
        } else if (cmd_sweep->parsed()) {
            report(opt, eitscan::run_sweep(cfg, eitscan::parse_sweep_axis(sweep_axis), sweep_values));
        }
        return 0;
    } catch (const eitscan::config_error& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const eitscan::io_error& e) {
        std::fprintf(stderr, "i/o error: %s\n", e.what());
        return 4;
    } catch (const eitscan::numerical_error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}
