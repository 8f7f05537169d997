// dualsat: command-line front end for the dual-satellite simulator.
//
//   dualsat run      [--config PATH] [--out DIR] [--seed U64] [--trials N] [--workers N]
//   dualsat sweep    --axis snr|pool [same flags as run]
//   dualsat validate [--solver-tol X] [--bessel-coeff X] [--seed U64]
//
// Exit status: 0 success, 1 configuration error, 2 numerical failure,
// 3 validation failure.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dualsat/config.hpp"
#include "dualsat/csv.hpp"
#include "dualsat/montecarlo.hpp"
#include "dualsat/power_alloc.hpp"
#include "dualsat/precoding.hpp"
#include "dualsat/validation.hpp"

namespace fs = std::filesystem;
using namespace dualsat;

namespace {

constexpr int kExitConfig = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitValidation = 3;

struct RunFlags {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    int workers = 1;
};

void add_run_flags(CLI::App* cmd, RunFlags& f)
{
    cmd->add_option("--config", f.config_path, "experiment configuration (key = value)")->check(CLI::ExistingFile);
    cmd->add_option("--out", f.out_dir, "output directory, created if missing");
    cmd->add_option("--seed", f.seed, "override experiment.master_seed");
    cmd->add_option("--trials", f.trials, "override experiment.trials");
    cmd->add_option("--workers", f.workers, "worker threads (output does not depend on it)")->check(CLI::PositiveNumber);
}

ExperimentConfig resolve(const RunFlags& f)
{
    ExperimentConfig cfg = f.config_path.empty() ? ExperimentConfig{} : load_config(f.config_path);
    if (f.seed)
        cfg.master_seed = *f.seed;
    if (f.trials)
        cfg.trials = *f.trials;
    cfg.workers = f.workers;
    cfg.validate();
    return cfg;
}

fs::path prepare_out(const std::string& dir)
{
    const fs::path out(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (!fs::is_directory(out))
        throw ConfigError("--out", "cannot create output directory " + dir);
    return out;
}

int cmd_run(const RunFlags& f)
{
    const ExperimentConfig cfg = resolve(f);
    const fs::path out = prepare_out(f.out_dir);
    const ExperimentRun run = run_experiment_detailed(cfg);
    write_text(out / "summary.csv", summary_csv(cfg, run.summary));
    write_text(out / "trials.csv", trials_csv(cfg, run.trials));
    std::cout << summary_table(run.summary);
    std::cout << run.summary.discarded_trials << " of " << run.summary.total_trials << " trials discarded\n";
    return 0;
}

int cmd_sweep(const RunFlags& f, const std::string& axis)
{
    const ExperimentConfig cfg = resolve(f);
    const fs::path out = prepare_out(f.out_dir);
    const ExperimentRun run = axis == "snr" ? sweep_snr(cfg) : sweep_pool_size(cfg, cfg.pool_sweep);
    write_text(out / ("sweep_" + axis + ".csv"), sweep_csv(cfg, run.summary));
    std::cout << summary_table(run.summary);
    return 0;
}

int cmd_validate(std::optional<double> solver_tol, double bessel_coeff, std::optional<std::uint64_t> seed)
{
    ValidationOptions opt;
    opt.solver_tol = solver_tol;
    opt.u_coeff = bessel_coeff;
    if (seed)
        opt.seed = *seed;
    bool ok = true;
    for (const CheckResult& r : run_validation(opt)) {
        std::cout << (r.passed ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : kExitValidation;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Dual multibeam satellite forward-link simulator"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    RunFlags run_flags, sweep_flags;
    auto* run = app.add_subcommand("run", "Monte Carlo experiment at the configured SNR points");
    add_run_flags(run, run_flags);

    std::string axis;
    auto* sweep = app.add_subcommand("sweep", "sum rate against SNR or user pool size");
    add_run_flags(sweep, sweep_flags);
    sweep->add_option("--axis", axis, "snr or pool")->required()->check(CLI::IsMember({"snr", "pool"}));

    std::optional<double> solver_tol;
    double bessel_coeff = kBesselBeamCoeff;
    std::optional<std::uint64_t> validate_seed;
    auto* validate = app.add_subcommand("validate", "property and oracle checks");
    validate->add_option("--solver-tol", solver_tol, "power-allocation tolerance to validate with");
    validate->add_option("--bessel-coeff", bessel_coeff, "beam-pattern constant to validate with");
    validate->add_option("--seed", validate_seed, "seed of the random instances");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitConfig;
    }

    try {
        if (*run)
            return cmd_run(run_flags);
        if (*sweep)
            return cmd_sweep(sweep_flags, axis);
        return cmd_validate(solver_tol, bessel_coeff, validate_seed);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const SolverFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const SingularChannelError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ExperimentFailure& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
