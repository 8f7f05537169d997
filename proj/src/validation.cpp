#include "dualsat/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "dualsat/csv.hpp"
#include "dualsat/evaluation.hpp"
#include "dualsat/montecarlo.hpp"
#include "dualsat/power_alloc.hpp"
#include "dualsat/precoding.hpp"
#include "dualsat/reference.hpp"
#include "dualsat/rng.hpp"
#include "dualsat/scheduling.hpp"

namespace dualsat {

namespace {

std::string fmt(const char* spec, double x)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

BeamPattern<double> default_pattern(const ValidationOptions& opt)
{
    ExperimentConfig cfg;
    cfg.pattern.u_coeff = opt.u_coeff;
    return make_system(cfg).pattern;
}

PowerAllocation<double> run_solver(const Eigen::MatrixXd& load, const Eigen::VectorXd& budget,
                                   const ValidationOptions& opt)
{
    if (!opt.solver_tol)
        return solve_pac(load, budget);
    PacOptions o;
    o.tol = *opt.solver_tol;
    o.kkt_tol = *opt.solver_tol;
    return detail::solve_pac_core<double>(load, budget, o);
}

// Random ZF load with per-antenna budgets giving powers of order `scale`.
void random_pac_instance(Rng& rng, Eigen::Index users, Eigen::Index antennas, Eigen::MatrixXd& load,
                         Eigen::VectorXd& budget)
{
    for (;;) {
        Eigen::MatrixXd h(users, antennas);
        for (Eigen::Index i = 0; i < users; ++i)
            for (Eigen::Index j = 0; j < antennas; ++j)
                h(i, j) = 0.1 + rng.uniform();
        try {
            load = antenna_load(zf_precoder(h));
        } catch (const SingularChannelError&) {
            continue;
        }
        const double scale = std::pow(10.0, -2.0 + 3.0 * rng.uniform());
        budget.resize(antennas);
        for (Eigen::Index j = 0; j < antennas; ++j)
            budget(j) = scale * load.row(j).sum() * (0.5 + rng.uniform());
        return;
    }
}

}  // namespace

CheckResult check_beam_boresight(const ValidationOptions& opt)
{
    const auto pattern = default_pattern(opt);
    const double g0 = beam_gain(pattern, 0.0);
    return {"beam gain at boresight equals G_max", g0 == pattern.g_max,
            "g(0)/G_max = " + fmt("%.17g", g0 / pattern.g_max)};
}

CheckResult check_half_power(const ValidationOptions& opt)
{
    const auto pattern = default_pattern(opt);
    const double ratio = beam_gain(pattern, pattern.theta_3db) / pattern.g_max;
    return {"beam gain at theta_3dB is half power within 1%", std::abs(ratio - 0.5) <= 0.005,
            "g(theta_3dB)/G_max = " + fmt("%.6f", ratio)};
}

CheckResult check_boresight_snr(const ValidationOptions&)
{
    const LinkBudget budget;
    const double snr = budget.boresight_snr_db();
    return {"boresight SNR is 21 dB within 0.1 dB", std::abs(snr - 21.0) <= 0.1, "SNR = " + fmt("%.4f", snr) + " dB"};
}

CheckResult check_zf_residuals(const ValidationOptions& opt)
{
    Rng rng(mix_seed(opt.seed, 1));
    double worst = 0.0;
    int failed = 0;
    for (int i = 0; i < opt.zf_instances; ++i) {
        const auto n = static_cast<Eigen::Index>(1 + rng.below(14));
        const auto s = static_cast<Eigen::Index>(1 + rng.below(static_cast<std::uint64_t>(n)));
        Eigen::MatrixXd h(s, n);
        for (Eigen::Index r = 0; r < s; ++r)
            for (Eigen::Index c = 0; c < n; ++c)
                h(r, c) = 2.0 * rng.uniform() - 1.0;
        try {
            const Eigen::MatrixXd w = zf_precoder(h);
            const double res = (h * w - Eigen::MatrixXd::Identity(s, s)).cwiseAbs().maxCoeff();
            worst = std::max(worst, res);
            if (!(res <= 1e-8))
                ++failed;
        } catch (const SingularChannelError&) {
        }
    }
    return {"ZF residual ||HW - I||_inf <= 1e-8", failed == 0,
            std::to_string(opt.zf_instances) + " channels, worst " + fmt("%.3g", worst)};
}

CheckResult check_pac_grid(const ValidationOptions& opt)
{
    Rng rng(mix_seed(opt.seed, 2));
    double worst = 0.0;
    int failed = 0;
    for (int i = 0; i < opt.pac_grid_instances; ++i) {
        const auto users = static_cast<Eigen::Index>(1 + rng.below(3));
        const auto antennas = users + static_cast<Eigen::Index>(rng.below(5));
        Eigen::MatrixXd load;
        Eigen::VectorXd budget;
        random_pac_instance(rng, users, antennas, load, budget);
        const double oracle = pac_grid_optimum(load, budget);
        double got = -std::numeric_limits<double>::infinity();
        try {
            got = run_solver(load, budget, opt).objective;
        } catch (const SolverFailure&) {
        }
        const double err = std::abs(got - oracle);
        worst = std::max(worst, err);
        if (!(err <= 1e-2))
            ++failed;
    }
    return {"power allocation matches the grid-search optimum within 1e-2", failed == 0,
            std::to_string(opt.pac_grid_instances) + " instances, " + std::to_string(failed) + " off, worst "
                + fmt("%.3g", worst)};
}

CheckResult check_pac_kkt(const ValidationOptions& opt)
{
    ExperimentConfig cfg;
    const SystemModel sys = make_system(cfg);
    const int n = cfg.geometry.beams_per_satellite;
    Rng rng(mix_seed(opt.seed, 3));
    double worst_stat = 0.0, worst_cs = 0.0, worst_inf = 0.0;
    int failed = 0;
    int done = 0;
    for (std::uint64_t attempt = 0; done < opt.pac_kkt_instances; ++attempt) {
        const DualChannel pool = draw_pool(sys, n, mix_seed(opt.seed, attempt, 3));
        SatelliteLink link;
        try {
            std::vector<UserId> ids(static_cast<std::size_t>(n));
            for (int k = 0; k < n; ++k)
                ids[static_cast<std::size_t>(k)] = k;
            link = make_link(pool.toward1, ids);
        } catch (const SingularChannelError&) {
            continue;
        }
        ++done;
        const double snr = 30.0 * rng.uniform();
        const Eigen::VectorXd budget = Eigen::VectorXd::Constant(n, sys.budget.per_antenna_power(snr));
        try {
            const auto alloc = run_solver(link.load, budget, opt);
            const auto r = kkt_residuals(link.load, budget, alloc);
            const double inf = r.infeasibility / budget.maxCoeff();
            worst_stat = std::max(worst_stat, r.stationarity);
            worst_cs = std::max(worst_cs, r.slackness);
            worst_inf = std::max(worst_inf, inf);
            if (!(r.stationarity <= 1e-5 && r.slackness <= 1e-5 && inf <= 1e-9 && r.min_power >= 0.0))
                ++failed;
        } catch (const SolverFailure&) {
            ++failed;
        }
    }
    return {"power allocation satisfies the KKT conditions within 1e-5", failed == 0,
            std::to_string(opt.pac_kkt_instances) + " instances, " + std::to_string(failed) + " failing; worst stationarity "
                + fmt("%.3g", worst_stat) + ", slackness " + fmt("%.3g", worst_cs) + ", infeasibility "
                + fmt("%.3g", worst_inf)};
}

CheckResult check_siua_oracle(const ValidationOptions& opt)
{
    ExperimentConfig cfg;
    cfg.geometry.beams_per_satellite = 2;
    const SystemModel sys = make_system(cfg);
    const Eigen::VectorXd budget = Eigen::VectorXd::Constant(2, sys.budget.per_antenna_power(21.0));

    double siua_total = 0.0, best_total = 0.0;
    double batch_siua = 0.0, batch_random = 0.0, worst_batch = std::numeric_limits<double>::infinity();
    int batches_below = 0, in_batch = 0, done = 0;
    for (std::uint64_t attempt = 0; done < opt.siua_instances; ++attempt) {
        const DualChannel pool = draw_pool(sys, 6, mix_seed(opt.seed, attempt, 4));
        double siua_rate = 0.0;
        AllocationSurvey survey;
        try {
            const Allocation a = siua(pool.toward1, pool.toward2, 2, 2).allocation;
            siua_rate = evaluate_allocation(pool, a, budget, budget).sum_rate;
            survey = enumerate_allocations(pool, 2, 2, budget, budget);
        } catch (const SingularChannelError&) {
            continue;
        } catch (const SchedulingError&) {
            continue;
        }
        ++done;
        siua_total += siua_rate;
        best_total += survey.best_rate;
        batch_siua += siua_rate;
        batch_random += survey.mean_rate;
        if (++in_batch == opt.siua_batch || done == opt.siua_instances) {
            worst_batch = std::min(worst_batch, batch_siua / batch_random);
            if (batch_siua < batch_random)
                ++batches_below;
            batch_siua = batch_random = 0.0;
            in_batch = 0;
        }
    }
    const double ratio = siua_total / best_total;
    return {"SIUA reaches 90% of the exhaustive optimum and beats random allocation", ratio >= 0.9 && batches_below == 0,
            std::to_string(opt.siua_instances) + " instances, mean SIUA/optimum " + fmt("%.4f", ratio)
                + ", worst batch SIUA/random " + fmt("%.4f", worst_batch)};
}

CheckResult check_determinism(const ValidationOptions& opt)
{
    ExperimentConfig cfg;
    cfg.trials = opt.determinism_trials;
    cfg.pool_size = 60;
    cfg.snr_points_db = {0.0, 21.0};
    cfg.master_seed = opt.seed;
    auto render = [](const ExperimentConfig& c) {
        const ExperimentRun run = run_experiment_detailed(c);
        return summary_csv(c, run.summary) + trials_csv(c, run.trials);
    };
    const std::string first = render(cfg);
    const std::string again = render(cfg);
    ExperimentConfig threaded = cfg;
    threaded.workers = 3;
    const std::string parallel = render(threaded);
    const bool same = first == again && first == parallel;
    return {"identical CSV output across reruns and worker counts", same,
            std::to_string(cfg.trials) + " trials, 1 and 3 workers"};
}

std::vector<CheckResult> run_validation(const ValidationOptions& opt)
{
    return {check_beam_boresight(opt), check_half_power(opt),  check_boresight_snr(opt), check_zf_residuals(opt),
            check_pac_grid(opt),       check_pac_kkt(opt),     check_siua_oracle(opt),   check_determinism(opt)};
}

}  // namespace dualsat
