#include "dualsat/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

#include "dualsat/power_alloc.hpp"
#include "dualsat/rng.hpp"

namespace dualsat {

namespace {

// Stream tags for the sub-seeds of one trial.
constexpr std::uint64_t kRedrawStream = 1;
constexpr std::uint64_t kIndependentStream = 2;
constexpr std::uint64_t kFullCoopRandomStream = 3;

template <typename T>
bool contains(const std::vector<T>& v, const T& x)
{
    return std::find(v.begin(), v.end(), x) != v.end();
}

// Neumaier-compensated sum.
double compensated_sum(const std::vector<std::pair<int, double>>& samples, double shift = 0.0)
{
    double sum = 0.0;
    double comp = 0.0;
    for (const auto& [idx, x0] : samples) {
        const double x = shift == 0.0 ? x0 : (x0 - shift) * (x0 - shift);
        const double t = sum + x;
        if (std::abs(sum) >= std::abs(x))
            comp += (sum - t) + x;
        else
            comp += (x - t) + sum;
        sum = t;
    }
    return sum + comp;
}

}  // namespace

void ExperimentConfig::validate() const
{
    if (geometry.beams_per_satellite < 1)
        throw ConfigError("geometry.beams_per_satellite", "geometry.beams_per_satellite must be at least 1");
    if (!(geometry.beam_diameter_km > 0.0))
        throw ConfigError("geometry.beam_diameter_km", "geometry.beam_diameter_km must be positive");
    if (!(geometry.altitude_km > 0.0))
        throw ConfigError("geometry.altitude_km", "geometry.altitude_km must be positive");
    if (!geometry.lattice_offset_km.allFinite())
        throw ConfigError("geometry.lattice_offset_km", "geometry.lattice_offset_km must be finite");
    if (!(geometry.coverage_radius_km >= 0.0))
        throw ConfigError("geometry.coverage_radius_km", "geometry.coverage_radius_km must be nonnegative");
    if (!(pattern.u_coeff > 0.0))
        throw ConfigError("pattern.u_coeff", "pattern.u_coeff must be positive");
    if (pattern.theta_3db_rad && !(*pattern.theta_3db_rad > 0.0 && *pattern.theta_3db_rad < std::numbers::pi / 2))
        throw ConfigError("pattern.theta_3db_rad", "pattern.theta_3db_rad must lie in (0, pi/2)");
    if (!std::isfinite(budget.boresight_snr_db()) || std::abs(budget.boresight_snr_db() - budget.snr_ref_db) > 0.1)
        throw ConfigError("linkbudget.snr_ref_db", "linkbudget.snr_ref_db must match the link budget's boresight SNR ("
                                                       + std::to_string(budget.boresight_snr_db()) + " dB) within 0.1 dB");
    if (trials < 1)
        throw ConfigError("experiment.trials", "experiment.trials must be at least 1");
    if (first_trial < 0)
        throw ConfigError("experiment.first_trial", "experiment.first_trial must be nonnegative");
    if (pool_size < 2 * geometry.beams_per_satellite)
        throw ConfigError("experiment.pool_size", "experiment.pool_size must be at least 2 * beams_per_satellite");
    if (snr_points_db.empty())
        throw ConfigError("experiment.snr_points_db", "experiment.snr_points_db must not be empty");
    for (double s : snr_points_db)
        if (!std::isfinite(s))
            throw ConfigError("experiment.snr_points_db", "experiment.snr_points_db must be finite");
    for (double s : sweep_snr_db)
        if (!std::isfinite(s))
            throw ConfigError("sweep.snr_db", "sweep.snr_db must be finite");
    if (!std::isfinite(pool_sweep_snr_db))
        throw ConfigError("sweep.pool_snr_db", "sweep.pool_snr_db must be finite");
    for (std::size_t i = 0; i < pool_sweep.size(); ++i) {
        if (pool_sweep[i] < 2 * geometry.beams_per_satellite)
            throw ConfigError("sweep.pool_sizes", "sweep.pool_sizes entries must be at least 2 * beams_per_satellite");
        if (i > 0 && pool_sweep[i] <= pool_sweep[i - 1])
            throw ConfigError("sweep.pool_sizes", "sweep.pool_sizes must be ascending");
    }
    if (scenarios.empty())
        throw ConfigError("experiment.scenarios", "experiment.scenarios must not be empty");
    if (algorithms.empty())
        throw ConfigError("experiment.algorithms", "experiment.algorithms must not be empty");
    if (workers < 1)
        throw ConfigError("experiment.workers", "experiment.workers must be at least 1");
    if (max_redraws < 0)
        throw ConfigError("experiment.max_redraws", "experiment.max_redraws must be nonnegative");
}

std::vector<std::pair<Scenario, Algorithm>> requested_cases(const ExperimentConfig& config)
{
    static const std::pair<Scenario, Algorithm> kCases[] = {
        {Scenario::FullCooperation, Algorithm::Sus}, {Scenario::FullCooperation, Algorithm::Random},
        {Scenario::Coordinated, Algorithm::Siua},    {Scenario::Coordinated, Algorithm::Sus},
        {Scenario::Independent, Algorithm::Random},  {Scenario::FrequencySplit, Algorithm::Sus},
        {Scenario::FrequencySplit, Algorithm::Siua},
    };
    std::vector<std::pair<Scenario, Algorithm>> out;
    for (const auto& c : kCases)
        if (contains(config.scenarios, c.first) && contains(config.algorithms, c.second))
            out.push_back(c);
    return out;
}

SystemModel make_system(const ExperimentConfig& config)
{
    const auto& geo = config.geometry;
    SystemModel sys;
    sys.grid1 = make_hex_grid(geo.beams_per_satellite, geo.beam_diameter_km, 1, Eigen::Vector2d::Zero(),
                              geo.altitude_km);
    sys.grid2 = make_hex_grid(geo.beams_per_satellite, geo.beam_diameter_km, 2, geo.lattice_offset_km,
                              geo.altitude_km);
    sys.budget = config.budget;
    sys.pattern.g_max = db_to_linear(config.budget.g_tx_dbi);
    sys.pattern.theta_3db = config.pattern.theta_3db_rad.value_or(
        std::atan(geo.beam_diameter_km / 2.0 / geo.altitude_km));
    sys.pattern.u_coeff = config.pattern.u_coeff;
    sys.pattern.validate();
    sys.coverage = coverage_disc({sys.grid1, sys.grid2});
    if (geo.coverage_radius_km > 0.0)
        sys.coverage.radius = geo.coverage_radius_km;
    return sys;
}

DualChannel draw_pool(const SystemModel& system, int pool_size, std::uint64_t seed)
{
    const auto users = drop_users(pool_size, system.coverage, seed, db_to_linear(system.budget.g_rx_dbi));
    DualChannel pool;
    pool.toward1 = build_channel(users, system.grid1, system.pattern, system.budget).entries;
    pool.toward2 = build_channel(users, system.grid2, system.pattern, system.budget).entries;
    return pool;
}

std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index)
{
    return mix_seed(master_seed, static_cast<std::uint64_t>(trial_index));
}

namespace {

// Allocations of one user drop; each is computed only if some case needs it.
struct TrialAllocations {
    std::optional<Allocation> siua;
    std::optional<Allocation> sus;
    std::optional<Allocation> random;
    std::optional<std::vector<UserId>> joint_sus;
    std::optional<std::vector<UserId>> joint_random;
    int clamp_events = 0;
};

std::vector<ScenarioResult> evaluate_drop(const ExperimentConfig& config, const SystemModel& sys,
                                          const DualChannel& pool, std::uint64_t drop_seed, int& clamp_events)
{
    const auto cases = requested_cases(config);
    const int n = config.geometry.beams_per_satellite;
    TrialAllocations a;
    std::vector<UserId> ids(static_cast<std::size_t>(pool.pool_size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = static_cast<UserId>(i);

    for (const auto& [scenario, algorithm] : cases) {
        if (scenario == Scenario::FullCooperation) {
            if (algorithm == Algorithm::Sus && !a.joint_sus)
                a.joint_sus = sus(pool.joint(), 2 * n);
            if (algorithm == Algorithm::Random && !a.joint_random)
                a.joint_random = random_alloc(ids, 2 * n, 0, mix_seed(drop_seed, 0, kFullCoopRandomStream)).s1;
            continue;
        }
        if (algorithm == Algorithm::Siua && !a.siua) {
            SiuaOptions opt;
            opt.induced_over = config.induced_over;
            SiuaResult r = siua(pool.toward1, pool.toward2, n, n, opt);
            a.clamp_events = r.clamp_events;
            a.siua = std::move(r.allocation);
        }
        if (algorithm == Algorithm::Sus && !a.sus)
            a.sus = sus_dual(pool.toward1, pool.toward2, n, n);
        if (algorithm == Algorithm::Random && !a.random)
            a.random = random_alloc(ids, n, n, mix_seed(drop_seed, 0, kIndependentStream));
    }
    clamp_events = a.clamp_events;

    auto allocation_for = [&](Algorithm alg) -> const Allocation& {
        switch (alg) {
        case Algorithm::Siua: return *a.siua;
        case Algorithm::Sus: return *a.sus;
        case Algorithm::Random: return *a.random;
        }
        throw std::logic_error("unreachable");
    };

    // Precoders do not depend on the SNR; build them once per allocation.
    std::map<Algorithm, std::pair<SatelliteLink, SatelliteLink>> links;
    for (const auto& [scenario, algorithm] : cases) {
        if (scenario == Scenario::FullCooperation || links.count(algorithm))
            continue;
        const Allocation& alloc = allocation_for(algorithm);
        links.emplace(algorithm,
                      std::make_pair(make_link(pool.toward1, alloc.s1), make_link(pool.toward2, alloc.s2)));
    }
    // Singular joint channels must also surface before any rate is computed.
    if (a.joint_sus)
        (void)zf_precoder(Eigen::MatrixXd(pool.joint()(*a.joint_sus, Eigen::all)));
    if (a.joint_random)
        (void)zf_precoder(Eigen::MatrixXd(pool.joint()(*a.joint_random, Eigen::all)));

    std::vector<ScenarioResult> results;
    for (const double snr : config.snr_points_db) {
        const double per_antenna = sys.budget.per_antenna_power(snr);
        const Eigen::VectorXd budget = Eigen::VectorXd::Constant(n, per_antenna);
        const Eigen::VectorXd joint_budget = Eigen::VectorXd::Constant(2 * n, per_antenna);
        for (const auto& [scenario, algorithm] : cases) {
            ScenarioResult r;
            switch (scenario) {
            case Scenario::FullCooperation:
                r = full_coop_sum_rate(pool, algorithm == Algorithm::Sus ? *a.joint_sus : *a.joint_random,
                                       joint_budget);
                break;
            case Scenario::Coordinated:
            case Scenario::Independent: {
                const auto& [l1, l2] = links.at(algorithm);
                const auto p1 = solve_pac(l1.load, budget);
                const auto p2 = solve_pac(l2.load, budget);
                r = coordinated_sum_rate(pool, l1, l2, p1.p, p2.p);
                break;
            }
            case Scenario::FrequencySplit: {
                const auto& [l1, l2] = links.at(algorithm);
                r = freq_split_sum_rate(l1, l2, budget, budget);
                break;
            }
            }
            r.scenario = scenario;
            r.algorithm = algorithm;
            r.snr_db = snr;
            results.push_back(std::move(r));
        }
    }
    return results;
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& config, int trial_index)
{
    const SystemModel sys = make_system(config);
    TrialResult t;
    t.trial_index = trial_index;
    t.seed = trial_seed(config.master_seed, trial_index);
    t.pool_size = config.pool_size;

    for (int attempt = 0; attempt <= config.max_redraws; ++attempt) {
        const std::uint64_t drop_seed =
            attempt == 0 ? t.seed : mix_seed(t.seed, static_cast<std::uint64_t>(attempt), kRedrawStream);
        try {
            const DualChannel pool = draw_pool(sys, config.pool_size, drop_seed);
            t.results = evaluate_drop(config, sys, pool, drop_seed, t.siua_clamp_events);
            t.redraws = attempt;
            return t;
        } catch (const SingularChannelError&) {
        } catch (const SchedulingError&) {
        }
    }
    t.redraws = config.max_redraws;
    t.discarded = true;
    t.results.clear();
    return t;
}

double CellStats::mean() const
{
    if (samples.empty())
        return std::nan("");
    return compensated_sum(samples) / static_cast<double>(samples.size());
}

double CellStats::stddev() const
{
    if (samples.size() < 2)
        return 0.0;
    const double m = mean();
    return std::sqrt(compensated_sum(samples, m) / static_cast<double>(samples.size() - 1));
}

const CellStats& ExperimentSummary::at(Scenario s, Algorithm a, double snr_db, int pool_size) const
{
    const auto it = cells.find(CellKey{s, a, snr_db, pool_size});
    if (it == cells.end())
        throw std::out_of_range("no summary cell for " + std::string(to_string(s)) + "/" + std::string(to_string(a))
                                + " at " + std::to_string(snr_db) + " dB, pool " + std::to_string(pool_size));
    return it->second;
}

void ExperimentSummary::merge(const ExperimentSummary& other)
{
    for (const auto& [key, stats] : other.cells) {
        auto& mine = cells[key];
        mine.samples.insert(mine.samples.end(), stats.samples.begin(), stats.samples.end());
        std::sort(mine.samples.begin(), mine.samples.end());
        mine.discards += stats.discards;
    }
    total_trials += other.total_trials;
    discarded_trials += other.discarded_trials;
}

ExperimentSummary summarize(const std::vector<TrialResult>& trials)
{
    ExperimentSummary s;
    std::map<int, int> discards_by_pool;
    for (const auto& t : trials) {
        ++s.total_trials;
        if (t.discarded) {
            ++s.discarded_trials;
            ++discards_by_pool[t.pool_size];
            continue;
        }
        for (const auto& r : t.results)
            s.cells[CellKey{r.scenario, r.algorithm, r.snr_db, t.pool_size}].samples.emplace_back(t.trial_index,
                                                                                                r.sum_rate);
    }
    for (auto& [key, stats] : s.cells) {
        std::sort(stats.samples.begin(), stats.samples.end());
        stats.discards = discards_by_pool[key.pool_size];
    }
    return s;
}

std::vector<TrialResult> run_trials(const ExperimentConfig& config)
{
    config.validate();
    std::vector<TrialResult> out(static_cast<std::size_t>(config.trials));
    std::atomic<int> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= config.trials)
                return;
            try {
                out[static_cast<std::size_t>(i)] = run_trial(config, config.first_trial + i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = config.trials;
                return;
            }
        }
    };

    const int threads = std::min(config.workers, config.trials);
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int i = 0; i < threads; ++i)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    if (failure)
        std::rethrow_exception(failure);
    return out;
}

ExperimentRun run_experiment_detailed(const ExperimentConfig& config)
{
    ExperimentRun run;
    run.trials = run_trials(config);
    run.summary = summarize(run.trials);
    if (run.summary.discarded_trials == run.summary.total_trials)
        throw ExperimentFailure("every trial was discarded after repeated singular channel draws");
    return run;
}

ExperimentSummary run_experiment(const ExperimentConfig& config)
{
    return run_experiment_detailed(config).summary;
}

ExperimentRun sweep_pool_size(const ExperimentConfig& config, const std::vector<int>& sizes)
{
    if (sizes.empty())
        throw ConfigError("sweep.pool_sizes", "sweep.pool_sizes must not be empty");
    ExperimentConfig cfg = config;
    cfg.pool_sweep = sizes;
    cfg.snr_points_db = {config.pool_sweep_snr_db};
    cfg.scenarios = {Scenario::Coordinated};
    std::vector<Algorithm> algs;
    for (auto a : {Algorithm::Siua, Algorithm::Sus})
        if (contains(config.algorithms, a))
            algs.push_back(a);
    if (algs.empty())
        throw ConfigError("experiment.algorithms", "pool sweep needs siua or sus in experiment.algorithms");
    cfg.algorithms = algs;
    cfg.pool_size = sizes.front();
    cfg.validate();

    ExperimentRun run;
    for (const int size : sizes) {
        cfg.pool_size = size;
        auto trials = run_trials(cfg);
        run.summary.merge(summarize(trials));
        run.trials.insert(run.trials.end(), std::make_move_iterator(trials.begin()),
                          std::make_move_iterator(trials.end()));
    }
    if (run.summary.discarded_trials == run.summary.total_trials)
        throw ExperimentFailure("every trial was discarded after repeated singular channel draws");
    return run;
}

ExperimentRun sweep_snr(const ExperimentConfig& config)
{
    ExperimentConfig cfg = config;
    cfg.snr_points_db = config.sweep_snr_db;
    if (cfg.snr_points_db.empty())
        throw ConfigError("sweep.snr_db", "sweep.snr_db must not be empty");
    return run_experiment_detailed(cfg);
}

}  // namespace dualsat
