#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dualsat/channel.hpp"
#include "dualsat/evaluation.hpp"
#include "dualsat/scheduling.hpp"

namespace dualsat {

/// Invalid configuration value; `key()` names the offending config key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what) : std::runtime_error(what), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

class ExperimentFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GeometryConfig {
    int beams_per_satellite = 7;
    double beam_diameter_km = 600.0;
    double altitude_km = kGeoAltitudeKm;
    Eigen::Vector2d lattice_offset_km{150.0, 0.0};  // satellite 2 lattice shift
    double coverage_radius_km = 0.0;               // 0: derived from the lattices
};

struct PatternConfig {
    double u_coeff = kBesselBeamCoeff;
    std::optional<double> theta_3db_rad;  // default: half-power at the beam edge
};

struct ExperimentConfig {
    GeometryConfig geometry;
    PatternConfig pattern;
    LinkBudget budget;

    int pool_size = 700;
    int trials = 100;
    int first_trial = 0;
    std::uint64_t master_seed = 20130609;
    std::vector<double> snr_points_db{21.0};
    std::vector<double> sweep_snr_db{0.0, 5.0, 10.0, 15.0, 20.0, 25.0, 30.0};
    std::vector<int> pool_sweep{100, 200, 300, 400, 500, 600, 700, 800, 900, 1000, 1100, 1200};
    double pool_sweep_snr_db = 20.0;
    std::vector<Scenario> scenarios{Scenario::FullCooperation, Scenario::Coordinated, Scenario::Independent,
                                    Scenario::FrequencySplit};
    std::vector<Algorithm> algorithms{Algorithm::Siua, Algorithm::Sus, Algorithm::Random};
    InducedOver induced_over = InducedOver::OtherSet;
    int workers = 1;  // execution only; not part of the config file
    int max_redraws = 10;

    /// Throws ConfigError naming the first invalid key.
    void validate() const;
};

/// Scenario/algorithm pairs the harness evaluates, filtered by the config lists:
/// full_cooperation x {sus, random}, coordinated x {siua, sus},
/// independent x {random}, frequency_split x {sus, siua}.
std::vector<std::pair<Scenario, Algorithm>> requested_cases(const ExperimentConfig& config);

/// Geometry, antenna pattern and link budget resolved from a config.
struct SystemModel {
    BeamGrid grid1, grid2;
    BeamPattern<double> pattern;
    LinkBudget budget;
    Disc coverage;
};

SystemModel make_system(const ExperimentConfig& config);

/// Users dropped with `seed` and their channels toward both satellites.
DualChannel draw_pool(const SystemModel& system, int pool_size, std::uint64_t seed);

struct TrialResult {
    int trial_index = 0;
    std::uint64_t seed = 0;
    int pool_size = 0;
    bool discarded = false;
    int redraws = 0;
    int siua_clamp_events = 0;
    std::vector<ScenarioResult> results;  // one per case and SNR point
};

/// Trial seed: mix_seed(master_seed, trial_index), see rng.hpp.
std::uint64_t trial_seed(std::uint64_t master_seed, int trial_index);

/// Drops users, schedules, precodes, allocates power and evaluates every
/// requested case at every SNR point. Singular channels trigger a redraw with
/// a derived seed; after max_redraws the trial is marked discarded.
TrialResult run_trial(const ExperimentConfig& config, int trial_index);

struct CellKey {
    Scenario scenario;
    Algorithm algorithm;
    double snr_db;
    int pool_size;
    auto operator<=>(const CellKey&) const = default;
};

struct CellStats {
    std::vector<std::pair<int, double>> samples;  // (trial index, sum rate), ordered by trial
    int discards = 0;

    int trials() const { return static_cast<int>(samples.size()); }
    double mean() const;
    double stddev() const;  // sample standard deviation; 0 for a single trial
};

struct ExperimentSummary {
    std::map<CellKey, CellStats> cells;
    int total_trials = 0;
    int discarded_trials = 0;

    const CellStats& at(Scenario s, Algorithm a, double snr_db, int pool_size) const;
    /// Merge results of disjoint trial ranges.
    void merge(const ExperimentSummary& other);
};

ExperimentSummary summarize(const std::vector<TrialResult>& trials);

/// Trials first_trial .. first_trial + trials - 1, run on `workers` threads.
/// Output is ordered by trial index and independent of the worker count.
std::vector<TrialResult> run_trials(const ExperimentConfig& config);

/// Throws ExperimentFailure when every trial was discarded.
ExperimentSummary run_experiment(const ExperimentConfig& config);

struct ExperimentRun {
    std::vector<TrialResult> trials;
    ExperimentSummary summary;
};

ExperimentRun run_experiment_detailed(const ExperimentConfig& config);

/// Sum rate against pool size at config.pool_sweep_snr_db for coordinated
/// SIUA and SUS (restricted to the configured algorithms). Trial seeds do not
/// depend on the pool size, so smaller pools are prefixes of larger ones.
ExperimentRun sweep_pool_size(const ExperimentConfig& config, const std::vector<int>& sizes);

/// Runs config.sweep_snr_db for every requested case.
ExperimentRun sweep_snr(const ExperimentConfig& config);

}  // namespace dualsat
