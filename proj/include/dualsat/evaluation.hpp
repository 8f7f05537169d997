#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dualsat/channel.hpp"
#include "dualsat/power_alloc.hpp"
#include "dualsat/precoding.hpp"
#include "dualsat/scheduling.hpp"

namespace dualsat {

enum class Scenario { FullCooperation, Coordinated, Independent, FrequencySplit };
enum class Algorithm { Siua, Sus, Random };

std::string_view to_string(Scenario s);
std::string_view to_string(Algorithm a);
Scenario parse_scenario(std::string_view name);
Algorithm parse_algorithm(std::string_view name);

/// Channels of one user pool toward both satellites; row k of each matrix is user k.
struct DualChannel {
    Eigen::MatrixXd toward1;  // M x N1
    Eigen::MatrixXd toward2;  // M x N2

    Eigen::Index pool_size() const { return toward1.rows(); }
    /// [toward1 | toward2], the joint channel of both satellites' feeds.
    Eigen::MatrixXd joint() const;
};

/// ZF precoder and antenna loads for the users one satellite serves.
struct SatelliteLink {
    std::vector<UserId> users;
    Eigen::MatrixXd w;     // N x S
    Eigen::MatrixXd load;  // N x S, squared precoder entries
};

/// Throws SingularChannelError when the served channel is singular.
SatelliteLink make_link(const Eigen::MatrixXd& pool_channel, std::span<const UserId> users);

struct ScenarioResult {
    Scenario scenario = Scenario::Coordinated;
    Algorithm algorithm = Algorithm::Siua;
    double snr_db = 0.0;
    Eigen::VectorXd per_user_sinr;  // linear
    double bandwidth_fraction = 1.0; // 1/2 under frequency splitting
    double sum_rate = 0.0;           // bps/Hz of the total band
    std::pair<double, double> per_satellite_rates{0.0, 0.0};
};

/// Rates under full reuse with inter-satellite interference: a user k of
/// satellite 1 sees p1_k |h_k1 . w_k1|^2 / (1 + sum_j p2_j |h_k2 . w_j2|^2),
/// and symmetrically for satellite 2.
ScenarioResult coordinated_sum_rate(const DualChannel& pool, const SatelliteLink& link1, const SatelliteLink& link2,
                                    const Eigen::VectorXd& p1, const Eigen::VectorXd& p2);

/// Both satellites acting as one transmitter: one ZF precoder over all
/// N1 + N2 feeds for the given users, per-feed budgets, no interference.
/// Users count toward the satellite owning their strongest feed.
ScenarioResult full_coop_sum_rate(const DualChannel& pool, std::span<const UserId> users,
                                  const Eigen::VectorXd& budgets);

/// Half the band per satellite at unchanged per-antenna power: SINR doubles
/// (half the noise), powers re-optimized, rate = 1/2 sum log2(1 + 2 p_k).
ScenarioResult freq_split_sum_rate(const SatelliteLink& link1, const SatelliteLink& link2,
                                   const Eigen::VectorXd& budgets1, const Eigen::VectorXd& budgets2);

/// Uncoordinated satellites: random allocation, per-satellite ZF and power
/// allocation, rates with full inter-satellite interference.
ScenarioResult independent_sum_rate(const DualChannel& pool, int m1, int m2, const Eigen::VectorXd& budgets1,
                                    const Eigen::VectorXd& budgets2, std::uint64_t rng_seed);

/// Per-satellite ZF + sum-rate power allocation followed by coordinated rate
/// evaluation. The pipeline shared by coordinated and independent scenarios.
ScenarioResult evaluate_allocation(const DualChannel& pool, const Allocation& alloc, const Eigen::VectorXd& budgets1,
                                   const Eigen::VectorXd& budgets2);

}  // namespace dualsat
