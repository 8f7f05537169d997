#include "dualsat/evaluation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace dualsat {

std::string_view to_string(Scenario s)
{
    switch (s) {
    case Scenario::FullCooperation: return "full_cooperation";
    case Scenario::Coordinated: return "coordinated";
    case Scenario::Independent: return "independent";
    case Scenario::FrequencySplit: return "frequency_split";
    }
    return "unknown";
}

std::string_view to_string(Algorithm a)
{
    switch (a) {
    case Algorithm::Siua: return "siua";
    case Algorithm::Sus: return "sus";
    case Algorithm::Random: return "random";
    }
    return "unknown";
}

Scenario parse_scenario(std::string_view name)
{
    for (auto s : {Scenario::FullCooperation, Scenario::Coordinated, Scenario::Independent, Scenario::FrequencySplit})
        if (to_string(s) == name)
            return s;
    throw std::invalid_argument("unknown scenario '" + std::string(name) + "'");
}

Algorithm parse_algorithm(std::string_view name)
{
    for (auto a : {Algorithm::Siua, Algorithm::Sus, Algorithm::Random})
        if (to_string(a) == name)
            return a;
    throw std::invalid_argument("unknown algorithm '" + std::string(name) + "'");
}

Eigen::MatrixXd DualChannel::joint() const
{
    Eigen::MatrixXd h(toward1.rows(), toward1.cols() + toward2.cols());
    h << toward1, toward2;
    return h;
}

namespace {

Eigen::MatrixXd gather(const Eigen::MatrixXd& h, std::span<const UserId> ids)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), h.cols());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] < 0 || ids[i] >= h.rows())
            throw std::invalid_argument("user id " + std::to_string(ids[i]) + " outside the pool");
        out.row(static_cast<Eigen::Index>(i)) = h.row(ids[i]);
    }
    return out;
}

double rate_sum(const Eigen::VectorXd& sinr, Eigen::Index begin, Eigen::Index count)
{
    double r = 0.0;
    for (Eigen::Index k = begin; k < begin + count; ++k)
        r += std::log2(1.0 + sinr(k));
    return r;
}

}  // namespace

SatelliteLink make_link(const Eigen::MatrixXd& pool_channel, std::span<const UserId> users)
{
    SatelliteLink link;
    link.users.assign(users.begin(), users.end());
    link.w = zf_precoder(gather(pool_channel, users));
    link.load = antenna_load(link.w);
    return link;
}

ScenarioResult coordinated_sum_rate(const DualChannel& pool, const SatelliteLink& link1, const SatelliteLink& link2,
                                    const Eigen::VectorXd& p1, const Eigen::VectorXd& p2)
{
    const auto s1 = static_cast<Eigen::Index>(link1.users.size());
    const auto s2 = static_cast<Eigen::Index>(link2.users.size());
    if (p1.size() != s1 || p2.size() != s2 || link1.w.cols() != s1 || link2.w.cols() != s2
        || link1.w.rows() != pool.toward1.cols() || link2.w.rows() != pool.toward2.cols())
        throw std::invalid_argument("coordinated_sum_rate: dimension mismatch");

    // Received amplitudes through each precoder: rows are users, columns are streams.
    const Eigen::MatrixXd own1 = gather(pool.toward1, link1.users) * link1.w;
    const Eigen::MatrixXd cross1 = gather(pool.toward2, link1.users) * link2.w;
    const Eigen::MatrixXd own2 = gather(pool.toward2, link2.users) * link2.w;
    const Eigen::MatrixXd cross2 = gather(pool.toward1, link2.users) * link1.w;

    ScenarioResult r;
    r.scenario = Scenario::Coordinated;
    r.per_user_sinr.resize(s1 + s2);
    for (Eigen::Index k = 0; k < s1; ++k) {
        const double signal = p1(k) * own1(k, k) * own1(k, k);
        const double interference = cross1.row(k).cwiseAbs2().dot(p2);
        r.per_user_sinr(k) = signal / (1.0 + interference);
    }
    for (Eigen::Index k = 0; k < s2; ++k) {
        const double signal = p2(k) * own2(k, k) * own2(k, k);
        const double interference = cross2.row(k).cwiseAbs2().dot(p1);
        r.per_user_sinr(s1 + k) = signal / (1.0 + interference);
    }
    r.per_satellite_rates = {rate_sum(r.per_user_sinr, 0, s1), rate_sum(r.per_user_sinr, s1, s2)};
    r.sum_rate = r.per_satellite_rates.first + r.per_satellite_rates.second;
    return r;
}

ScenarioResult full_coop_sum_rate(const DualChannel& pool, std::span<const UserId> users,
                                  const Eigen::VectorXd& budgets)
{
    const Eigen::MatrixXd joint = pool.joint();
    if (budgets.size() != joint.cols())
        throw std::invalid_argument("full_coop_sum_rate: one budget per feed required");
    const SatelliteLink link = make_link(joint, users);
    const PowerAllocation<double> power = solve_pac(link.load, budgets);

    ScenarioResult r;
    r.scenario = Scenario::FullCooperation;
    r.per_user_sinr = power.p.cwiseProduct(effective_channel_gains(gather(joint, users), link.w));
    const Eigen::Index n1 = pool.toward1.cols();
    for (std::size_t i = 0; i < users.size(); ++i) {
        Eigen::Index strongest = 0;
        joint.row(users[i]).maxCoeff(&strongest);
        const double rate = std::log2(1.0 + r.per_user_sinr(static_cast<Eigen::Index>(i)));
        (strongest < n1 ? r.per_satellite_rates.first : r.per_satellite_rates.second) += rate;
    }
    r.sum_rate = rate_sum(r.per_user_sinr, 0, r.per_user_sinr.size());
    return r;
}

ScenarioResult freq_split_sum_rate(const SatelliteLink& link1, const SatelliteLink& link2,
                                   const Eigen::VectorXd& budgets1, const Eigen::VectorXd& budgets2)
{
    // max sum log2(1 + 2p) s.t. B p <= P  <=>  max sum log2(1 + q) s.t. B q <= 2P, q = 2p.
    const PowerAllocation<double> q1 = solve_pac(link1.load, Eigen::VectorXd(2.0 * budgets1));
    const PowerAllocation<double> q2 = solve_pac(link2.load, Eigen::VectorXd(2.0 * budgets2));

    ScenarioResult r;
    r.scenario = Scenario::FrequencySplit;
    r.bandwidth_fraction = 0.5;
    r.per_user_sinr.resize(q1.p.size() + q2.p.size());
    r.per_user_sinr << q1.p, q2.p;
    r.per_satellite_rates = {0.5 * rate_sum(r.per_user_sinr, 0, q1.p.size()),
                             0.5 * rate_sum(r.per_user_sinr, q1.p.size(), q2.p.size())};
    r.sum_rate = r.per_satellite_rates.first + r.per_satellite_rates.second;
    return r;
}

ScenarioResult evaluate_allocation(const DualChannel& pool, const Allocation& alloc, const Eigen::VectorXd& budgets1,
                                   const Eigen::VectorXd& budgets2)
{
    const SatelliteLink link1 = make_link(pool.toward1, alloc.s1);
    const SatelliteLink link2 = make_link(pool.toward2, alloc.s2);
    const PowerAllocation<double> p1 = solve_pac(link1.load, budgets1);
    const PowerAllocation<double> p2 = solve_pac(link2.load, budgets2);
    return coordinated_sum_rate(pool, link1, link2, p1.p, p2.p);
}

ScenarioResult independent_sum_rate(const DualChannel& pool, int m1, int m2, const Eigen::VectorXd& budgets1,
                                    const Eigen::VectorXd& budgets2, std::uint64_t rng_seed)
{
    std::vector<UserId> ids(static_cast<std::size_t>(pool.pool_size()));
    for (std::size_t i = 0; i < ids.size(); ++i)
        ids[i] = static_cast<UserId>(i);
    ScenarioResult r = evaluate_allocation(pool, random_alloc(ids, m1, m2, rng_seed), budgets1, budgets2);
    r.scenario = Scenario::Independent;
    r.algorithm = Algorithm::Random;
    return r;
}

}  // namespace dualsat
