#include <doctest.h>

#include "dualsat/evaluation.hpp"
#include "dualsat/montecarlo.hpp"
#include "dualsat/rng.hpp"

using namespace dualsat;
using doctest::Approx;

namespace {

Eigen::MatrixXd random_block(Rng& rng, Eigen::Index r, Eigen::Index c, double lo = 0.2)
{
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = lo + rng.uniform();
    return m;
}

// 2+2 beams, users 0,1 served by satellite 1, users 2,3 by satellite 2.
DualChannel hand_built()
{
    DualChannel pool;
    pool.toward1.resize(4, 2);
    pool.toward2.resize(4, 2);
    pool.toward1 << 3.0, 0.4, 0.5, 2.5, 0.3, 0.2, 0.1, 0.4;
    pool.toward2 << 0.2, 0.3, 0.1, 0.5, 2.8, 0.6, 0.2, 3.3;
    return pool;
}

}  // namespace

TEST_CASE("names round-trip")
{
    for (Scenario s : {Scenario::FullCooperation, Scenario::Coordinated, Scenario::Independent, Scenario::FrequencySplit})
        CHECK(parse_scenario(to_string(s)) == s);
    for (Algorithm a : {Algorithm::Siua, Algorithm::Sus, Algorithm::Random})
        CHECK(parse_algorithm(to_string(a)) == a);
    CHECK_THROWS_AS(parse_scenario("cooperative"), std::invalid_argument);
}

TEST_CASE("coordinated rate matches a term-by-term evaluation")
{
    const DualChannel pool = hand_built();
    const std::vector<UserId> s1{0, 1}, s2{2, 3};
    const SatelliteLink l1 = make_link(pool.toward1, s1), l2 = make_link(pool.toward2, s2);
    const Eigen::Vector2d p1(0.7, 1.3), p2(0.4, 2.0);
    const ScenarioResult r = coordinated_sum_rate(pool, l1, l2, p1, p2);

    double expected = 0.0;
    for (int k = 0; k < 2; ++k) {
        const UserId u = s1[static_cast<std::size_t>(k)];
        const double sig = p1(k) * std::pow(pool.toward1.row(u).dot(l1.w.col(k)), 2);
        double intf = 0.0;
        for (int j = 0; j < 2; ++j)
            intf += p2(j) * std::pow(pool.toward2.row(u).dot(l2.w.col(j)), 2);
        expected += std::log2(1.0 + sig / (1.0 + intf));
    }
    for (int k = 0; k < 2; ++k) {
        const UserId u = s2[static_cast<std::size_t>(k)];
        const double sig = p2(k) * std::pow(pool.toward2.row(u).dot(l2.w.col(k)), 2);
        double intf = 0.0;
        for (int j = 0; j < 2; ++j)
            intf += p1(j) * std::pow(pool.toward1.row(u).dot(l1.w.col(j)), 2);
        expected += std::log2(1.0 + sig / (1.0 + intf));
    }
    CHECK(r.sum_rate == Approx(expected).epsilon(1e-12));
    CHECK(r.per_satellite_rates.first + r.per_satellite_rates.second == Approx(r.sum_rate));
    double from_sinr = 0.0;
    for (Eigen::Index k = 0; k < r.per_user_sinr.size(); ++k) {
        CHECK(r.per_user_sinr(k) >= 0.0);
        from_sinr += std::log2(1.0 + r.per_user_sinr(k));
    }
    CHECK(std::abs(from_sinr - r.sum_rate) <= 1e-9);

    SUBCASE("silent satellite 2 leaves satellite 1 interference free")
    {
        const ScenarioResult q = coordinated_sum_rate(pool, l1, l2, p1, Eigen::Vector2d::Zero());
        CHECK(q.per_user_sinr(0) == Approx(p1(0)));
        CHECK(q.per_user_sinr(1) == Approx(p1(1)));
    }
}

TEST_CASE("zero cross channels give SINR = p")
{
    DualChannel pool = hand_built();
    pool.toward2.topRows(2).setZero();
    pool.toward1.bottomRows(2).setZero();
    const SatelliteLink l1 = make_link(pool.toward1, std::vector<UserId>{0, 1});
    const SatelliteLink l2 = make_link(pool.toward2, std::vector<UserId>{2, 3});
    const Eigen::Vector2d p1(0.5, 1.5), p2(1.0, 2.0);
    const ScenarioResult r = coordinated_sum_rate(pool, l1, l2, p1, p2);
    CHECK(r.per_user_sinr(0) == Approx(0.5));
    CHECK(r.per_user_sinr(3) == Approx(2.0));
    CHECK_THROWS_AS(coordinated_sum_rate(pool, l1, l2, Eigen::Vector3d::Ones(), p2), std::invalid_argument);

    // independent with decoupled satellites equals coordinated random allocation
    const Eigen::VectorXd b = Eigen::VectorXd::Ones(2);
    std::vector<UserId> ids{0, 1, 2, 3};
    const Allocation a = random_alloc(ids, 2, 2, 77);
    CHECK(independent_sum_rate(pool, 2, 2, b, b, 77).sum_rate
          == Approx(evaluate_allocation(pool, a, b, b).sum_rate));
}

TEST_CASE("full cooperation")
{
    SUBCASE("identity channel")
    {
        DualChannel pool;
        pool.toward1 = Eigen::MatrixXd::Zero(4, 2);
        pool.toward2 = Eigen::MatrixXd::Zero(4, 2);
        pool.toward1.topRows(2).setIdentity();
        pool.toward2.bottomRows(2).setIdentity();
        const Eigen::VectorXd b = Eigen::VectorXd::Constant(4, 3.0);
        const ScenarioResult r = full_coop_sum_rate(pool, std::vector<UserId>{0, 1, 2, 3}, b);
        CHECK(r.sum_rate == Approx(4.0 * std::log2(4.0)).epsilon(1e-6));
        CHECK(r.per_satellite_rates.first == Approx(2.0 * std::log2(4.0)).epsilon(1e-6));
    }
    SUBCASE("block-diagonal channel splits into two single-satellite problems")
    {
        Rng rng(31);
        DualChannel pool;
        pool.toward1 = Eigen::MatrixXd::Zero(6, 3);
        pool.toward2 = Eigen::MatrixXd::Zero(6, 3);
        pool.toward1.topRows(3) = random_block(rng, 3, 3);
        pool.toward2.bottomRows(3) = random_block(rng, 3, 3);
        const Eigen::VectorXd b = Eigen::VectorXd::Constant(3, 2.0);
        Eigen::VectorXd b6(6);
        b6 << b, b;
        const ScenarioResult coop = full_coop_sum_rate(pool, std::vector<UserId>{0, 1, 2, 3, 4, 5}, b6);
        const Allocation split{{0, 1, 2}, {3, 4, 5}};
        const ScenarioResult coord = evaluate_allocation(pool, split, b, b);
        CHECK(coop.sum_rate == Approx(coord.sum_rate).epsilon(1e-6));
    }
}

TEST_CASE("frequency split")
{
    DualChannel pool;
    pool.toward1 = Eigen::MatrixXd::Identity(3, 3);
    pool.toward2 = Eigen::MatrixXd::Identity(3, 3);
    const SatelliteLink l1 = make_link(pool.toward1, std::vector<UserId>{0, 1, 2});
    const SatelliteLink l2 = make_link(pool.toward2, std::vector<UserId>{0, 1, 2});
    const Eigen::VectorXd one = Eigen::VectorXd::Ones(3);
    const ScenarioResult r = freq_split_sum_rate(l1, l2, one, one);
    CHECK(r.sum_rate == Approx(0.5 * 6 * std::log2(3.0)).epsilon(1e-6));
    CHECK(r.bandwidth_fraction == 0.5);

    SUBCASE("low power: same as interference-free full reuse")
    {
        const Eigen::VectorXd tiny = Eigen::VectorXd::Constant(3, 1e-6);
        const double full_reuse = 6 * std::log2(1.0 + 1e-6);
        CHECK(freq_split_sum_rate(l1, l2, tiny, tiny).sum_rate / full_reuse == Approx(1.0).epsilon(1e-5));
    }
    SUBCASE("high power: half the full-reuse rate plus K/2 bits")
    {
        const Eigen::VectorXd big = Eigen::VectorXd::Constant(3, 1e6);
        const double full_reuse = 6 * std::log2(1.0 + 1e6);
        CHECK(freq_split_sum_rate(l1, l2, big, big).sum_rate == Approx(0.5 * full_reuse + 3.0).epsilon(1e-6));
    }
}
