#include <doctest.h>

#include "dualsat/power_alloc.hpp"
#include "dualsat/reference.hpp"
#include "dualsat/rng.hpp"

using namespace dualsat;
using doctest::Approx;

namespace {

void check_invariants(const Eigen::MatrixXd& b, const Eigen::VectorXd& budget, const PowerAllocation<double>& a)
{
    const KktResiduals r = kkt_residuals(b, budget, a);
    CHECK(a.p.minCoeff() >= 0.0);
    CHECK(r.infeasibility <= 1e-6);
    CHECK(r.stationarity <= 1e-5);
    CHECK(r.slackness <= 1e-5);
    for (Eigen::Index k = 0; k < a.p.size(); ++k)
        CHECK((a.p(k) == 0.0 || a.p(k) > kZeroPower));
}

Eigen::MatrixXd random_load(Rng& rng, Eigen::Index s)
{
    for (;;) {
        Eigen::MatrixXd h(s, 7);
        for (Eigen::Index i = 0; i < s; ++i)
            for (Eigen::Index j = 0; j < 7; ++j)
                h(i, j) = 0.05 + rng.uniform();
        try {
            return antenna_load(zf_precoder(h));
        } catch (const SingularChannelError&) {
        }
    }
}

}  // namespace

TEST_CASE("identity load gives every antenna its budget")
{
    const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(7, 7);
    const Eigen::VectorXd budget = Eigen::VectorXd::Ones(7);
    const auto a = solve_pac(b, budget);
    CHECK(a.p.isApprox(Eigen::VectorXd::Ones(7), 1e-6));
    CHECK(a.objective == Approx(7.0).epsilon(1e-6));
    check_invariants(b, budget, a);
}

TEST_CASE("single constraint")
{
    const Eigen::MatrixXd b = Eigen::MatrixXd::Constant(1, 1, 4.0);
    const Eigen::VectorXd budget = Eigen::VectorXd::Constant(1, 2.0);
    const auto a = solve_pac(b, budget);
    CHECK(a.p(0) == Approx(0.5).epsilon(1e-6));
}

TEST_CASE("two users, one nearly free antenna, against the grid optimum")
{
    Eigen::Matrix2d b;
    b << 1, 1, 0, 0.0001;
    const Eigen::Vector2d budget(1, 1);
    const auto a = solve_pac(b, budget);
    const double grid = pac_grid_optimum(b, budget);
    CHECK(a.objective >= grid - 1e-6);
    CHECK(a.objective <= grid + 1e-2);
    CHECK(a.p(0) == Approx(0.5).epsilon(1e-4));
    CHECK(a.p(1) == Approx(0.5).epsilon(1e-4));
    check_invariants(b, budget, a);
}

TEST_CASE("random ZF loads satisfy the KKT invariants")
{
    Rng rng(17);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.below(7));
        const Eigen::MatrixXd b = random_load(rng, s);
        Eigen::VectorXd budget(7);
        for (Eigen::Index j = 0; j < 7; ++j)
            budget(j) = std::pow(10.0, -1.0 + 2.0 * rng.uniform());
        const auto a = solve_pac(b, budget);
        check_invariants(b, budget, a);
        CHECK(a.duality_gap <= 1e-6);

        // more budget never hurts
        const auto doubled = solve_pac(b, Eigen::VectorXd(2.0 * budget));
        CHECK(doubled.objective >= a.objective - 1e-6);
    }
}

TEST_CASE("small instances match grid search")
{
    Rng rng(5);
    for (int t = 0; t < 30; ++t) {
        const Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.below(3));
        const Eigen::MatrixXd b = random_load(rng, s);
        const Eigen::VectorXd budget = Eigen::VectorXd::Constant(7, 0.5 + rng.uniform());
        CHECK(std::abs(solve_pac(b, budget).objective - pac_grid_optimum(b, budget, 400)) <= 1e-2);
    }
}

TEST_CASE("input validation")
{
    const Eigen::MatrixXd b = Eigen::MatrixXd::Identity(2, 2);
    CHECK_THROWS_AS(solve_pac(b, Eigen::VectorXd::Ones(3)), std::invalid_argument);
    CHECK_THROWS_AS(solve_pac(b, Eigen::VectorXd::Zero(2)), std::invalid_argument);
    CHECK_THROWS_AS(solve_pac(b, Eigen::VectorXd::Ones(2), 0.1), std::invalid_argument);
    Eigen::MatrixXd zero_col = b;
    zero_col.col(1).setZero();
    CHECK_THROWS_AS(solve_pac(zero_col, Eigen::VectorXd::Ones(2)), std::invalid_argument);
}

TEST_CASE("equal_power_alloc")
{
    CHECK(equal_power_alloc(2, Eigen::MatrixXd::Identity(2, 2), Eigen::VectorXd::Ones(2)).p
          == Eigen::VectorXd::Ones(2));
    Eigen::Matrix2d b;
    b << 1, 1, 0.5, 0.5;
    const auto a = equal_power_alloc(2, b, Eigen::VectorXd::Ones(2));
    CHECK(a.p(0) == Approx(0.5));
    CHECK(a.p(1) == Approx(0.5));

    Rng rng(9);
    const Eigen::MatrixXd r = random_load(rng, 5);
    const Eigen::VectorXd budget = Eigen::VectorXd::Constant(7, 2.0);
    const Eigen::VectorXd used = r * equal_power_alloc(5, r, budget).p;
    CHECK(std::abs((budget - used).minCoeff()) <= 1e-12);
}
