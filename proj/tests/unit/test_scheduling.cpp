#include <doctest.h>

#include <algorithm>
#include <set>

#include "dualsat/reference.hpp"
#include "dualsat/rng.hpp"
#include "dualsat/scheduling.hpp"

using namespace dualsat;
using doctest::Approx;

namespace {

using Basis = std::vector<RowVectorX<double>>;

RowVectorX<double> row(std::initializer_list<double> v)
{
    RowVectorX<double> r(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double x : v)
        r(i++) = x;
    return r;
}

Eigen::MatrixXd random_pool(Rng& rng, Eigen::Index m, Eigen::Index n)
{
    Eigen::MatrixXd h(m, n);
    for (Eigen::Index i = 0; i < m; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            h(i, j) = rng.uniform();
    return h;
}

bool disjoint_exact(const Allocation& a, std::size_t m1, std::size_t m2)
{
    std::set<UserId> all(a.s1.begin(), a.s1.end());
    all.insert(a.s2.begin(), a.s2.end());
    return a.s1.size() == m1 && a.s2.size() == m2 && all.size() == m1 + m2;
}

}  // namespace

TEST_CASE("project_channel")
{
    const Basis empty;
    CHECK(project_channel(row({1, 2, 3}), std::span<const RowVectorX<double>>(empty)) == row({1, 2, 3}));
    const Basis b{row({1, 0, 0})};
    CHECK(project_channel(row({1, 1, 0}), std::span<const RowVectorX<double>>(b)).isApprox(row({0, 1, 0})));
    const Basis par{row({2, 4, 6})};
    CHECK(project_channel(row({1, 2, 3}), std::span<const RowVectorX<double>>(par)).norm() <= 1e-10);

    Rng rng(1);
    Basis basis;
    for (int i = 0; i < 4; ++i) {
        const RowVectorX<double> h = random_pool(rng, 1, 7);
        const RowVectorX<double> g = project_channel(h, std::span<const RowVectorX<double>>(basis));
        for (const auto& v : basis)
            CHECK(std::abs(g.dot(v)) <= 1e-8 * h.norm() * v.norm());
        basis.push_back(g);
    }
}

TEST_CASE("interference proxies")
{
    CHECK(received_interference(row({1, 2}), Eigen::MatrixXd(2, 0)) == 1.0);
    CHECK(received_interference(row({1, 0}), Eigen::MatrixXd::Identity(2, 2)) == Approx(1.0));

    Rng rng(2);
    const Eigen::MatrixXd w = random_pool(rng, 4, 3);
    const RowVectorX<double> h = random_pool(rng, 1, 4);
    double direct = 0.0;
    for (Eigen::Index j = 0; j < w.cols(); ++j)
        direct += std::pow(h.dot(w.col(j).transpose()), 2);
    CHECK(received_interference(h, w) == Approx(direct));

    CHECK(induced_interference(Eigen::MatrixXd(0, 4), w) == 1.0);
    Eigen::MatrixXd orth(1, 3);
    orth << 0, 0, 1;
    Eigen::MatrixXd w2(3, 2);
    w2 << 1, 0, 0, 1, 0, 0;
    CHECK(induced_interference(orth, w2) == 0.0);

    const Eigen::MatrixXd victims = random_pool(rng, 3, 4);
    double product = 1.0;
    for (Eigen::Index l = 0; l < 3; ++l)
        product *= (victims.row(l) * w * w.transpose() * victims.row(l).transpose())(0, 0);
    CHECK(induced_interference(victims, w) == Approx(product));
}

TEST_CASE("siua: two users split by their strong satellite")
{
    Eigen::MatrixXd h1(2, 1), h2(2, 1);
    h1 << 2, 1;
    h2 << 1, 3;
    const Allocation a = siua(h1, h2, 1, 1).allocation;
    CHECK(a.s1 == std::vector<UserId>{0});
    CHECK(a.s2 == std::vector<UserId>{1});
}

TEST_CASE("siua: step-one collision goes to the stronger side")
{
    Eigen::MatrixXd h1(3, 1), h2(3, 1);
    h1 << 5, 1, 2;
    h2 << 4, 3, 1;
    const Allocation a = siua(h1, h2, 1, 1).allocation;
    CHECK(a.s1 == std::vector<UserId>{0});
    CHECK(a.s2 == std::vector<UserId>{1});
}

TEST_CASE("siua: two orthogonal strong pairs match exhaustive search")
{
    // users 0,1 nearly orthogonal toward satellite 1, users 2,3 toward
    // satellite 2, weak uniform leakage the other way
    Eigen::MatrixXd h1(4, 2), h2(4, 2);
    h1 << 3.0, 0.0, 0.3, 2.9, 0.1, 0.1, 0.1, 0.1;
    h2 << 0.1, 0.1, 0.1, 0.1, 3.1, 0.0, 0.3, 2.8;
    const Allocation a = siua(h1, h2, 2, 2).allocation;

    DualChannel pool{h1, h2};
    const Eigen::VectorXd budget = Eigen::VectorXd::Ones(2);
    const AllocationSurvey survey = enumerate_allocations(pool, 2, 2, budget, budget);
    const double rate = evaluate_allocation(pool, a, budget, budget).sum_rate;
    CHECK(rate == Approx(survey.best_rate).epsilon(1e-9));
    std::vector<UserId> s1 = a.s1, s2 = a.s2;
    std::sort(s1.begin(), s1.end());
    std::sort(s2.begin(), s2.end());
    CHECK(s1 == std::vector<UserId>{0, 1});
    CHECK(s2 == std::vector<UserId>{2, 3});
}

TEST_CASE("siua: cloned pool")
{
    Rng rng(8);
    const Eigen::MatrixXd base1 = random_pool(rng, 5, 3), base2 = random_pool(rng, 5, 3);
    Eigen::MatrixXd h1(10, 3), h2(10, 3);
    h1 << base1, base1;
    h2 << base2, base2;
    const Allocation a = siua(h1, h2, 3, 3).allocation;
    CHECK(disjoint_exact(a, 3, 3));

    // clones score identically before either is chosen
    const Allocation seed{{a.s1[0]}, {a.s2[0]}};
    const Basis b1{h1.row(a.s1[0])}, b2{h2.row(a.s2[0])};
    std::vector<UserId> rest;
    for (UserId k = 0; k < 10; ++k)
        if (k != a.s1[0] && k != a.s2[0])
            rest.push_back(k);
    for (UserId k = 0; k < 5; ++k) {
        if (std::find(rest.begin(), rest.end(), k) == rest.end()
            || std::find(rest.begin(), rest.end(), k + 5) == rest.end())
            continue;
        const auto m = siua_metrics(h1, h2, seed, b1, b2, rest, k);
        const auto c = siua_metrics(h1, h2, seed, b1, b2, rest, k + 5);
        CHECK(m.mu1 == Approx(c.mu1));
        CHECK(m.mu2 == Approx(c.mu2));
    }
}

TEST_CASE("siua: properties on random pools")
{
    Rng rng(21);
    for (int t = 0; t < 20; ++t) {
        const Eigen::MatrixXd h1 = random_pool(rng, 40, 4), h2 = random_pool(rng, 40, 4);
        const SiuaResult r = siua(h1, h2, 4, 3);
        CHECK(disjoint_exact(r.allocation, 4, 3));
        CHECK(siua(h1, h2, 4, 3).allocation.s1 == r.allocation.s1);

        // scaling one satellite's channels keeps its candidate ranking
        const Allocation seed{{r.allocation.s1[0]}, {r.allocation.s2[0]}};
        std::vector<UserId> rest;
        for (UserId k = 0; k < 40; ++k)
            if (k != seed.s1[0] && k != seed.s2[0])
                rest.push_back(k);
        auto best = [&](const Eigen::MatrixXd& a1) {
            const Basis b1{a1.row(seed.s1[0])}, b2{h2.row(seed.s2[0])};
            UserId arg = -1;
            double top = -1.0;
            for (UserId k : rest) {
                const double mu = siua_metrics(a1, h2, seed, b1, b2, rest, k).mu1;
                if (mu > top) {
                    top = mu;
                    arg = k;
                }
            }
            return arg;
        };
        CHECK(best(h1) == best(3.0 * h1));

        const SiuaResult lit = siua(h1, h2, 4, 3, {InducedOver::Unallocated});
        CHECK(disjoint_exact(lit.allocation, 4, 3));
    }
}

TEST_CASE("siua without coupling reduces to per-satellite SUS")
{
    // users 0..9 see only satellite 1, users 10..19 only satellite 2
    Rng rng(4);
    Eigen::MatrixXd h1 = Eigen::MatrixXd::Zero(20, 3), h2 = Eigen::MatrixXd::Zero(20, 3);
    h1.topRows(10) = random_pool(rng, 10, 3);
    h2.bottomRows(10) = random_pool(rng, 10, 3);
    const Allocation a = siua(h1, h2, 3, 3).allocation;

    std::vector<UserId> only2, only1;
    for (UserId k = 0; k < 10; ++k) {
        only1.push_back(k);
        only2.push_back(k + 10);
    }
    CHECK(a.s1 == sus(h1, 3, only2));
    CHECK(a.s2 == sus(h2, 3, only1));
}

TEST_CASE("siua errors")
{
    const Eigen::MatrixXd h = Eigen::MatrixXd::Ones(3, 2);
    CHECK_THROWS_AS(siua(h, h, 2, 2), SchedulingError);
    CHECK_THROWS_AS(siua(h, Eigen::MatrixXd::Ones(4, 2), 1, 1), std::invalid_argument);
}

TEST_CASE("sus")
{
    Eigen::MatrixXd h(5, 4);
    h << Eigen::MatrixXd::Identity(4, 4), Eigen::RowVectorXd::Constant(4, 0.1);
    std::vector<UserId> s = sus(h, 4);
    std::sort(s.begin(), s.end());
    CHECK(s == std::vector<UserId>{0, 1, 2, 3});

    Rng rng(6);
    const Eigen::MatrixXd r = random_pool(rng, 30, 5);
    Eigen::Index top = 0;
    r.rowwise().norm().maxCoeff(&top);
    CHECK(sus(r, 1) == std::vector<UserId>{top});
    CHECK_THROWS_AS(sus(r, 31), SchedulingError);
}

TEST_CASE("sus picks better conditioned sets than random")
{
    double sus_eig = 0.0, rnd_eig = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        Rng rng(seed);
        Eigen::MatrixXd h(30, 4);
        for (Eigen::Index i = 0; i < 30; ++i)
            for (Eigen::Index j = 0; j < 4; ++j)
                h(i, j) = 2.0 * rng.uniform() - 1.0;
        auto min_eig = [&](const std::vector<UserId>& ids) {
            Eigen::MatrixXd g(static_cast<Eigen::Index>(ids.size()), 4);
            for (std::size_t i = 0; i < ids.size(); ++i)
                g.row(static_cast<Eigen::Index>(i)) = h.row(ids[i]);
            return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g * g.transpose()).eigenvalues().minCoeff();
        };
        sus_eig += min_eig(sus(h, 4));
        std::vector<UserId> ids(30);
        for (int i = 0; i < 30; ++i)
            ids[static_cast<std::size_t>(i)] = i;
        rnd_eig += min_eig(random_alloc(ids, 4, 0, seed).s1);
    }
    CHECK(sus_eig > rnd_eig);
}

TEST_CASE("sus_dual keeps sets disjoint")
{
    Rng rng(12);
    const Eigen::MatrixXd h = random_pool(rng, 20, 4);
    const Allocation a = sus_dual(h, h, 4, 4);
    CHECK(disjoint_exact(a, 4, 4));
    CHECK(a.s1.front() != a.s2.front());
}

TEST_CASE("random_alloc")
{
    std::vector<UserId> ids{0, 1, 2, 3};
    const Allocation whole = random_alloc(ids, 2, 2, 1);
    CHECK(disjoint_exact(whole, 2, 2));
    CHECK(random_alloc(ids, 2, 2, 99).s1 == random_alloc(ids, 2, 2, 99).s1);
    CHECK_THROWS_AS(random_alloc(ids, 3, 2, 1), SchedulingError);

    std::vector<UserId> ten(10);
    for (int i = 0; i < 10; ++i)
        ten[static_cast<std::size_t>(i)] = i;
    std::vector<int> hits(10, 0);
    for (std::uint64_t seed = 0; seed < 10000; ++seed)
        ++hits[static_cast<std::size_t>(random_alloc(ten, 1, 0, seed).s1[0])];
    for (int h : hits)
        CHECK(h / 10000.0 == Approx(0.1).epsilon(0.1));  // 0.1 +- 0.01
}
