#include "dualsat/reference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace dualsat {

namespace {

// Largest t >= 0 with B(:, k) t <= slack, or a negative value if the slack is
// already violated.
double max_feasible(const Eigen::MatrixXd& load, Eigen::Index k, const Eigen::VectorXd& slack)
{
    double t = std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < load.rows(); ++j) {
        if (slack(j) < 0.0)
            return -1.0;
        if (load(j, k) > 0.0)
            t = std::min(t, slack(j) / load(j, k));
    }
    return t;
}

void combinations(int n, int k, int start, std::vector<int>& cur, std::vector<std::vector<int>>& out)
{
    if (static_cast<int>(cur.size()) == k) {
        out.push_back(cur);
        return;
    }
    for (int i = start; i < n; ++i) {
        cur.push_back(i);
        combinations(n, k, i + 1, cur, out);
        cur.pop_back();
    }
}

}  // namespace

double pac_grid_optimum(const Eigen::MatrixXd& load, const Eigen::VectorXd& budget, int steps)
{
    const Eigen::Index users = load.cols();
    if (users < 1 || users > 3)
        throw std::invalid_argument("pac_grid_optimum: between one and three users");
    if (load.rows() != budget.size() || steps < 1)
        throw std::invalid_argument("pac_grid_optimum: bad dimensions");

    std::vector<double> box(static_cast<std::size_t>(users));
    for (Eigen::Index k = 0; k < users; ++k)
        box[static_cast<std::size_t>(k)] = max_feasible(load, k, budget);

    const Eigen::Index last = users - 1;
    const int n0 = users > 1 ? steps : 0;
    const int n1 = users > 2 ? steps : 0;
    double best = 0.0;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(users);
    for (int a = 0; a <= n0; ++a) {
        if (users > 1)
            p(0) = box[0] * a / steps;
        for (int b = 0; b <= n1; ++b) {
            if (users > 2)
                p(1) = box[1] * b / steps;
            p(last) = 0.0;
            const double t = max_feasible(load, last, budget - load * p);
            if (t < 0.0)
                break;
            p(last) = t;
            double rate = 0.0;
            for (Eigen::Index k = 0; k < users; ++k)
                rate += std::log2(1.0 + p(k));
            best = std::max(best, rate);
        }
    }
    return best;
}

AllocationSurvey enumerate_allocations(const DualChannel& pool, int m1, int m2, const Eigen::VectorXd& budgets1,
                                       const Eigen::VectorXd& budgets2)
{
    const int m = static_cast<int>(pool.pool_size());
    if (m1 < 1 || m2 < 1 || m1 + m2 > m)
        throw std::invalid_argument("enumerate_allocations: set sizes do not fit the pool");

    std::vector<std::vector<int>> firsts;
    std::vector<int> cur;
    combinations(m, m1, 0, cur, firsts);

    AllocationSurvey survey;
    survey.best_rate = -std::numeric_limits<double>::infinity();
    double total = 0.0;
    for (const auto& s1 : firsts) {
        std::vector<int> rest;
        for (int u = 0; u < m; ++u)
            if (std::find(s1.begin(), s1.end(), u) == s1.end())
                rest.push_back(u);
        std::vector<std::vector<int>> seconds;
        combinations(static_cast<int>(rest.size()), m2, 0, cur, seconds);
        for (const auto& idx : seconds) {
            Allocation alloc;
            alloc.s1.assign(s1.begin(), s1.end());
            for (int i : idx)
                alloc.s2.push_back(rest[static_cast<std::size_t>(i)]);
            try {
                const double rate = evaluate_allocation(pool, alloc, budgets1, budgets2).sum_rate;
                total += rate;
                ++survey.evaluated;
                if (rate > survey.best_rate) {
                    survey.best_rate = rate;
                    survey.best = std::move(alloc);
                }
            } catch (const SingularChannelError&) {
                ++survey.singular;
            }
        }
    }
    if (survey.evaluated == 0)
        throw SingularChannelError("enumerate_allocations: every allocation is singular", 0.0);
    survey.mean_rate = total / survey.evaluated;
    return survey;
}

}  // namespace dualsat
