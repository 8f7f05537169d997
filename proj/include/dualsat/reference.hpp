#pragma once

#include <Eigen/Dense>

#include "dualsat/evaluation.hpp"
#include "dualsat/scheduling.hpp"

namespace dualsat {

/// Brute-force optimum of max sum log2(1+p_k) s.t. B p <= P, p >= 0 for at
/// most three users. The first S-1 powers run over a grid of `steps`
/// points per axis of their box [0, min_j P_j / B_jk]; the last power is set
/// to its largest feasible value.
double pac_grid_optimum(const Eigen::MatrixXd& load, const Eigen::VectorXd& budget, int steps = 1000);

struct AllocationSurvey {
    Allocation best;
    double best_rate = 0.0;
    double mean_rate = 0.0;  // over every evaluable allocation, i.e. the random-allocation mean
    int evaluated = 0;
    int singular = 0;
};

/// Every ordered pair of disjoint user sets of sizes m1 and m2, each run
/// through evaluate_allocation. Meant for pools of a handful of users.
AllocationSurvey enumerate_allocations(const DualChannel& pool, int m1, int m2, const Eigen::VectorXd& budgets1,
                                       const Eigen::VectorXd& budgets2);

}  // namespace dualsat
