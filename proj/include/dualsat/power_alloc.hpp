#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dualsat/precoding.hpp"

namespace dualsat {

/// Per-user powers for max sum log2(1 + p_k) s.t. B p <= P, p >= 0.
template <typename Scalar = double>
struct PowerAllocation {
    VectorX<Scalar> p;       // per-user power
    VectorX<Scalar> lambda;  // per-antenna multipliers
    Scalar objective = Scalar(0);     // bps/Hz
    Scalar duality_gap = Scalar(0);   // certified distance to the optimum
    int iterations = 0;
};

struct PacOptions {
    double tol = 1e-6;      // duality gap, bps/Hz
    double kkt_tol = 1e-6;  // relative stationarity / complementary slackness
    int max_iterations = 100000;
};

struct KktResiduals {
    double stationarity = 0.0;  // max_k |1/((1+p_k) ln2) - (B^T lambda)_k| / max(1, .)
    double slackness = 0.0;     // max_j lambda_j (P_j - (B p)_j) / P_j
    double infeasibility = 0.0; // max_j ((B p)_j - P_j)
    double min_power = 0.0;
};

class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double gap, const KktResiduals& residuals)
        : std::runtime_error(what), gap_(gap), residuals_(residuals) {}
    double gap() const { return gap_; }
    const KktResiduals& residuals() const { return residuals_; }

private:
    double gap_;
    KktResiduals residuals_;
};

inline constexpr double kZeroPower = 1e-9;

template <typename DerivedB, typename DerivedP, typename Scalar>
KktResiduals kkt_residuals(const Eigen::MatrixBase<DerivedB>& load, const Eigen::MatrixBase<DerivedP>& budget,
                           const PowerAllocation<Scalar>& alloc)
{
    const Scalar ln2 = std::numbers::ln2_v<Scalar>;
    const VectorX<Scalar> used = load * alloc.p;
    const VectorX<Scalar> price = load.transpose() * alloc.lambda;
    KktResiduals r;
    r.min_power = alloc.p.size() ? static_cast<double>(alloc.p.minCoeff()) : 0.0;
    for (Eigen::Index k = 0; k < alloc.p.size(); ++k) {
        if (alloc.p(k) <= Scalar(kZeroPower))
            continue;
        const Scalar marginal = Scalar(1) / ((Scalar(1) + alloc.p(k)) * ln2);
        const Scalar err = std::abs(marginal - price(k)) / std::max(Scalar(1), price(k));
        r.stationarity = std::max(r.stationarity, static_cast<double>(err));
    }
    for (Eigen::Index j = 0; j < used.size(); ++j) {
        const Scalar cs = alloc.lambda(j) * (budget(j) - used(j)) / budget(j);
        r.slackness = std::max(r.slackness, static_cast<double>(cs));
        r.infeasibility = std::max(r.infeasibility, static_cast<double>(used(j) - budget(j)));
    }
    return r;
}

namespace detail {

template <typename Scalar>
struct DualEval {
    VectorX<Scalar> p;
    VectorX<Scalar> grad;  // dD/dlambda = P - B p(lambda)
    Scalar value = std::numeric_limits<Scalar>::infinity();
    bool finite = false;
};

// Dual function D(lambda) = max_{p>=0} sum log2(1+p) - lambda^T (B p - P); the
// inner maximizer is the multi-constraint waterfilling
// p_k = max(0, 1/(ln2 (B^T lambda)_k) - 1).
template <typename Scalar>
DualEval<Scalar> dual_eval(const MatrixX<Scalar>& load, const VectorX<Scalar>& budget, const VectorX<Scalar>& lambda)
{
    const Scalar ln2 = std::numbers::ln2_v<Scalar>;
    DualEval<Scalar> e;
    const VectorX<Scalar> price = load.transpose() * lambda;
    e.p.resize(price.size());
    Scalar value = lambda.dot(budget);
    for (Eigen::Index k = 0; k < price.size(); ++k) {
        if (!(price(k) > Scalar(0)))
            return e;
        const Scalar pk = std::max(Scalar(0), Scalar(1) / (ln2 * price(k)) - Scalar(1));
        e.p(k) = pk;
        value += std::log2(Scalar(1) + pk) - price(k) * pk;
    }
    e.value = value;
    e.grad = budget - load * e.p;
    e.finite = std::isfinite(static_cast<double>(value));
    return e;
}

template <typename Scalar>
Scalar sum_rate(const VectorX<Scalar>& p)
{
    Scalar total(0);
    for (Eigen::Index k = 0; k < p.size(); ++k)
        total += std::log2(Scalar(1) + p(k));
    return total;
}

// Scales p(lambda) onto the feasible set.
template <typename Scalar>
VectorX<Scalar> feasible_scaling(const MatrixX<Scalar>& load, const VectorX<Scalar>& budget, const VectorX<Scalar>& p)
{
    const VectorX<Scalar> used = load * p;
    Scalar ratio(0);
    for (Eigen::Index j = 0; j < used.size(); ++j)
        ratio = std::max(ratio, used(j) / budget(j));
    VectorX<Scalar> out = p;
    if (ratio > Scalar(1))
        out /= ratio * (Scalar(1) + std::numeric_limits<Scalar>::epsilon());
    return out;
}

template <typename Scalar>
void validate_pac_inputs(const MatrixX<Scalar>& load, const VectorX<Scalar>& budget)
{
    if (load.rows() != budget.size())
        throw std::invalid_argument("solve_pac: budget length must equal the number of antennas");
    if (!load.allFinite() || (load.array() < Scalar(0)).any())
        throw std::invalid_argument("solve_pac: antenna loads must be finite and nonnegative");
    if (!budget.allFinite() || (budget.array() <= Scalar(0)).any())
        throw std::invalid_argument("solve_pac: per-antenna budgets must be positive");
    for (Eigen::Index k = 0; k < load.cols(); ++k)
        if (!(load.col(k).maxCoeff() > Scalar(0)))
            throw std::invalid_argument("solve_pac: user " + std::to_string(k) + " loads no antenna");
}

template <typename Scalar>
Scalar projected_gradient(const VectorX<Scalar>& lambda, const VectorX<Scalar>& grad)
{
    Scalar out(0);
    for (Eigen::Index j = 0; j < lambda.size(); ++j)
        out = std::max(out, std::abs(lambda(j) > Scalar(0) ? grad(j) : std::min(grad(j), Scalar(0))));
    return out;
}

// Armijo backtracking along the projected arc lambda(t) = max(0, lambda + t dir).
// `free` marks coordinates whose decrease is measured along dir; the rest are
// measured by their actual displacement (two-metric projection).
template <typename Scalar>
bool projected_search(const MatrixX<Scalar>& load, const VectorX<Scalar>& budget, const VectorX<Scalar>& lambda,
                      const DualEval<Scalar>& cur, const VectorX<Scalar>& dir, const std::vector<char>& free,
                      VectorX<Scalar>& lambda_out, DualEval<Scalar>& eval_out)
{
    Scalar t(1);
    for (int halvings = 0; halvings < 60; ++halvings, t /= Scalar(2)) {
        const VectorX<Scalar> trial = (lambda + t * dir).cwiseMax(Scalar(0));
        Scalar predicted(0);
        for (Eigen::Index j = 0; j < lambda.size(); ++j)
            predicted += free[static_cast<std::size_t>(j)] ? -t * cur.grad(j) * dir(j)
                                                            : cur.grad(j) * (lambda(j) - trial(j));
        if (!(predicted > Scalar(0)))
            return false;
        DualEval<Scalar> next = dual_eval(load, budget, trial);
        // Below rounding level D no longer resolves the decrease; accept a
        // step that shrinks the projected gradient instead.
        const Scalar noise = Scalar(64) * std::numeric_limits<Scalar>::epsilon() * std::max(Scalar(1), std::abs(cur.value));
        const bool flat = predicted <= noise && next.finite
            && projected_gradient(trial, next.grad) < projected_gradient(lambda, cur.grad);
        if (flat || (next.finite && cur.value - next.value >= Scalar(1e-4) * predicted)) {
            lambda_out = trial;
            eval_out = std::move(next);
            return true;
        }
    }
    return false;
}

// Newton's method on the KKT equations restricted to a guessed set A of users
// with positive power and a set F of binding constraints:
//   1/((1+p_k) ln2) = (B_F^T lambda_F)_k,  (B_FA p_A)_j = P_j.
// A holds the users powered at lambda or priced within a hair of the
// threshold 1/ln2; users whose solved power turns negative and constraints
// whose multiplier turns negative are dropped and the system re-solved. The
// caller certifies the result through the duality gap.
template <typename Scalar>
bool active_set_polish(const MatrixX<Scalar>& load, const VectorX<Scalar>& budget, const VectorX<Scalar>& p0,
                       const VectorX<Scalar>& lambda0, VectorX<Scalar>& p_out, VectorX<Scalar>& lambda_out)
{
    const Scalar ln2 = std::numbers::ln2_v<Scalar>;
    const VectorX<Scalar> price = load.transpose() * lambda0;
    std::vector<Eigen::Index> act, con;
    for (Eigen::Index k = 0; k < p0.size(); ++k)
        if (p0(k) > Scalar(0) || price(k) * ln2 <= Scalar(1) + Scalar(1e-6))
            act.push_back(k);
    for (Eigen::Index j = 0; j < lambda0.size(); ++j)
        if (lambda0(j) > Scalar(0))
            con.push_back(j);
    if (con.size() > act.size()) {
        std::sort(con.begin(), con.end(), [&](Eigen::Index a, Eigen::Index b) {
            return lambda0(a) * budget(a) > lambda0(b) * budget(b);
        });
        con.resize(act.size());
        std::sort(con.begin(), con.end());
    }

    while (!act.empty() && !con.empty()) {
        const auto na = static_cast<Eigen::Index>(act.size());
        const auto nf = static_cast<Eigen::Index>(con.size());
        MatrixX<Scalar> bfa(nf, na);
        VectorX<Scalar> pf(nf);
        VectorX<Scalar> x(na + nf);
        for (Eigen::Index a = 0; a < nf; ++a) {
            pf(a) = budget(con[static_cast<std::size_t>(a)]);
            x(na + a) = lambda0(con[static_cast<std::size_t>(a)]);
            for (Eigen::Index b = 0; b < na; ++b)
                bfa(a, b) = load(con[static_cast<std::size_t>(a)], act[static_cast<std::size_t>(b)]);
        }
        for (Eigen::Index b = 0; b < na; ++b)
            x(b) = p0(act[static_cast<std::size_t>(b)]);

        auto residual = [&](const VectorX<Scalar>& v) {
            VectorX<Scalar> r(na + nf);
            r.head(na) = (Scalar(1) / (ln2 * (Scalar(1) + v.head(na).array()))).matrix() - bfa.transpose() * v.tail(nf);
            r.tail(nf) = (bfa * v.head(na) - pf).cwiseQuotient(pf);
            return r;
        };
        VectorX<Scalar> r = residual(x);
        bool solvable = true;
        for (int it = 0; it < 40 && r.template lpNorm<Eigen::Infinity>() > Scalar(0); ++it) {
            MatrixX<Scalar> jac = MatrixX<Scalar>::Zero(na + nf, na + nf);
            for (Eigen::Index b = 0; b < na; ++b)
                jac(b, b) = Scalar(-1) / (ln2 * (Scalar(1) + x(b)) * (Scalar(1) + x(b)));
            jac.topRightCorner(na, nf) = -bfa.transpose();
            jac.bottomLeftCorner(nf, na) = pf.cwiseInverse().asDiagonal() * bfa;
            Eigen::FullPivLU<MatrixX<Scalar>> lu(jac);
            if (!lu.isInvertible()) {
                solvable = false;
                break;
            }
            const VectorX<Scalar> dx = lu.solve(-r);
            Scalar t(1);
            bool improved = false;
            for (int h = 0; h < 30; ++h, t /= Scalar(2)) {
                const VectorX<Scalar> trial = x + t * dx;
                if ((trial.head(na).array() <= Scalar(-1) + Scalar(1e-3)).any())
                    continue;
                const VectorX<Scalar> rt = residual(trial);
                if (rt.template lpNorm<Eigen::Infinity>() < r.template lpNorm<Eigen::Infinity>()) {
                    x = trial;
                    r = rt;
                    improved = true;
                    break;
                }
            }
            if (!improved)
                break;
        }
        if (!solvable || !x.allFinite())
            return false;

        Eigen::Index worst_p = 0, worst_l = 0;
        const Scalar min_p = x.head(na).minCoeff(&worst_p);
        const Scalar min_l = x.tail(nf).minCoeff(&worst_l);
        if (min_p < Scalar(0) && (min_l >= Scalar(0) || act.size() >= con.size())) {
            act.erase(act.begin() + worst_p);
            if (con.size() > act.size())
                return false;
            continue;
        }
        if (min_l < Scalar(0)) {
            con.erase(con.begin() + worst_l);
            continue;
        }

        p_out = VectorX<Scalar>::Zero(p0.size());
        lambda_out = VectorX<Scalar>::Zero(lambda0.size());
        for (Eigen::Index b = 0; b < na; ++b)
            p_out(act[static_cast<std::size_t>(b)]) = x(b);
        for (Eigen::Index a = 0; a < nf; ++a)
            lambda_out(con[static_cast<std::size_t>(a)]) = x(na + a);
        p_out = feasible_scaling(load, budget, p_out);
        return true;
    }
    return false;
}

// Projected gradient on the multipliers (lambda >= 0). Each step is scaled by
// the dual Hessian B diag(1/(ln2 s_k^2)) B^T restricted to the multipliers
// not held at their bound (two-metric projected Newton); if that fails to
// descend, a Barzilai-Borwein gradient step is taken instead. Stops once the
// duality gap of the rescaled primal point is within tol and the KKT
// residuals are within kkt_tol.
template <typename Scalar>
PowerAllocation<Scalar> solve_pac_core(const MatrixX<Scalar>& load, const VectorX<Scalar>& budget,
                                       const PacOptions& opt)
{
    validate_pac_inputs(load, budget);
    const Eigen::Index users = load.cols();
    const Eigen::Index antennas = load.rows();
    const Scalar ln2 = std::numbers::ln2_v<Scalar>;

    PowerAllocation<Scalar> best;
    if (users == 0) {
        best.p = VectorX<Scalar>(0);
        best.lambda = VectorX<Scalar>::Zero(antennas);
        return best;
    }

    // Start from uniform multipliers priced at the equal-power point.
    Scalar equal_power = std::numeric_limits<Scalar>::infinity();
    const VectorX<Scalar> row_sum = load.rowwise().sum();
    for (Eigen::Index j = 0; j < antennas; ++j)
        if (row_sum(j) > Scalar(0))
            equal_power = std::min(equal_power, budget(j) / row_sum(j));
    const Scalar mean_col = load.sum() / Scalar(users);
    VectorX<Scalar> lambda =
        VectorX<Scalar>::Constant(antennas, Scalar(1) / ((Scalar(1) + equal_power) * ln2 * mean_col));

    DualEval<Scalar> cur = dual_eval(load, budget, lambda);
    Scalar step = lambda.template lpNorm<Eigen::Infinity>()
                  / std::max(cur.grad.template lpNorm<Eigen::Infinity>(), std::numeric_limits<Scalar>::min());
    const Scalar step_min = Scalar(1e-30);
    const Scalar step_max = Scalar(1e30);

    Scalar gap = std::numeric_limits<Scalar>::infinity();
    KktResiduals res;
    std::vector<char> free(static_cast<std::size_t>(antennas));
    for (int it = 1; it <= opt.max_iterations; ++it) {
        best.lambda = lambda;
        best.p = feasible_scaling(load, budget, cur.p);
        best.objective = sum_rate(best.p);
        best.iterations = it;
        gap = std::max(Scalar(0), cur.value - best.objective);
        best.duality_gap = gap;
        res = kkt_residuals(load, budget, best);
        auto converged = [&] {
            return gap <= Scalar(opt.tol) && res.stationarity <= opt.kkt_tol && res.slackness <= opt.kkt_tol;
        };
        if (!converged() && gap <= Scalar(1e-2) * std::max(Scalar(1), std::abs(cur.value))) {
            PowerAllocation<Scalar> cand;
            if (active_set_polish(load, budget, cur.p, lambda, cand.p, cand.lambda)) {
                const DualEval<Scalar> bound = dual_eval(load, budget, cand.lambda);
                cand.objective = sum_rate(cand.p);
                cand.iterations = it;
                cand.duality_gap = std::max(Scalar(0), bound.value - cand.objective);
                const KktResiduals cres = kkt_residuals(load, budget, cand);
                if (bound.finite && cand.duality_gap <= gap) {
                    best = cand;
                    gap = cand.duality_gap;
                    res = cres;
                }
            }
        }
        if (converged()) {
            // Certified on the exact point; tiny powers are only zeroed on output.
            best.p = (best.p.array() < Scalar(kZeroPower)).select(Scalar(0), best.p);
            best.objective = sum_rate(best.p);
            return best;
        }

        // Multipliers at (or numerically near) zero whose gradient pushes them
        // further down stay on the bound.
        const Scalar eps = std::min((lambda - (lambda - cur.grad).cwiseMax(Scalar(0))).template lpNorm<Eigen::Infinity>(),
                                    Scalar(1e-2) * lambda.template lpNorm<Eigen::Infinity>());
        std::vector<Eigen::Index> free_idx;
        for (Eigen::Index j = 0; j < antennas; ++j) {
            const bool bound = lambda(j) <= eps && cur.grad(j) > Scalar(0);
            free[static_cast<std::size_t>(j)] = !bound;
            if (!bound)
                free_idx.push_back(j);
        }

        const VectorX<Scalar> price = load.transpose() * lambda;
        VectorX<Scalar> curvature = VectorX<Scalar>::Zero(users);
        for (Eigen::Index k = 0; k < users; ++k)
            if (cur.p(k) > Scalar(0))
                curvature(k) = Scalar(1) / (ln2 * price(k) * price(k));
        const MatrixX<Scalar> hessian = load * curvature.asDiagonal() * load.transpose();

        VectorX<Scalar> dir = VectorX<Scalar>::Zero(antennas);
        for (Eigen::Index j = 0; j < antennas; ++j)
            if (!free[static_cast<std::size_t>(j)])
                dir(j) = -cur.grad(j) / std::max(hessian(j, j), std::numeric_limits<Scalar>::min());
        bool moved = false;
        if (!free_idx.empty()) {
            const auto nf = static_cast<Eigen::Index>(free_idx.size());
            MatrixX<Scalar> hff(nf, nf);
            VectorX<Scalar> gf(nf);
            for (Eigen::Index a = 0; a < nf; ++a) {
                gf(a) = cur.grad(free_idx[static_cast<std::size_t>(a)]);
                for (Eigen::Index b = 0; b < nf; ++b)
                    hff(a, b) = hessian(free_idx[static_cast<std::size_t>(a)], free_idx[static_cast<std::size_t>(b)]);
            }
            const Scalar ridge = Scalar(1e-12) * std::max(hff.diagonal().maxCoeff(), std::numeric_limits<Scalar>::min());
            hff.diagonal().array() += ridge;
            Eigen::LDLT<MatrixX<Scalar>> ldlt(hff);
            if (ldlt.info() == Eigen::Success) {
                const VectorX<Scalar> df = -ldlt.solve(gf);
                if (df.allFinite() && gf.dot(df) < Scalar(0)) {
                    for (Eigen::Index a = 0; a < nf; ++a)
                        dir(free_idx[static_cast<std::size_t>(a)]) = df(a);
                    VectorX<Scalar> next_lambda;
                    DualEval<Scalar> next;
                    if (projected_search(load, budget, lambda, cur, dir, free, next_lambda, next)) {
                        lambda = std::move(next_lambda);
                        cur = std::move(next);
                        moved = true;
                    }
                }
            }
        }
        if (moved)
            continue;

        // Fallback: Barzilai-Borwein projected gradient step.
        std::fill(free.begin(), free.end(), 0);
        // Keep the first trial point within the scale of the current multipliers.
        const Scalar lam_scale = lambda.template lpNorm<Eigen::Infinity>();
        const Scalar g_scale = cur.grad.template lpNorm<Eigen::Infinity>();
        if (lam_scale > Scalar(0) && g_scale > Scalar(0)) {
            const Scalar ref = lam_scale / g_scale;
            // A step below the resolution of lambda would not move at all.
            step = std::clamp(step, Scalar(64) * std::numeric_limits<Scalar>::epsilon() * ref, ref);
        }
        const VectorX<Scalar> gdir = -step * cur.grad;
        VectorX<Scalar> next_lambda;
        DualEval<Scalar> next;
        if (!projected_search(load, budget, lambda, cur, gdir, free, next_lambda, next)) {
            if (step <= step_min)
                break;
            step = std::max(step_min, step * Scalar(1e-3));
            continue;
        }
        const VectorX<Scalar> s = next_lambda - lambda;
        const VectorX<Scalar> y = next.grad - cur.grad;
        lambda = std::move(next_lambda);
        cur = std::move(next);
        const Scalar sy = s.dot(y);
        step = sy > Scalar(0) ? std::clamp(s.squaredNorm() / sy, step_min, step_max) : step_max;
    }

    std::ostringstream msg;
    msg << "solve_pac: no convergence after " << best.iterations << " iterations (gap " << static_cast<double>(gap)
        << ", stationarity " << res.stationarity << ", slackness " << res.slackness << ")";
    throw SolverFailure(msg.str(), static_cast<double>(gap), res);
}

}  // namespace detail

/// Sum-rate power allocation under per-antenna constraints: maximizes
/// sum_k log2(1 + p_k) subject to load * p <= budget, p >= 0. The returned
/// multipliers certify the result to within `tol` bps/Hz.
///
/// Throws std::invalid_argument on malformed inputs and SolverFailure when the
/// iteration cap is reached.
template <typename DerivedB, typename DerivedP>
PowerAllocation<typename DerivedB::Scalar> solve_pac(const Eigen::MatrixBase<DerivedB>& load,
                                                     const Eigen::MatrixBase<DerivedP>& budget,
                                                     typename DerivedB::Scalar tol = 1e-6)
{
    using Scalar = typename DerivedB::Scalar;
    if (!(tol > Scalar(0) && tol <= Scalar(1e-2)))
        throw std::invalid_argument("solve_pac: tol must lie in (0, 1e-2]");
    PacOptions opt;
    opt.tol = static_cast<double>(tol);
    return detail::solve_pac_core<Scalar>(load, budget, opt);
}

/// p = c * 1 with the largest c keeping load * p <= budget.
template <typename DerivedB, typename DerivedP>
PowerAllocation<typename DerivedB::Scalar> equal_power_alloc(Eigen::Index users,
                                                             const Eigen::MatrixBase<DerivedB>& load,
                                                             const Eigen::MatrixBase<DerivedP>& budget)
{
    using Scalar = typename DerivedB::Scalar;
    if (load.cols() != users || load.rows() != budget.size())
        throw std::invalid_argument("equal_power_alloc: dimension mismatch");
    Scalar c = std::numeric_limits<Scalar>::infinity();
    const VectorX<Scalar> row_sum = load.rowwise().sum();
    for (Eigen::Index j = 0; j < row_sum.size(); ++j)
        if (row_sum(j) > Scalar(0))
            c = std::min(c, budget(j) / row_sum(j));
    if (!std::isfinite(static_cast<double>(c)))
        c = Scalar(0);
    PowerAllocation<Scalar> out;
    out.p = VectorX<Scalar>::Constant(users, c);
    out.lambda = VectorX<Scalar>::Zero(budget.size());
    out.objective = detail::sum_rate(out.p);
    return out;
}

}  // namespace dualsat
