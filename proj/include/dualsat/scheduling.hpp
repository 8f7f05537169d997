#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dualsat/channel.hpp"
#include "dualsat/precoding.hpp"

namespace dualsat {

/// Users chosen for each satellite, in selection order.
struct Allocation {
    std::vector<UserId> s1;
    std::vector<UserId> s2;
};

class SchedulingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// g = h (I - sum_j b_j^T b_j / |b_j|^2) over a pairwise-orthogonal basis.
template <typename Derived>
RowVectorX<typename Derived::Scalar> project_channel(const Eigen::MatrixBase<Derived>& h,
                                                     std::span<const RowVectorX<typename Derived::Scalar>> basis)
{
    RowVectorX<typename Derived::Scalar> g = h;
    for (const auto& b : basis) {
        const auto nb = b.squaredNorm();
        if (nb > 0)
            g -= (g.dot(b) / nb) * b;
    }
    return g;
}

/// Interference proxy h W W^T h^T seen from the other satellite's current
/// precoder under equal power. An empty precoder gives the neutral value 1.
template <typename DerivedH, typename DerivedW>
typename DerivedH::Scalar received_interference(const Eigen::MatrixBase<DerivedH>& h_other,
                                                const Eigen::MatrixBase<DerivedW>& w_other)
{
    if (w_other.cols() == 0)
        return 1;
    return (h_other * w_other).squaredNorm();
}

/// Product over victim rows l of h_l W W^T h_l^T, W being this satellite's
/// precoder with the candidate added. No victims gives 1 (empty product).
template <typename DerivedV, typename DerivedW>
typename DerivedV::Scalar induced_interference(const Eigen::MatrixBase<DerivedV>& victims,
                                               const Eigen::MatrixBase<DerivedW>& w_with_candidate)
{
    typename DerivedV::Scalar product = 1;
    if (victims.rows() == 0)
        return product;
    const auto leak = (victims * w_with_candidate).rowwise().squaredNorm().eval();
    for (Eigen::Index l = 0; l < leak.size(); ++l)
        product *= leak(l);
    return product;
}

/// Which users the induced-interference product runs over.
enum class InducedOver {
    OtherSet,     // users already allocated to the other satellite
    Unallocated,  // every other unprocessed user (literal pseudocode reading)
};

struct SiuaOptions {
    InducedOver induced_over = InducedOver::OtherSet;
    double min_denominator = 1e-12;
};

/// Per-candidate quantities of one selection round.
struct SchedulingMetrics {
    RowVectorX<double> g1k, g2k;
    double ir1 = 1, ir2 = 1;
    double ii1 = 1, ii2 = 1;
    double mu1 = -std::numeric_limits<double>::infinity();
    double mu2 = -std::numeric_limits<double>::infinity();
};

struct SiuaResult {
    Allocation allocation;
    int clamp_events = 0;     // denominators raised to min_denominator
    int singular_skips = 0;   // candidates whose augmented channel was singular
    /// Scores of the winning candidate in each round, first round excluded.
    std::vector<double> winning_scores;
};

/// Interference-aware semi-orthogonal allocation of M1 + M2 users from a pool
/// whose rows of h1 (M x N1) and h2 (M x N2) are the channels of the same user
/// toward satellites 1 and 2.
///
/// Seeds each set with the strongest channel toward its satellite, then each
/// round scores every unprocessed user k for both satellites by
/// |g_k| / (I^r_k * I^i_k) (projected-channel norm over received and induced
/// interference proxies) and moves the best-scoring user to its satellite.
/// Ties go to the lower user id and, across satellites, to satellite 1.
SiuaResult siua(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, int m1, int m2,
                const SiuaOptions& options = {});

/// Metrics for candidate k given the current sets (exposed for inspection and tests).
SchedulingMetrics siua_metrics(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, const Allocation& current,
                               std::span<const RowVectorX<double>> basis1, std::span<const RowVectorX<double>> basis2,
                               std::span<const UserId> unprocessed, UserId k, const SiuaOptions& options = {});

/// Greedy semi-orthogonal selection of `cap` rows of `h`: seeded by the largest
/// row norm, then repeatedly the largest projection onto the orthogonal
/// complement of the rows already chosen. Rows listed in `excluded` are skipped.
std::vector<UserId> sus(const Eigen::MatrixXd& h, int cap, std::span<const UserId> excluded = {});

/// SUS run independently per satellite on a shared pool; the satellites pick
/// in alternation (satellite 1 first) so the sets stay disjoint.
Allocation sus_dual(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, int m1, int m2);

/// Uniformly random disjoint sets of sizes m1 and m2 drawn from `user_ids`.
Allocation random_alloc(std::span<const UserId> user_ids, int m1, int m2, std::uint64_t rng_seed);

}  // namespace dualsat
