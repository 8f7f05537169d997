#include "dualsat/scheduling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dualsat/rng.hpp"

namespace dualsat {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& h, std::span<const UserId> ids)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()), h.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = h.row(ids[i]);
    return out;
}

// Same as gather_rows with one extra row appended.
Eigen::MatrixXd gather_rows_plus(const Eigen::MatrixXd& h, std::span<const UserId> ids, UserId extra)
{
    Eigen::MatrixXd out(static_cast<Eigen::Index>(ids.size()) + 1, h.cols());
    for (std::size_t i = 0; i < ids.size(); ++i)
        out.row(static_cast<Eigen::Index>(i)) = h.row(ids[i]);
    out.row(out.rows() - 1) = h.row(extra);
    return out;
}

// State shared by every candidate of one round.
struct Round {
    const Eigen::MatrixXd& h1;
    const Eigen::MatrixXd& h2;
    const Allocation& current;
    std::span<const RowVectorX<double>> basis1;
    std::span<const RowVectorX<double>> basis2;
    std::span<const UserId> unprocessed;
    Eigen::MatrixXd w1, w2;            // current precoders
    Eigen::MatrixXd victims1, victims2;  // other-set rows toward the own satellite
};

Round make_round(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, const Allocation& current,
                 std::span<const RowVectorX<double>> basis1, std::span<const RowVectorX<double>> basis2,
                 std::span<const UserId> unprocessed)
{
    Round r{h1, h2, current, basis1, basis2, unprocessed, {}, {}, {}, {}};
    r.w1 = zf_precoder(gather_rows(h1, current.s1));
    r.w2 = zf_precoder(gather_rows(h2, current.s2));
    r.victims1 = gather_rows(h1, current.s2);
    r.victims2 = gather_rows(h2, current.s1);
    return r;
}

struct SideScore {
    double log_mu = kNegInf;
    bool valid = false;
    bool clamped = false;
    bool singular = false;
};

// Log-domain score for adding candidate k to one satellite. `own` / `other`
// are the pool channels toward this satellite and the other one.
SideScore score_side(const Eigen::MatrixXd& own, const Eigen::MatrixXd& other, std::span<const UserId> own_set,
                     std::span<const RowVectorX<double>> basis, const Eigen::MatrixXd& w_other,
                     const Eigen::MatrixXd& other_set_victims, std::span<const UserId> unprocessed, UserId k,
                     const SiuaOptions& opt, SchedulingMetrics& m, int side)
{
    SideScore s;
    const RowVectorX<double> g = project_channel(own.row(k), basis);
    const double ir = received_interference(other.row(k), w_other);

    Eigen::MatrixXd w_aug;
    try {
        w_aug = zf_precoder(gather_rows_plus(own, own_set, k));
    } catch (const SingularChannelError&) {
        s.singular = true;
        (side == 1 ? m.g1k : m.g2k) = g;
        return s;
    }

    // Induced interference in the log domain: the unallocated-user reading
    // multiplies hundreds of factors.
    double log_ii = 0.0;
    double ii = 1.0;
    if (opt.induced_over == InducedOver::OtherSet) {
        ii = induced_interference(other_set_victims, w_aug);
        log_ii = std::log(ii);
    } else {
        for (const UserId l : unprocessed) {
            if (l == k)
                continue;
            const double leak = (own.row(l) * w_aug).squaredNorm();
            log_ii += std::log(leak);
        }
        ii = std::exp(log_ii);
    }

    double log_den = std::log(ir) + log_ii;
    const double log_min = std::log(opt.min_denominator);
    if (!(log_den >= log_min)) {
        log_den = log_min;
        s.clamped = true;
    }
    s.log_mu = std::log(g.norm()) - log_den;
    s.valid = !std::isnan(s.log_mu);

    if (side == 1) {
        m.g1k = g;
        m.ir1 = ir;
        m.ii1 = ii;
        m.mu1 = std::exp(s.log_mu);
    } else {
        m.g2k = g;
        m.ir2 = ir;
        m.ii2 = ii;
        m.mu2 = std::exp(s.log_mu);
    }
    return s;
}

struct CandidateScores {
    SideScore side1, side2;
    SchedulingMetrics metrics;
};

CandidateScores score_candidate(const Round& r, UserId k, const SiuaOptions& opt, bool need1, bool need2)
{
    CandidateScores c;
    if (need1)
        c.side1 = score_side(r.h1, r.h2, r.current.s1, r.basis1, r.w2, r.victims1, r.unprocessed, k, opt,
                             c.metrics, 1);
    if (need2)
        c.side2 = score_side(r.h2, r.h1, r.current.s2, r.basis2, r.w1, r.victims2, r.unprocessed, k, opt,
                             c.metrics, 2);
    return c;
}

UserId argmax_norm(const Eigen::MatrixXd& h, UserId skip = -1)
{
    UserId best = -1;
    double best_norm = -1.0;
    for (UserId k = 0; k < h.rows(); ++k) {
        if (k == skip)
            continue;
        const double n = h.row(k).norm();
        if (n > best_norm) {
            best_norm = n;
            best = k;
        }
    }
    return best;
}

}  // namespace

SchedulingMetrics siua_metrics(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, const Allocation& current,
                               std::span<const RowVectorX<double>> basis1, std::span<const RowVectorX<double>> basis2,
                               std::span<const UserId> unprocessed, UserId k, const SiuaOptions& options)
{
    const Round r = make_round(h1, h2, current, basis1, basis2, unprocessed);
    return score_candidate(r, k, options, true, true).metrics;
}

SiuaResult siua(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, int m1, int m2, const SiuaOptions& options)
{
    if (h1.rows() != h2.rows())
        throw std::invalid_argument("siua: channel pools must be row-aligned");
    if (m1 < 1 || m2 < 1)
        throw std::invalid_argument("siua: both satellites need a positive capacity");
    if (m1 > h1.cols() || m2 > h2.cols())
        throw std::invalid_argument("siua: capacity exceeds the number of antennas");
    const UserId pool = h1.rows();
    if (pool < m1 + m2)
        throw SchedulingError("siua: pool of " + std::to_string(pool) + " users is smaller than "
                              + std::to_string(m1 + m2));

    SiuaResult out;
    Allocation& alloc = out.allocation;
    std::vector<RowVectorX<double>> basis1, basis2;

    // Step 1: strongest channel toward each satellite. If one user is the
    // strongest toward both, it goes where its norm is larger and the other
    // satellite takes its own runner-up.
    UserId first1 = argmax_norm(h1);
    UserId first2 = argmax_norm(h2);
    if (first1 == first2) {
        if (h1.row(first1).norm() >= h2.row(first2).norm())
            first2 = argmax_norm(h2, first1);
        else
            first1 = argmax_norm(h1, first2);
    }
    alloc.s1.push_back(first1);
    alloc.s2.push_back(first2);
    basis1.push_back(h1.row(first1));
    basis2.push_back(h2.row(first2));

    std::vector<UserId> unprocessed;
    unprocessed.reserve(static_cast<std::size_t>(pool));
    for (UserId k = 0; k < pool; ++k)
        if (k != first1 && k != first2)
            unprocessed.push_back(k);

    while (static_cast<int>(alloc.s1.size()) < m1 || static_cast<int>(alloc.s2.size()) < m2) {
        const bool need1 = static_cast<int>(alloc.s1.size()) < m1;
        const bool need2 = static_cast<int>(alloc.s2.size()) < m2;
        const Round round = make_round(h1, h2, alloc, basis1, basis2, unprocessed);

        std::size_t best1 = unprocessed.size(), best2 = unprocessed.size();
        double log_mu1 = kNegInf, log_mu2 = kNegInf;
        RowVectorX<double> g_best1, g_best2;
        for (std::size_t i = 0; i < unprocessed.size(); ++i) {
            const CandidateScores c = score_candidate(round, unprocessed[i], options, need1, need2);
            out.clamp_events += int(c.side1.clamped) + int(c.side2.clamped);
            out.singular_skips += int(c.side1.singular) + int(c.side2.singular);
            if (c.side1.valid && (best1 == unprocessed.size() || c.side1.log_mu > log_mu1)) {
                best1 = i;
                log_mu1 = c.side1.log_mu;
                g_best1 = c.metrics.g1k;
            }
            if (c.side2.valid && (best2 == unprocessed.size() || c.side2.log_mu > log_mu2)) {
                best2 = i;
                log_mu2 = c.side2.log_mu;
                g_best2 = c.metrics.g2k;
            }
        }

        const bool ok1 = need1 && best1 < unprocessed.size();
        const bool ok2 = need2 && best2 < unprocessed.size();
        if (!ok1 && !ok2)
            throw SchedulingError("siua: every remaining candidate has a singular channel");

        std::size_t winner;
        if (ok1 && (!ok2 || log_mu1 >= log_mu2)) {
            winner = best1;
            alloc.s1.push_back(unprocessed[winner]);
            basis1.push_back(g_best1);
            out.winning_scores.push_back(std::exp(log_mu1));
        } else {
            winner = best2;
            alloc.s2.push_back(unprocessed[winner]);
            basis2.push_back(g_best2);
            out.winning_scores.push_back(std::exp(log_mu2));
        }
        unprocessed.erase(unprocessed.begin() + static_cast<std::ptrdiff_t>(winner));
    }
    return out;
}

namespace {

// One satellite's greedy max-projection state.
struct SusState {
    const Eigen::MatrixXd& h;
    std::vector<UserId> selected;
    std::vector<RowVectorX<double>> basis;

    // Picks the best remaining user; `taken` marks users no longer available.
    void step(std::vector<char>& taken)
    {
        UserId best = -1;
        double best_norm = -1.0;
        RowVectorX<double> best_g;
        for (UserId k = 0; k < h.rows(); ++k) {
            if (taken[static_cast<std::size_t>(k)])
                continue;
            RowVectorX<double> g = project_channel(h.row(k), std::span<const RowVectorX<double>>(basis));
            const double n = g.norm();
            if (n > best_norm) {
                best_norm = n;
                best = k;
                best_g = std::move(g);
            }
        }
        if (best < 0)
            throw SchedulingError("sus: no candidates left");
        taken[static_cast<std::size_t>(best)] = 1;
        selected.push_back(best);
        basis.push_back(std::move(best_g));
    }
};

}  // namespace

std::vector<UserId> sus(const Eigen::MatrixXd& h, int cap, std::span<const UserId> excluded)
{
    if (cap < 0)
        throw std::invalid_argument("sus: negative capacity");
    std::vector<char> taken(static_cast<std::size_t>(h.rows()), 0);
    for (const UserId k : excluded) {
        if (k < 0 || k >= h.rows())
            throw std::invalid_argument("sus: excluded id out of range");
        taken[static_cast<std::size_t>(k)] = 1;
    }
    const auto available = std::count(taken.begin(), taken.end(), 0);
    if (available < cap)
        throw SchedulingError("sus: pool of " + std::to_string(available) + " users is smaller than "
                              + std::to_string(cap));
    SusState state{h, {}, {}};
    for (int i = 0; i < cap; ++i)
        state.step(taken);
    return state.selected;
}

Allocation sus_dual(const Eigen::MatrixXd& h1, const Eigen::MatrixXd& h2, int m1, int m2)
{
    if (h1.rows() != h2.rows())
        throw std::invalid_argument("sus_dual: channel pools must be row-aligned");
    if (m1 < 0 || m2 < 0)
        throw std::invalid_argument("sus_dual: negative capacity");
    if (h1.rows() < m1 + m2)
        throw SchedulingError("sus_dual: pool of " + std::to_string(h1.rows()) + " users is smaller than "
                              + std::to_string(m1 + m2));
    std::vector<char> taken(static_cast<std::size_t>(h1.rows()), 0);
    SusState sat1{h1, {}, {}};
    SusState sat2{h2, {}, {}};
    while (static_cast<int>(sat1.selected.size()) < m1 || static_cast<int>(sat2.selected.size()) < m2) {
        if (static_cast<int>(sat1.selected.size()) < m1)
            sat1.step(taken);
        if (static_cast<int>(sat2.selected.size()) < m2)
            sat2.step(taken);
    }
    return {sat1.selected, sat2.selected};
}

Allocation random_alloc(std::span<const UserId> user_ids, int m1, int m2, std::uint64_t rng_seed)
{
    if (m1 < 0 || m2 < 0)
        throw std::invalid_argument("random_alloc: negative capacity");
    const std::size_t need = static_cast<std::size_t>(m1) + static_cast<std::size_t>(m2);
    if (user_ids.size() < need)
        throw SchedulingError("random_alloc: pool of " + std::to_string(user_ids.size()) + " users is smaller than "
                              + std::to_string(need));
    std::vector<UserId> ids(user_ids.begin(), user_ids.end());
    Rng rng(rng_seed);
    for (std::size_t i = 0; i < need; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(ids.size() - i));
        std::swap(ids[i], ids[j]);
    }
    Allocation a;
    a.s1.assign(ids.begin(), ids.begin() + m1);
    a.s2.assign(ids.begin() + m1, ids.begin() + static_cast<std::ptrdiff_t>(need));
    return a;
}

}  // namespace dualsat
