#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dualsat/channel.hpp"

namespace dualsat {

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

struct ValidationOptions {
    /// Replaces both solver tolerances (duality gap and KKT); values above the
    /// public limit of 1e-2 are passed straight to the solver core.
    std::optional<double> solver_tol;
    double u_coeff = kBesselBeamCoeff;

    int zf_instances = 1000;
    int pac_grid_instances = 1000;  // one to three users
    int pac_kkt_instances = 1000;   // seven users
    int siua_instances = 200;       // 2+2 beams, pool of 6
    int siua_batch = 20;
    int determinism_trials = 4;
    std::uint64_t seed = 0x5EED;
};

CheckResult check_beam_boresight(const ValidationOptions& opt);
CheckResult check_half_power(const ValidationOptions& opt);
CheckResult check_boresight_snr(const ValidationOptions& opt);
/// ||H W - I||_inf <= 1e-8 over random square and wide channels.
CheckResult check_zf_residuals(const ValidationOptions& opt);
/// solve_pac against the grid-search optimum, within 1e-2 bps/Hz.
CheckResult check_pac_grid(const ValidationOptions& opt);
/// Feasibility, stationarity and complementary slackness within 1e-5 on
/// seven-user ZF loads from the default geometry.
CheckResult check_pac_kkt(const ValidationOptions& opt);
/// SIUA against exhaustive enumeration on small instances: mean rate at least
/// 90% of the optimum, and at least the random-allocation mean in every batch.
CheckResult check_siua_oracle(const ValidationOptions& opt);
/// Identical CSV output across reruns and worker counts.
CheckResult check_determinism(const ValidationOptions& opt);

std::vector<CheckResult> run_validation(const ValidationOptions& opt);

}  // namespace dualsat
