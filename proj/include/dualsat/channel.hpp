#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

#include "dualsat/bessel.hpp"

namespace dualsat {

using UserId = Eigen::Index;

inline constexpr double kGeoAltitudeKm = 35786.0;
inline constexpr double kBesselBeamCoeff = 2.07123;

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

/// Bessel-function antenna pattern of one spot beam.
template <typename Scalar = double>
struct BeamPattern {
    Scalar g_max = Scalar(1);      // linear boresight gain
    Scalar theta_3db = Scalar(0);  // half-power off-axis angle, rad
    Scalar u_coeff = Scalar(kBesselBeamCoeff);

    void validate() const
    {
        if (!(g_max > Scalar(0)))
            throw std::invalid_argument("BeamPattern: g_max must be positive");
        if (!(theta_3db > Scalar(0) && theta_3db < Scalar(std::numbers::pi / 2)))
            throw std::invalid_argument("BeamPattern: theta_3db must lie in (0, pi/2)");
    }
};

/// Linear gain toward off-axis angle theta:
/// g_max * (J1(u)/(2u) + 36 J3(u)/u^3)^2 with u = u_coeff sin(theta) / sin(theta_3db).
template <typename Scalar>
Scalar beam_gain(const BeamPattern<Scalar>& pattern, Scalar theta)
{
    using std::sin;
    if (!(theta >= Scalar(0)))
        throw std::invalid_argument("beam_gain: negative off-axis angle");
    if (!(theta < Scalar(std::numbers::pi / 2)))
        throw std::invalid_argument("beam_gain: off-axis angle must be below pi/2");
    const Scalar u = pattern.u_coeff * sin(theta) / sin(pattern.theta_3db);
    const Scalar field = beam_field(u);
    return pattern.g_max * field * field;
}

struct BeamGrid {
    std::vector<Eigen::Vector2d> centers;  // km
    double beam_diameter = 600.0;          // km, also the lattice spacing
    int satellite_id = 1;
    Eigen::Vector2d lattice_offset = Eigen::Vector2d::Zero();
    double altitude_km = kGeoAltitudeKm;

    Eigen::Index size() const { return static_cast<Eigen::Index>(centers.size()); }
};

/// First `beams` points of a hexagonal lattice with spacing `beam_diameter`,
/// ordered by ring (center, then the six neighbors counter-clockwise from +x,
/// and so on), shifted by `offset`.
BeamGrid make_hex_grid(int beams, double beam_diameter, int satellite_id,
                       const Eigen::Vector2d& offset = Eigen::Vector2d::Zero(),
                       double altitude_km = kGeoAltitudeKm);

struct UserTerminal {
    UserId id = 0;
    Eigen::Vector2d position = Eigen::Vector2d::Zero();  // km
    double g_rx = 1.0;                                   // linear
};

struct Disc {
    Eigen::Vector2d center = Eigen::Vector2d::Zero();
    double radius = 0.0;
};

/// Smallest centroid-centered disc holding every beam center of the grids,
/// grown by one beam radius.
Disc coverage_disc(const std::vector<BeamGrid>& grids);

struct LinkBudget {
    double p_sat_dbw = 21.0;
    double g_tx_dbi = 52.0;
    double g_rx_dbi = 40.0;
    double fsl_db = 210.0;  // loss, entered as a positive number
    double noise_dbw = -118.0;
    double snr_ref_db = 21.0;  // consistency check on the rows above, not an input

    double signal_dbw() const { return p_sat_dbw + g_tx_dbi + g_rx_dbi - fsl_db; }
    double boresight_snr_db() const { return signal_dbw() - noise_dbw; }
    double boresight_snr() const { return db_to_linear(boresight_snr_db()); }

    /// Per-antenna transmit power, in units of the saturated power, that puts
    /// the boresight SNR at `snr_db`.
    double per_antenna_power(double snr_db) const { return db_to_linear(snr_db - boresight_snr_db()); }
};

/// K x N real channel toward one satellite; rows are users.
struct ChannelMatrix {
    Eigen::MatrixXd entries;
    std::vector<UserId> user_ids;
    int satellite_id = 1;
};

/// arctan(|user - center| / altitude), flat-earth geometry.
double off_axis_angle(const Eigen::Vector2d& beam_center, const Eigen::Vector2d& user_pos, double sat_altitude);

/// `count` users i.i.d. uniform over the disc. Deterministic per seed, and the
/// first n users of a larger drop equal a drop of n users with the same seed.
std::vector<UserTerminal> drop_users(int count, const Disc& coverage, std::uint64_t rng_seed,
                                     double g_rx = db_to_linear(40.0));

/// entries(k, n) = sqrt(snr0 * g(theta_kn)/g_max * g_rx/G_R), snr0 being the
/// boresight SNR at unit per-antenna power and unit noise.
ChannelMatrix build_channel(const std::vector<UserTerminal>& users, const BeamGrid& grid,
                            const BeamPattern<double>& pattern, const LinkBudget& budget);

}  // namespace dualsat
