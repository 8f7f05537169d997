#include "dualsat/channel.hpp"

#include <algorithm>
#include <tuple>

#include "dualsat/rng.hpp"

namespace dualsat {

BeamGrid make_hex_grid(int beams, double beam_diameter, int satellite_id, const Eigen::Vector2d& offset,
                       double altitude_km)
{
    if (beams < 1)
        throw std::invalid_argument("make_hex_grid: need at least one beam");
    if (!(beam_diameter > 0.0))
        throw std::invalid_argument("make_hex_grid: beam diameter must be positive");
    if (!(altitude_km > 0.0))
        throw std::invalid_argument("make_hex_grid: altitude must be positive");

    const Eigen::Vector2d a1(beam_diameter, 0.0);
    const Eigen::Vector2d a2(beam_diameter / 2.0, beam_diameter * std::sqrt(3.0) / 2.0);

    // Enough rings to hold `beams` points: ring r has 6r points.
    int rings = 0;
    while (1 + 3 * rings * (rings + 1) < beams)
        ++rings;

    struct Site {
        int ring;
        double angle;
        Eigen::Vector2d pos;
    };
    std::vector<Site> sites;
    for (int q = -rings; q <= rings; ++q) {
        for (int r = -rings; r <= rings; ++r) {
            const int s = -q - r;
            const int ring = std::max({std::abs(q), std::abs(r), std::abs(s)});
            if (ring > rings)
                continue;
            const Eigen::Vector2d p = q * a1 + r * a2;
            double angle = std::atan2(p.y(), p.x());
            if (angle < -1e-12)
                angle += 2.0 * std::numbers::pi;
            sites.push_back({ring, ring == 0 ? 0.0 : std::max(angle, 0.0), p});
        }
    }
    std::sort(sites.begin(), sites.end(), [](const Site& a, const Site& b) {
        return std::tie(a.ring, a.angle) < std::tie(b.ring, b.angle);
    });

    BeamGrid grid;
    grid.beam_diameter = beam_diameter;
    grid.satellite_id = satellite_id;
    grid.lattice_offset = offset;
    grid.altitude_km = altitude_km;
    for (int i = 0; i < beams; ++i)
        grid.centers.push_back(sites[static_cast<std::size_t>(i)].pos + offset);
    return grid;
}

Disc coverage_disc(const std::vector<BeamGrid>& grids)
{
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    std::size_t count = 0;
    double beam_radius = 0.0;
    for (const auto& grid : grids) {
        for (const auto& c : grid.centers)
            sum += c;
        count += grid.centers.size();
        beam_radius = std::max(beam_radius, grid.beam_diameter / 2.0);
    }
    if (count == 0)
        throw std::invalid_argument("coverage_disc: no beam centers");

    Disc disc;
    disc.center = sum / static_cast<double>(count);
    for (const auto& grid : grids)
        for (const auto& c : grid.centers)
            disc.radius = std::max(disc.radius, (c - disc.center).norm());
    disc.radius += beam_radius;
    return disc;
}

double off_axis_angle(const Eigen::Vector2d& beam_center, const Eigen::Vector2d& user_pos, double sat_altitude)
{
    if (!(sat_altitude > 0.0))
        throw std::invalid_argument("off_axis_angle: altitude must be positive");
    return std::atan((user_pos - beam_center).norm() / sat_altitude);
}

std::vector<UserTerminal> drop_users(int count, const Disc& coverage, std::uint64_t rng_seed, double g_rx)
{
    if (count < 1)
        throw std::invalid_argument("drop_users: count must be positive");
    if (!(coverage.radius >= 0.0))
        throw std::invalid_argument("drop_users: negative coverage radius");

    Rng rng(rng_seed);
    std::vector<UserTerminal> users;
    users.reserve(static_cast<std::size_t>(count));
    for (int k = 0; k < count; ++k) {
        const double r = coverage.radius * std::sqrt(rng.uniform());
        const double phi = 2.0 * std::numbers::pi * rng.uniform();
        UserTerminal u;
        u.id = k;
        u.position = coverage.center + r * Eigen::Vector2d(std::cos(phi), std::sin(phi));
        u.g_rx = g_rx;
        users.push_back(u);
    }
    return users;
}

ChannelMatrix build_channel(const std::vector<UserTerminal>& users, const BeamGrid& grid,
                            const BeamPattern<double>& pattern, const LinkBudget& budget)
{
    if (users.empty())
        throw std::invalid_argument("build_channel: no users");
    if (grid.centers.empty())
        throw std::invalid_argument("build_channel: empty beam grid");
    pattern.validate();

    const double snr0 = budget.boresight_snr();
    const double g_rx_max = db_to_linear(budget.g_rx_dbi);

    ChannelMatrix h;
    h.satellite_id = grid.satellite_id;
    h.entries.resize(static_cast<Eigen::Index>(users.size()), grid.size());
    h.user_ids.reserve(users.size());
    for (std::size_t k = 0; k < users.size(); ++k) {
        const auto& user = users[k];
        if (!(user.g_rx > 0.0))
            throw std::invalid_argument("build_channel: receive gain must be positive");
        h.user_ids.push_back(user.id);
        for (Eigen::Index n = 0; n < grid.size(); ++n) {
            const double theta = off_axis_angle(grid.centers[static_cast<std::size_t>(n)], user.position,
                                                grid.altitude_km);
            const double rel_gain = beam_gain(pattern, theta) / pattern.g_max;
            h.entries(static_cast<Eigen::Index>(k), n) = std::sqrt(snr0 * rel_gain * user.g_rx / g_rx_max);
        }
    }
    return h;
}

}  // namespace dualsat
