#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include "dualsat/channel.hpp"
#include "dualsat/montecarlo.hpp"

using namespace dualsat;
using doctest::Approx;

namespace {
using Big = boost::multiprecision::cpp_dec_float_50;

double reference_j(int order, double x)
{
    return static_cast<double>(boost::math::cyl_bessel_j(order, Big(x)));
}
}  // namespace

TEST_CASE("bessel_j agrees with a 50-digit reference on [0, 50]")
{
    double worst = 0.0;
    for (int order : {1, 3}) {
        for (int i = 0; i <= 2000; ++i) {
            const double x = 50.0 * i / 2000.0;
            worst = std::max(worst, std::abs(bessel_j(order, x) - reference_j(order, x)));
        }
    }
    CHECK(worst <= 1e-10);
}

TEST_CASE("bessel_j anchors")
{
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(3, 0.0) == 0.0);
    // first maximum of J1
    CHECK(bessel_j(1, 1.8411837813) == Approx(0.5818652).epsilon(1e-7));
    CHECK_THROWS_AS(bessel_j(2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(bessel_j(1, 51.0), std::invalid_argument);
}

TEST_CASE("beam_field is continuous across the series/recurrence switch")
{
    const double u = detail::kBesselSeriesLimit;
    const double direct = bessel_j(1, u) / (2 * u) + 36 * bessel_j(3, u) / (u * u * u);
    CHECK(beam_field(u) == Approx(direct).epsilon(1e-12));
    CHECK(beam_field(std::nextafter(u, 0.0)) == Approx(direct).epsilon(1e-10));
}

TEST_CASE("beam_gain")
{
    BeamPattern<double> pat;
    pat.g_max = db_to_linear(52.0);
    pat.theta_3db = std::atan(300.0 / kGeoAltitudeKm);

    SUBCASE("boresight is exactly g_max") { CHECK(beam_gain(pat, 0.0) == pat.g_max); }
    SUBCASE("half power at theta_3db")
    {
        CHECK(beam_gain(pat, pat.theta_3db) / pat.g_max == Approx(0.5).epsilon(0.01));
    }
    SUBCASE("wrong constant moves the half-power point")
    {
        pat.u_coeff = 2.0;
        CHECK(std::abs(beam_gain(pat, pat.theta_3db) / pat.g_max - 0.5) > 0.005);
    }
    SUBCASE("monotone over the main lobe")
    {
        double prev = beam_gain(pat, 0.0);
        for (int i = 1; i <= 50; ++i) {
            const double g = beam_gain(pat, pat.theta_3db * i / 50.0);
            CHECK(g < prev);
            prev = g;
        }
    }
    SUBCASE("bad angles") { CHECK_THROWS_AS(beam_gain(pat, -0.1), std::invalid_argument); }
}

TEST_CASE("hex grid")
{
    const BeamGrid g = make_hex_grid(7, 600.0, 1);
    REQUIRE(g.size() == 7);
    CHECK(g.centers[0].norm() == Approx(0.0));
    for (int i = 1; i < 7; ++i)
        CHECK(g.centers[static_cast<std::size_t>(i)].norm() == Approx(600.0));
    CHECK(g.centers[1].x() == Approx(600.0));
    CHECK(g.centers[1].y() == Approx(0.0).epsilon(1e-9));

    const BeamGrid shifted = make_hex_grid(7, 600.0, 2, Eigen::Vector2d(150, 0));
    for (int i = 0; i < 7; ++i)
        CHECK((shifted.centers[static_cast<std::size_t>(i)] - g.centers[static_cast<std::size_t>(i)])
                  .isApprox(Eigen::Vector2d(150, 0)));
    CHECK(make_hex_grid(19, 600.0, 1).size() == 19);
    CHECK_THROWS_AS(make_hex_grid(0, 600.0, 1), std::invalid_argument);
}

TEST_CASE("coverage disc holds every beam")
{
    const BeamGrid a = make_hex_grid(7, 600.0, 1);
    const BeamGrid b = make_hex_grid(7, 600.0, 2, Eigen::Vector2d(150, 0));
    const Disc d = coverage_disc({a, b});
    CHECK(d.center.x() == Approx(75.0));
    for (const auto* g : {&a, &b})
        for (const auto& c : g->centers)
            CHECK((c - d.center).norm() + 300.0 <= d.radius + 1e-9);
}

TEST_CASE("user drop")
{
    Disc d{Eigen::Vector2d(10, -5), 1000.0};
    const auto users = drop_users(500, d, 7);
    REQUIRE(users.size() == 500);
    for (const auto& u : users)
        CHECK((u.position - d.center).norm() <= d.radius);
    const auto again = drop_users(500, d, 7);
    const auto prefix = drop_users(20, d, 7);
    for (std::size_t i = 0; i < 20; ++i) {
        CHECK(again[i].position == users[i].position);
        CHECK(prefix[i].position == users[i].position);
    }
    // uniform over the area: half the users within r / sqrt(2)
    int inner = 0;
    for (const auto& u : drop_users(20000, d, 11))
        inner += (u.position - d.center).norm() < d.radius / std::sqrt(2.0);
    CHECK(inner / 20000.0 == Approx(0.5).epsilon(0.03));
}

TEST_CASE("link budget and channel scaling")
{
    LinkBudget lb;
    CHECK(lb.boresight_snr_db() == Approx(21.0).epsilon(1e-12));
    CHECK(lb.per_antenna_power(21.0) == Approx(1.0));
    CHECK(lb.per_antenna_power(11.0) == Approx(0.1));

    const SystemModel sys = make_system(ExperimentConfig{});
    UserTerminal u;
    u.position = sys.grid1.centers[0];
    u.g_rx = db_to_linear(lb.g_rx_dbi);
    const ChannelMatrix h = build_channel({u}, sys.grid1, sys.pattern, lb);
    REQUIRE(h.entries.rows() == 1);
    REQUIRE(h.entries.cols() == 7);
    // unit power on the boresight beam gives the reference SNR
    CHECK(linear_to_db(h.entries(0, 0) * h.entries(0, 0)) == Approx(21.0).epsilon(1e-9));
    CHECK(h.entries(0, 0) > h.entries.rightCols(6).maxCoeff());
}

TEST_CASE("off-axis angle")
{
    CHECK(off_axis_angle({0, 0}, {0, 0}, kGeoAltitudeKm) == 0.0);
    CHECK(off_axis_angle({0, 0}, {300, 400}, 500.0) == Approx(std::atan(1.0)));
}
