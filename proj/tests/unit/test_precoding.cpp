#include <doctest.h>

#include "dualsat/precoding.hpp"
#include "dualsat/rng.hpp"

using namespace dualsat;
using doctest::Approx;

namespace {
Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index r, Eigen::Index c)
{
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = 2.0 * rng.uniform() - 1.0;
    return m;
}
}  // namespace

TEST_CASE("zf_precoder small cases")
{
    CHECK(zf_precoder(Eigen::MatrixXd::Identity(7, 7)).isApprox(Eigen::MatrixXd::Identity(7, 7)));
    const Eigen::MatrixXd w = zf_precoder(Eigen::Vector2d(2, 4).asDiagonal().toDenseMatrix());
    CHECK(w(0, 0) == Approx(0.5));
    CHECK(w(1, 1) == Approx(0.25));
    CHECK(std::abs(w(0, 1)) < 1e-15);
    CHECK(zf_precoder(Eigen::MatrixXd(0, 4)).cols() == 0);
}

TEST_CASE("zf_precoder residuals, scaling, two-sided inverse")
{
    Rng rng(42);
    for (int t = 0; t < 200; ++t) {
        const Eigen::Index s = 1 + static_cast<Eigen::Index>(rng.below(7));
        const Eigen::MatrixXd h = random_matrix(rng, s, 7);
        const Eigen::MatrixXd w = zf_precoder(h);
        CHECK((h * w - Eigen::MatrixXd::Identity(s, s)).cwiseAbs().maxCoeff() <= 1e-8);
        CHECK(zf_precoder(h) == w);
        const Eigen::MatrixXd w3 = zf_precoder(3.0 * h);
        CHECK((w3 - w / 3.0).norm() <= 1e-10 * w.norm());
        CHECK(effective_channel_gains(h, w).isApprox(Eigen::VectorXd::Ones(s), 1e-8));
    }
    const Eigen::MatrixXd sq = random_matrix(rng, 5, 5);
    CHECK((zf_precoder(sq) * sq - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("zf_precoder rejects singular and malformed channels")
{
    Eigen::MatrixXd h(2, 3);
    h << 1, 2, 3, 2, 4, 6;
    CHECK_THROWS_AS(zf_precoder(h), SingularChannelError);
    CHECK_THROWS_AS(zf_precoder(Eigen::MatrixXd::Ones(3, 2)), std::invalid_argument);
    try {
        zf_precoder(h);
    } catch (const SingularChannelError& e) {
        CHECK(e.condition() > kMaxChannelCondition);
    }
}

TEST_CASE("antenna_load")
{
    CHECK(antenna_load(Eigen::MatrixXd::Identity(2, 2)) == Eigen::MatrixXd::Identity(2, 2));
    Eigen::Matrix2d w;
    w << 1, -1, 1, 1;
    w /= std::sqrt(2.0);
    CHECK(antenna_load(w).isApprox(Eigen::Matrix2d::Constant(0.5)));
    Rng rng(3);
    const Eigen::MatrixXd r = random_matrix(rng, 6, 4);
    const Eigen::VectorXd colsum = antenna_load(r).colwise().sum().transpose();
    CHECK(colsum.isApprox(r.colwise().squaredNorm().transpose()));
    CHECK(effective_channel_gains(Eigen::MatrixXd::Identity(3, 3), 2.0 * Eigen::MatrixXd::Identity(3, 3))
              .isApprox(Eigen::VectorXd::Constant(3, 4.0)));
}
