#pragma once

#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dualsat {

/// Served-user channel rows are (numerically) linearly dependent.
class SingularChannelError : public std::runtime_error {
public:
    SingularChannelError(const std::string& what, double condition)
        : std::runtime_error(what), condition_(condition) {}
    double condition() const { return condition_; }

private:
    double condition_;
};

inline constexpr double kMaxChannelCondition = 1e12;

template <typename Scalar>
using MatrixX = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVectorX = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

/// Zero-forcing precoder W = H^T (H H^T)^{-1} for the S x N served-user
/// channel H (S <= N); W is N x S and H W = I_S. Computed from a thin SVD.
/// An empty H yields an N x 0 precoder.
///
/// Throws SingularChannelError when cond(H) exceeds kMaxChannelCondition.
template <typename Derived>
MatrixX<typename Derived::Scalar> zf_precoder(const Eigen::MatrixBase<Derived>& h)
{
    using Scalar = typename Derived::Scalar;
    const Eigen::Index s = h.rows();
    const Eigen::Index n = h.cols();
    if (s > n)
        throw std::invalid_argument("zf_precoder: more served users than antennas");
    if (s == 0)
        return MatrixX<Scalar>(n, 0);
    if (!h.allFinite())
        throw std::invalid_argument("zf_precoder: non-finite channel entries");

    Eigen::JacobiSVD<MatrixX<Scalar>> svd(h.derived(), Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const Scalar smax = sv(0);
    const Scalar smin = sv(s - 1);
    if (!(smin > Scalar(0)) || smax / smin > Scalar(kMaxChannelCondition)) {
        const double cond = smin > Scalar(0) ? static_cast<double>(smax / smin)
                                             : std::numeric_limits<double>::infinity();
        throw SingularChannelError("zf_precoder: singular channel (condition " + std::to_string(cond) + ")", cond);
    }
    return svd.matrixV() * sv.cwiseInverse().asDiagonal() * svd.matrixU().transpose();
}

/// Antenna-load matrix: load(j, k) = W(j, k)^2, the power radiated by antenna j
/// per unit power of user k.
template <typename Derived>
MatrixX<typename Derived::Scalar> antenna_load(const Eigen::MatrixBase<Derived>& w)
{
    return w.cwiseAbs2();
}

/// |h_k . w_k|^2 for each served user k.
template <typename DerivedH, typename DerivedW>
VectorX<typename DerivedH::Scalar> effective_channel_gains(const Eigen::MatrixBase<DerivedH>& h,
                                                           const Eigen::MatrixBase<DerivedW>& w)
{
    if (h.rows() != w.cols() || h.cols() != w.rows())
        throw std::invalid_argument("effective_channel_gains: dimension mismatch");
    return (h * w).diagonal().cwiseAbs2();
}

}  // namespace dualsat
