#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace dualsat {

namespace detail {

// Below this argument the ascending series is accurate to ~1e-14 in double;
// above it the alternating terms cancel and Miller recurrence takes over.
inline constexpr double kBesselSeriesLimit = 8.0;

// J_n(x) / (x/2)^n as the ascending series sum_k (-x^2/4)^k / (k! (k+n)!).
template <typename Scalar>
Scalar bessel_series_reduced(int order, Scalar x)
{
    using std::abs;
    const Scalar q = -(x * x) / Scalar(4);
    Scalar term(1);
    for (int i = 2; i <= order; ++i)
        term /= Scalar(i);
    Scalar sum = term;
    for (int k = 1; k < 500; ++k) {
        term *= q / (Scalar(k) * Scalar(k + order));
        sum += term;
        if (abs(term) <= std::numeric_limits<Scalar>::epsilon() * abs(sum) * Scalar(1e-3))
            break;
    }
    return sum;
}

// Miller backward recurrence J_{m-1} = (2m/x) J_m - J_{m+1}, normalized with
// J_0 + 2 sum_k J_{2k} = 1. Stable for any x > 0.
template <typename Scalar>
Scalar bessel_miller(int order, Scalar x)
{
    using std::abs;
    const int start = 2 * ((static_cast<int>(x) + order + 60) / 2);
    Scalar next(0);
    Scalar curr(1e-30);
    Scalar wanted(0);
    Scalar norm(0);
    for (int m = start; m >= 1; --m) {
        const Scalar prev = Scalar(2 * m) / x * curr - next;
        next = curr;
        curr = prev;  // J_{m-1}
        if (m - 1 == order)
            wanted = curr;
        if ((m - 1) % 2 == 0 && m - 1 > 0)
            norm += Scalar(2) * curr;
        if (abs(curr) > Scalar(1e250)) {
            curr *= Scalar(1e-250);
            next *= Scalar(1e-250);
            wanted *= Scalar(1e-250);
            norm *= Scalar(1e-250);
        }
    }
    norm += curr;  // J_0
    return wanted / norm;
}

template <typename Scalar>
Scalar bessel_j_unchecked(int order, Scalar x)
{
    if (x == Scalar(0))
        return Scalar(0);
    if (x < Scalar(kBesselSeriesLimit)) {
        Scalar half = x / Scalar(2);
        Scalar scale(1);
        for (int i = 0; i < order; ++i)
            scale *= half;
        return scale * bessel_series_reduced(order, x);
    }
    return bessel_miller(order, x);
}

}  // namespace detail

/// Bessel function of the first kind of order 1 or 3, for 0 <= x <= 50.
template <typename Scalar>
Scalar bessel_j(int order, Scalar x)
{
    if (order != 1 && order != 3)
        throw std::invalid_argument("bessel_j: unsupported order " + std::to_string(order));
    if (!(x >= Scalar(0) && x <= Scalar(50)))
        throw std::invalid_argument("bessel_j: argument outside [0, 50]");
    return detail::bessel_j_unchecked(order, x);
}

/// J1(u)/(2u) + 36 J3(u)/u^3, the field term of the Bessel beam law.
/// Evaluated without dividing by u so the boresight limit (1/4 + 3/4) is exact.
template <typename Scalar>
Scalar beam_field(Scalar u)
{
    if (u == Scalar(0))
        return Scalar(1);
    if (u < Scalar(detail::kBesselSeriesLimit)) {
        // J1(u) = (u/2) R1(u), J3(u) = (u/2)^3 R3(u)
        return detail::bessel_series_reduced(1, u) / Scalar(4)
               + Scalar(4.5) * detail::bessel_series_reduced(3, u);
    }
    return detail::bessel_miller(1, u) / (Scalar(2) * u)
           + Scalar(36) * detail::bessel_miller(3, u) / (u * u * u);
}

}  // namespace dualsat
