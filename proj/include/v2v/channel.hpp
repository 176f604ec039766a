#pragma once

// Interference-limited V2V link model: per-link SNR with every other
// transmitter into the same receiver counted as interference, and the
// Shannon-rate transmission delay that follows from it.

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "v2v/errors.hpp"

namespace v2v {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using MatrixXr = Matrix<double>;

inline constexpr Eigen::Index kMaxVehicles = 64;

template <typename Scalar>
struct BasicChannelParams {
    Scalar alpha = Scalar(3);
    Scalar bandwidth_hz = Scalar(1e7);
    Scalar noise_w = Scalar(4.14e-14);
    Scalar p_min_w = Scalar(1e-6);
    Scalar p_max_w = Scalar(23);
    // 1.06 MB read as 1.06e6 bytes.
    Scalar payload_bits = Scalar(8.48e6);

    void validate() const
    {
        if (!(alpha > 0))
            throw DomainError("channel: alpha must be positive");
        if (!(bandwidth_hz > 0))
            throw DomainError("channel: bandwidth must be positive");
        if (!(noise_w > 0))
            throw DomainError("channel: noise power must be positive");
        if (!(p_min_w > 0 && p_min_w < p_max_w))
            throw DomainError("channel: require 0 < p_min < p_max");
        if (!(payload_bits > 0))
            throw DomainError("channel: payload must be positive");
    }
};

using ChannelParams = BasicChannelParams<double>;

/// Pairwise vehicle distances in meters. Construction checks shape,
/// exact symmetry and positive off-diagonal entries; the diagonal is zeroed.
template <typename Scalar>
class BasicDistanceMatrix {
public:
    BasicDistanceMatrix() = default;

    explicit BasicDistanceMatrix(Matrix<Scalar> d) : d_(std::move(d))
    {
        if (d_.rows() != d_.cols())
            throw StructuralError("distance matrix must be square");
        if (d_.rows() < 2)
            throw DomainError("distance matrix needs at least two vehicles");
        if (d_.rows() > kMaxVehicles)
            throw CapacityError("at most " + std::to_string(kMaxVehicles) + " vehicles are supported");
        for (Eigen::Index i = 0; i < d_.rows(); ++i) {
            d_(i, i) = Scalar(0);
            for (Eigen::Index j = 0; j < d_.cols(); ++j) {
                if (i == j)
                    continue;
                if (!(d_(i, j) > 0) || !std::isfinite(static_cast<double>(d_(i, j))))
                    throw DomainError("distance (" + std::to_string(i) + "," + std::to_string(j) +
                                      ") must be positive and finite");
                if (d_(i, j) != d_(j, i))
                    throw DomainError("distance matrix must be symmetric");
            }
        }
    }

    Eigen::Index size() const noexcept { return d_.rows(); }
    Scalar operator()(Eigen::Index i, Eigen::Index j) const { return d_(i, j); }
    const Matrix<Scalar>& matrix() const noexcept { return d_; }

    friend bool operator==(const BasicDistanceMatrix& a, const BasicDistanceMatrix& b)
    {
        return a.d_.rows() == b.d_.rows() && a.d_ == b.d_;
    }

private:
    Matrix<Scalar> d_;
};

using DistanceMatrix = BasicDistanceMatrix<double>;

// Transmit powers P(i, j) from vehicle i to vehicle j in watts, diagonal 0.
// Bounds and row budgets depend on ChannelParams and are checked by
// check_feasible() in allocator.hpp.
template <typename Scalar>
using BasicPowerMatrix = Matrix<Scalar>;
using PowerMatrix = BasicPowerMatrix<double>;

template <typename Scalar>
struct BasicLinkMetrics {
    Matrix<Scalar> snr;
    Matrix<Scalar> delay_s;
    bool snr_floor_hit = false;
};

using LinkMetrics = BasicLinkMetrics<double>;

template <typename Scalar>
Matrix<Scalar> path_loss_matrix(const BasicChannelParams<Scalar>& params,
                                const BasicDistanceMatrix<Scalar>& dist)
{
    return dist.matrix().array().pow(params.alpha).matrix();
}

/// SNR(i, j) = P(i, j) / (D(i, j)^alpha * (sum_{k != i, j} P(k, j) / D(k, j)^alpha + noise)).
/// The k == j term is dropped: a vehicle does not transmit to itself.
/// No floor is applied here.
template <typename Scalar, typename PathLoss, typename Power>
Scalar link_snr(const BasicChannelParams<Scalar>& params, const PathLoss& path_loss,
                const Power& power, Eigen::Index i, Eigen::Index j)
{
    Scalar interference = Scalar(0);
    for (Eigen::Index k = 0; k < power.rows(); ++k)
        if (k != i && k != j)
            interference += power(k, j) / path_loss(k, j);
    return power(i, j) / (path_loss(i, j) * (interference + params.noise_w));
}

template <typename Scalar>
inline constexpr Scalar kSnrFloor = Scalar(1e-300);

template <>
inline constexpr float kSnrFloor<float> = std::numeric_limits<float>::min();

template <typename Scalar>
Scalar floor_snr(Scalar value, bool& floor_hit)
{
    if (!(value >= kSnrFloor<Scalar>)) {
        floor_hit = true;
        return kSnrFloor<Scalar>;
    }
    return value;
}

/// Full SNR matrix, diagonal 0. Entries below the numerical floor are
/// clamped to it and reported through `floor_hit`.
template <typename Scalar>
Matrix<Scalar> compute_snr_matrix(const BasicChannelParams<Scalar>& params,
                                  const BasicDistanceMatrix<Scalar>& dist,
                                  const BasicPowerMatrix<Scalar>& power,
                                  bool& floor_hit)
{
    const Eigen::Index n = dist.size();
    if (power.rows() != n || power.cols() != n)
        throw StructuralError("power matrix is " + std::to_string(power.rows()) + "x" +
                              std::to_string(power.cols()) + ", expected " + std::to_string(n) +
                              "x" + std::to_string(n));

    const Matrix<Scalar> path_loss = path_loss_matrix(params, dist);
    floor_hit = false;
    Matrix<Scalar> snr = Matrix<Scalar>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j)
                snr(i, j) = floor_snr(link_snr(params, path_loss, power, i, j), floor_hit);
    return snr;
}

template <typename Scalar>
Matrix<Scalar> compute_snr_matrix(const BasicChannelParams<Scalar>& params,
                                  const BasicDistanceMatrix<Scalar>& dist,
                                  const BasicPowerMatrix<Scalar>& power)
{
    bool floor_hit = false;
    return compute_snr_matrix(params, dist, power, floor_hit);
}

/// Delay(i, j) = rate_factor * S / (B * log2(1 + SNR(i, j))).
/// `rate_factor` multiplies the finished delay so a reduced effective
/// payload scales every entry by exactly that factor.
template <typename Scalar>
Matrix<Scalar> compute_delay_matrix(const BasicChannelParams<Scalar>& params,
                                    const Matrix<Scalar>& snr,
                                    Scalar rate_factor = Scalar(1))
{
    if (snr.rows() != snr.cols())
        throw StructuralError("SNR matrix must be square");
    const Eigen::Index n = snr.rows();
    const Scalar ln2 = std::log(Scalar(2));
    Matrix<Scalar> delay = Matrix<Scalar>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j)
                continue;
            if (!(snr(i, j) > 0))
                throw DomainError("SNR (" + std::to_string(i) + "," + std::to_string(j) +
                                  ") must be positive");
            const Scalar capacity = params.bandwidth_hz * (std::log1p(snr(i, j)) / ln2);
            delay(i, j) = rate_factor * (params.payload_bits / capacity);
        }
    }
    return delay;
}

template <typename Scalar>
BasicLinkMetrics<Scalar> compute_link_metrics(const BasicChannelParams<Scalar>& params,
                                              const BasicDistanceMatrix<Scalar>& dist,
                                              const BasicPowerMatrix<Scalar>& power,
                                              Scalar rate_factor = Scalar(1))
{
    BasicLinkMetrics<Scalar> out;
    out.snr = compute_snr_matrix(params, dist, power, out.snr_floor_hit);
    out.delay_s = compute_delay_matrix(params, out.snr, rate_factor);
    return out;
}

/// Minimum over off-diagonal entries.
template <typename Derived>
typename Derived::Scalar off_diagonal_min(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    Scalar best = std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) < best)
                best = m(i, j);
    return best;
}

/// Maximum over off-diagonal entries.
template <typename Derived>
typename Derived::Scalar off_diagonal_max(const Eigen::MatrixBase<Derived>& m)
{
    using Scalar = typename Derived::Scalar;
    Scalar best = -std::numeric_limits<Scalar>::infinity();
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            if (i != j && m(i, j) > best)
                best = m(i, j);
    return best;
}

}  // namespace v2v
