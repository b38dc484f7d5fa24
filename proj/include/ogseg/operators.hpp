#pragma once

// Proximal maps of the l1 norm and of the l2 norm of a group.

#include <Eigen/Core>

#include <cmath>

#include "ogseg/error.hpp"

namespace ogseg {

namespace detail {
inline void check_threshold(double lambda) {
    if (!(lambda >= 0.0)) throw Error(ErrorCode::invalid_argument, "threshold must be nonnegative");
}
}  // namespace detail

inline double soft(double x, double lambda) noexcept {
    const double mag = std::abs(x) - lambda;
    return mag > 0.0 ? std::copysign(mag, x) : 0.0;
}

/// Element-wise sign(x) * max(|x| - lambda, 0).
template <typename Derived>
Eigen::VectorXd soft(const Eigen::MatrixBase<Derived>& x, double lambda) {
    detail::check_threshold(lambda);
    return x.unaryExpr([lambda](double xi) { return soft(xi, lambda); });
}

/// (1 - lambda / |x|_2)_+ x. A group whose norm is at most lambda (including the zero group) maps to zero.
template <typename Derived>
Eigen::VectorXd block_soft(const Eigen::MatrixBase<Derived>& x, double lambda) {
    detail::check_threshold(lambda);
    const double norm = x.norm();
    if (norm <= lambda) return Eigen::VectorXd::Zero(x.size());
    return (1.0 - lambda / norm) * x;
}

/// In-place group shrink on a strided view (rows or columns of a reshaped block).
template <typename Derived>
void block_soft_inplace(Eigen::MatrixBase<Derived>&& group, double lambda) {
    const double norm = group.norm();
    if (norm <= lambda) {
        group.setZero();
    } else {
        group *= 1.0 - lambda / norm;
    }
}

}  // namespace ogseg
