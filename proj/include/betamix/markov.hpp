#pragma once

#include <Eigen/Dense>

namespace betamix {

/// Throws std::invalid_argument unless P is square with non-negative rows
/// summing to 1 within 1e-12.
void require_stochastic(const Eigen::MatrixXd& transition);

/// Unique stationary law of a finite chain, found as the dominant left
/// eigenvector by power iteration (to 1e-14 in L1). Transient states are
/// allowed; throws std::domain_error unless there is exactly one closed
/// class and it is aperiodic.
[[nodiscard]] Eigen::VectorXd stationary_distribution(const Eigen::MatrixXd& transition);

/// P^steps by repeated squaring.
[[nodiscard]] Eigen::MatrixXd matrix_power(const Eigen::MatrixXd& transition, unsigned long steps);

}  // namespace betamix
