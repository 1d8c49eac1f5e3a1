#pragma once

#include <Eigen/Dense>

namespace sbd {

/// e^{-M s} for a real 2x2 matrix, with the confluent branch when the
/// eigenvalue gap falls below 1e-8 |tr M|.
Eigen::Matrix2d ou_propagator(const Eigen::Matrix2d& m, double s);

/// I_jk(T) = int_0^T e^{-M_j s} e1 e1^T e^{-M_k^T s} ds.
///
/// Solved from the Sylvester identity M_j X + X M_k^T = B - E_j B E_k^T;
/// for short horizons, where that difference cancels, 20-point
/// Gauss-Legendre quadrature is used instead.
Eigen::Matrix2d ou_cross_covariance(const Eigen::Matrix2d& mj, const Eigen::Matrix2d& mk, double t);

/// Q(dt) = g^2 I_kk(dt).
Eigen::Matrix2d ou_step_covariance(const Eigen::Matrix2d& m, double g, double dt);

/// Sigma with M Sigma + Sigma M^T = g^2 e1 e1^T.
Eigen::Matrix2d ou_stationary_covariance(const Eigen::Matrix2d& m, double g);

/// Lower factor F with F F^T = Q for a symmetric positive semidefinite 2x2 Q.
Eigen::Matrix2d psd_factor(const Eigen::Matrix2d& q);

/// Z(t+dt) = e^{-M dt} Z + F xi, with F F^T = Q(dt) and xi standard normal.
Eigen::Vector2d ou_exact_step(const Eigen::Matrix2d& m, double g, const Eigen::Vector2d& z, double dt,
                              const Eigen::Vector2d& xi);

}  // namespace sbd
