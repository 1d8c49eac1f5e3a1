#pragma once

#include "sbd/bidomain.hpp"

#include <Eigen/Dense>

namespace sbd {

inline constexpr Index kMaxDenseSpectralSize = 16384;

/// Eigenpairs of 𝔸, orthonormal in the discrete L2 inner product.
/// Mode 0 is the constant mode with eigenvalue exactly 0.
struct SpectralDecomposition {
    Grid grid;
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns phi_k

    Index size() const { return eigenvalues.size(); }

    /// <u, phi_k> for all k.
    Eigen::VectorXd coefficients(const GridFunction& u) const;
    /// sum_k c_k phi_k over the leading c.size() modes.
    GridFunction synthesize(const Eigen::VectorXd& c) const;
};

/// Throws std::length_error if n exceeds kMaxDenseSpectralSize.
SpectralDecomposition spectral_decompose(const BidomainOperator& op);

/// sum_{lambda_k > 0} lambda_k^alpha <u,phi_k> phi_k; the constant
/// component is kept for alpha = 0 and dropped otherwise.
/// Throws std::invalid_argument for alpha outside [-1, 1].
GridFunction fractional_power_apply(const SpectralDecomposition& spec, double alpha, const GridFunction& u);

}  // namespace sbd
