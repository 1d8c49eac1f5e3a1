#include "sbd/spectral.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sbd {

Eigen::VectorXd SpectralDecomposition::coefficients(const GridFunction& u) const {
    return eigenvectors.transpose() * u * grid.cell_volume();
}

GridFunction SpectralDecomposition::synthesize(const Eigen::VectorXd& c) const {
    return eigenvectors.leftCols(c.size()) * c;
}

SpectralDecomposition spectral_decompose(const BidomainOperator& op) {
    const Index n = op.size();
    if (n > kMaxDenseSpectralSize) {
        throw std::length_error("dense spectral decomposition limited to " + std::to_string(kMaxDenseSpectralSize) +
                                " cells, grid has " + std::to_string(n));
    }
    const Eigen::MatrixXd a = op.dense();

    // Householder reflector H with H e_1 = 1/sqrt(n); its trailing columns
    // are an orthonormal basis of the mean-zero subspace.
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, -1.0 / std::sqrt(static_cast<double>(n)));
    w[0] += 1.0;
    w.normalize();
    Eigen::MatrixXd q = -2.0 * w * w.tail(n - 1).transpose();
    q.bottomRows(n - 1).diagonal().array() += 1.0;

    Eigen::MatrixXd reduced = q.transpose() * a * q;
    reduced = 0.5 * (reduced + reduced.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reduced);
    if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");

    const double vol = op.grid().cell_volume();
    SpectralDecomposition spec;
    spec.grid = op.grid();
    spec.eigenvalues.resize(n);
    spec.eigenvectors.resize(n, n);
    spec.eigenvalues[0] = 0.0;
    spec.eigenvectors.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n) * vol));
    spec.eigenvalues.tail(n - 1) = es.eigenvalues();
    spec.eigenvectors.rightCols(n - 1) = q * es.eigenvectors() / std::sqrt(vol);
    if (es.eigenvalues()[0] <= 0.0) {
        throw std::domain_error("bidomain operator is not positive definite on mean-zero functions");
    }
    return spec;
}

GridFunction fractional_power_apply(const SpectralDecomposition& spec, double alpha, const GridFunction& u) {
    if (!(alpha >= -1.0 && alpha <= 1.0)) {
        throw std::invalid_argument("fractional power must lie in [-1, 1], got " + std::to_string(alpha));
    }
    Eigen::VectorXd c = spec.coefficients(u);
    for (Index k = 0; k < c.size(); ++k) {
        const double lam = spec.eigenvalues[k];
        if (lam > 0.0) {
            c[k] *= std::pow(lam, alpha);
        } else if (alpha != 0.0) {
            c[k] = 0.0;
        }
    }
    return spec.synthesize(c);
}

}  // namespace sbd
