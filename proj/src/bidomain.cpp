#include "sbd/bidomain.hpp"

#include <cmath>
#include <stdexcept>

namespace sbd {

BidomainOperator::BidomainOperator(EllipticOperator a1, EllipticOperator a2)
    : a1_(std::move(a1)), a2_(std::move(a2)) {
    if (!(a1_.grid == a2_.grid)) throw std::invalid_argument("A1 and A2 live on different grids");
    const Index n = size();
    // One node is grounded; the remaining block of A1+A2 is SPD.
    SparseMatrix sum = a1_.matrix + a2_.matrix;
    SparseMatrix grounded = sum.topLeftCorner(n - 1, n - 1);
    sum_factor_ = std::make_shared<Eigen::SimplicialLDLT<SparseMatrix>>(grounded);
    if (sum_factor_->info() != Eigen::Success) {
        throw std::runtime_error("factorization of A1+A2 failed");
    }
}

GridFunction BidomainOperator::solve_sum(const GridFunction& rhs) const {
    const Index n = size();
    if (rhs.size() != n) throw std::invalid_argument("grid function size does not match operator");
    const GridFunction b = mean_zero_project(grid(), rhs);
    GridFunction x = GridFunction::Zero(n);
    x.head(n - 1) = sum_factor_->solve(b.head(n - 1));
    if (sum_factor_->info() != Eigen::Success || !x.allFinite()) {
        throw std::runtime_error("solve with A1+A2 failed");
    }
    return mean_zero_project(grid(), x);
}

GridFunction BidomainOperator::apply(const GridFunction& u) const {
    return a1_.matrix * solve_sum(a2_.matrix * u);
}

Potentials BidomainOperator::reconstruct(const GridFunction& u) const {
    Potentials p;
    p.u_i = solve_sum(a2_.matrix * u);
    p.u_e = p.u_i - u;
    return p;
}

GridFunction BidomainOperator::effective_current(const GridFunction& I_i, const GridFunction& I_e) const {
    const GridFunction total = I_i + I_e;
    const double scale = std::max(1.0, total.cwiseAbs().maxCoeff());
    if (std::abs(total.mean()) > 1e-12 * scale) {
        throw std::invalid_argument("I_i + I_e must have zero mean for the Neumann problem to be solvable");
    }
    return I_i - a1_.matrix * solve_sum(total);
}

Eigen::MatrixXd BidomainOperator::dense() const {
    const Index n = size();
    Eigen::MatrixXd rhs = Eigen::MatrixXd(a2_.matrix);
    rhs.rowwise() -= rhs.colwise().mean();
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(n, n);
    x.topRows(n - 1) = sum_factor_->solve(rhs.topRows(n - 1));
    x.rowwise() -= x.colwise().mean();
    Eigen::MatrixXd out = a1_.matrix * x;
    return 0.5 * (out + out.transpose());
}

GridFunction bidomain_apply(const BidomainOperator& op, const GridFunction& u) { return op.apply(u); }

Potentials reconstruct_potentials(const BidomainOperator& op, const GridFunction& u) { return op.reconstruct(u); }

}  // namespace sbd
