#pragma once

#include "sbd/elliptic.hpp"

#include <Eigen/SparseCholesky>

#include <memory>

namespace sbd {

struct Potentials {
    GridFunction u_i;
    GridFunction u_e;
};

/// The harmonic mean 𝔸 = (A1^{-1} + A2^{-1})^{-1} = A1 (A1+A2)^{-1} A2,
/// extended by zero to constants. Never assembled except by dense().
class BidomainOperator {
public:
    BidomainOperator(EllipticOperator a1, EllipticOperator a2);

    const Grid& grid() const { return a1_.grid; }
    Index size() const { return a1_.size(); }
    const EllipticOperator& a1() const { return a1_; }
    const EllipticOperator& a2() const { return a2_; }

    GridFunction apply(const GridFunction& u) const;

    /// Mean-zero x with (A1+A2) x = P0 rhs, where P0 removes the mean.
    GridFunction solve_sum(const GridFunction& rhs) const;

    /// u_i = (A1+A2)^{-1} A2 u (mean zero), u_e = u_i - u.
    Potentials reconstruct(const GridFunction& u) const;

    /// Source seen by the transmembrane equation when I_i, I_e drive the
    /// two media: I_i - A1 (A1+A2)^{-1} (I_i + I_e). Requires I_i + I_e to
    /// have zero mean (compatibility of the Neumann problem).
    GridFunction effective_current(const GridFunction& I_i, const GridFunction& I_e) const;

    /// Dense symmetric n x n matrix of 𝔸.
    Eigen::MatrixXd dense() const;

private:
    EllipticOperator a1_;
    EllipticOperator a2_;
    std::shared_ptr<Eigen::SimplicialLDLT<SparseMatrix>> sum_factor_;
};

GridFunction bidomain_apply(const BidomainOperator& op, const GridFunction& u);
Potentials reconstruct_potentials(const BidomainOperator& op, const GridFunction& u);

}  // namespace sbd
