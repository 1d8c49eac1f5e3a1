#pragma once

#include "sbd/grid.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <functional>
#include <string>
#include <vector>

namespace sbd {

using Tensor = Eigen::Matrix3d;  // only the leading d x d block is used
using SparseMatrix = Eigen::SparseMatrix<double>;

enum class Medium { intracellular = 1, extracellular = 2 };

/// Cellwise conductivity tensors a_i or a_e.
class TensorField {
public:
    TensorField(const Grid& grid, Medium label, std::vector<Tensor> cells);

    static TensorField constant(const Grid& grid, Medium label, const Tensor& value);
    static TensorField scalar(const Grid& grid, Medium label, double sigma);
    static TensorField diagonal(const Grid& grid, Medium label, std::span<const double> values);
    static TensorField from_function(const Grid& grid, Medium label,
                                     const std::function<Tensor(const std::array<double, 3>&)>& f);

    Medium label() const { return label_; }
    int dimension() const { return dimension_; }
    Index size() const { return static_cast<Index>(cells_.size()); }
    const Tensor& operator[](Index c) const { return cells_[c]; }
    const std::vector<Tensor>& cells() const { return cells_; }

    /// Smallest eigenvalue over all cells of the active d x d block.
    double min_eigenvalue() const;

    /// Throws std::invalid_argument naming the first cell that is not
    /// symmetric to 1e-12 or has an eigenvalue below lambda0.
    void validate(double lambda0) const;

    /// Largest |a(c) - a(c')| / h over neighbouring cells (max-norm of the
    /// matrix difference). Discrete stand-in for the W^{1,inf} seminorm.
    double max_difference_quotient(const Grid& grid) const;

private:
    Medium label_;
    int dimension_;
    std::vector<Tensor> cells_;
};

/// A_k = -div(a_k grad .) with homogeneous conormal (Neumann) flux, as a
/// sparse symmetric matrix acting on cell values.
struct EllipticOperator {
    Grid grid;
    Medium label = Medium::intracellular;
    SparseMatrix matrix;
    double symmetry_correction = 0.0;  // max|A - (A+A^T)/2| before symmetrization

    GridFunction apply(const GridFunction& u) const { return matrix * u; }
    Index size() const { return matrix.rows(); }
};

/// Cell-centered finite volumes: two-point fluxes with harmonic face
/// averaging for a^{aa}; off-diagonal a^{ab} through corner gradients built
/// from the four cells around each interior edge (bilinear interpolation of
/// the coefficient at the corner). Boundary fluxes vanish.
///
/// Throws std::invalid_argument if a cell tensor is not SPD (the message
/// names the cell), and std::domain_error if the assembled matrix is not
/// positive definite on the mean-zero subspace.
EllipticOperator assemble_elliptic_operator(const Grid& grid, const TensorField& tensor, double lambda0 = 1e-12);

struct BoundaryFaceCheck {
    BoundaryFace face;
    double gamma = 0.0;
    double residual = 0.0;  // |nu.a2 - gamma nu.a1| / |nu.a2|
};

struct BDReport {
    bool pass = false;
    double tolerance = 0.0;
    double gamma0 = 0.0;
    double max_residual = 0.0;
    std::vector<BoundaryFaceCheck> faces;
    double difference_quotient_a1 = 0.0;  // reported only
    double difference_quotient_a2 = 0.0;
};

/// Checks nu.a2 = gamma nu.a1 on every boundary face.
BDReport check_bd_conditions(const Grid& grid, const TensorField& a1, const TensorField& a2, double tol = 1e-8);

}  // namespace sbd
