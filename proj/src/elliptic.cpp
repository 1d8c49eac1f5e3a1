#include "sbd/elliptic.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbd {

namespace {

std::string describe_cell(const Grid& grid, Index c) {
    const auto ijk = grid.coords(c);
    std::string s = "cell " + std::to_string(c) + " (";
    for (int a = 0; a < grid.dimension(); ++a) {
        if (a) s += ",";
        s += std::to_string(ijk[a]);
    }
    return s + ")";
}

double harmonic_mean(double x, double y) { return 2.0 * x * y / (x + y); }

}  // namespace

TensorField::TensorField(const Grid& grid, Medium label, std::vector<Tensor> cells)
    : label_(label), dimension_(grid.dimension()), cells_(std::move(cells)) {
    if (static_cast<Index>(cells_.size()) != grid.size()) {
        throw std::invalid_argument("tensor field has " + std::to_string(cells_.size()) + " cells, grid has " +
                                    std::to_string(grid.size()));
    }
    // Inactive rows/columns are kept at zero so that norms only see the d x d block.
    for (auto& t : cells_) {
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                if (i >= dimension_ || j >= dimension_) t(i, j) = 0.0;
    }
}

TensorField TensorField::constant(const Grid& grid, Medium label, const Tensor& value) {
    return TensorField(grid, label, std::vector<Tensor>(static_cast<std::size_t>(grid.size()), value));
}

TensorField TensorField::scalar(const Grid& grid, Medium label, double sigma) {
    return constant(grid, label, sigma * Tensor::Identity());
}

TensorField TensorField::diagonal(const Grid& grid, Medium label, std::span<const double> values) {
    if (values.size() != static_cast<std::size_t>(grid.dimension())) {
        throw std::invalid_argument("diagonal tensor needs one value per axis");
    }
    Tensor t = Tensor::Zero();
    for (int a = 0; a < grid.dimension(); ++a) t(a, a) = values[a];
    return constant(grid, label, t);
}

TensorField TensorField::from_function(const Grid& grid, Medium label,
                                       const std::function<Tensor(const std::array<double, 3>&)>& f) {
    std::vector<Tensor> cells(static_cast<std::size_t>(grid.size()));
    for (Index c = 0; c < grid.size(); ++c) cells[c] = f(grid.center(c));
    return TensorField(grid, label, std::move(cells));
}

double TensorField::min_eigenvalue() const {
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& t : cells_) {
        const Eigen::MatrixXd block = t.topLeftCorner(dimension_, dimension_);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
        lo = std::min(lo, es.eigenvalues().minCoeff());
    }
    return lo;
}

void TensorField::validate(double lambda0) const {
    const char* name = label_ == Medium::intracellular ? "a_i" : "a_e";
    for (std::size_t c = 0; c < cells_.size(); ++c) {
        const Eigen::MatrixXd block = cells_[c].topLeftCorner(dimension_, dimension_);
        if (!block.allFinite()) {
            throw std::invalid_argument(std::string(name) + ": non-finite tensor at cell " + std::to_string(c));
        }
        const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
        if ((block - block.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
            throw std::invalid_argument(std::string(name) + ": tensor not symmetric at cell " + std::to_string(c));
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < lambda0) {
            throw std::invalid_argument(std::string(name) + ": tensor not uniformly positive definite at cell " +
                                        std::to_string(c) + " (min eigenvalue " +
                                        std::to_string(es.eigenvalues().minCoeff()) + ")");
        }
    }
}

double TensorField::max_difference_quotient(const Grid& grid) const {
    double q = 0.0;
    for (Index c = 0; c < grid.size(); ++c) {
        const auto ijk = grid.coords(c);
        for (int a = 0; a < grid.dimension(); ++a) {
            if (ijk[a] + 1 >= grid.extent(a)) continue;
            const Index nb = c + grid.stride(a);
            q = std::max(q, (cells_[c] - cells_[nb]).cwiseAbs().maxCoeff() / grid.spacing(a));
        }
    }
    return q;
}

EllipticOperator assemble_elliptic_operator(const Grid& grid, const TensorField& tensor, double lambda0) {
    if (tensor.size() != grid.size() || tensor.dimension() != grid.dimension()) {
        throw std::invalid_argument("tensor field does not live on this grid");
    }
    for (Index c = 0; c < grid.size(); ++c) {
        const Eigen::MatrixXd block = tensor[c].topLeftCorner(grid.dimension(), grid.dimension());
        const double scale = std::max(1.0, block.cwiseAbs().maxCoeff());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block, Eigen::EigenvaluesOnly);
        if ((block - block.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
            es.eigenvalues().minCoeff() < lambda0) {
            throw std::invalid_argument("conductivity tensor is not symmetric positive definite at " +
                                        describe_cell(grid, c));
        }
    }

    const int d = grid.dimension();
    const Index n = grid.size();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(n) * (4 * d + 16 * d * (d - 1) / 2));

    // Two-point fluxes through interior faces.
    for (Index c = 0; c < n; ++c) {
        const auto ijk = grid.coords(c);
        for (int a = 0; a < d; ++a) {
            if (ijk[a] + 1 >= grid.extent(a)) continue;
            const Index nb = c + grid.stride(a);
            const double h = grid.spacing(a);
            const double t = harmonic_mean(tensor[c](a, a), tensor[nb](a, a)) / (h * h);
            triplets.emplace_back(c, c, t);
            triplets.emplace_back(nb, nb, t);
            triplets.emplace_back(c, nb, -t);
            triplets.emplace_back(nb, c, -t);
        }
    }

    // Cross terms: for each interior edge in the (a,b) plane, the four
    // surrounding cells give corner gradients g_a = p.u, g_b = q.u and the
    // energy contribution 2 a^{ab} g_a g_b |cell|.
    for (int a = 0; a < d; ++a) {
        for (int b = a + 1; b < d; ++b) {
            const double ha = grid.spacing(a);
            const double hb = grid.spacing(b);
            for (Index c = 0; c < n; ++c) {
                const auto ijk = grid.coords(c);
                if (ijk[a] + 1 >= grid.extent(a) || ijk[b] + 1 >= grid.extent(b)) continue;
                const std::array<Index, 4> cells{c, c + grid.stride(a), c + grid.stride(b),
                                                 c + grid.stride(a) + grid.stride(b)};
                double coeff = 0.0;
                for (Index k : cells) coeff += tensor[k](a, b);
                coeff *= 0.25;
                if (coeff == 0.0) continue;
                const std::array<double, 4> p{-1.0 / (2 * ha), 1.0 / (2 * ha), -1.0 / (2 * ha), 1.0 / (2 * ha)};
                const std::array<double, 4> q{-1.0 / (2 * hb), -1.0 / (2 * hb), 1.0 / (2 * hb), 1.0 / (2 * hb)};
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        triplets.emplace_back(cells[i], cells[j], coeff * (p[i] * q[j] + q[i] * p[j]));
            }
        }
    }

    SparseMatrix raw(n, n);
    raw.setFromTriplets(triplets.begin(), triplets.end());
    SparseMatrix transposed = raw.transpose();
    SparseMatrix sym = 0.5 * (raw + transposed);
    sym.makeCompressed();

    const double amax = std::max(sym.coeffs().cwiseAbs().maxCoeff(), 1e-300);
    const double correction = SparseMatrix(raw - sym).coeffs().cwiseAbs().maxCoeff();
    if (correction > 1e-12 * amax) {
        throw std::logic_error("assembled operator needed a symmetry correction of " + std::to_string(correction));
    }

    // Positive definiteness on the mean-zero subspace: for a matrix with
    // constants in its kernel, this is equivalent to the leading
    // (n-1) x (n-1) principal block being positive definite.
    {
        SparseMatrix grounded = sym.topLeftCorner(n - 1, n - 1);
        Eigen::SimplicialLDLT<SparseMatrix> ldlt(grounded);
        if (ldlt.info() != Eigen::Success || (ldlt.vectorD().array() <= 0.0).any()) {
            throw std::domain_error(
                "assembled operator is not positive definite on mean-zero functions; the off-diagonal "
                "conductivities dominate the diagonal ones");
        }
    }

    EllipticOperator op;
    op.grid = grid;
    op.label = tensor.label();
    op.matrix = std::move(sym);
    op.symmetry_correction = correction;
    return op;
}

BDReport check_bd_conditions(const Grid& grid, const TensorField& a1, const TensorField& a2, double tol) {
    if (a1.size() != grid.size() || a2.size() != grid.size()) {
        throw std::invalid_argument("tensor fields must live on the same grid");
    }
    const int d = grid.dimension();
    BDReport report;
    report.tolerance = tol;
    report.gamma0 = std::numeric_limits<double>::infinity();
    for (const auto& f : grid.boundary_faces()) {
        Eigen::Vector3d nu(f.normal[0], f.normal[1], f.normal[2]);
        const Eigen::Vector3d n1 = a1[f.cell] * nu;
        const Eigen::Vector3d n2 = a2[f.cell] * nu;
        BoundaryFaceCheck chk;
        chk.face = f;
        chk.gamma = n2.dot(nu) / n1.dot(nu);
        const double denom = std::max(n2.head(d).norm(), 1e-300);
        chk.residual = (n2 - chk.gamma * n1).head(d).norm() / denom;
        report.max_residual = std::max(report.max_residual, chk.residual);
        report.gamma0 = std::min(report.gamma0, chk.gamma);
        report.faces.push_back(chk);
    }
    report.pass = report.max_residual <= tol && report.gamma0 > 0.0;
    report.difference_quotient_a1 = a1.max_difference_quotient(grid);
    report.difference_quotient_a2 = a2.max_difference_quotient(grid);
    return report;
}

}  // namespace sbd
