#pragma once

#include <Eigen/Core>

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace sbd {

using Index = Eigen::Index;
using GridFunction = Eigen::VectorXd;

/// A face on the domain boundary, owned by exactly one cell.
struct BoundaryFace {
    Index cell = 0;
    int axis = 0;
    int side = 0;  // -1 for the low end of the axis, +1 for the high end
    std::array<double, 3> normal{};
};

/// Uniform, axis-aligned, cell-centered grid on [0,L_0] x ... x [0,L_{d-1}].
///
/// Cells are numbered with axis 0 varying fastest.
class Grid {
public:
    Grid() = default;
    Grid(int dimension, std::vector<int> extents, std::vector<double> lengths);

    int dimension() const { return dimension_; }
    Index size() const { return size_; }
    int extent(int axis) const { return extents_[axis]; }
    double length(int axis) const { return lengths_[axis]; }
    double spacing(int axis) const { return spacing_[axis]; }
    Index stride(int axis) const { return strides_[axis]; }
    double cell_volume() const { return cell_volume_; }
    double domain_volume() const { return cell_volume_ * static_cast<double>(size_); }

    std::span<const int> extents() const { return {extents_.data(), static_cast<std::size_t>(dimension_)}; }
    std::span<const double> lengths() const { return {lengths_.data(), static_cast<std::size_t>(dimension_)}; }

    std::array<int, 3> coords(Index cell) const;
    Index index(const std::array<int, 3>& coords) const;
    std::array<double, 3> center(Index cell) const;

    const std::vector<BoundaryFace>& boundary_faces() const { return faces_; }

    /// Samples f(x) at every cell center.
    template <typename F>
    GridFunction sample(F&& f) const {
        GridFunction out(size_);
        for (Index c = 0; c < size_; ++c) out[c] = f(center(c));
        return out;
    }

    bool operator==(const Grid& other) const;

private:
    int dimension_ = 0;
    std::array<int, 3> extents_{1, 1, 1};
    std::array<double, 3> lengths_{1.0, 1.0, 1.0};
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
    std::array<Index, 3> strides_{1, 1, 1};
    Index size_ = 0;
    double cell_volume_ = 0.0;
    std::vector<BoundaryFace> faces_;
};

/// Throws std::invalid_argument when the extents/lengths do not match `d`,
/// when d is outside {1,2,3}, when an axis has fewer than two cells, or when a
/// length is not positive.
Grid build_grid(int d, std::vector<int> extents, std::vector<double> lengths);

/// u - mean(u), with equal cell weights.
GridFunction mean_zero_project(const Grid& grid, const GridFunction& u);

/// Discrete L2 inner product sum(u*v)*|cell|.
double inner(const Grid& grid, const GridFunction& u, const GridFunction& v);

}  // namespace sbd
