#include "sbd/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace sbd {

Grid::Grid(int dimension, std::vector<int> extents, std::vector<double> lengths) : dimension_(dimension) {
    if (dimension < 1 || dimension > 3) {
        throw std::invalid_argument("grid dimension must be 1, 2 or 3, got " + std::to_string(dimension));
    }
    if (extents.size() != static_cast<std::size_t>(dimension) ||
        lengths.size() != static_cast<std::size_t>(dimension)) {
        throw std::invalid_argument("grid of dimension " + std::to_string(dimension) + " needs " +
                                    std::to_string(dimension) + " extents and lengths, got " +
                                    std::to_string(extents.size()) + " and " + std::to_string(lengths.size()));
    }
    size_ = 1;
    cell_volume_ = 1.0;
    for (int a = 0; a < dimension; ++a) {
        if (extents[a] < 2) {
            throw std::invalid_argument("axis " + std::to_string(a) + " needs at least 2 cells");
        }
        if (!(lengths[a] > 0.0) || !std::isfinite(lengths[a])) {
            throw std::invalid_argument("axis " + std::to_string(a) + " length must be positive");
        }
        extents_[a] = extents[a];
        lengths_[a] = lengths[a];
        spacing_[a] = lengths[a] / extents[a];
        strides_[a] = size_;
        size_ *= extents[a];
        cell_volume_ *= spacing_[a];
    }

    for (int a = 0; a < dimension_; ++a) {
        for (int side : {-1, +1}) {
            for (Index c = 0; c < size_; ++c) {
                const auto ijk = coords(c);
                const bool on_face = side < 0 ? ijk[a] == 0 : ijk[a] == extents_[a] - 1;
                if (!on_face) continue;
                BoundaryFace f;
                f.cell = c;
                f.axis = a;
                f.side = side;
                f.normal[a] = static_cast<double>(side);
                faces_.push_back(f);
            }
        }
    }
}

std::array<int, 3> Grid::coords(Index cell) const {
    std::array<int, 3> ijk{0, 0, 0};
    for (int a = 0; a < dimension_; ++a) {
        ijk[a] = static_cast<int>((cell / strides_[a]) % extents_[a]);
    }
    return ijk;
}

Index Grid::index(const std::array<int, 3>& ijk) const {
    Index c = 0;
    for (int a = 0; a < dimension_; ++a) c += ijk[a] * strides_[a];
    return c;
}

std::array<double, 3> Grid::center(Index cell) const {
    const auto ijk = coords(cell);
    std::array<double, 3> x{0.0, 0.0, 0.0};
    for (int a = 0; a < dimension_; ++a) x[a] = (ijk[a] + 0.5) * spacing_[a];
    return x;
}

bool Grid::operator==(const Grid& other) const {
    return dimension_ == other.dimension_ && extents_ == other.extents_ && lengths_ == other.lengths_;
}

Grid build_grid(int d, std::vector<int> extents, std::vector<double> lengths) {
    return Grid(d, std::move(extents), std::move(lengths));
}

GridFunction mean_zero_project(const Grid& grid, const GridFunction& u) {
    if (u.size() != grid.size()) throw std::invalid_argument("grid function size does not match grid");
    return u.array() - u.mean();
}

double inner(const Grid& grid, const GridFunction& u, const GridFunction& v) {
    return u.dot(v) * grid.cell_volume();
}

}  // namespace sbd
