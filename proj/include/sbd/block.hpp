#pragma once

#include "sbd/bidomain.hpp"

#include <Eigen/SparseCholesky>

#include <map>
#include <memory>
#include <mutex>

namespace sbd {

/// FitzHugh-Nagumo rate constants: 0 < a < 1, b > 0, c > 0.
struct FHNParams {
    double a = 0.1;
    double b = 0.01;
    double c = 0.01;

    /// Throws std::invalid_argument naming the violated inequality.
    void validate() const;
};

struct CoupledState {
    double t = 0.0;
    GridFunction v;  // potential part (v, or u for the full system)
    GridFunction w;  // gating part
};

/// A = [[𝔸 + a, 1], [-c, b]] acting on pairs (u, w).
class BlockOperator {
public:
    BlockOperator(std::shared_ptr<const BidomainOperator> op, FHNParams params);

    const BidomainOperator& bidomain() const { return *op_; }
    std::shared_ptr<const BidomainOperator> bidomain_ptr() const { return op_; }
    const FHNParams& params() const { return params_; }
    const Grid& grid() const { return op_->grid(); }
    Index size() const { return op_->size(); }

    /// A applied to (u, w).
    CoupledState apply(const CoupledState& x) const;

    /// Solves (I + tau A)(u, w) = rhs.
    CoupledState resolvent(double tau, const CoupledState& rhs) const;

    /// The 2x2 modal matrix [[lambda + a, 1], [-c, b]].
    Eigen::Matrix2d modal_matrix(double lambda) const;

private:
    struct ShiftedSolver;
    std::shared_ptr<const ShiftedSolver> shifted_solver(double tau) const;

    std::shared_ptr<const BidomainOperator> op_;
    FHNParams params_;
    mutable std::mutex cache_mutex_;
    mutable std::map<double, std::shared_ptr<const ShiftedSolver>> cache_;
};

CoupledState block_resolvent_solve(const BlockOperator& block, double tau, const CoupledState& rhs);

}  // namespace sbd
