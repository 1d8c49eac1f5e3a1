#include "sbd/block.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sbd {

namespace {
constexpr std::size_t kMaxCachedShifts = 16;
}

void FHNParams::validate() const {
    if (!(a > 0.0 && a < 1.0)) throw std::invalid_argument("0<a<1 violated (a = " + std::to_string(a) + ")");
    if (!(b > 0.0)) throw std::invalid_argument("b>0 violated (b = " + std::to_string(b) + ")");
    if (!(c > 0.0)) throw std::invalid_argument("c>0 violated (c = " + std::to_string(c) + ")");
}

// Solves (sigma + tau 𝔸) u = r through the symmetric system
//   [ sigma/tau I + A1   A1      ] [u  ]   [r/tau]
//   [ A1                 A1 + A2 ] [u_e] = [0    ]
// whose Schur complement in u is sigma/tau I + 𝔸. The last u_e node is
// grounded, which leaves the block positive definite.
struct BlockOperator::ShiftedSolver {
    double tau = 0.0;
    double sigma = 0.0;
    Index n = 0;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
};

BlockOperator::BlockOperator(std::shared_ptr<const BidomainOperator> op, FHNParams params)
    : op_(std::move(op)), params_(params) {
    if (!op_) throw std::invalid_argument("block operator needs a bidomain operator");
    params_.validate();
}

Eigen::Matrix2d BlockOperator::modal_matrix(double lambda) const {
    Eigen::Matrix2d m;
    m << lambda + params_.a, 1.0, -params_.c, params_.b;
    return m;
}

CoupledState BlockOperator::apply(const CoupledState& x) const {
    CoupledState y;
    y.t = x.t;
    y.v = op_->apply(x.v) + params_.a * x.v + x.w;
    y.w = -params_.c * x.v + params_.b * x.w;
    return y;
}

std::shared_ptr<const BlockOperator::ShiftedSolver> BlockOperator::shifted_solver(double tau) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.find(tau);
        if (it != cache_.end()) return it->second;
    }
    auto s = std::make_shared<ShiftedSolver>();
    const Index n = size();
    const auto& [a, b, c] = params_;
    s->tau = tau;
    s->n = n;
    s->sigma = (1.0 + tau * a) + tau * tau * c / (1.0 + tau * b);

    const SparseMatrix& a1 = op_->a1().matrix;
    const SparseMatrix& a2 = op_->a2().matrix;
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(static_cast<std::size_t>(4 * a1.nonZeros() + a2.nonZeros() + n));
    const Index m = 2 * n - 1;
    auto push = [&](Index i, Index j, double val) {
        if (i < m && j < m) t.emplace_back(i, j, val);
    };
    for (Index i = 0; i < n; ++i) push(i, i, s->sigma / tau);
    for (Index k = 0; k < a1.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a1, k); it; ++it) {
            push(it.row(), it.col(), it.value());
            push(it.row() + n, it.col(), it.value());
            push(it.row(), it.col() + n, it.value());
            push(it.row() + n, it.col() + n, it.value());
        }
    }
    for (Index k = 0; k < a2.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(a2, k); it; ++it) push(it.row() + n, it.col() + n, it.value());
    }
    SparseMatrix sys(m, m);
    sys.setFromTriplets(t.begin(), t.end());
    s->ldlt.compute(sys);
    if (s->ldlt.info() != Eigen::Success) {
        throw std::runtime_error("factorization of the shifted bidomain system failed (tau = " +
                                 std::to_string(tau) + ")");
    }

    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() >= kMaxCachedShifts) cache_.erase(cache_.begin());
    cache_.emplace(tau, s);
    return s;
}

CoupledState BlockOperator::resolvent(double tau, const CoupledState& rhs) const {
    if (!(tau > 0.0)) throw std::invalid_argument("resolvent step must be positive");
    const Index n = size();
    if (rhs.v.size() != n || rhs.w.size() != n) throw std::invalid_argument("state size does not match operator");
    const double b = params_.b;
    const double c = params_.c;
    const auto s = shifted_solver(tau);

    const GridFunction r = rhs.v - (tau / (1.0 + tau * b)) * rhs.w;
    Eigen::VectorXd full = Eigen::VectorXd::Zero(2 * n - 1);
    full.head(n) = r / tau;
    const Eigen::VectorXd sol = s->ldlt.solve(full);
    // Non-finite data passes through so the caller can reject the step.
    if (s->ldlt.info() != Eigen::Success || (!sol.allFinite() && full.allFinite())) {
        throw std::runtime_error("shifted bidomain solve failed");
    }

    CoupledState out;
    out.t = rhs.t;
    out.v = sol.head(n);
    out.w = (rhs.w + tau * c * out.v) / (1.0 + tau * b);
    return out;
}

CoupledState block_resolvent_solve(const BlockOperator& block, double tau, const CoupledState& rhs) {
    return block.resolvent(tau, rhs);
}

}  // namespace sbd
