#include "sbd/noise.hpp"

#include "sbd/ou.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace sbd {

namespace {
constexpr std::size_t kMaxCachedSteps = 8;
constexpr double kStepMatchTolerance = 1e-12;
}  // namespace

double NoiseSpec::scale_at(double t) const {
    double s = 1.0;
    for (const auto& seg : schedule) {
        if (seg.start <= t) s = seg.scale;
    }
    return s;
}

std::vector<double> NoiseSpec::breakpoints(double t0, double t1) const {
    std::vector<double> out;
    for (const auto& seg : schedule) {
        if (seg.start > t0 && seg.start < t1) out.push_back(seg.start);
    }
    return out;
}

void NoiseSpec::validate(Index n) const {
    if (h.size() != n) {
        throw std::invalid_argument("noise multiplier has " + std::to_string(h.size()) + " values, grid has " +
                                    std::to_string(n));
    }
    if (!h.allFinite()) throw std::invalid_argument("noise multiplier must be finite");
    if (modes < 0 || modes > n) throw std::invalid_argument("noise modes must lie in [1, n]");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!std::isfinite(schedule[i].scale)) throw std::invalid_argument("noise schedule scale must be finite");
        if (i > 0 && !(schedule[i].start > schedule[i - 1].start)) {
            throw std::invalid_argument("noise schedule start times must increase");
        }
    }
}

ModalNoiseCovariance modal_covariance(const NoiseSpec& spec, const SpectralDecomposition& spectral) {
    const Index n = spectral.size();
    const Index nm = spec.modes == 0 ? n : spec.modes;
    if (nm < 1 || nm > n) throw std::invalid_argument("noise modes must lie in [1, n]");
    const Eigen::MatrixXd phi = spectral.eigenvectors.leftCols(nm);
    const Eigen::VectorXd h2 = spec.h.array().square();

    ModalNoiseCovariance cov;
    cov.G = phi.transpose() * h2.asDiagonal() * phi * spectral.grid.cell_volume();
    cov.G = 0.5 * (cov.G + cov.G.transpose());

    const double dmax = cov.G.diagonal().cwiseAbs().maxCoeff();
    Eigen::MatrixXd off = cov.G;
    off.diagonal().setZero();
    cov.diagonal = off.cwiseAbs().maxCoeff() <= 1e-14 * dmax;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(cov.G);
    const Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
    Eigen::MatrixXd l = ldlt.matrixL();
    cov.factor = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
    return cov;
}

struct ConvolutionSampler::StepFactor {
    double dt = 0.0;
    std::vector<Eigen::Matrix2d> propagators;
    std::vector<Eigen::Matrix2d> blocks;  // per-mode factors when G is diagonal
    Eigen::MatrixXd joint;                // 2N x 2N factor otherwise
};

ConvolutionSampler::ConvolutionSampler(std::shared_ptr<const BlockOperator> block,
                                       std::shared_ptr<const SpectralDecomposition> spectral, NoiseSpec noise)
    : block_(std::move(block)), spectral_(std::move(spectral)), noise_(std::move(noise)), rng_(noise_.seed) {
    if (!block_ || !spectral_) throw std::invalid_argument("sampler needs a block operator and a spectrum");
    noise_.validate(spectral_->size());
    modes_ = noise_.modes == 0 ? spectral_->size() : noise_.modes;
    covariance_ = modal_covariance(noise_, *spectral_);
    matrices_.reserve(static_cast<std::size_t>(modes_));
    for (Index k = 0; k < modes_; ++k) matrices_.push_back(block_->modal_matrix(spectral_->eigenvalues[k]));
}

ConvolutionPath ConvolutionSampler::initial() const {
    ConvolutionPath p;
    p.Z = Eigen::MatrixXd::Zero(modes_, 2);
    return p;
}

std::shared_ptr<const ConvolutionSampler::StepFactor> ConvolutionSampler::step_factor(double dt) const {
    {
        std::lock_guard<std::mutex> lock(cache_mutex_);
        auto it = cache_.lower_bound(dt * (1.0 - kStepMatchTolerance));
        if (it != cache_.end() && it->first <= dt * (1.0 + kStepMatchTolerance)) return it->second;
    }
    auto f = std::make_shared<StepFactor>();
    f->dt = dt;
    const Index nm = modes_;
    f->propagators.reserve(static_cast<std::size_t>(nm));
    for (Index k = 0; k < nm; ++k) f->propagators.push_back(ou_propagator(matrices_[k], dt));

    const Eigen::MatrixXd& g = covariance_.G;
    if (covariance_.diagonal) {
        f->blocks.reserve(static_cast<std::size_t>(nm));
        for (Index k = 0; k < nm; ++k) {
            Eigen::Matrix2d q = g(k, k) * ou_cross_covariance(matrices_[k], matrices_[k], dt);
            f->blocks.push_back(psd_factor(0.5 * (q + q.transpose())));
        }
    } else {
        Eigen::MatrixXd c(2 * nm, 2 * nm);
        for (Index j = 0; j < nm; ++j) {
            for (Index k = j; k < nm; ++k) {
                const Eigen::Matrix2d b = g(j, k) * ou_cross_covariance(matrices_[j], matrices_[k], dt);
                c.block<2, 2>(2 * j, 2 * k) = b;
                c.block<2, 2>(2 * k, 2 * j) = b.transpose();
            }
        }
        c = 0.5 * (c + c.transpose());
        Eigen::LDLT<Eigen::MatrixXd> ldlt(c);
        const Eigen::VectorXd d = ldlt.vectorD().cwiseMax(0.0).cwiseSqrt();
        Eigen::MatrixXd l = ldlt.matrixL();
        f->joint = ldlt.transpositionsP().transpose() * (l * d.asDiagonal());
    }

    std::lock_guard<std::mutex> lock(cache_mutex_);
    if (cache_.size() >= kMaxCachedSteps) cache_.erase(cache_.begin());
    cache_.emplace(dt, f);
    return f;
}

void ConvolutionSampler::exact_step(ConvolutionPath& path, double dt, double scale, std::uint64_t replica) const {
    const auto f = step_factor(dt);
    const Index nm = modes_;
    Eigen::VectorXd xi(2 * nm);
    for (Index k = 0; k < nm; ++k) {
        const auto pair = rng_.normals(static_cast<std::uint32_t>(k), path.step, replica);
        xi[2 * k] = pair[0];
        xi[2 * k + 1] = pair[1];
    }
    Eigen::MatrixXd next(nm, 2);
    if (covariance_.diagonal) {
        for (Index k = 0; k < nm; ++k) {
            next.row(k) = (f->propagators[k] * path.Z.row(k).transpose() +
                           scale * f->blocks[k] * xi.segment<2>(2 * k))
                              .transpose();
        }
    } else {
        const Eigen::VectorXd eta = scale * (f->joint * xi);
        for (Index k = 0; k < nm; ++k) {
            next.row(k) = (f->propagators[k] * path.Z.row(k).transpose() + eta.segment<2>(2 * k)).transpose();
        }
    }
    path.Z = std::move(next);
    path.t += dt;
    ++path.step;

    double h1 = 0.0;
    for (Index k = 0; k < nm; ++k) h1 += (1.0 + spectral_->eigenvalues[k]) * path.Z(k, 0) * path.Z(k, 0);
    path.sup_z_h1 = std::max(path.sup_z_h1, std::sqrt(h1));
}

void ConvolutionSampler::advance(ConvolutionPath& path, double t_next, std::uint64_t replica) const {
    if (!(t_next > path.t)) {
        throw std::invalid_argument("convolution path times must increase (" + std::to_string(path.t) + " -> " +
                                    std::to_string(t_next) + ")");
    }
    std::vector<double> stops = noise_.breakpoints(path.t, t_next);
    stops.push_back(t_next);
    for (double stop : stops) {
        const double start = path.t;
        exact_step(path, stop - start, noise_.scale_at(start), replica);
        path.t = stop;
    }
}

GridFunction ConvolutionSampler::z(const ConvolutionPath& path) const { return spectral_->synthesize(path.Z.col(0)); }

GridFunction ConvolutionSampler::zeta(const ConvolutionPath& path) const {
    return spectral_->synthesize(path.Z.col(1));
}

Eigen::Matrix2d ConvolutionSampler::exact_covariance(Index k, double t) const {
    if (k < 0 || k >= modes_) throw std::out_of_range("mode index out of range");
    const Eigen::Matrix2d& m = matrices_[k];
    const double gkk = covariance_.G(k, k);
    std::vector<double> stops = noise_.breakpoints(0.0, t);
    stops.push_back(t);
    Eigen::Matrix2d p = Eigen::Matrix2d::Zero();
    double start = 0.0;
    for (double stop : stops) {
        const double len = stop - start;
        if (len <= 0.0) continue;
        const double s = noise_.scale_at(start);
        const Eigen::Matrix2d e = ou_propagator(m, len);
        p = e * p * e.transpose() + s * s * gkk * ou_cross_covariance(m, m, len);
        start = stop;
    }
    return 0.5 * (p + p.transpose());
}

std::vector<ConvolutionPath> stochastic_convolution_path(const ConvolutionSampler& sampler,
                                                         const std::vector<double>& times, std::uint64_t replica) {
    if (times.empty() || times.front() != 0.0) throw std::invalid_argument("output times must start at 0");
    std::vector<ConvolutionPath> out;
    out.reserve(times.size());
    ConvolutionPath p = sampler.initial();
    out.push_back(p);
    for (std::size_t i = 1; i < times.size(); ++i) {
        if (!(times[i] > times[i - 1])) throw std::invalid_argument("output times must be strictly increasing");
        sampler.advance(p, times[i], replica);
        out.push_back(p);
    }
    return out;
}

namespace {

Eigen::VectorXd ito_weights(const ConvolutionSampler& sampler, double alpha) {
    if (alpha != 0.0 && alpha != 0.5) throw std::invalid_argument("Ito check supports alpha in {0, 1/2}");
    const auto& lam = sampler.spectral().eigenvalues;
    Eigen::VectorXd weight(sampler.modes());
    for (Index k = 0; k < sampler.modes(); ++k) weight[k] = alpha == 0.0 ? 1.0 : lam[k];
    return weight;
}

}  // namespace

double ito_exact_value(const ConvolutionSampler& sampler, double alpha, double t) {
    const Eigen::VectorXd weight = ito_weights(sampler, alpha);
    double exact = 0.0;
    for (Index k = 0; k < sampler.modes(); ++k) exact += weight[k] * sampler.exact_covariance(k, t)(0, 0);
    return exact;
}

double ito_sample_value(const ConvolutionSampler& sampler, const ConvolutionPath& path, double alpha) {
    const Eigen::VectorXd weight = ito_weights(sampler, alpha);
    return (weight.array() * path.Z.col(0).array().square()).sum();
}

ItoReport ito_report(double alpha, double t, double exact, const std::vector<double>& samples) {
    if (samples.size() < 2) throw std::invalid_argument("Ito report needs at least 2 samples");
    const Eigen::Map<const Eigen::VectorXd> values(samples.data(), static_cast<Index>(samples.size()));
    ItoReport r;
    r.alpha = alpha;
    r.t = t;
    r.exact = exact;
    r.samples = values.size();
    r.empirical = values.mean();
    const double var = (values.array() - r.empirical).square().sum() / static_cast<double>(r.samples - 1);
    r.standard_error = std::sqrt(var / static_cast<double>(r.samples));
    r.z_score = r.standard_error > 0.0 ? (r.empirical - r.exact) / r.standard_error : 0.0;
    return r;
}

ItoReport ito_isometry_check(const ConvolutionSampler& sampler, const std::vector<ConvolutionPath>& ensemble,
                             double alpha, double t) {
    if (ensemble.size() < 1000) throw std::invalid_argument("Ito check needs at least 1000 paths");
    std::vector<double> values;
    values.reserve(ensemble.size());
    for (const auto& p : ensemble) {
        if (std::abs(p.t - t) > 1e-12 * std::max(1.0, t)) {
            throw std::invalid_argument("ensemble path is not at the requested time");
        }
        values.push_back(ito_sample_value(sampler, p, alpha));
    }
    return ito_report(alpha, t, ito_exact_value(sampler, alpha, t), values);
}

}  // namespace sbd
