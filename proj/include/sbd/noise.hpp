#pragma once

#include "sbd/block.hpp"
#include "sbd/rng.hpp"
#include "sbd/spectral.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

namespace sbd {

/// Declared regularity of h: plain L^q, or with 𝔸^{1/2} h bounded.
enum class NoiseClass { plain, half_power };

/// h(t) = scale * h on [start, next start).
struct ScheduleSegment {
    double start = 0.0;
    double scale = 1.0;
};

struct NoiseSpec {
    GridFunction h;
    Index modes = 0;  // 0 selects all modes
    std::uint64_t seed = 0;
    NoiseClass regularity = NoiseClass::plain;
    std::vector<ScheduleSegment> schedule;  // empty means a constant scale of 1

    double scale_at(double t) const;
    /// Times in (t0, t1) where the scale changes.
    std::vector<double> breakpoints(double t0, double t1) const;
    void validate(Index n) const;
};

/// G_jk = <h phi_j, h phi_k> over the retained modes.
struct ModalNoiseCovariance {
    Eigen::MatrixXd G;
    Eigen::MatrixXd factor;  // F with F F^T = G
    bool diagonal = false;
};

ModalNoiseCovariance modal_covariance(const NoiseSpec& spec, const SpectralDecomposition& spectral);

/// Modal coefficients of Z = (z, zeta): row k holds (z_k, zeta_k).
struct ConvolutionPath {
    double t = 0.0;
    Eigen::MatrixXd Z;
    std::uint32_t step = 0;    // number of exact OU steps taken (RNG counter)
    double sup_z_h1 = 0.0;     // running sup of the H^{1,2} surrogate of z
};

/// Advances Z exactly per mode, drawing all modes jointly from the
/// step covariance with blocks G_jk I_jk(dt).
class ConvolutionSampler {
public:
    ConvolutionSampler(std::shared_ptr<const BlockOperator> block, std::shared_ptr<const SpectralDecomposition> spectral,
                       NoiseSpec noise);

    Index modes() const { return modes_; }
    const NoiseSpec& noise() const { return noise_; }
    const ModalNoiseCovariance& covariance() const { return covariance_; }
    const SpectralDecomposition& spectral() const { return *spectral_; }
    const Eigen::Matrix2d& modal_matrix(Index k) const { return matrices_[k]; }

    ConvolutionPath initial() const;

    /// Advances to t_next, splitting at schedule breakpoints.
    void advance(ConvolutionPath& path, double t_next, std::uint64_t replica) const;

    GridFunction z(const ConvolutionPath& path) const;
    GridFunction zeta(const ConvolutionPath& path) const;

    /// Exact covariance of (Z_k)(t) started from Z(0) = 0.
    Eigen::Matrix2d exact_covariance(Index k, double t) const;

private:
    struct StepFactor;
    std::shared_ptr<const StepFactor> step_factor(double dt) const;
    void exact_step(ConvolutionPath& path, double dt, double scale, std::uint64_t replica) const;

    std::shared_ptr<const BlockOperator> block_;
    std::shared_ptr<const SpectralDecomposition> spectral_;
    NoiseSpec noise_;
    Index modes_ = 0;
    ModalNoiseCovariance covariance_;
    std::vector<Eigen::Matrix2d> matrices_;
    Philox4x32 rng_;
    mutable std::mutex cache_mutex_;
    mutable std::map<double, std::shared_ptr<const StepFactor>> cache_;
};

/// Z at each of the given times; times must start at 0 and increase.
std::vector<ConvolutionPath> stochastic_convolution_path(const ConvolutionSampler& sampler,
                                                         const std::vector<double>& times, std::uint64_t replica = 0);

struct ItoReport {
    double alpha = 0.0;
    double t = 0.0;
    double empirical = 0.0;
    double exact = 0.0;
    double standard_error = 0.0;
    double z_score = 0.0;
    Index samples = 0;
};

/// sum_k lambda_k^{2 alpha} P_k(t)_{11}, alpha in {0, 1/2}.
double ito_exact_value(const ConvolutionSampler& sampler, double alpha, double t);
/// ||𝔸^alpha z||^2 of one path.
double ito_sample_value(const ConvolutionSampler& sampler, const ConvolutionPath& path, double alpha);
/// Mean, standard error and z-score of samples against the exact value.
ItoReport ito_report(double alpha, double t, double exact, const std::vector<double>& samples);

/// Compares the ensemble mean of ||𝔸^alpha z(t)||^2 with
/// sum_k lambda_k^{2 alpha} P_k(t)_{11}. alpha must be 0 or 1/2.
ItoReport ito_isometry_check(const ConvolutionSampler& sampler, const std::vector<ConvolutionPath>& ensemble,
                             double alpha, double t);

}  // namespace sbd
