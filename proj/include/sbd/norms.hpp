#pragma once

#include "sbd/spectral.hpp"

#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace sbd {

enum class NormScale { Lq, Hs2_spectral, Besov_surrogate };
enum class Setting { strong, weak_I, weak_II };

std::string to_string(NormScale s);
std::string to_string(Setting s);

/// Derivative shift of the base space: 0 (strong), -1 (weak-I), -1/2 (weak-II).
double setting_shift(Setting s);

struct NormLabel {
    NormScale scale = NormScale::Lq;
    double s = 0.0;  // smoothness
    double q = 2.0;  // integrability
    double p = 2.0;  // time exponent
    Setting setting = Setting::strong;
    bool surrogate = false;

    /// Throws std::invalid_argument if q is outside (1, inf) or if an
    /// Hs2-spectral label has q != 2.
    void validate() const;
    std::string describe() const;
};

/// (sum |u|^q |cell|)^{1/q}; q = inf gives max|u|. Throws for q < 1.
double lq_norm(const Grid& grid, const GridFunction& u, double q);

/// (sum_k (1+lambda_k)^sigma <u,phi_k>^2)^{1/2}, sigma in [-2, 2].
double sobolev_norm_spectral(const SpectralDecomposition& spec, const GridFunction& u, double sigma);

/// Norm of u in the scale named by the label: spectral at q = 2,
/// otherwise the L^q norm of (I+𝔸)^{s/2} u.
double labelled_norm(const SpectralDecomposition& spec, const GridFunction& u, const NormLabel& label);

/// (int t^{(1-mu)p} ||v(t)||^p dt)^{1/p} by left-endpoint quadrature over
/// the sample times; the last sample closes the interval.
double weighted_norm_accumulator(const std::vector<double>& times, const std::vector<double>& norms, double mu,
                                 double p);

/// Smoothness 2/p + d/q - 1 of the critical space for v.
double critical_smoothness(int d, double p, double q);

/// Running int ||v||^p_{sigma} + ||w||^p_{L^q} dt, left endpoint.
class CriticalNormAccumulator {
public:
    CriticalNormAccumulator(std::shared_ptr<const SpectralDecomposition> spec, int d, double p, double q);

    /// Adds the contribution of the interval [t, t+dt] using (v, w) at t.
    void add(double dt, const GridFunction& v, const GridFunction& w);

    double value() const { return v_part_ + w_part_; }
    double v_part() const { return v_part_; }
    double w_part() const { return w_part_; }
    double sigma() const { return sigma_; }
    /// True when q != 2 or sigma is outside the spectral range.
    bool surrogate() const { return surrogate_; }

private:
    std::shared_ptr<const SpectralDecomposition> spec_;
    double p_;
    double q_;
    double sigma_;
    bool surrogate_;
    double v_part_ = 0.0;
    double w_part_ = 0.0;
};

}  // namespace sbd
