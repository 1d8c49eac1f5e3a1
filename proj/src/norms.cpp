#include "sbd/norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sbd {

std::string to_string(NormScale s) {
    switch (s) {
        case NormScale::Lq: return "Lq";
        case NormScale::Hs2_spectral: return "Hs2-spectral";
        case NormScale::Besov_surrogate: return "Besov-surrogate";
    }
    return "?";
}

std::string to_string(Setting s) {
    switch (s) {
        case Setting::strong: return "strong";
        case Setting::weak_I: return "weak-I";
        case Setting::weak_II: return "weak-II";
    }
    return "?";
}

double setting_shift(Setting s) {
    switch (s) {
        case Setting::strong: return 0.0;
        case Setting::weak_I: return -1.0;
        case Setting::weak_II: return -0.5;
    }
    return 0.0;
}

void NormLabel::validate() const {
    if (!(q > 1.0) || !std::isfinite(q)) throw std::invalid_argument("norm label needs q in (1, inf)");
    if (scale == NormScale::Hs2_spectral && q != 2.0) {
        throw std::invalid_argument("Hs2-spectral norms are defined for q = 2 only");
    }
}

std::string NormLabel::describe() const {
    std::string out = to_string(scale) + "(s=" + std::to_string(s) + ",q=" + std::to_string(q) +
                      ",p=" + std::to_string(p) + ",setting=" + to_string(setting) + ")";
    if (surrogate) out += "[surrogate]";
    return out;
}

double lq_norm(const Grid& grid, const GridFunction& u, double q) {
    if (std::isinf(q) && q > 0) return u.size() ? u.cwiseAbs().maxCoeff() : 0.0;
    if (!(q >= 1.0)) throw std::invalid_argument("L^q norm needs q >= 1");
    if (q == 2.0) return std::sqrt(u.squaredNorm() * grid.cell_volume());
    return std::pow(u.array().abs().pow(q).sum() * grid.cell_volume(), 1.0 / q);
}

namespace {

Eigen::VectorXd shifted_power_coefficients(const SpectralDecomposition& spec, const GridFunction& u, double sigma) {
    Eigen::VectorXd c = spec.coefficients(u);
    if (sigma != 0.0) c.array() *= (1.0 + spec.eigenvalues.array()).pow(0.5 * sigma);
    return c;
}

}  // namespace

double sobolev_norm_spectral(const SpectralDecomposition& spec, const GridFunction& u, double sigma) {
    if (!(sigma >= -2.0 && sigma <= 2.0)) throw std::invalid_argument("spectral smoothness must lie in [-2, 2]");
    return shifted_power_coefficients(spec, u, sigma).norm();
}

double labelled_norm(const SpectralDecomposition& spec, const GridFunction& u, const NormLabel& label) {
    label.validate();
    const double s = label.s + setting_shift(label.setting);
    if (label.q == 2.0 && label.scale != NormScale::Lq) return sobolev_norm_spectral(spec, u, s);
    if (label.scale == NormScale::Lq && s == 0.0) return lq_norm(spec.grid, u, label.q);
    return lq_norm(spec.grid, spec.synthesize(shifted_power_coefficients(spec, u, s)), label.q);
}

double weighted_norm_accumulator(const std::vector<double>& times, const std::vector<double>& norms, double mu,
                                 double p) {
    if (times.size() != norms.size()) throw std::invalid_argument("times and norms differ in length");
    if (!(p >= 1.0)) throw std::invalid_argument("time exponent p must be >= 1");
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double dt = times[i + 1] - times[i];
        const double weight = std::pow(times[i], (1.0 - mu) * p);
        sum += dt * weight * std::pow(norms[i], p);
    }
    return std::pow(sum, 1.0 / p);
}

double critical_smoothness(int d, double p, double q) { return 2.0 / p + d / q - 1.0; }

CriticalNormAccumulator::CriticalNormAccumulator(std::shared_ptr<const SpectralDecomposition> spec, int d, double p,
                                                 double q)
    : spec_(std::move(spec)), p_(p), q_(q), sigma_(critical_smoothness(d, p, q)) {
    if (!spec_) throw std::invalid_argument("critical norm needs a spectral decomposition");
    surrogate_ = q != 2.0 || sigma_ < -2.0 || sigma_ > 2.0;
    sigma_ = std::clamp(sigma_, -2.0, 2.0);
}

void CriticalNormAccumulator::add(double dt, const GridFunction& v, const GridFunction& w) {
    double nv = 0.0;
    if (q_ == 2.0) {
        nv = sobolev_norm_spectral(*spec_, v, sigma_);
    } else {
        Eigen::VectorXd c = spec_->coefficients(v);
        c.array() *= (1.0 + spec_->eigenvalues.array()).pow(0.5 * sigma_);
        nv = lq_norm(spec_->grid, spec_->synthesize(c), q_);
    }
    v_part_ += dt * std::pow(nv, p_);
    w_part_ += dt * std::pow(lq_norm(spec_->grid, w, q_), p_);
}

}  // namespace sbd
