#pragma once

#include "sbd/fhn.hpp"
#include "sbd/noise.hpp"
#include "sbd/norms.hpp"

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace sbd {

struct StepperConfig {
    double dt = 0.005;
    double dt_min = 1e-10;
    double dt_max = 0.05;
    double tol = 0.05;  // bound on ||Delta V||_inf / max(||V||_inf, 1)
    bool adaptive = true;
    double T = 10.0;
    double output_interval = 0.1;
    double norm_cap = 1e6;       // sup-norm cap
    double critical_cap = 1e9;   // cap on int ||V||^p in the critical space
    double mu = 1.0;             // time weight exponent, in (1/p, 1]
    double p = 2.0;
    double q = 2.0;

    /// Throws std::invalid_argument naming the violated constraint.
    void validate() const;
};

enum class Outcome { completed, blow_up_detected, step_failure };
std::string to_string(Outcome o);

struct ContinuationStatus {
    Outcome outcome = Outcome::completed;
    double T_reached = 0.0;
    std::string reason;
    double critical_integral = 0.0;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

/// Z sampled on a time grid; the remainder solver freezes z at the latest
/// node at or before the current time.
struct ZPath {
    std::vector<double> times;
    std::vector<GridFunction> z;
    std::vector<GridFunction> zeta;

    /// Index of the latest node <= t (with a relative slack of 1e-12).
    std::size_t node_at(double t) const;
};

/// Z on the union of a uniform grid of spacing dz on [0, T] and the
/// extra times given (typically the output times).
ZPath sample_zpath(const ConvolutionSampler& sampler, double dz, double T, const std::vector<double>& extra,
                   std::uint64_t replica);

/// Z = 0 on [0, T].
ZPath zero_zpath(Index n, double T);

/// Output times 0, h, 2h, ..., T (T always included).
std::vector<double> output_times(double T, double interval);

/// V^{n+1} = (I + dt A)^{-1} (V^n + dt (R(v^n, z^n, w^n) + forcing, 0)).
CoupledState imex_step(const BlockOperator& block, const CoupledState& state, const GridFunction& z, double dt,
                       const Reaction& reaction = fhn_remainder_reaction(), const GridFunction* forcing = nullptr);

/// Fires on the sup-norm cap or on the accumulated critical integral.
class BlowUpDetector {
public:
    BlowUpDetector(std::shared_ptr<const SpectralDecomposition> spec, int d, double p, double q, double norm_cap,
                   double critical_cap);

    /// Sup-norm test on the current state.
    std::optional<std::string> check(const CoupledState& state) const;
    /// Adds the left-endpoint contribution of [t, t+dt] and tests the cap.
    std::optional<std::string> accumulate(double dt, const CoupledState& left);

    double critical_integral() const { return accumulator_ ? accumulator_->value() : 0.0; }
    bool surrogate() const { return accumulator_ && accumulator_->surrogate(); }

private:
    double norm_cap_;
    double critical_cap_;
    std::optional<CriticalNormAccumulator> accumulator_;
};

struct StepInfo {
    double t = 0.0;  // left endpoint
    double dt = 0.0;
    const CoupledState* before = nullptr;
    const CoupledState* after = nullptr;
    const GridFunction* z = nullptr;
    const GridFunction* forcing = nullptr;
    double critical_integral = 0.0;
};

struct Trajectory {
    std::vector<double> times;
    std::vector<CoupledState> states;
    std::vector<std::size_t> z_nodes;  // node of the ZPath at each output time
};

struct IntegrateOptions {
    Reaction reaction = fhn_remainder_reaction();
    std::optional<GridFunction> forcing;
    std::shared_ptr<const SpectralDecomposition> spectral;  // enables the critical accumulator
    std::function<void(const StepInfo&)> observer;
};

/// Continuation loop with step halving on rejection and doubling after
/// easy steps; steps never straddle z nodes or output times.
std::pair<Trajectory, ContinuationStatus> integrate_path(const BlockOperator& block, const StepperConfig& cfg,
                                                         const CoupledState& init, const ZPath& zpath,
                                                         const IntegrateOptions& options = {});

}  // namespace sbd
