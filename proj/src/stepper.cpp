#include "sbd/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace sbd {

namespace {

double sup_norm(const CoupledState& s) {
    return std::max(s.v.size() ? s.v.cwiseAbs().maxCoeff() : 0.0, s.w.size() ? s.w.cwiseAbs().maxCoeff() : 0.0);
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(6);
    os << x;
    return os.str();
}

}  // namespace

void StepperConfig::validate() const {
    if (!(dt_min > 0.0)) throw std::invalid_argument("stepper: dt_min > 0 violated");
    if (!(dt_min <= dt)) throw std::invalid_argument("stepper: dt_min <= dt violated");
    if (!(dt <= dt_max)) throw std::invalid_argument("stepper: dt <= dt_max violated");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::invalid_argument("stepper: T > 0 violated");
    if (!(tol > 0.0)) throw std::invalid_argument("stepper: tol > 0 violated");
    if (!(output_interval > 0.0)) throw std::invalid_argument("stepper: output_interval > 0 violated");
    if (!(norm_cap > 0.0) || !(critical_cap > 0.0)) throw std::invalid_argument("stepper: caps must be positive");
    if (!(p > 1.0) || !(q >= 1.0)) throw std::invalid_argument("stepper: p > 1 and q >= 1 required");
    if (!(mu > 1.0 / p && mu <= 1.0)) throw std::invalid_argument("stepper: mu in (1/p, 1] violated");
}

std::string to_string(Outcome o) {
    switch (o) {
        case Outcome::completed: return "completed";
        case Outcome::blow_up_detected: return "blow_up_detected";
        case Outcome::step_failure: return "step_failure";
    }
    return "?";
}

std::size_t ZPath::node_at(double t) const {
    if (times.empty()) throw std::logic_error("empty z path");
    const double slack = 1e-12 * std::max(1.0, std::abs(t));
    auto it = std::upper_bound(times.begin(), times.end(), t + slack);
    if (it == times.begin()) return 0;
    return static_cast<std::size_t>(std::distance(times.begin(), it) - 1);
}

ZPath sample_zpath(const ConvolutionSampler& sampler, double dz, double T, const std::vector<double>& extra,
                   std::uint64_t replica) {
    if (!(dz > 0.0) || !(T > 0.0)) throw std::invalid_argument("z grid needs dz > 0 and T > 0");
    std::vector<double> nodes;
    const auto count = static_cast<std::size_t>(std::floor(T / dz + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) nodes.push_back(static_cast<double>(k) * dz);
    nodes.push_back(T);
    for (double e : extra)
        if (e >= 0.0 && e <= T) nodes.push_back(e);
    std::sort(nodes.begin(), nodes.end());
    std::vector<double> unique;
    for (double x : nodes) {
        if (x > T) continue;
        if (unique.empty() || x - unique.back() > 1e-12 * std::max(1.0, T)) unique.push_back(x);
    }
    unique.back() = T;

    ZPath out;
    out.times = unique;
    ConvolutionPath p = sampler.initial();
    for (std::size_t i = 0; i < unique.size(); ++i) {
        if (i > 0) sampler.advance(p, unique[i], replica);
        out.z.push_back(sampler.z(p));
        out.zeta.push_back(sampler.zeta(p));
    }
    return out;
}

ZPath zero_zpath(Index n, double T) {
    ZPath out;
    out.times = {0.0, T};
    out.z = {GridFunction::Zero(n), GridFunction::Zero(n)};
    out.zeta = out.z;
    return out;
}

std::vector<double> output_times(double T, double interval) {
    std::vector<double> out;
    const auto count = static_cast<std::size_t>(std::floor(T / interval + 1e-9));
    for (std::size_t k = 0; k <= count; ++k) {
        const double t = static_cast<double>(k) * interval;
        if (t < T - 1e-12 * std::max(1.0, T)) out.push_back(t);
    }
    out.push_back(T);
    return out;
}

CoupledState imex_step(const BlockOperator& block, const CoupledState& state, const GridFunction& z, double dt,
                       const Reaction& reaction, const GridFunction* forcing) {
    CoupledState rhs;
    rhs.t = state.t;
    rhs.v = state.v + dt * reaction(block.params(), state.v, z, state.w);
    if (forcing) rhs.v += dt * *forcing;
    rhs.w = state.w;
    CoupledState next = block.resolvent(dt, rhs);
    next.t = state.t + dt;
    return next;
}

BlowUpDetector::BlowUpDetector(std::shared_ptr<const SpectralDecomposition> spec, int d, double p, double q,
                               double norm_cap, double critical_cap)
    : norm_cap_(norm_cap), critical_cap_(critical_cap) {
    if (spec) accumulator_.emplace(std::move(spec), d, p, q);
}

std::optional<std::string> BlowUpDetector::check(const CoupledState& state) const {
    const double n = sup_norm(state);
    if (!std::isfinite(n) || n > norm_cap_) {
        return "sup-norm cap exceeded (" + fmt(n) + " > " + fmt(norm_cap_) + ")";
    }
    return std::nullopt;
}

std::optional<std::string> BlowUpDetector::accumulate(double dt, const CoupledState& left) {
    if (!accumulator_) return std::nullopt;
    accumulator_->add(dt, left.v, left.w);
    const double value = accumulator_->value();
    if (!std::isfinite(value) || value > critical_cap_) {
        return "critical integral cap exceeded (" + fmt(value) + " > " + fmt(critical_cap_) + ")";
    }
    return std::nullopt;
}

std::pair<Trajectory, ContinuationStatus> integrate_path(const BlockOperator& block, const StepperConfig& cfg,
                                                         const CoupledState& init, const ZPath& zpath,
                                                         const IntegrateOptions& options) {
    cfg.validate();
    const Index n = block.size();
    if (init.v.size() != n || init.w.size() != n) throw std::invalid_argument("initial state size mismatch");
    if (zpath.times.empty() || zpath.times.back() < cfg.T * (1.0 - 1e-12)) {
        throw std::invalid_argument("z path does not cover [0, T]");
    }
    const GridFunction* forcing = options.forcing ? &*options.forcing : nullptr;
    const double eps_t = 1e-12 * std::max(1.0, cfg.T);

    BlowUpDetector detector(options.spectral, block.grid().dimension(), cfg.p, cfg.q, cfg.norm_cap,
                            cfg.critical_cap);
    const std::vector<double> outs = output_times(cfg.T, cfg.output_interval);

    Trajectory traj;
    ContinuationStatus status;
    CoupledState state = init;
    state.t = 0.0;
    traj.times.push_back(0.0);
    traj.states.push_back(state);
    traj.z_nodes.push_back(zpath.node_at(0.0));
    std::size_t next_out = 1;

    double t = 0.0;
    double dt = cfg.dt;
    auto finish = [&](Outcome o, std::string reason) {
        status.outcome = o;
        status.T_reached = t;
        status.reason = std::move(reason);
        status.critical_integral = detector.critical_integral();
        return std::make_pair(std::move(traj), status);
    };

    while (t < cfg.T - eps_t) {
        if (auto why = detector.check(state)) return finish(Outcome::blow_up_detected, *why);

        const std::size_t node = zpath.node_at(t);
        double target = cfg.T;
        if (node + 1 < zpath.times.size()) target = std::min(target, zpath.times[node + 1]);
        if (next_out < outs.size()) target = std::min(target, outs[next_out]);
        const bool clamped = t + dt >= target - eps_t;
        const double h = clamped ? target - t : dt;
        const GridFunction& z = zpath.z[node];

        CoupledState trial = imex_step(block, state, z, h, options.reaction, forcing);
        const bool finite = trial.v.allFinite() && trial.w.allFinite();
        double rel = std::numeric_limits<double>::infinity();
        if (finite) {
            const double inc = std::max((trial.v - state.v).cwiseAbs().maxCoeff(),
                                        (trial.w - state.w).cwiseAbs().maxCoeff());
            rel = inc / std::max(sup_norm(state), 1.0);
        }
        if (!finite || (cfg.adaptive && rel > cfg.tol)) {
            ++status.rejected;
            if (!cfg.adaptive) {
                return finish(Outcome::step_failure, "non-finite state at fixed dt = " + fmt(h));
            }
            dt = 0.5 * h;
            if (dt < cfg.dt_min) {
                return finish(Outcome::step_failure, "dt fell below dt_min (" + fmt(dt) + " < " +
                                                         fmt(cfg.dt_min) + ") at t = " + fmt(t) +
                                                         ", relative increment " + fmt(rel));
            }
            continue;
        }

        const auto blow = detector.accumulate(h, state);
        const double t_next = clamped ? target : t + h;
        trial.t = t_next;
        if (options.observer) {
            StepInfo info;
            info.t = t;
            info.dt = h;
            info.before = &state;
            info.after = &trial;
            info.z = &z;
            info.forcing = forcing;
            info.critical_integral = detector.critical_integral();
            options.observer(info);
        }
        state = std::move(trial);
        t = t_next;
        ++status.steps;

        if (next_out < outs.size() && t >= outs[next_out] - eps_t) {
            traj.times.push_back(outs[next_out]);
            traj.states.push_back(state);
            traj.z_nodes.push_back(zpath.node_at(outs[next_out]));
            ++next_out;
        }
        if (blow) return finish(Outcome::blow_up_detected, *blow);
        if (cfg.adaptive && rel < 0.25 * cfg.tol) dt = std::min(2.0 * dt, cfg.dt_max);
    }
    t = cfg.T;
    return finish(Outcome::completed, "reached T");
}

}  // namespace sbd
