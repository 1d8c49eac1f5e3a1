#include "sbd/simulation.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

namespace sbd {

using nlohmann::json;

namespace {

std::string join_names(const std::vector<std::string>& names) {
    std::string out;
    for (const auto& n : names) out += (out.empty() ? "" : ", ") + n;
    return out;
}

std::vector<std::string> advisor_warnings(const Model& model) {
    std::vector<std::string> out;
    if (!model.advice) return out;
    const SettingVerdict& v = model.advice->verdict(model.config.setting);
    if (!v.passes) {
        out.push_back("setting " + to_string(model.config.setting) + " inadmissible: " + join_names(v.violations()));
    }
    if (v.requested_mu_admissible && !*v.requested_mu_admissible) {
        std::ostringstream os;
        os << "requested mu outside the admissible interval " << (v.lower_open ? "(" : "[") << v.mu_lower << ", "
           << v.mu_upper << "]";
        out.push_back(os.str());
    }
    if (!model.advice->stoch_holds) out.push_back("stochastic maximal regularity conditions fail");
    return out;
}

ZPath subsample(const ZPath& ref, std::size_t stride) {
    ZPath out;
    for (std::size_t i = 0; i < ref.times.size(); i += stride) {
        out.times.push_back(ref.times[i]);
        out.z.push_back(ref.z[i]);
        out.zeta.push_back(ref.zeta[i]);
    }
    if (out.times.back() != ref.times.back()) throw std::invalid_argument("level does not divide the reference grid");
    return out;
}

CoupledState final_state(const Model& model, const StepperConfig& st, const ZPath& zpath) {
    CoupledState init{0.0, model.v0, model.w0};
    IntegrateOptions opts;
    opts.reaction = model.config.reaction ? fhn_remainder_reaction() : zero_reaction();
    opts.forcing = model.forcing;
    auto [traj, status] = integrate_path(*model.block, st, init, zpath, opts);
    if (status.outcome != Outcome::completed) {
        throw std::runtime_error("convergence level at dt = " + std::to_string(st.dt) + " did not complete: " +
                                 status.reason);
    }
    return traj.states.back();
}

}  // namespace

Model build_model(const RunConfig& cfg) {
    Model m;
    m.config = cfg;
    m.grid = build_grid(cfg.d, cfg.extents, cfg.lengths);
    const TensorField a_i = cfg.a_i.build(m.grid, Medium::intracellular);
    const TensorField a_e = cfg.a_e.build(m.grid, Medium::extracellular);
    a_i.validate(cfg.lambda0);
    a_e.validate(cfg.lambda0);
    m.bd = check_bd_conditions(m.grid, a_i, a_e, cfg.bd_tolerance);
    if (!m.bd.pass) {
        std::ostringstream os;
        os << "conormal proportionality fails on the boundary (max residual " << m.bd.max_residual << ")";
        m.warnings.push_back(os.str());
    }
    auto op = std::make_shared<BidomainOperator>(assemble_elliptic_operator(m.grid, a_i, cfg.lambda0),
                                                 assemble_elliptic_operator(m.grid, a_e, cfg.lambda0));
    m.bidomain = op;
    m.spectral = std::make_shared<SpectralDecomposition>(spectral_decompose(*op));
    cfg.fhn.validate();
    m.block = std::make_shared<BlockOperator>(op, cfg.fhn);

    NoiseSpec noise;
    noise.h = cfg.h.sample(m.grid);
    noise.modes = cfg.modes;
    noise.seed = cfg.seed;
    noise.regularity = cfg.regularity;
    noise.schedule = cfg.schedule;
    m.sampler = std::make_shared<ConvolutionSampler>(m.block, m.spectral, noise);

    m.v0 = cfg.v0.sample(m.grid);
    m.w0 = cfg.w0.sample(m.grid);
    if (cfg.I_i || cfg.I_e) {
        const GridFunction I_i = cfg.I_i ? cfg.I_i->sample(m.grid) : GridFunction::Zero(m.grid.size());
        const GridFunction I_e = cfg.I_e ? cfg.I_e->sample(m.grid) : GridFunction::Zero(m.grid.size());
        m.forcing = op->effective_current(I_i, I_e);
    }

    if (cfg.d == 2 || cfg.d == 3) {
        m.advice = setting_advisor(advisor_inputs(cfg));
        if (!m.advice->global.applicable || !m.advice->global.eligible) {
            m.warnings.push_back("global existence criteria not met: " + m.advice->global.note);
        }
    } else {
        m.warnings.push_back("advisor covers d in {2,3}; no admissibility check for d = " + std::to_string(cfg.d));
    }
    for (auto& w : advisor_warnings(m)) m.warnings.push_back(std::move(w));
    return m;
}

SimulationResult run_simulation(const Model& model, const RunOptions& options) {
    const RunConfig& cfg = model.config;
    if (options.strict && model.advice && !model.advice->verdict(cfg.setting).passes) {
        throw AdvisorError(advisor_warnings(model).front());
    }
    if (options.strict && model.advice) {
        const auto& admissible = model.advice->verdict(cfg.setting).requested_mu_admissible;
        if (admissible && !*admissible) throw AdvisorError("requested mu is not admissible");
    }
    const StepperConfig& st = cfg.stepper;
    const std::vector<double> outs = output_times(st.T, st.output_interval);
    const double dz = cfg.dz > 0.0 ? cfg.dz : st.dt;
    const ZPath zpath = sample_zpath(*model.sampler, dz, st.T, outs, options.replica);

    IntegrateOptions opts;
    opts.reaction = cfg.reaction ? fhn_remainder_reaction() : zero_reaction();
    opts.forcing = model.forcing;
    opts.spectral = model.spectral;
    std::optional<EnergyLedger> ledger;
    if (cfg.reaction && cfg.outputs.monitors) {
        ledger.emplace(model.spectral, cfg.fhn, st.mu, cfg.outputs.monitor_delta);
        opts.observer = [&ledger](const StepInfo& info) { ledger->record(info); };
    }
    CoupledState init{0.0, model.v0, model.w0};
    auto [traj, status] = integrate_path(*model.block, st, init, zpath, opts);

    SimulationResult result;
    TrajectoryRecord& rec = result.record;
    Manifest& man = rec.manifest;
    man.config_hash = config_hash(cfg);
    man.seed = cfg.seed;
    man.replica = options.replica;
    man.d = cfg.d;
    man.extents = cfg.extents;
    man.lengths = cfg.lengths;
    man.times = traj.times;
    man.modes = model.sampler->modes();
    man.status = status;
    man.warnings = model.warnings;
    for (std::size_t i = 0; i < traj.times.size(); ++i) {
        const std::size_t node = traj.z_nodes[i];
        rec.frames.push_back(Frame{traj.times[i], traj.states[i].v, traj.states[i].w, zpath.z[node], zpath.zeta[node]});
    }
    if (ledger) result.ledger = ledger->summary();

    if (options.output) {
        const auto& dir = *options.output;
        std::filesystem::create_directories(dir);
        if (ledger && cfg.outputs.ledger) {
            man.ledger_file = "ledger.csv";
            std::ofstream os(dir / man.ledger_file, std::ios::trunc);
            ledger->write_csv(os);
        }
        if (cfg.outputs.potentials) {
            man.potentials_file = "potentials.bin";
            std::vector<Eigen::VectorXd> blocks;
            for (const auto& f : rec.frames) {
                const Potentials p = model.bidomain->reconstruct(f.v + f.z);
                blocks.push_back(p.u_i);
                blocks.push_back(p.u_e);
            }
            write_blocks(dir / man.potentials_file, blocks);
        }
        if (cfg.outputs.modal) {
            man.modal_file = "modal.bin";
            std::vector<Eigen::VectorXd> blocks;
            for (const auto& f : rec.frames) {
                Eigen::VectorXd b(2 * man.modes);
                b.head(man.modes) = model.spectral->coefficients(f.z).head(man.modes);
                b.tail(man.modes) = model.spectral->coefficients(f.zeta).head(man.modes);
                blocks.push_back(b);
            }
            write_blocks(dir / man.modal_file, blocks);
        }
        if (cfg.outputs.frames) {
            write_record(dir, rec);
        } else {
            std::ofstream os(dir / "manifest.json", std::ios::trunc);
            man.frames_file.clear();
            os << man.to_json().dump(2) << "\n";
        }
    }
    return result;
}

SimulationResult run_simulation(const RunConfig& cfg, const RunOptions& options) {
    return run_simulation(build_model(cfg), options);
}

json EnsembleSummary::to_json() const {
    json j;
    j["times"] = times;
    j["replicas"] = replicas.size();
    j["mean_z_L2"] = mean_z;
    j["var_z_L2"] = var_z;
    j["blow_up_frequency"] = blow_up_frequency;
    j["step_failure_frequency"] = step_failure_frequency;
    json ito_j = json::array();
    for (const auto& r : ito) {
        ito_j.push_back({{"alpha", r.alpha},
                         {"t", r.t},
                         {"empirical", r.empirical},
                         {"exact", r.exact},
                         {"standard_error", r.standard_error},
                         {"z_score", r.z_score},
                         {"samples", r.samples}});
    }
    j["ito"] = ito_j;
    return j;
}

void aggregate_ensemble(const Model& model, EnsembleSummary& s) {
    const std::size_t nt = s.times.size();
    const double count = static_cast<double>(s.replicas.size());
    s.mean_z.assign(nt, 0.0);
    s.var_z.assign(nt, 0.0);
    s.ito.clear();
    std::size_t blow = 0;
    std::size_t fail = 0;
    for (const auto& [k, r] : s.replicas) {
        blow += r.outcome == Outcome::blow_up_detected;
        fail += r.outcome == Outcome::step_failure;
    }
    s.blow_up_frequency = count > 0 ? static_cast<double>(blow) / count : 0.0;
    s.step_failure_frequency = count > 0 ? static_cast<double>(fail) / count : 0.0;
    for (std::size_t i = 0; i < nt; ++i) {
        std::vector<double> vals;
        for (const auto& [k, r] : s.replicas)
            if (i < r.z_L2.size()) vals.push_back(r.z_L2[i]);
        if (vals.empty()) continue;
        double mean = 0.0;
        for (double v : vals) mean += v;
        mean /= static_cast<double>(vals.size());
        double var = 0.0;
        for (double v : vals) var += (v - mean) * (v - mean);
        s.mean_z[i] = mean;
        s.var_z[i] = vals.size() > 1 ? var / static_cast<double>(vals.size() - 1) : 0.0;
    }
    if (s.replicas.size() < 1000) return;
    for (std::size_t i = 1; i < nt; ++i) {
        std::vector<double> sq;
        std::vector<double> half;
        for (const auto& [k, r] : s.replicas) {
            if (i >= r.z_sq.size()) continue;
            sq.push_back(r.z_sq[i]);
            half.push_back(r.z_half_sq[i]);
        }
        if (sq.size() < 1000) continue;
        s.ito.push_back(ito_report(0.0, s.times[i], ito_exact_value(*model.sampler, 0.0, s.times[i]), sq));
        s.ito.push_back(ito_report(0.5, s.times[i], ito_exact_value(*model.sampler, 0.5, s.times[i]), half));
    }
}

EnsembleSummary run_ensemble(const RunConfig& cfg, const EnsembleOptions& options) {
    if (options.replicas < 1) throw std::invalid_argument("replicas >= 1 required");
    const Model model = build_model(cfg);
    if (options.strict && model.advice && !model.advice->verdict(cfg.setting).passes) {
        throw AdvisorError(advisor_warnings(model).front());
    }
    EnsembleSummary summary;
    summary.times = output_times(cfg.stepper.T, cfg.stepper.output_interval);

    const auto& lam = model.spectral->eigenvalues;
    std::atomic<std::uint64_t> next{0};
    std::mutex mutex;
    std::exception_ptr error;
    auto worker = [&]() {
        for (;;) {
            const std::uint64_t i = next++;
            if (i >= options.replicas) return;
            const std::uint64_t k = options.first_replica + i;
            try {
                RunOptions ro;
                ro.replica = k;
                if (options.output) ro.output = *options.output / ("replica_" + std::to_string(k));
                const SimulationResult res = run_simulation(model, ro);
                ReplicaSummary r;
                r.outcome = res.record.manifest.status.outcome;
                r.T_reached = res.record.manifest.status.T_reached;
                for (const auto& f : res.record.frames) {
                    const Eigen::VectorXd c = model.spectral->coefficients(f.z);
                    const double sq = c.squaredNorm();
                    r.z_L2.push_back(std::sqrt(sq));
                    r.z_sq.push_back(sq);
                    r.z_half_sq.push_back((lam.array() * c.array().square()).sum());
                }
                std::lock_guard lock(mutex);
                summary.replicas.emplace(k, std::move(r));
            } catch (...) {
                std::lock_guard lock(mutex);
                if (!error) error = std::current_exception();
                next = options.replicas;
            }
        }
    };
    const unsigned threads = std::max(1u, std::min<unsigned>(options.threads, static_cast<unsigned>(options.replicas)));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    aggregate_ensemble(model, summary);
    return summary;
}

json ConvergenceReport::to_json() const {
    return {{"dts", dts},
            {"errors", errors},
            {"reference_dt", reference_dt},
            {"order", order},
            {"r_squared", r_squared}};
}

ConvergenceReport convergence_study(const RunConfig& cfg, const ConvergenceOptions& options) {
    const auto& dts = options.dts;
    if (dts.size() < 3) throw std::invalid_argument("convergence study needs at least 3 dt levels");
    for (std::size_t i = 1; i < dts.size(); ++i) {
        if (std::abs(dts[i] - 0.5 * dts[i - 1]) > 1e-12 * dts[i - 1]) {
            throw std::invalid_argument("dt levels must be nested by halving");
        }
    }
    if (options.refinement < 1 || options.paths < 1) throw std::invalid_argument("refinement and paths must be >= 1");
    const double T = cfg.stepper.T;
    const double steps = T / dts.front();
    if (std::abs(steps - std::round(steps)) > 1e-9 * steps) {
        throw std::invalid_argument("T must be a multiple of the coarsest dt");
    }

    const Model model = build_model(cfg);
    ConvergenceReport rep;
    rep.dts = dts;
    rep.reference_dt = dts.back() / options.refinement;
    const auto ref_steps = static_cast<std::size_t>(std::llround(T / rep.reference_dt));

    auto fixed = [&](double dt) {
        StepperConfig st = cfg.stepper;
        st.adaptive = false;
        st.dt = dt;
        st.dt_min = std::min(st.dt_min, dt);
        st.dt_max = std::max(st.dt_max, dt);
        st.output_interval = T;
        st.norm_cap = std::numeric_limits<double>::infinity();
        st.critical_cap = std::numeric_limits<double>::infinity();
        return st;
    };

    std::vector<double> sq(dts.size(), 0.0);
    for (std::uint64_t path = 0; path < options.paths; ++path) {
        const std::uint64_t replica = options.first_replica + path;
        // Uniform reference grid only, so every level grid is a subset of it.
        const ZPath ref = sample_zpath(*model.sampler, rep.reference_dt, T, {}, replica);
        if (ref.times.size() != ref_steps + 1) throw std::logic_error("reference grid size mismatch");
        const CoupledState exact = final_state(model, fixed(rep.reference_dt), ref);
        for (std::size_t l = 0; l < dts.size(); ++l) {
            const auto stride = static_cast<std::size_t>(std::llround(dts[l] / rep.reference_dt));
            const CoupledState s = final_state(model, fixed(dts[l]), subsample(ref, stride));
            sq[l] += inner(model.grid, s.v - exact.v, s.v - exact.v) + inner(model.grid, s.w - exact.w, s.w - exact.w);
        }
    }
    Eigen::VectorXd x(static_cast<Index>(dts.size()));
    Eigen::VectorXd y(x.size());
    for (std::size_t l = 0; l < dts.size(); ++l) {
        rep.errors.push_back(std::sqrt(sq[l] / static_cast<double>(options.paths)));
        x[static_cast<Index>(l)] = std::log(dts[l]);
        y[static_cast<Index>(l)] = std::log(rep.errors.back());
    }
    const double xm = x.mean();
    const double ym = y.mean();
    const double sxx = (x.array() - xm).square().sum();
    const double sxy = ((x.array() - xm) * (y.array() - ym)).sum();
    rep.order = sxy / sxx;
    const double intercept = ym - rep.order * xm;
    const double ss_res = (y.array() - (intercept + rep.order * x.array())).square().sum();
    const double ss_tot = (y.array() - ym).square().sum();
    rep.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return rep;
}

int exit_code(Outcome outcome) {
    switch (outcome) {
        case Outcome::completed: return 0;
        case Outcome::blow_up_detected: return 2;
        case Outcome::step_failure: return 4;
    }
    return 1;
}

}  // namespace sbd
