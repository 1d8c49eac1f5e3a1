#include "sbd/simulation.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

using namespace sbd;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 3;
constexpr int kExitOther = 1;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string output;
    bool strict = false;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "Run configuration (JSON); built-in defaults when omitted");
    app->add_option("--seed", c.seed, "Override noise.seed");
    app->add_option("--output", c.output, "Output directory (default: outputs.directory)");
    app->add_flag("--strict", c.strict, "Fail when the requested setting is inadmissible");
}

RunConfig resolve(const Common& c) {
    RunConfig cfg = c.config.empty() ? default_config() : load_config(c.config);
    if (c.seed) cfg.seed = *c.seed;
    if (!c.output.empty()) cfg.outputs.directory = c.output;
    return cfg;
}

json checks_json(const std::vector<Inequality>& checks) {
    json out = json::array();
    for (const auto& c : checks) out.push_back({{"name", c.name}, {"lhs", c.lhs}, {"rhs", c.rhs}, {"holds", c.holds}});
    return out;
}

json verdict_json(const SettingVerdict& v) {
    json j = {{"passes", v.passes},
              {"mu_c", v.mu_c},
              {"mu_interval", {v.mu_lower, v.mu_upper}},
              {"lower_open", v.lower_open},
              {"interval_nonempty", v.interval_nonempty},
              {"checks", checks_json(v.checks)},
              {"violations", v.violations()}};
    if (v.requested_mu_admissible) j["requested_mu_admissible"] = *v.requested_mu_admissible;
    return j;
}

json report_json(const SettingReport& r) {
    return {{"inputs",
             {{"d", r.inputs.d},
              {"p", r.inputs.p},
              {"q", r.inputs.q},
              {"s", r.inputs.s},
              {"r", r.inputs.r},
              {"class", r.inputs.regularity == NoiseClass::plain ? "plain" : "half_power"}}},
            {"stochastic", {{"holds", r.stoch_holds}, {"checks", checks_json(r.stoch)}}},
            {"strong", verdict_json(r.strong)},
            {"weak_I", verdict_json(r.weak_I)},
            {"weak_II", verdict_json(r.weak_II)},
            {"critical_space", r.critical_space},
            {"global",
             {{"applicable", r.global.applicable},
              {"eligible", r.global.eligible},
              {"checks", checks_json(r.global.checks)},
              {"note", r.global.note}}},
            {"reaction_growth", {{"m", r.a3_m}, {"rho_1", r.a3_rho1}}}};
}

void print_warnings(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

int cmd_run(const Common& c, std::uint64_t replica) {
    const RunConfig cfg = resolve(c);
    const Model model = build_model(cfg);
    print_warnings(model.warnings);
    RunOptions opts;
    opts.strict = c.strict;
    opts.replica = replica;
    opts.output = cfg.outputs.directory;
    const SimulationResult res = run_simulation(model, opts);
    const auto& st = res.record.manifest.status;
    json out = {{"outcome", to_string(st.outcome)},
                {"T_reached", st.T_reached},
                {"reason", st.reason},
                {"critical_integral", st.critical_integral},
                {"steps", st.steps},
                {"rejected", st.rejected},
                {"frames", res.record.frames.size()},
                {"config_hash", res.record.manifest.config_hash},
                {"output", cfg.outputs.directory}};
    if (res.ledger) {
        const auto& l = *res.ledger;
        out["monitors"] = {{"violations_vw", l.violations_vw},
                           {"violations_w_h1", l.violations_w_h1},
                           {"violations_vt", l.violations_vt},
                           {"violations_strong", l.violations_strong},
                           {"sup_energy", l.sup_energy},
                           {"int_Asqrt_v_sq", l.int_Asqrt_v_sq},
                           {"int_v_L4_4", l.int_v_L4_4}};
    }
    std::cout << out.dump(2) << "\n";
    return exit_code(st.outcome);
}

int cmd_ensemble(const Common& c, std::uint64_t replicas, std::uint64_t first, unsigned threads, bool keep) {
    const RunConfig cfg = resolve(c);
    EnsembleOptions opts;
    opts.replicas = replicas;
    opts.first_replica = first;
    opts.threads = threads;
    opts.strict = c.strict;
    if (keep) opts.output = cfg.outputs.directory;
    const EnsembleSummary s = run_ensemble(cfg, opts);
    json j = s.to_json();
    j["first_replica"] = first;
    j["config_hash"] = config_hash(cfg);
    std::filesystem::create_directories(cfg.outputs.directory);
    std::ofstream(std::filesystem::path(cfg.outputs.directory) / "ensemble.json", std::ios::trunc) << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_advise(const Common& c) {
    const RunConfig cfg = resolve(c);
    const SettingReport r = setting_advisor(advisor_inputs(cfg));
    json j = report_json(r);
    j["requested_setting"] = to_string(cfg.setting);
    std::cout << j.dump(2) << "\n";
    if (c.strict && !r.verdict(cfg.setting).passes) return kExitConfig;
    return 0;
}

int cmd_spectrum(const Common& c) {
    const RunConfig cfg = resolve(c);
    const Model model = build_model(cfg);
    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!c.output.empty()) {
        file.open(c.output, std::ios::trunc);
        if (!file) throw std::runtime_error("cannot write " + c.output);
        os = &file;
    }
    *os << "index,eigenvalue\n";
    os->precision(17);
    const auto& lam = model.spectral->eigenvalues;
    for (Index k = 0; k < lam.size(); ++k) *os << k << "," << lam[k] << "\n";
    return 0;
}

int cmd_converge(const Common& c, double dt0, int levels, int refinement, std::uint64_t paths) {
    const RunConfig cfg = resolve(c);
    ConvergenceOptions opts;
    for (int l = 0; l < levels; ++l) opts.dts.push_back(dt0 / std::pow(2.0, l));
    opts.refinement = refinement;
    opts.paths = paths;
    const ConvergenceReport rep = convergence_study(cfg, opts);
    std::cout << rep.to_json().dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stochastic bidomain FitzHugh-Nagumo solver"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kCodeVersion);

    Common run_c, ens_c, adv_c, spec_c, conv_c;
    std::uint64_t replica = 0;
    auto* run = app.add_subcommand("run", "Single path: Z, then V, then U = V + Z");
    add_common(run, run_c);
    run->add_option("--replica", replica, "Replica index of the noise stream");

    std::uint64_t replicas = 1, first = 0;
    unsigned threads = 1;
    bool keep = false;
    auto* ens = app.add_subcommand("ensemble", "Independent replicas with aggregate statistics");
    add_common(ens, ens_c);
    ens->add_option("--replicas", replicas, "Number of replicas")->check(CLI::PositiveNumber);
    ens->add_option("--first-replica", first, "First replica index");
    ens->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    ens->add_flag("--keep-frames", keep, "Write per-replica trajectories");

    auto* adv = app.add_subcommand("advise", "Admissibility of (d, p, q, s, r, class)");
    add_common(adv, adv_c);

    auto* spec = app.add_subcommand("spectrum", "Eigenvalues of the bidomain operator as CSV");
    add_common(spec, spec_c);

    double dt0 = 0.02;
    int levels = 5, refinement = 32;
    std::uint64_t paths = 1;
    auto* conv = app.add_subcommand("converge", "Strong self-convergence on a common Brownian path");
    add_common(conv, conv_c);
    conv->add_option("--dt0", dt0, "Coarsest dt");
    conv->add_option("--levels", levels, "Number of dt levels (halving)");
    conv->add_option("--refinement", refinement, "Reference dt = finest / refinement");
    conv->add_option("--paths", paths, "Brownian paths");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (*run) return cmd_run(run_c, replica);
        if (*ens) return cmd_ensemble(ens_c, replicas, first, threads, keep);
        if (*adv) return cmd_advise(adv_c);
        if (*spec) return cmd_spectrum(spec_c);
        if (*conv) return cmd_converge(conv_c, dt0, levels, refinement, paths);
    } catch (const ConfigError& e) {
        std::cerr << e.what() << "\n";
        return kExitConfig;
    } catch (const AdvisorError& e) {
        std::cerr << "advisor: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitOther;
    }
    return kExitOther;
}
