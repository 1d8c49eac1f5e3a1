#pragma once

#include "sbd/advisor.hpp"
#include "sbd/config.hpp"
#include "sbd/monitors.hpp"
#include "sbd/trajectory_io.hpp"

#include <filesystem>
#include <map>
#include <optional>

namespace sbd {

/// Everything assembled from a configuration before time stepping.
struct Model {
    RunConfig config;
    Grid grid;
    BDReport bd;
    std::shared_ptr<const BidomainOperator> bidomain;
    std::shared_ptr<const SpectralDecomposition> spectral;
    std::shared_ptr<const BlockOperator> block;
    std::shared_ptr<const ConvolutionSampler> sampler;
    GridFunction v0;
    GridFunction w0;
    std::optional<GridFunction> forcing;   // effective current seen by v
    std::optional<SettingReport> advice;  // d in {2,3} only
    std::vector<std::string> warnings;
};

Model build_model(const RunConfig& cfg);

/// Raised in strict mode when the requested setting is inadmissible.
class AdvisorError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct RunOptions {
    bool strict = false;
    std::uint64_t replica = 0;
    std::optional<std::filesystem::path> output;  // nothing is written when empty
};

struct SimulationResult {
    TrajectoryRecord record;
    std::optional<LedgerSummary> ledger;
};

/// Z, then V, then U = V + Z. Deterministic in (config, replica).
SimulationResult run_simulation(const Model& model, const RunOptions& options = {});
SimulationResult run_simulation(const RunConfig& cfg, const RunOptions& options = {});

struct EnsembleOptions {
    std::uint64_t replicas = 1;
    std::uint64_t first_replica = 0;
    unsigned threads = 1;
    bool strict = false;
    std::optional<std::filesystem::path> output;  // per-replica subdirectories replica_<k>
};

struct ReplicaSummary {
    Outcome outcome = Outcome::completed;
    double T_reached = 0.0;
    std::vector<double> z_L2;        // ||z(t)|| at the output times
    std::vector<double> z_sq;        // ||z(t)||^2
    std::vector<double> z_half_sq;   // ||𝔸^{1/2} z(t)||^2
};

struct EnsembleSummary {
    std::vector<double> times;
    std::map<std::uint64_t, ReplicaSummary> replicas;
    std::vector<double> mean_z;      // mean of ||z(t)||
    std::vector<double> var_z;       // variance of ||z(t)||
    double blow_up_frequency = 0.0;
    double step_failure_frequency = 0.0;
    std::vector<ItoReport> ito;      // alpha = 0 and 1/2 at t > 0, only with >= 1000 replicas

    nlohmann::json to_json() const;
};

/// Replicas [first, first + count) of the same model; replica k draws its
/// noise from the counter stream k, so disjoint ranges combine exactly.
EnsembleSummary run_ensemble(const RunConfig& cfg, const EnsembleOptions& options);

/// Recomputes the aggregates of a summary from its per-replica entries.
void aggregate_ensemble(const Model& model, EnsembleSummary& summary);

struct ConvergenceOptions {
    std::vector<double> dts;     // nested by halving, coarsest first
    int refinement = 32;         // reference dt = finest / refinement
    std::uint64_t paths = 1;     // errors are root-mean-square over paths
    std::uint64_t first_replica = 0;
};

struct ConvergenceReport {
    std::vector<double> dts;
    std::vector<double> errors;  // RMS of ||(v, w)(T) - (v, w)_ref(T)||_L2
    double reference_dt = 0.0;
    double order = 0.0;          // least-squares slope of log error against log dt
    double r_squared = 0.0;

    nlohmann::json to_json() const;
};

/// Strong error against a reference run on the same Brownian path. Z is
/// sampled exactly on the reference grid and subsampled for each level.
/// Throws std::invalid_argument for fewer than 3 levels or non-nested levels.
ConvergenceReport convergence_study(const RunConfig& cfg, const ConvergenceOptions& options);

/// 0 completed, 2 blow-up detected, 4 step failure.
int exit_code(Outcome outcome);

}  // namespace sbd
