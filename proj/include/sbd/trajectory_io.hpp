#pragma once

#include "sbd/config.hpp"
#include "sbd/stepper.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace sbd {

/// Fields at one output time, u = v + z.
struct Frame {
    double t = 0.0;
    GridFunction v;
    GridFunction w;
    GridFunction z;
    GridFunction zeta;
};

struct Manifest {
    std::string config_hash;
    std::uint64_t seed = 0;
    std::uint64_t replica = 0;
    std::string code_version = kCodeVersion;
    int d = 0;
    std::vector<int> extents;
    std::vector<double> lengths;
    std::vector<double> times;
    std::string frames_file = "frames.bin";
    std::string ledger_file;      // empty when no ledger was written
    std::string potentials_file;  // per output time: u_i, u_e
    std::string modal_file;       // per output time: (z_k, zeta_k) for the retained modes
    Index modes = 0;
    ContinuationStatus status;
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
    static Manifest from_json(const nlohmann::json& j);
};

struct TrajectoryRecord {
    Manifest manifest;
    std::vector<Frame> frames;
};

/// Little-endian f64, one block (v, w, z, zeta) per frame.
void write_frames(const std::filesystem::path& path, const std::vector<Frame>& frames);
/// Reads frames of n cells; the times come from the caller.
std::vector<Frame> read_frames(const std::filesystem::path& path, Index n, const std::vector<double>& times);

/// Raw little-endian f64 blocks.
void write_blocks(const std::filesystem::path& path, const std::vector<Eigen::VectorXd>& blocks);
std::vector<Eigen::VectorXd> read_blocks(const std::filesystem::path& path, Index block_size);

/// Writes manifest.json and the frame stream into dir.
void write_record(const std::filesystem::path& dir, const TrajectoryRecord& record);

/// Reads a record back. Throws std::runtime_error if the frame count does
/// not match the manifest, or if expected_hash is given and differs.
TrajectoryRecord read_record(const std::filesystem::path& dir, const std::string& expected_hash = {});

}  // namespace sbd
