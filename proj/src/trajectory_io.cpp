#include "sbd/trajectory_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

namespace sbd {

using nlohmann::json;

namespace {

std::uint64_t to_le(std::uint64_t x) {
    if constexpr (std::endian::native == std::endian::little) {
        return x;
    } else {
        std::uint64_t y = 0;
        for (int i = 0; i < 8; ++i) y |= ((x >> (8 * i)) & 0xffu) << (8 * (7 - i));
        return y;
    }
}

void put(std::ostream& os, const Eigen::VectorXd& v) {
    std::vector<std::uint64_t> buf(static_cast<std::size_t>(v.size()));
    for (Index i = 0; i < v.size(); ++i) buf[i] = to_le(std::bit_cast<std::uint64_t>(v[i]));
    os.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
}

Eigen::VectorXd get(std::istream& is, Index n) {
    std::vector<std::uint64_t> buf(static_cast<std::size_t>(n));
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size() * 8));
    if (!is) throw std::runtime_error("truncated binary stream");
    Eigen::VectorXd v(n);
    for (Index i = 0; i < n; ++i) v[i] = std::bit_cast<double>(to_le(buf[i]));
    return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot read " + path.string());
    return is;
}

Outcome outcome_from(const std::string& s) {
    if (s == "completed") return Outcome::completed;
    if (s == "blow_up_detected") return Outcome::blow_up_detected;
    if (s == "step_failure") return Outcome::step_failure;
    throw std::runtime_error("unknown outcome " + s);
}

}  // namespace

json Manifest::to_json() const {
    json j;
    j["config_hash"] = config_hash;
    j["seed"] = seed;
    j["replica"] = replica;
    j["code_version"] = code_version;
    j["grid"] = {{"d", d}, {"extents", extents}, {"lengths", lengths}};
    j["times"] = times;
    j["fields"] = {"v", "w", "z", "zeta"};
    j["encoding"] = "f64le";
    j["frames_file"] = frames_file;
    j["ledger_file"] = ledger_file;
    j["potentials_file"] = potentials_file;
    j["modal_file"] = modal_file;
    j["modes"] = modes;
    j["status"] = {{"outcome", to_string(status.outcome)},
                   {"T_reached", status.T_reached},
                   {"reason", status.reason},
                   {"critical_integral", status.critical_integral},
                   {"steps", status.steps},
                   {"rejected", status.rejected}};
    j["warnings"] = warnings;
    return j;
}

Manifest Manifest::from_json(const json& j) {
    Manifest m;
    m.config_hash = j.at("config_hash").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.replica = j.at("replica").get<std::uint64_t>();
    m.code_version = j.at("code_version").get<std::string>();
    m.d = j.at("grid").at("d").get<int>();
    m.extents = j.at("grid").at("extents").get<std::vector<int>>();
    m.lengths = j.at("grid").at("lengths").get<std::vector<double>>();
    m.times = j.at("times").get<std::vector<double>>();
    m.frames_file = j.at("frames_file").get<std::string>();
    m.ledger_file = j.at("ledger_file").get<std::string>();
    m.potentials_file = j.at("potentials_file").get<std::string>();
    m.modal_file = j.at("modal_file").get<std::string>();
    m.modes = j.at("modes").get<Index>();
    const json& s = j.at("status");
    m.status.outcome = outcome_from(s.at("outcome").get<std::string>());
    m.status.T_reached = s.at("T_reached").get<double>();
    m.status.reason = s.at("reason").get<std::string>();
    m.status.critical_integral = s.at("critical_integral").get<double>();
    m.status.steps = s.at("steps").get<std::size_t>();
    m.status.rejected = s.at("rejected").get<std::size_t>();
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    return m;
}

void write_frames(const std::filesystem::path& path, const std::vector<Frame>& frames) {
    auto os = open_out(path);
    for (const auto& f : frames) {
        put(os, f.v);
        put(os, f.w);
        put(os, f.z);
        put(os, f.zeta);
    }
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Frame> read_frames(const std::filesystem::path& path, Index n, const std::vector<double>& times) {
    auto is = open_in(path);
    is.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(is.tellg());
    is.seekg(0);
    const std::size_t block = static_cast<std::size_t>(4 * n) * 8;
    if (block == 0 || bytes % block != 0 || bytes / block != times.size()) {
        throw std::runtime_error("frame stream holds " + std::to_string(block ? bytes / block : 0) +
                                 " frames, manifest lists " + std::to_string(times.size()));
    }
    std::vector<Frame> frames;
    for (double t : times) {
        Frame f;
        f.t = t;
        f.v = get(is, n);
        f.w = get(is, n);
        f.z = get(is, n);
        f.zeta = get(is, n);
        frames.push_back(std::move(f));
    }
    return frames;
}

void write_blocks(const std::filesystem::path& path, const std::vector<Eigen::VectorXd>& blocks) {
    auto os = open_out(path);
    for (const auto& b : blocks) put(os, b);
    if (!os) throw std::runtime_error("write failed: " + path.string());
}

std::vector<Eigen::VectorXd> read_blocks(const std::filesystem::path& path, Index block_size) {
    auto is = open_in(path);
    is.seekg(0, std::ios::end);
    const auto bytes = static_cast<std::size_t>(is.tellg());
    is.seekg(0);
    const std::size_t block = static_cast<std::size_t>(block_size) * 8;
    if (block == 0 || bytes % block != 0) throw std::runtime_error("ragged block stream " + path.string());
    std::vector<Eigen::VectorXd> out;
    for (std::size_t k = 0; k < bytes / block; ++k) out.push_back(get(is, block_size));
    return out;
}

void write_record(const std::filesystem::path& dir, const TrajectoryRecord& record) {
    if (record.frames.size() != record.manifest.times.size()) {
        throw std::logic_error("frame count differs from manifest time count");
    }
    std::filesystem::create_directories(dir);
    write_frames(dir / record.manifest.frames_file, record.frames);
    auto os = open_out(dir / "manifest.json");
    os << record.manifest.to_json().dump(2) << "\n";
}

TrajectoryRecord read_record(const std::filesystem::path& dir, const std::string& expected_hash) {
    auto is = open_in(dir / "manifest.json");
    TrajectoryRecord rec;
    rec.manifest = Manifest::from_json(json::parse(is));
    if (!expected_hash.empty() && rec.manifest.config_hash != expected_hash) {
        throw std::runtime_error("config hash mismatch: manifest " + rec.manifest.config_hash + ", expected " +
                                 expected_hash);
    }
    Index n = 1;
    for (int e : rec.manifest.extents) n *= e;
    rec.frames = read_frames(dir / rec.manifest.frames_file, n, rec.manifest.times);
    return rec;
}

}  // namespace sbd
