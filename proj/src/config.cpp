#include "sbd/config.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>

namespace sbd {

using nlohmann::json;

namespace {

std::string join(const std::vector<std::string>& v) {
    std::string out = "invalid configuration:";
    for (const auto& s : v) out += "\n  " + s;
    return out;
}

// Collects violations while reading a JSON document.
class Reader {
public:
    std::vector<std::string> errors;

    void fail(const std::string& path, const std::string& what) { errors.push_back(path + ": " + what); }

    bool object(const json& j, const std::string& path) {
        if (j.is_object()) return true;
        fail(path, "expected an object");
        return false;
    }

    void allow(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
        if (!j.is_object()) return;
        for (auto it = j.begin(); it != j.end(); ++it) {
            bool known = false;
            for (const char* k : keys) known = known || it.key() == k;
            if (!known) fail(path + "/" + it.key(), "unknown key");
        }
    }

    void number(const json& j, const std::string& path, const char* key, double& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number()) return fail(path + "/" + key, "expected a number");
        out = v.get<double>();
        if (!std::isfinite(out)) fail(path + "/" + key, "expected a finite number");
    }

    // Number, null or "inf"; the latter two mean no cap.
    void cap(const json& j, const std::string& path, const char* key, double& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (v.is_null() || (v.is_string() && v.get<std::string>() == "inf")) {
            out = std::numeric_limits<double>::infinity();
            return;
        }
        number(j, path, key, out);
    }

    template <typename Int>
    void integer(const json& j, const std::string& path, const char* key, Int& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_number_integer()) return fail(path + "/" + key, "expected an integer");
        if constexpr (std::is_unsigned_v<Int>) {
            if (v.is_number_unsigned() || v.get<std::int64_t>() >= 0) {
                out = v.get<Int>();
            } else {
                fail(path + "/" + key, "expected a non-negative integer");
            }
        } else {
            out = v.get<Int>();
        }
    }

    void boolean(const json& j, const std::string& path, const char* key, bool& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_boolean()) return fail(path + "/" + key, "expected a boolean");
        out = v.get<bool>();
    }

    void string(const json& j, const std::string& path, const char* key, std::string& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_string()) return fail(path + "/" + key, "expected a string");
        out = v.get<std::string>();
    }

    template <typename T>
    void array(const json& j, const std::string& path, const char* key, std::vector<T>& out) {
        if (!j.contains(key)) return;
        const json& v = j.at(key);
        if (!v.is_array()) return fail(path + "/" + key, "expected an array");
        std::vector<T> tmp;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const json& e = v[i];
            const std::string p = path + "/" + key + "/" + std::to_string(i);
            if constexpr (std::is_integral_v<T>) {
                if (!e.is_number_integer()) return fail(p, "expected an integer");
            } else {
                if (!e.is_number()) return fail(p, "expected a number");
                if (!std::isfinite(e.get<double>())) return fail(p, "expected a finite number");
            }
            tmp.push_back(e.get<T>());
        }
        out = std::move(tmp);
    }

    void check(bool ok, const std::string& path, const std::string& inequality) {
        if (!ok) fail(path, inequality + " violated");
    }
};

FieldSpec read_field(Reader& r, const json& j, const std::string& path) {
    FieldSpec f;
    if (j.is_number()) {
        f.kind = "constant";
        f.value = j.get<double>();
        return f;
    }
    if (!r.object(j, path)) return f;
    r.string(j, path, "kind", f.kind);
    if (f.kind == "zero") {
        r.allow(j, path, {"kind"});
    } else if (f.kind == "constant") {
        r.allow(j, path, {"kind", "value"});
        r.number(j, path, "value", f.value);
    } else if (f.kind == "indicator") {
        r.allow(j, path, {"kind", "value", "lower", "upper"});
        r.number(j, path, "value", f.value);
        r.array(j, path, "lower", f.lower);
        r.array(j, path, "upper", f.upper);
    } else if (f.kind == "cosine") {
        r.allow(j, path, {"kind", "amplitude", "offset", "modes"});
        r.number(j, path, "amplitude", f.amplitude);
        r.number(j, path, "offset", f.offset);
        r.array(j, path, "modes", f.modes);
    } else if (f.kind == "table") {
        r.allow(j, path, {"kind", "values"});
        r.array(j, path, "values", f.values);
    } else {
        r.fail(path + "/kind", "expected zero | constant | indicator | cosine | table");
    }
    return f;
}

TensorSpec read_tensor(Reader& r, const json& j, const std::string& path) {
    TensorSpec t;
    if (j.is_number()) {
        t.scalar = j.get<double>();
        return t;
    }
    if (!r.object(j, path)) return t;
    r.string(j, path, "kind", t.kind);
    if (t.kind == "scalar") {
        r.allow(j, path, {"kind", "value"});
        r.number(j, path, "value", t.scalar);
    } else if (t.kind == "diagonal") {
        r.allow(j, path, {"kind", "values"});
        r.array(j, path, "values", t.diagonal);
    } else if (t.kind == "full") {
        r.allow(j, path, {"kind", "values"});
        r.array(j, path, "values", t.full);
    } else if (t.kind == "table") {
        r.allow(j, path, {"kind", "cells"});
        if (j.contains("cells")) {
            const json& cells = j.at("cells");
            if (!cells.is_array()) {
                r.fail(path + "/cells", "expected an array");
            } else {
                for (std::size_t i = 0; i < cells.size(); ++i) {
                    std::vector<double> row;
                    json wrap = {{"c", cells[i]}};
                    r.array(wrap, path + "/cells/" + std::to_string(i), "c", row);
                    t.table.push_back(std::move(row));
                }
            }
        }
    } else if (t.kind == "preset") {
        r.allow(j, path, {"kind", "name", "base", "slope"});
        r.string(j, path, "name", t.preset);
        r.number(j, path, "base", t.base);
        r.number(j, path, "slope", t.slope);
        if (t.preset != "ramp") r.fail(path + "/name", "unknown preset (expected ramp)");
    } else {
        r.fail(path + "/kind", "expected scalar | diagonal | full | table | preset");
    }
    return t;
}

json field_json(const FieldSpec& f) {
    json j = {{"kind", f.kind}};
    if (f.kind == "constant") j["value"] = f.value;
    if (f.kind == "indicator") {
        j["value"] = f.value;
        j["lower"] = f.lower;
        j["upper"] = f.upper;
    }
    if (f.kind == "cosine") {
        j["amplitude"] = f.amplitude;
        j["offset"] = f.offset;
        j["modes"] = f.modes;
    }
    if (f.kind == "table") j["values"] = f.values;
    return j;
}

json tensor_json(const TensorSpec& t) {
    json j = {{"kind", t.kind}};
    if (t.kind == "scalar") j["value"] = t.scalar;
    if (t.kind == "diagonal") j["values"] = t.diagonal;
    if (t.kind == "full") j["values"] = t.full;
    if (t.kind == "table") j["cells"] = t.table;
    if (t.kind == "preset") {
        j["name"] = t.preset;
        j["base"] = t.base;
        j["slope"] = t.slope;
    }
    return j;
}

json cap_json(double x) { return std::isfinite(x) ? json(x) : json("inf"); }

std::string noise_class_name(NoiseClass c) { return c == NoiseClass::plain ? "plain" : "half_power"; }

// Checks that need the grid: field and tensor sizes, SPD tensors.
void check_against_grid(Reader& r, const RunConfig& cfg) {
    Grid grid;
    try {
        grid = build_grid(cfg.d, cfg.extents, cfg.lengths);
    } catch (const std::exception& e) {
        r.fail("/grid", e.what());
        return;
    }
    auto field = [&](const FieldSpec& f, const std::string& path) {
        try {
            (void)f.sample(grid);
        } catch (const std::exception& e) {
            r.fail(path, e.what());
        }
    };
    field(cfg.h, "/noise/h");
    field(cfg.v0, "/initial/v0");
    field(cfg.w0, "/initial/w0");
    if (cfg.I_i) field(*cfg.I_i, "/forcing/I_i");
    if (cfg.I_e) field(*cfg.I_e, "/forcing/I_e");
    auto tensor = [&](const TensorSpec& t, Medium m, const std::string& path) {
        try {
            t.build(grid, m).validate(cfg.lambda0);
        } catch (const std::exception& e) {
            r.fail(path, e.what());
        }
    };
    tensor(cfg.a_i, Medium::intracellular, "/tensors/a_i");
    tensor(cfg.a_e, Medium::extracellular, "/tensors/a_e");
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> violations)
    : std::runtime_error(join(violations)), violations_(std::move(violations)) {}

GridFunction FieldSpec::sample(const Grid& grid) const {
    const int d = grid.dimension();
    if (kind == "zero") return GridFunction::Zero(grid.size());
    if (kind == "constant") return GridFunction::Constant(grid.size(), value);
    if (kind == "indicator") {
        if (lower.size() != static_cast<std::size_t>(d) || upper.size() != static_cast<std::size_t>(d)) {
            throw std::invalid_argument("indicator box needs d lower and d upper bounds");
        }
        return grid.sample([&](const std::array<double, 3>& x) {
            for (int a = 0; a < d; ++a)
                if (x[a] < lower[a] || x[a] > upper[a]) return 0.0;
            return value;
        });
    }
    if (kind == "cosine") {
        if (modes.size() > static_cast<std::size_t>(d)) throw std::invalid_argument("cosine needs at most d modes");
        return grid.sample([&](const std::array<double, 3>& x) {
            double prod = 1.0;
            for (std::size_t a = 0; a < modes.size(); ++a)
                prod *= std::cos(modes[a] * std::numbers::pi * x[a] / grid.length(static_cast<int>(a)));
            return offset + amplitude * prod;
        });
    }
    if (kind == "table") {
        if (static_cast<Index>(values.size()) != grid.size()) {
            throw std::invalid_argument("table has " + std::to_string(values.size()) + " values, grid has " +
                                        std::to_string(grid.size()) + " cells");
        }
        return Eigen::Map<const GridFunction>(values.data(), grid.size());
    }
    throw std::invalid_argument("unknown field kind " + kind);
}

TensorField TensorSpec::build(const Grid& grid, Medium label) const {
    const int d = grid.dimension();
    auto dense = [d](const std::vector<double>& v) {
        if (v.size() != static_cast<std::size_t>(d * d)) throw std::invalid_argument("tensor needs d*d entries");
        Tensor t = Tensor::Zero();
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) t(i, j) = v[static_cast<std::size_t>(i * d + j)];
        return t;
    };
    if (kind == "scalar") return TensorField::scalar(grid, label, scalar);
    if (kind == "diagonal") return TensorField::diagonal(grid, label, diagonal);
    if (kind == "full") return TensorField::constant(grid, label, dense(full));
    if (kind == "table") {
        if (static_cast<Index>(table.size()) != grid.size()) {
            throw std::invalid_argument("tensor table has " + std::to_string(table.size()) + " cells, grid has " +
                                        std::to_string(grid.size()));
        }
        std::vector<Tensor> cells;
        for (const auto& row : table) cells.push_back(dense(row));
        return TensorField(grid, label, std::move(cells));
    }
    if (kind == "preset" && preset == "ramp") {
        const double L = grid.length(0);
        return TensorField::from_function(grid, label, [&](const std::array<double, 3>& x) {
            return Tensor(base * (1.0 + slope * x[0] / L) * Tensor::Identity());
        });
    }
    throw std::invalid_argument("unknown tensor kind " + kind);
}

RunConfig default_config() {
    RunConfig cfg;
    cfg.d = 2;
    cfg.extents = {16, 16};
    cfg.lengths = {1.0, 1.0};
    cfg.a_i.kind = "diagonal";
    cfg.a_i.diagonal = {1.0, 0.3};
    cfg.a_e.kind = "diagonal";
    cfg.a_e.diagonal = {2.0, 1.3};
    cfg.h.kind = "constant";
    cfg.h.value = 0.1;
    cfg.seed = 42;
    cfg.regularity = NoiseClass::half_power;
    cfg.v0.kind = "indicator";
    cfg.v0.value = 1.0;
    cfg.v0.lower = {0.0, 0.0};
    cfg.v0.upper = {0.25, 0.25};
    cfg.w0.kind = "zero";
    return cfg;
}

RunConfig parse_config(const std::string& text) {
    Reader r;
    // Key sets of the open objects and the key last seen in each.
    std::vector<std::pair<std::set<std::string>, std::string>> keys;
    json doc;
    try {
        doc = json::parse(text, [&](int, json::parse_event_t ev, json& parsed) {
            switch (ev) {
                case json::parse_event_t::object_start: keys.emplace_back(); break;
                case json::parse_event_t::object_end:
                    if (!keys.empty()) keys.pop_back();
                    break;
                case json::parse_event_t::key: {
                    const auto k = parsed.get<std::string>();
                    if (keys.empty()) break;
                    keys.back().second = k;
                    if (!keys.back().first.insert(k).second) {
                        std::string path;
                        for (const auto& frame : keys) path += "/" + frame.second;
                        r.fail(path, "duplicate key");
                    }
                    break;
                }
                default: break;
            }
            return true;
        });
    } catch (const json::parse_error& e) {
        throw ConfigError({std::string("/: malformed JSON: ") + e.what()});
    }
    if (!r.errors.empty()) throw ConfigError(r.errors);
    if (!r.object(doc, "")) throw ConfigError(r.errors);

    RunConfig cfg;
    r.allow(doc, "", {"grid", "tensors", "fhn", "noise", "initial", "forcing", "stepper", "advisor", "outputs"});

    if (doc.contains("grid") && r.object(doc["grid"], "/grid")) {
        const json& g = doc["grid"];
        r.allow(g, "/grid", {"d", "extents", "lengths"});
        r.integer(g, "/grid", "d", cfg.d);
        if (g.contains("d") && !g.contains("extents")) cfg.extents.assign(static_cast<std::size_t>(std::max(cfg.d, 0)), 16);
        if (g.contains("d") && !g.contains("lengths")) cfg.lengths.assign(static_cast<std::size_t>(std::max(cfg.d, 0)), 1.0);
        r.array(g, "/grid", "extents", cfg.extents);
        r.array(g, "/grid", "lengths", cfg.lengths);
    }
    r.check(cfg.d >= 1 && cfg.d <= 3, "/grid/d", "d in {1,2,3}");
    r.check(cfg.extents.size() == static_cast<std::size_t>(cfg.d), "/grid/extents", "one extent per axis");
    r.check(cfg.lengths.size() == static_cast<std::size_t>(cfg.d), "/grid/lengths", "one length per axis");
    for (std::size_t a = 0; a < cfg.extents.size(); ++a)
        r.check(cfg.extents[a] >= 2, "/grid/extents/" + std::to_string(a), "extent>=2");
    for (std::size_t a = 0; a < cfg.lengths.size(); ++a)
        r.check(cfg.lengths[a] > 0.0, "/grid/lengths/" + std::to_string(a), "length>0");

    if (doc.contains("tensors") && r.object(doc["tensors"], "/tensors")) {
        const json& t = doc["tensors"];
        r.allow(t, "/tensors", {"a_i", "a_e", "lambda0", "bd_tolerance"});
        if (t.contains("a_i")) cfg.a_i = read_tensor(r, t["a_i"], "/tensors/a_i");
        if (t.contains("a_e")) cfg.a_e = read_tensor(r, t["a_e"], "/tensors/a_e");
        r.number(t, "/tensors", "lambda0", cfg.lambda0);
        r.number(t, "/tensors", "bd_tolerance", cfg.bd_tolerance);
    }
    r.check(cfg.lambda0 > 0.0, "/tensors/lambda0", "lambda0>0");
    r.check(cfg.bd_tolerance > 0.0, "/tensors/bd_tolerance", "bd_tolerance>0");

    if (doc.contains("fhn") && r.object(doc["fhn"], "/fhn")) {
        const json& f = doc["fhn"];
        r.allow(f, "/fhn", {"a", "b", "c", "reaction"});
        r.number(f, "/fhn", "a", cfg.fhn.a);
        r.number(f, "/fhn", "b", cfg.fhn.b);
        r.number(f, "/fhn", "c", cfg.fhn.c);
        r.boolean(f, "/fhn", "reaction", cfg.reaction);
    }
    r.check(cfg.fhn.a > 0.0 && cfg.fhn.a < 1.0, "/fhn/a", "0<a<1");
    r.check(cfg.fhn.b > 0.0, "/fhn/b", "b>0");
    r.check(cfg.fhn.c > 0.0, "/fhn/c", "c>0");

    if (doc.contains("noise") && r.object(doc["noise"], "/noise")) {
        const json& n = doc["noise"];
        r.allow(n, "/noise", {"h", "seed", "class", "modes", "schedule", "dz"});
        if (n.contains("h")) cfg.h = read_field(r, n["h"], "/noise/h");
        r.integer(n, "/noise", "seed", cfg.seed);
        std::string cls = noise_class_name(cfg.regularity);
        r.string(n, "/noise", "class", cls);
        if (cls == "plain") {
            cfg.regularity = NoiseClass::plain;
        } else if (cls == "half_power") {
            cfg.regularity = NoiseClass::half_power;
        } else {
            r.fail("/noise/class", "expected plain | half_power");
        }
        r.integer(n, "/noise", "modes", cfg.modes);
        r.number(n, "/noise", "dz", cfg.dz);
        if (n.contains("schedule")) {
            const json& s = n["schedule"];
            if (!s.is_array()) {
                r.fail("/noise/schedule", "expected an array");
            } else {
                for (std::size_t i = 0; i < s.size(); ++i) {
                    const std::string p = "/noise/schedule/" + std::to_string(i);
                    if (!r.object(s[i], p)) continue;
                    r.allow(s[i], p, {"start", "scale"});
                    ScheduleSegment seg;
                    r.number(s[i], p, "start", seg.start);
                    r.number(s[i], p, "scale", seg.scale);
                    if (i > 0) r.check(seg.start > cfg.schedule.back().start, p + "/start", "increasing starts");
                    cfg.schedule.push_back(seg);
                }
            }
        }
    }
    r.check(cfg.modes >= 0, "/noise/modes", "modes>=0");
    r.check(cfg.dz >= 0.0, "/noise/dz", "dz>=0");

    if (doc.contains("initial") && r.object(doc["initial"], "/initial")) {
        const json& i = doc["initial"];
        r.allow(i, "/initial", {"v0", "w0"});
        if (i.contains("v0")) cfg.v0 = read_field(r, i["v0"], "/initial/v0");
        if (i.contains("w0")) cfg.w0 = read_field(r, i["w0"], "/initial/w0");
    }
    if (doc.contains("forcing") && r.object(doc["forcing"], "/forcing")) {
        const json& f = doc["forcing"];
        r.allow(f, "/forcing", {"I_i", "I_e"});
        if (f.contains("I_i")) cfg.I_i = read_field(r, f["I_i"], "/forcing/I_i");
        if (f.contains("I_e")) cfg.I_e = read_field(r, f["I_e"], "/forcing/I_e");
    }

    StepperConfig& st = cfg.stepper;
    if (doc.contains("stepper") && r.object(doc["stepper"], "/stepper")) {
        const json& s = doc["stepper"];
        r.allow(s, "/stepper",
                {"dt", "dt_min", "dt_max", "tol", "adaptive", "T", "output_interval", "norm_cap", "critical_cap"});
        r.number(s, "/stepper", "dt", st.dt);
        r.number(s, "/stepper", "dt_min", st.dt_min);
        r.number(s, "/stepper", "dt_max", st.dt_max);
        r.number(s, "/stepper", "tol", st.tol);
        r.boolean(s, "/stepper", "adaptive", st.adaptive);
        r.number(s, "/stepper", "T", st.T);
        r.number(s, "/stepper", "output_interval", st.output_interval);
        r.cap(s, "/stepper", "norm_cap", st.norm_cap);
        r.cap(s, "/stepper", "critical_cap", st.critical_cap);
    }
    r.check(st.dt_min > 0.0, "/stepper/dt_min", "dt_min>0");
    r.check(st.dt_min <= st.dt, "/stepper/dt", "dt_min<=dt");
    r.check(st.dt <= st.dt_max, "/stepper/dt", "dt<=dt_max");
    r.check(st.T > 0.0, "/stepper/T", "T>0");
    r.check(st.tol > 0.0, "/stepper/tol", "tol>0");
    r.check(st.output_interval > 0.0, "/stepper/output_interval", "output_interval>0");
    r.check(st.norm_cap > 0.0, "/stepper/norm_cap", "norm_cap>0");
    r.check(st.critical_cap > 0.0, "/stepper/critical_cap", "critical_cap>0");

    if (doc.contains("advisor") && r.object(doc["advisor"], "/advisor")) {
        const json& a = doc["advisor"];
        r.allow(a, "/advisor", {"p", "q", "s", "r", "mu", "setting"});
        r.number(a, "/advisor", "p", st.p);
        r.number(a, "/advisor", "q", st.q);
        r.number(a, "/advisor", "s", cfg.s);
        r.number(a, "/advisor", "r", cfg.r);
        if (a.contains("mu")) {
            double mu = 1.0;
            r.number(a, "/advisor", "mu", mu);
            cfg.mu_request = mu;
            st.mu = mu;
        }
        std::string setting = to_string(cfg.setting);
        r.string(a, "/advisor", "setting", setting);
        if (setting == "strong") {
            cfg.setting = Setting::strong;
        } else if (setting == "weak_I") {
            cfg.setting = Setting::weak_I;
        } else if (setting == "weak_II") {
            cfg.setting = Setting::weak_II;
        } else {
            r.fail("/advisor/setting", "expected strong | weak_I | weak_II");
        }
    }
    r.check(st.p > 1.0, "/advisor/p", "1<p");
    r.check(st.q > 1.0, "/advisor/q", "1<q");
    r.check(cfg.s >= 2.0, "/advisor/s", "2<=s");
    r.check(cfg.r >= 2.0, "/advisor/r", "2<=r");
    if (st.p > 1.0) r.check(st.mu > 1.0 / st.p && st.mu <= 1.0, "/advisor/mu", "1/p<mu<=1");

    if (doc.contains("outputs") && r.object(doc["outputs"], "/outputs")) {
        const json& o = doc["outputs"];
        r.allow(o, "/outputs", {"directory", "frames", "ledger", "modal", "potentials", "monitors", "monitor_delta"});
        r.string(o, "/outputs", "directory", cfg.outputs.directory);
        r.boolean(o, "/outputs", "frames", cfg.outputs.frames);
        r.boolean(o, "/outputs", "ledger", cfg.outputs.ledger);
        r.boolean(o, "/outputs", "modal", cfg.outputs.modal);
        r.boolean(o, "/outputs", "potentials", cfg.outputs.potentials);
        r.boolean(o, "/outputs", "monitors", cfg.outputs.monitors);
        r.number(o, "/outputs", "monitor_delta", cfg.outputs.monitor_delta);
    }
    r.check(cfg.outputs.monitor_delta >= 0.0, "/outputs/monitor_delta", "monitor_delta>=0");

    if (r.errors.empty()) check_against_grid(r, cfg);
    if (!r.errors.empty()) throw ConfigError(r.errors);
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError({"/: cannot open " + path});
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

json to_json(const RunConfig& cfg) {
    json j;
    j["grid"] = {{"d", cfg.d}, {"extents", cfg.extents}, {"lengths", cfg.lengths}};
    j["tensors"] = {{"a_i", tensor_json(cfg.a_i)},
                    {"a_e", tensor_json(cfg.a_e)},
                    {"lambda0", cfg.lambda0},
                    {"bd_tolerance", cfg.bd_tolerance}};
    j["fhn"] = {{"a", cfg.fhn.a}, {"b", cfg.fhn.b}, {"c", cfg.fhn.c}, {"reaction", cfg.reaction}};
    json schedule = json::array();
    for (const auto& s : cfg.schedule) schedule.push_back({{"start", s.start}, {"scale", s.scale}});
    j["noise"] = {{"h", field_json(cfg.h)},
                  {"seed", cfg.seed},
                  {"class", noise_class_name(cfg.regularity)},
                  {"modes", cfg.modes},
                  {"schedule", schedule},
                  {"dz", cfg.dz}};
    j["initial"] = {{"v0", field_json(cfg.v0)}, {"w0", field_json(cfg.w0)}};
    j["forcing"] = json::object();
    if (cfg.I_i) j["forcing"]["I_i"] = field_json(*cfg.I_i);
    if (cfg.I_e) j["forcing"]["I_e"] = field_json(*cfg.I_e);
    const StepperConfig& st = cfg.stepper;
    j["stepper"] = {{"dt", st.dt},
                    {"dt_min", st.dt_min},
                    {"dt_max", st.dt_max},
                    {"tol", st.tol},
                    {"adaptive", st.adaptive},
                    {"T", st.T},
                    {"output_interval", st.output_interval},
                    {"norm_cap", cap_json(st.norm_cap)},
                    {"critical_cap", cap_json(st.critical_cap)}};
    j["advisor"] = {{"p", st.p}, {"q", st.q}, {"s", cfg.s}, {"r", cfg.r}, {"setting", to_string(cfg.setting)}};
    if (cfg.mu_request) j["advisor"]["mu"] = *cfg.mu_request;
    j["outputs"] = {{"directory", cfg.outputs.directory},
                    {"frames", cfg.outputs.frames},
                    {"ledger", cfg.outputs.ledger},
                    {"modal", cfg.outputs.modal},
                    {"potentials", cfg.outputs.potentials},
                    {"monitors", cfg.outputs.monitors},
                    {"monitor_delta", cfg.outputs.monitor_delta}};
    return j;
}

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 failed");
    }
    std::ostringstream os;
    for (unsigned int i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
    return os.str();
}

std::string config_hash(const RunConfig& cfg) { return sha256_hex(to_json(cfg).dump()); }

SettingInputs advisor_inputs(const RunConfig& cfg) {
    SettingInputs in;
    in.d = cfg.d;
    in.p = cfg.stepper.p;
    in.q = cfg.stepper.q;
    in.s = cfg.s;
    in.r = cfg.r;
    in.regularity = cfg.regularity;
    in.mu = cfg.mu_request;
    return in;
}

}  // namespace sbd
