#include "sqnf/config_io.hpp"

#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>
#include <string>

#include <json.hpp>

namespace sqnf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

// Fail-closed key handling: every object is checked against the exact set of
// keys its schema allows, so typos never silently fall back to defaults.
void reject_unknown_keys(const json& obj, const char* where,
                         std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
        bool known = false;
        for (const char* k : allowed)
            if (item.key() == k) known = true;
        if (!known) fail(std::string("unknown key \"") + item.key() + "\" in " + where);
    }
}

double get_rate(const json& obj, const char* where, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail(std::string(where) + "." + key + " must be a number");
    return v.get<double>();
}

DampingRates parse_damping(const json& obj, const char* where, DampingRates base) {
    if (!obj.is_object()) fail(std::string(where) + " must be an object");
    reject_unknown_keys(obj, where, {"amp", "phase"});
    base.amp = get_rate(obj, where, "amp", base.amp);
    base.phase = get_rate(obj, where, "phase", base.phase);
    return base;
}

NoiseSpec parse_noise_spec(const json& obj, NoiseSpec base) {
    if (!obj.is_object()) fail("noise_grid entries must be objects");
    reject_unknown_keys(obj, "noise_grid entry",
                        {"identity_depolarizing", "single_qubit", "two_qubit", "twirl"});
    base.identity_depolarizing =
        get_rate(obj, "noise_grid entry", "identity_depolarizing", base.identity_depolarizing);
    if (obj.contains("single_qubit"))
        base.single_qubit = parse_damping(obj.at("single_qubit"), "single_qubit", base.single_qubit);
    if (obj.contains("two_qubit"))
        base.two_qubit = parse_damping(obj.at("two_qubit"), "two_qubit", base.two_qubit);
    if (obj.contains("twirl")) {
        const json& tw = obj.at("twirl");
        if (!tw.is_object()) fail("twirl must be an object");
        reject_unknown_keys(tw, "twirl", {"enabled", "n_instances", "seed"});
        if (tw.contains("enabled")) {
            if (!tw.at("enabled").is_boolean()) fail("twirl.enabled must be a boolean");
            base.twirl.enabled = tw.at("enabled").get<bool>();
        }
        if (tw.contains("n_instances")) {
            if (!tw.at("n_instances").is_number_integer())
                fail("twirl.n_instances must be an integer");
            base.twirl.n_instances = tw.at("n_instances").get<int>();
        }
        if (tw.contains("seed")) {
            if (!tw.at("seed").is_number_unsigned() && !tw.at("seed").is_number_integer())
                fail("twirl.seed must be a nonnegative integer");
            base.twirl.seed = tw.at("seed").get<std::uint64_t>();
        }
    }
    return base;
}

long get_integer(const json& obj, const char* key, long fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(std::string(key) + " must be an integer");
    return v.get<long>();
}

}  // namespace

SweepConfig parse_config(const std::string& text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        fail(std::string("config parse error: ") + e.what());
    }
    if (!doc.is_object()) fail("config document must be a JSON object");
    reject_unknown_keys(doc, "config",
                        {"preset", "n_qubits", "n_excitations", "initial_state", "depth_grid",
                         "noise_grid", "n_circuits", "master_seed", "shots", "grouping",
                         "preset_name", "fixed_circuit_seed"});

    SweepConfig cfg;
    if (doc.contains("preset")) {
        if (!doc.at("preset").is_string()) fail("preset must be a string");
        std::string name = doc.at("preset").get<std::string>();
        const Preset* p = find_preset(name);
        if (!p) fail("unknown preset \"" + name + "\"");
        cfg = p->config;
    }

    cfg.n_qubits = static_cast<int>(get_integer(doc, "n_qubits", cfg.n_qubits));
    cfg.n_excitations = static_cast<int>(get_integer(doc, "n_excitations", cfg.n_excitations));
    if (doc.contains("initial_state")) {
        const json& v = doc.at("initial_state");
        if (v.is_string()) {
            if (v.get<std::string>() != "default")
                fail("initial_state must be a basis index or \"default\"");
            cfg.initial_state = -1;
        } else if (v.is_number_integer()) {
            cfg.initial_state = v.get<long>();
        } else {
            fail("initial_state must be a basis index or \"default\"");
        }
    }
    if (doc.contains("depth_grid")) {
        const json& v = doc.at("depth_grid");
        if (!v.is_array()) fail("depth_grid must be an array of integers");
        cfg.depth_grid.clear();
        for (const json& e : v) {
            if (!e.is_number_integer()) fail("depth_grid entries must be integers");
            cfg.depth_grid.push_back(e.get<int>());
        }
    }
    if (doc.contains("noise_grid")) {
        const json& v = doc.at("noise_grid");
        if (!v.is_array()) fail("noise_grid must be an array of noise objects");
        cfg.noise_grid.clear();
        for (const json& e : v) cfg.noise_grid.push_back(parse_noise_spec(e, NoiseSpec{}));
    }
    cfg.n_circuits = static_cast<int>(get_integer(doc, "n_circuits", cfg.n_circuits));
    if (doc.contains("master_seed")) {
        const json& v = doc.at("master_seed");
        if (!v.is_number_unsigned() && !v.is_number_integer())
            fail("master_seed must be a nonnegative integer");
        cfg.master_seed = v.get<std::uint64_t>();
    }
    cfg.shots = get_integer(doc, "shots", cfg.shots);
    if (doc.contains("grouping")) {
        if (!doc.at("grouping").is_string()) fail("grouping must be a string");
        cfg.grouping = doc.at("grouping").get<std::string>();
    }
    if (doc.contains("preset_name")) {
        if (!doc.at("preset_name").is_string()) fail("preset_name must be a string");
        cfg.preset_name = doc.at("preset_name").get<std::string>();
    }
    if (doc.contains("fixed_circuit_seed")) {
        const json& v = doc.at("fixed_circuit_seed");
        if (v.is_null()) {
            cfg.fixed_circuit_seed.reset();
        } else {
            if (!v.is_number_unsigned() && !v.is_number_integer())
                fail("fixed_circuit_seed must be a nonnegative integer or null");
            cfg.fixed_circuit_seed = v.get<std::uint64_t>();
        }
    }

    validate_sweep_config(cfg);
    return cfg;
}

namespace {

json damping_to_json(const DampingRates& d) { return json{{"amp", d.amp}, {"phase", d.phase}}; }

}  // namespace

std::string serialize_config(const SweepConfig& cfg) {
    json doc;
    doc["n_qubits"] = cfg.n_qubits;
    doc["n_excitations"] = cfg.n_excitations;
    if (cfg.initial_state < 0)
        doc["initial_state"] = "default";
    else
        doc["initial_state"] = cfg.initial_state;
    doc["depth_grid"] = cfg.depth_grid;
    json grid = json::array();
    for (const NoiseSpec& ns : cfg.noise_grid) {
        json e;
        e["identity_depolarizing"] = ns.identity_depolarizing;
        e["single_qubit"] = damping_to_json(ns.single_qubit);
        e["two_qubit"] = damping_to_json(ns.two_qubit);
        e["twirl"] = json{{"enabled", ns.twirl.enabled},
                          {"n_instances", ns.twirl.n_instances},
                          {"seed", ns.twirl.seed}};
        grid.push_back(std::move(e));
    }
    doc["noise_grid"] = std::move(grid);
    doc["n_circuits"] = cfg.n_circuits;
    doc["master_seed"] = cfg.master_seed;
    doc["shots"] = cfg.shots;
    doc["grouping"] = cfg.grouping;
    if (!cfg.preset_name.empty()) doc["preset_name"] = cfg.preset_name;
    if (cfg.fixed_circuit_seed) doc["fixed_circuit_seed"] = *cfg.fixed_circuit_seed;
    return doc.dump(2) + "\n";
}

namespace {

[[noreturn]] void fail_line(size_t line_no, const std::string& msg) {
    fail("line " + std::to_string(line_no) + ": " + msg);
}

// Header lines are "key=value" with an integer value.
long parse_header_line(const std::string& line, size_t line_no, const char* key) {
    const std::string prefix = std::string(key) + "=";
    if (line.rfind(prefix, 0) != 0)
        fail_line(line_no, "expected \"" + prefix + "<integer>\", got \"" + line + "\"");
    const std::string value = line.substr(prefix.size());
    if (value.empty() || !std::all_of(value.begin(), value.end(),
                                      [](unsigned char c) { return std::isdigit(c); }))
        fail_line(line_no, std::string(key) + " must be a nonnegative integer");
    return std::stol(value);
}

}  // namespace

CountsIngest ingest_counts(const std::string& text) {
    std::vector<std::string> lines;
    std::vector<size_t> line_nos;
    size_t start = 0, no = 1;
    while (start <= text.size()) {
        size_t end = text.find('\n', start);
        if (end == std::string::npos) end = text.size();
        std::string line = text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) {
            lines.push_back(line);
            line_nos.push_back(no);
        }
        start = end + 1;
        ++no;
    }
    if (lines.size() < 2) fail("counts file must start with n_qubits= and n_excitations= lines");

    const long n_qubits = parse_header_line(lines[0], line_nos[0], "n_qubits");
    const long n_excitations = parse_header_line(lines[1], line_nos[1], "n_excitations");
    if (n_qubits < 1 || n_qubits > 20) fail("n_qubits out of supported range [1, 20]");

    CountsIngest out;
    out.subspace = build_subspace(static_cast<int>(n_qubits), static_cast<int>(n_excitations));
    const long d = 1L << n_qubits;
    std::vector<long> counts(static_cast<size_t>(d), -1);  // -1 = unseen

    for (size_t i = 2; i < lines.size(); ++i) {
        const std::string& line = lines[i];
        const size_t line_no = line_nos[i];
        size_t comma = line.find(',');
        if (comma == std::string::npos)
            fail_line(line_no, "expected \"bitstring,count\", got \"" + line + "\"");
        const std::string bits = line.substr(0, comma);
        const std::string count_str = line.substr(comma + 1);
        if (static_cast<long>(bits.size()) != n_qubits)
            fail_line(line_no, "bitstring \"" + bits + "\" has length " +
                                   std::to_string(bits.size()) + ", expected " +
                                   std::to_string(n_qubits));
        long index = 0;
        for (char c : bits) {
            if (c != '0' && c != '1')
                fail_line(line_no, "bitstring \"" + bits + "\" contains non-binary characters");
            index = (index << 1) | (c - '0');
        }
        if (count_str.empty() || !std::all_of(count_str.begin(), count_str.end(),
                                              [](unsigned char c) { return std::isdigit(c); }))
            fail_line(line_no, "count must be a nonnegative integer, got \"" + count_str + "\"");
        const long count = std::stol(count_str);
        if (counts[static_cast<size_t>(index)] >= 0)
            fail_line(line_no, "duplicate bitstring \"" + bits + "\"");
        counts[static_cast<size_t>(index)] = count;
        out.total_count += count;
    }
    if (out.total_count < 1) fail("total count must be at least 1");

    out.populations.resize(static_cast<size_t>(d), 0.0);
    for (long i = 0; i < d; ++i)
        if (counts[static_cast<size_t>(i)] > 0)
            out.populations[static_cast<size_t>(i)] =
                static_cast<double>(counts[static_cast<size_t>(i)]) /
                static_cast<double>(out.total_count);
    return out;
}

namespace {

std::string format_real(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvRow {
    const ExperimentRecord* rec;
    MitigationMethod method;
};

// Ordering key (N, noise rates, twirl, method); ties broken by preset label
// so merged multi-preset record sets still emit deterministically.
bool row_less(const CsvRow& a, const CsvRow& b) {
    const ExperimentRecord& ra = *a.rec;
    const ExperimentRecord& rb = *b.rec;
    auto key = [](const ExperimentRecord& r) {
        return std::make_tuple(r.depth, r.noise.identity_depolarizing, r.noise.single_qubit.amp,
                               r.noise.single_qubit.phase, r.noise.two_qubit.amp,
                               r.noise.two_qubit.phase, r.noise.twirl.enabled);
    };
    auto ka = key(ra), kb = key(rb);
    if (ka != kb) return ka < kb;
    if (ra.preset != rb.preset) return ra.preset < rb.preset;
    return static_cast<int>(a.method) < static_cast<int>(b.method);
}

}  // namespace

std::string emit_csv(const std::vector<ExperimentRecord>& records) {
    std::string out =
        "preset,n_qubits,n_excitations,N,gamma_identity,gamma_a1,gamma_p1,gamma_a2,gamma_p2,"
        "twirl,shots,method,mean_infidelity,std_infidelity,mean_dkl_junk,std_dkl_junk,"
        "n_failed,n_circuits,master_seed\n";

    std::vector<CsvRow> rows;
    rows.reserve(records.size() * 3);
    for (const ExperimentRecord& r : records)
        for (MitigationMethod m : {MitigationMethod::M0, MitigationMethod::MP, MitigationMethod::MS})
            rows.push_back(CsvRow{&r, m});
    std::stable_sort(rows.begin(), rows.end(), row_less);

    char buf[64];
    for (const CsvRow& row : rows) {
        const ExperimentRecord& r = *row.rec;
        const MethodStats& s = stats_for(r, row.method);
        out += r.preset;
        std::snprintf(buf, sizeof buf, ",%d,%d,%d,", r.n_qubits, r.n_excitations, r.depth);
        out += buf;
        out += format_real(r.noise.identity_depolarizing) + ",";
        out += format_real(r.noise.single_qubit.amp) + ",";
        out += format_real(r.noise.single_qubit.phase) + ",";
        out += format_real(r.noise.two_qubit.amp) + ",";
        out += format_real(r.noise.two_qubit.phase) + ",";
        std::snprintf(buf, sizeof buf, "%d,%ld,", r.noise.twirl.enabled ? r.noise.twirl.n_instances : 0,
                      r.shots);
        out += buf;
        out += mitigation_method_name(row.method);
        out += ",";
        out += format_real(s.mean_infidelity) + ",";
        out += format_real(std::isnan(s.mean_infidelity) ? s.mean_infidelity : s.std_infidelity) +
               ",";
        out += format_real(r.mean_dkl_junk) + ",";
        out += format_real(std::isnan(r.mean_dkl_junk) ? r.mean_dkl_junk : r.std_dkl_junk) + ",";
        std::snprintf(buf, sizeof buf, "%d,%d,%" PRIu64 "\n", s.n_failed, r.n_circuits,
                      r.master_seed);
        out += buf;
    }
    return out;
}

}  // namespace sqnf
