#include "sqnf/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "sqnf/config_io.hpp"
#include "sqnf/harness.hpp"
#include "sqnf/metrics.hpp"
#include "sqnf/mitigation.hpp"
#include "sqnf/plot.hpp"

namespace sqnf {

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("write failed for " + path);
}

const char* kind_name(SweepKind k) {
    switch (k) {
        case SweepKind::depth_sweep: return "depth_sweep";
        case SweepKind::rate_sweep: return "rate_sweep";
        case SweepKind::heatmap: return "heatmap";
    }
    return "?";
}

// The config document carries no explicit kind; the grid shape decides.
// A single noise point is a depth sweep; several noise points at one depth
// with one pinned circuit form a rate sweep; anything else is a heat map.
SweepKind infer_kind(const SweepConfig& cfg) {
    if (cfg.noise_grid.size() == 1) return SweepKind::depth_sweep;
    if (cfg.depth_grid.size() == 1 && cfg.n_circuits == 1) return SweepKind::rate_sweep;
    return SweepKind::heatmap;
}

std::string format_17g(double v) {
    if (std::isnan(v)) return "NA";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void run_sweep_command(const std::string& config_path, const std::string& out_dir, int workers) {
    SweepConfig cfg = parse_config(read_file(config_path));
    const SweepKind kind = infer_kind(cfg);
    std::vector<ExperimentRecord> records;
    switch (kind) {
        case SweepKind::depth_sweep: records = run_depth_sweep(cfg, workers); break;
        case SweepKind::rate_sweep: records = run_rate_sweep(cfg, {}, workers); break;
        case SweepKind::heatmap: records = run_heatmap(cfg, workers); break;
    }
    std::filesystem::create_directories(out_dir);
    const std::string name = cfg.preset_name.empty() ? "sweep" : cfg.preset_name;
    const std::string path = out_dir + "/" + name + ".csv";
    write_file(path, emit_csv(records));
    std::cout << kind_name(kind) << ": " << records.size() << " records -> " << path << "\n";
}

void run_preset_command(const std::string& name, const std::string& out_dir, int workers) {
    std::vector<PresetOutput> outputs = run_preset(name, workers);
    std::filesystem::create_directories(out_dir);
    for (const PresetOutput& out : outputs) {
        const std::string path = out_dir + "/" + out.name + ".csv";
        write_file(path, emit_csv(out.records));
        std::cout << out.name << ": " << out.records.size() << " records -> " << path << "\n";
        if (!out.note.empty()) std::cout << "  " << out.note << "\n";
    }
}

// Writes the corrected distribution with the floor estimate and divergence
// diagnostics; a filter failure still writes the diagnostic header but
// reports failure through the exit status.
int run_mitigate_command(const std::string& counts_path, const std::string& method,
                         const std::string& out_path) {
    CountsIngest in = ingest_counts(read_file(counts_path));
    MitigationOutcome outcome = method == "mp" ? method_mp(in.populations, in.subspace)
                                               : method_ms(in.populations, in.subspace);
    MetricValue dkl = kl_junk(in.populations, in.subspace);

    std::string out;
    out += std::string("method=") + method + "\n";
    out += std::string("status=") + mitigation_status_name(outcome.status) + "\n";
    out += "n_qubits=" + std::to_string(in.subspace.n_qubits) + "\n";
    out += "n_excitations=" + std::to_string(in.subspace.n_excitations) + "\n";
    out += "total_count=" + std::to_string(in.total_count) + "\n";
    if (outcome.estimated_c) out += "estimated_c=" + format_17g(*outcome.estimated_c) + "\n";
    out += std::string("dkl_junk_status=") +
           (dkl.status == MetricStatus::ok ? "ok" : "undefined_zero_mass") + "\n";
    out += "dkl_junk=" + (dkl.status == MetricStatus::ok ? format_17g(dkl.value) : "NA") + "\n";
    if (outcome.status == MitigationStatus::ok) {
        out += "bitstring,probability\n";
        const int nq = in.subspace.n_qubits;
        for (size_t i = 0; i < outcome.distribution.size(); ++i) {
            std::string bits(static_cast<size_t>(nq), '0');
            for (int b = 0; b < nq; ++b)
                if (i & (1ull << (nq - 1 - b))) bits[static_cast<size_t>(b)] = '1';
            out += bits + "," + format_17g(outcome.distribution[i]) + "\n";
        }
    }
    write_file(out_path, out);
    if (outcome.status != MitigationStatus::ok) {
        std::cerr << "error: " << method << " filter failed: "
                  << mitigation_status_name(outcome.status) << " (diagnostics written to "
                  << out_path << ")\n";
        return 1;
    }
    std::cout << method << ": ok -> " << out_path << "\n";
    return 0;
}

void run_plot_command(const std::string& csv_path, const std::string& kind,
                      const std::string& out_path) {
    const std::string svg = render_plot(read_file(csv_path), plot_kind_from_name(kind));
    write_file(out_path, svg);
    std::cout << kind << " -> " << out_path << "\n";
}

void run_presets_command() {
    char line[320];
    std::snprintf(line, sizeof line, "%-12s %-12s %-6s %-6s %s", "name", "kind", "n_q", "n_e",
                  "description");
    std::cout << line << "\n";
    for (const Preset& p : list_presets()) {
        std::snprintf(line, sizeof line, "%-12s %-12s %-6d %-6d %s", p.name.c_str(),
                      kind_name(p.kind), p.config.n_qubits, p.config.n_excitations,
                      p.description.c_str());
        std::cout << line << "\n";
    }
}

}  // namespace

int cli_main(int argc, char** argv) {
    CLI::App app{"noisy Givens-ladder simulator and junk-information error-mitigation lab"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".", preset_name, counts_path, method, out_path;
    std::string csv_path, plot_kind;
    int workers = 1;

    CLI::App* sweep = app.add_subcommand("sweep", "run the sweep described by a config file");
    sweep->add_option("--config", config_path, "JSON sweep config")->required();
    sweep->add_option("--out", out_dir, "output directory")->required();
    sweep->add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);

    CLI::App* preset = app.add_subcommand("preset", "run a named preset");
    preset->add_option("--name", preset_name, "preset name")->required();
    preset->add_option("--out", out_dir, "output directory")->required();
    preset->add_option("--workers", workers, "worker thread count")->check(CLI::PositiveNumber);

    CLI::App* mitigate = app.add_subcommand("mitigate", "filter a measured counts file");
    mitigate->add_option("--counts", counts_path, "counts file")->required();
    mitigate->add_option("--method", method, "mitigation method")
        ->required()
        ->check(CLI::IsMember({"mp", "ms"}));
    mitigate->add_option("--out", out_path, "output file")->required();

    CLI::App* plot = app.add_subcommand("plot", "render a sweep csv to svg");
    plot->add_option("--csv", csv_path, "input csv")->required();
    plot->add_option("--kind", plot_kind, "plot kind")
        ->required()
        ->check(CLI::IsMember({"depth_lines", "rate_lines", "heatmap"}));
    plot->add_option("--out", out_path, "output svg file")->required();

    CLI::App* presets = app.add_subcommand("presets", "list the built-in presets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // help exits 0; every parse failure is a usage error
    }

    try {
        if (sweep->parsed()) run_sweep_command(config_path, out_dir, workers);
        if (preset->parsed()) run_preset_command(preset_name, out_dir, workers);
        if (mitigate->parsed()) return run_mitigate_command(counts_path, method, out_path);
        if (plot->parsed()) run_plot_command(csv_path, plot_kind, out_path);
        if (presets->parsed()) run_presets_command();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace sqnf
