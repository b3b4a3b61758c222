#include "sqnf/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

namespace sqnf {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

struct Row {
    std::string preset;
    int depth = 0;
    double gamma[5] = {0, 0, 0, 0, 0};  // identity, a1, p1, a2, p2
    int twirl = 0;
    std::string method;
    double mean_inf = 0, std_inf = 0, mean_dkl = 0, std_dkl = 0;
    int n_failed = 0, n_circuits = 0;
};

double parse_real(const std::string& s, size_t line_no) {
    if (s == "NA") return std::nan("");
    char* end = nullptr;
    double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        fail("row " + std::to_string(line_no) + ": unparseable number \"" + s + "\"");
    return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t comma = line.find(',', start);
        if (comma == std::string::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

std::vector<Row> parse_rows(const std::string& csv_text) {
    std::vector<std::string> lines;
    size_t start = 0;
    while (start < csv_text.size()) {
        size_t end = csv_text.find('\n', start);
        if (end == std::string::npos) end = csv_text.size();
        std::string line = csv_text.substr(start, end - start);
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
        start = end + 1;
    }
    if (lines.empty()) fail("empty csv");

    std::vector<std::string> header = split_csv_line(lines[0]);
    std::map<std::string, size_t> col;
    for (size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
    for (const char* required :
         {"preset", "N", "gamma_identity", "gamma_a1", "gamma_p1", "gamma_a2", "gamma_p2",
          "twirl", "method", "mean_infidelity", "std_infidelity", "mean_dkl_junk",
          "std_dkl_junk", "n_failed", "n_circuits"})
        if (!col.count(required)) fail(std::string("csv is missing column \"") + required + "\"");
    if (lines.size() == 1) fail("csv has a header but no data rows");

    std::vector<Row> rows;
    for (size_t li = 1; li < lines.size(); ++li) {
        std::vector<std::string> f = split_csv_line(lines[li]);
        if (f.size() != header.size())
            fail("row " + std::to_string(li + 1) + ": expected " + std::to_string(header.size()) +
                 " fields, got " + std::to_string(f.size()));
        Row r;
        r.preset = f[col["preset"]];
        r.depth = static_cast<int>(parse_real(f[col["N"]], li + 1));
        r.gamma[0] = parse_real(f[col["gamma_identity"]], li + 1);
        r.gamma[1] = parse_real(f[col["gamma_a1"]], li + 1);
        r.gamma[2] = parse_real(f[col["gamma_p1"]], li + 1);
        r.gamma[3] = parse_real(f[col["gamma_a2"]], li + 1);
        r.gamma[4] = parse_real(f[col["gamma_p2"]], li + 1);
        r.twirl = static_cast<int>(parse_real(f[col["twirl"]], li + 1));
        r.method = f[col["method"]];
        r.mean_inf = parse_real(f[col["mean_infidelity"]], li + 1);
        r.std_inf = parse_real(f[col["std_infidelity"]], li + 1);
        r.mean_dkl = parse_real(f[col["mean_dkl_junk"]], li + 1);
        r.std_dkl = parse_real(f[col["std_dkl_junk"]], li + 1);
        r.n_failed = static_cast<int>(parse_real(f[col["n_failed"]], li + 1));
        r.n_circuits = static_cast<int>(parse_real(f[col["n_circuits"]], li + 1));
        rows.push_back(std::move(r));
    }
    return rows;
}

using NoiseKey = std::tuple<double, double, double, double, double, int>;

NoiseKey noise_key(const Row& r) {
    return {r.gamma[0], r.gamma[1], r.gamma[2], r.gamma[3], r.gamma[4], r.twirl};
}

// The gamma column a rate sweep varies; -1 when every column is constant.
int varying_gamma_column(const std::vector<Row>& rows) {
    for (int g = 0; g < 5; ++g) {
        std::set<double> vals;
        for (const Row& r : rows) vals.insert(r.gamma[g]);
        if (vals.size() > 1) return g;
    }
    return -1;
}

constexpr const char* kMethodNames[3] = {"m0", "mp", "ms"};
constexpr const char* kMethodColors[3] = {"#4477aa", "#ee7733", "#228833"};
constexpr double kLogFloor = 1e-12;

struct SvgDoc {
    std::string body;
    double width = 0, height = 0;

    void addf(const char* fmt, ...) __attribute__((format(printf, 2, 3))) {
        char buf[512];
        va_list ap;
        va_start(ap, fmt);
        std::vsnprintf(buf, sizeof buf, fmt, ap);
        va_end(ap);
        body += buf;
    }

    std::string finish() const {
        char head[256];
        std::snprintf(head, sizeof head,
                      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%.0f\" height=\"%.0f\" "
                      "viewBox=\"0 0 %.0f %.0f\" font-family=\"sans-serif\" font-size=\"12\">\n",
                      width, height, width, height);
        return std::string(head) + "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
               body + "</svg>\n";
    }
};

std::string format_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

// Shared frame for both line-plot kinds: x is linear in `xs` values (already
// transformed if log), y is log10 of infidelity.
void render_lines(SvgDoc& svg, const std::vector<double>& xs,
                  const std::vector<std::string>& x_labels,
                  const std::vector<std::vector<double>>& mean,  // [method][x], NaN = missing
                  const std::vector<std::vector<double>>& stdd, const std::string& x_title,
                  const std::string& title) {
    const double left = 78, right = 620, top = 46, bottom = 380;
    svg.width = 660;
    svg.height = 430;

    double x_min = xs.front(), x_max = xs.back();
    if (x_max == x_min) x_max = x_min + 1;
    double y_lo = 0, y_hi = -300;  // log10 range
    for (int m = 0; m < 3; ++m)
        for (size_t i = 0; i < xs.size(); ++i) {
            if (std::isnan(mean[m][i])) continue;
            double lo = std::max(mean[m][i] - stdd[m][i], kLogFloor);
            double hi = std::max(mean[m][i] + stdd[m][i], kLogFloor);
            y_lo = std::min(y_lo, std::log10(lo));
            y_hi = std::max(y_hi, std::log10(hi));
        }
    if (y_hi <= y_lo) fail("no plottable data points");
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi * 1e6) / 1e6;
    if (y_hi == y_lo) y_hi += 1;

    auto X = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
    auto Y = [&](double v) {
        double lv = std::log10(std::max(v, kLogFloor));
        return bottom - (lv - y_lo) / (y_hi - y_lo) * (bottom - top);
    };

    svg.addf("<text x=\"%.1f\" y=\"24\" font-size=\"15\" text-anchor=\"middle\">%s</text>\n",
             (left + right) / 2, title.c_str());
    svg.addf("<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" fill=\"none\" "
             "stroke=\"#333\"/>\n",
             left, top, right - left, bottom - top);

    for (int dec = static_cast<int>(y_lo); dec <= static_cast<int>(std::ceil(y_hi)); ++dec) {
        double y = bottom - (dec - y_lo) / (y_hi - y_lo) * (bottom - top);
        if (y < top - 0.5 || y > bottom + 0.5) continue;
        svg.addf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#ddd\"/>\n", left,
                 y, right, y);
        svg.addf("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">1e%d</text>\n", left - 6, y + 4,
                 dec);
    }
    for (size_t i = 0; i < xs.size(); ++i) {
        size_t step = xs.size() > 12 ? 2 : 1;
        if (i % step != 0 && i + 1 != xs.size()) continue;
        double x = X(xs[i]);
        svg.addf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"#333\"/>\n", x,
                 bottom, x, bottom + 4);
        svg.addf("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", x, bottom + 18,
                 x_labels[i].c_str());
    }
    svg.addf("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%s</text>\n", (left + right) / 2,
             bottom + 38, x_title.c_str());
    svg.addf("<text x=\"20\" y=\"%.1f\" transform=\"rotate(-90 20 %.1f)\" "
             "text-anchor=\"middle\">mean infidelity 1 - F</text>\n",
             (top + bottom) / 2, (top + bottom) / 2);

    for (int m = 0; m < 3; ++m) {
        // +-1 std band: polygons over maximal runs of defined points
        size_t i = 0;
        while (i < xs.size()) {
            while (i < xs.size() && std::isnan(mean[m][i])) ++i;
            size_t j = i;
            while (j < xs.size() && !std::isnan(mean[m][j])) ++j;
            if (j > i + 1) {
                std::string pts;
                char buf[48];
                for (size_t k = i; k < j; ++k) {
                    std::snprintf(buf, sizeof buf, "%.1f,%.1f ", X(xs[k]),
                                  Y(mean[m][k] + stdd[m][k]));
                    pts += buf;
                }
                for (size_t k = j; k-- > i;) {
                    std::snprintf(buf, sizeof buf, "%.1f,%.1f ", X(xs[k]),
                                  Y(std::max(mean[m][k] - stdd[m][k], kLogFloor)));
                    pts += buf;
                }
                svg.addf("<polygon points=\"%s\" fill=\"%s\" fill-opacity=\"0.15\" "
                         "stroke=\"none\"/>\n",
                         pts.c_str(), kMethodColors[m]);
            }
            i = j;
        }
        // line segments and markers
        i = 0;
        while (i < xs.size()) {
            while (i < xs.size() && std::isnan(mean[m][i])) ++i;
            size_t j = i;
            while (j < xs.size() && !std::isnan(mean[m][j])) ++j;
            if (j > i) {
                std::string pts;
                char buf[48];
                for (size_t k = i; k < j; ++k) {
                    std::snprintf(buf, sizeof buf, "%.1f,%.1f ", X(xs[k]), Y(mean[m][k]));
                    pts += buf;
                }
                svg.addf("<polyline points=\"%s\" fill=\"none\" stroke=\"%s\" "
                         "stroke-width=\"1.8\"/>\n",
                         pts.c_str(), kMethodColors[m]);
                for (size_t k = i; k < j; ++k)
                    svg.addf("<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", X(xs[k]),
                             Y(mean[m][k]), kMethodColors[m]);
            }
            i = j;
        }
    }

    for (int m = 0; m < 3; ++m) {
        double ly = top + 16 + 18 * m;
        svg.addf("<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" "
                 "stroke-width=\"1.8\"/>\n",
                 right - 92, ly - 4, right - 64, ly - 4, kMethodColors[m]);
        svg.addf("<text x=\"%.1f\" y=\"%.1f\">%s</text>\n", right - 58, ly, kMethodNames[m]);
    }
}

// Collapses rows to [method][x] arrays keyed by `key_of`; every (key, method)
// pair must be unique.
template <typename KeyFn>
void collect_series(const std::vector<Row>& rows, const std::vector<double>& keys, KeyFn key_of,
                    std::vector<std::vector<double>>& mean, std::vector<std::vector<double>>& stdd) {
    mean.assign(3, std::vector<double>(keys.size(), std::nan("")));
    stdd.assign(3, std::vector<double>(keys.size(), 0.0));
    for (const Row& r : rows) {
        int m = -1;
        for (int k = 0; k < 3; ++k)
            if (r.method == kMethodNames[k]) m = k;
        if (m < 0) fail("unknown method \"" + r.method + "\" in csv");
        size_t xi =
            std::lower_bound(keys.begin(), keys.end(), key_of(r)) - keys.begin();
        if (!std::isnan(mean[m][xi])) fail("duplicate (grid point, method) rows in csv");
        mean[m][xi] = r.mean_inf;
        stdd[m][xi] = std::isnan(r.std_inf) ? 0.0 : r.std_inf;
    }
}

std::string render_depth_lines(const std::vector<Row>& rows) {
    std::set<NoiseKey> noises;
    for (const Row& r : rows) noises.insert(noise_key(r));
    if (noises.size() != 1)
        fail("depth_lines needs a single noise point; csv has " + std::to_string(noises.size()));

    std::set<int> depth_set;
    for (const Row& r : rows) depth_set.insert(r.depth);
    std::vector<double> xs(depth_set.begin(), depth_set.end());
    std::vector<std::string> labels;
    for (double x : xs) labels.push_back(format_tick(x));

    std::vector<std::vector<double>> mean, stdd;
    collect_series(rows, xs, [](const Row& r) { return static_cast<double>(r.depth); }, mean, stdd);
    SvgDoc svg;
    render_lines(svg, xs, labels, mean, stdd, "circuit depth N",
                 rows[0].preset.empty() ? "depth sweep" : rows[0].preset);
    return svg.finish();
}

std::string render_rate_lines(const std::vector<Row>& rows) {
    std::set<std::string> presets;
    std::set<int> depths;
    for (const Row& r : rows) {
        presets.insert(r.preset);
        depths.insert(r.depth);
    }
    if (presets.size() != 1)
        fail("rate_lines needs a single preset; csv has " + std::to_string(presets.size()));
    if (depths.size() != 1)
        fail("rate_lines needs a single depth; csv has " + std::to_string(depths.size()));
    int g = varying_gamma_column(rows);
    if (g < 0) fail("rate_lines needs a varying rate column");

    std::set<double> rate_set;
    for (const Row& r : rows) rate_set.insert(r.gamma[g]);
    std::vector<double> rates(rate_set.begin(), rate_set.end());
    std::vector<double> xs;
    std::vector<std::string> labels;
    for (double v : rates) {
        if (v <= 0) fail("rate_lines needs positive rates for the log axis");
        xs.push_back(std::log10(v));
        labels.push_back(format_tick(v));
    }

    std::vector<std::vector<double>> mean, stdd;
    // keyed by log10(rate); row lookup must transform identically
    collect_series(rows, xs,
                   [g](const Row& r) { return std::log10(r.gamma[g]); }, mean, stdd);
    SvgDoc svg;
    render_lines(svg, xs, labels, mean, stdd, "error rate (log scale)",
                 rows[0].preset.empty() ? "rate sweep" : rows[0].preset);
    return svg.finish();
}

void heat_color(double t, bool diverging, char out[8]) {
    // diverging: blue (-1) -> white (0) -> red (+1); sequential: white -> violet
    auto lerp = [](int a, int b, double u) { return static_cast<int>(a + (b - a) * u + 0.5); };
    int r, g, b;
    if (diverging) {
        if (t < 0) {
            double u = std::min(1.0, -t);
            r = lerp(255, 48, u), g = lerp(255, 100, u), b = lerp(255, 180, u);
        } else {
            double u = std::min(1.0, t);
            r = lerp(255, 200, u), g = lerp(255, 40, u), b = lerp(255, 50, u);
        }
    } else {
        double u = std::clamp(t, 0.0, 1.0);
        r = lerp(255, 90, u), g = lerp(255, 40, u), b = lerp(255, 130, u);
    }
    std::snprintf(out, 8, "#%02x%02x%02x", r, g, b);
}

std::string render_heatmap(const std::vector<Row>& rows) {
    int g = varying_gamma_column(rows);
    if (g < 0) fail("heatmap needs a varying rate column");
    std::set<int> depth_set;
    std::set<double> rate_set;
    for (const Row& r : rows) {
        depth_set.insert(r.depth);
        rate_set.insert(r.gamma[g]);
    }
    std::vector<int> depths(depth_set.begin(), depth_set.end());
    std::vector<double> rates(rate_set.begin(), rate_set.end());

    // cell data: gap = mean_mp - mean_ms (NA when the ms cell failed wholesale)
    std::map<std::pair<int, int>, double> mp_mean, ms_mean, dkl_mean;
    std::map<std::pair<int, int>, bool> ms_na;
    for (const Row& r : rows) {
        int xi = static_cast<int>(std::lower_bound(depths.begin(), depths.end(), r.depth) -
                                  depths.begin());
        int yi = static_cast<int>(std::lower_bound(rates.begin(), rates.end(), r.gamma[g]) -
                                  rates.begin());
        auto key = std::make_pair(xi, yi);
        if (r.method == "mp") mp_mean[key] = r.mean_inf;
        if (r.method == "ms") {
            ms_mean[key] = r.mean_inf;
            ms_na[key] = r.n_failed == r.n_circuits;
        }
        dkl_mean[key] = r.mean_dkl;
    }
    const size_t n_cells = depths.size() * rates.size();
    if (mp_mean.size() != n_cells || ms_mean.size() != n_cells)
        fail("heatmap csv does not cover the full grid (" + std::to_string(mp_mean.size()) + "/" +
             std::to_string(ms_mean.size()) + " of " + std::to_string(n_cells) + " cells)");

    double gap_abs_max = 0, dkl_max = 0;
    for (const auto& [key, mp] : mp_mean) {
        if (!ms_na[key] && !std::isnan(ms_mean[key]))
            gap_abs_max = std::max(gap_abs_max, std::fabs(mp - ms_mean[key]));
        if (!std::isnan(dkl_mean[key])) dkl_max = std::max(dkl_max, dkl_mean[key]);
    }
    if (gap_abs_max == 0) gap_abs_max = 1;
    if (dkl_max == 0) dkl_max = 1;

    const double cell = 34;
    const double grid_w = cell * depths.size(), grid_h = cell * rates.size();
    const double left1 = 86, top = 56;
    const double left2 = left1 + grid_w + 70;
    SvgDoc svg;
    svg.width = left2 + grid_w + 30;
    svg.height = top + grid_h + 86;

    auto draw_panel = [&](double left, bool gap_panel, const char* title) {
        svg.addf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"14\" text-anchor=\"middle\">%s</text>\n",
                 left + grid_w / 2, top - 14, title);
        for (size_t yi = 0; yi < rates.size(); ++yi) {
            for (size_t xi = 0; xi < depths.size(); ++xi) {
                auto key = std::make_pair(static_cast<int>(xi), static_cast<int>(yi));
                // rate axis ascends upward
                double px = left + xi * cell;
                double py = top + (rates.size() - 1 - yi) * cell;
                char color[8];
                bool na = gap_panel ? (ms_na[key] || std::isnan(ms_mean[key]))
                                    : std::isnan(dkl_mean[key]);
                if (na) {
                    std::snprintf(color, sizeof color, "#9e9e9e");
                } else if (gap_panel) {
                    heat_color((mp_mean[key] - ms_mean[key]) / gap_abs_max, true, color);
                } else {
                    heat_color(dkl_mean[key] / dkl_max, false, color);
                }
                svg.addf("<rect class=\"cell\" x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" "
                         "height=\"%.1f\" fill=\"%s\" stroke=\"#666\" stroke-width=\"0.5\"/>\n",
                         px, py, cell, cell, color);
            }
        }
        for (size_t xi = 0; xi < depths.size(); ++xi)
            svg.addf("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\" font-size=\"10\">%d"
                     "</text>\n",
                     left + xi * cell + cell / 2, top + grid_h + 14, depths[xi]);
        svg.addf("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">circuit depth N</text>\n",
                 left + grid_w / 2, top + grid_h + 34);
        if (gap_panel) {
            for (size_t yi = 0; yi < rates.size(); ++yi)
                svg.addf("<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\" font-size=\"10\">%s"
                         "</text>\n",
                         left - 6, top + (rates.size() - 1 - yi) * cell + cell / 2 + 4,
                         format_tick(rates[yi]).c_str());
            svg.addf("<text x=\"%.1f\" y=\"%.1f\" transform=\"rotate(-90 %.1f %.1f)\" "
                     "text-anchor=\"middle\">error rate</text>\n",
                     left - 62, top + grid_h / 2, left - 62, top + grid_h / 2);
        }
    };
    char scale_note[160];
    std::snprintf(scale_note, sizeof scale_note,
                  "F_MS - F_MP scaled to max |gap| = %.3g; divergence scaled to max = %.3g; "
                  "gray cells: NA (filter failed on every circuit)",
                  gap_abs_max, dkl_max);
    draw_panel(left1, true, "F_MS - F_MP");
    draw_panel(left2, false, "mean junk divergence");
    svg.addf("<text x=\"%.1f\" y=\"%.1f\" font-size=\"11\" text-anchor=\"middle\">%s</text>\n",
             svg.width / 2, top + grid_h + 58, scale_note);
    return svg.finish();
}

}  // namespace

PlotKind plot_kind_from_name(const std::string& name) {
    if (name == "depth_lines") return PlotKind::depth_lines;
    if (name == "rate_lines") return PlotKind::rate_lines;
    if (name == "heatmap") return PlotKind::heatmap;
    fail("unknown plot kind \"" + name + "\" (expected depth_lines, rate_lines, or heatmap)");
}

std::string render_plot(const std::string& csv_text, PlotKind kind) {
    std::vector<Row> rows = parse_rows(csv_text);
    switch (kind) {
        case PlotKind::depth_lines: return render_depth_lines(rows);
        case PlotKind::rate_lines: return render_rate_lines(rows);
        case PlotKind::heatmap: return render_heatmap(rows);
    }
    fail("unreachable plot kind");
}

}  // namespace sqnf
