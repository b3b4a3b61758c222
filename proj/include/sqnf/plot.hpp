#pragma once

#include <string>

namespace sqnf {

enum class PlotKind { depth_lines, rate_lines, heatmap };

// Accepts "depth_lines", "rate_lines", "heatmap"; throws on anything else.
PlotKind plot_kind_from_name(const std::string& name);

// Renders a sweep CSV (the emit_csv schema) into a standalone SVG document.
//   depth_lines  one log-y line per method over N, shaded +-1 std bands;
//                requires a single noise point
//   rate_lines   one log-y line per method over the varying rate, log-x;
//                requires a single depth and preset
//   heatmap      two panels (F_MS - F_MP and mean junk divergence) over the
//                full N x rate grid, NA cells in a marked color
// Throws on missing columns, a header-only file, or a malformed grid.
std::string render_plot(const std::string& csv_text, PlotKind kind);

}  // namespace sqnf
