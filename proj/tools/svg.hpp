#pragma once

#include <string>

namespace driftlab::cli {

// Minimal static SVG renderer for run outputs; no external dependencies.
// kind: "line" (col 0 = x, remaining columns = series), "scatter" (cols 0,1),
// "heatmap" (cols x, y, value; one rect per row). Returns 0 on success,
// 2 on CSV/schema mismatch.
int emit_svg(const std::string& csv_path, const std::string& out_path,
             const std::string& kind, bool log_y = false, int value_column = 2);

}  // namespace driftlab::cli
