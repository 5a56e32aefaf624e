#pragma once

#include <string>
#include <vector>

#include "psun/diagnostics.hpp"
#include "psun/simstudy.hpp"

namespace psun {

// Minimal static SVG charts for batch inspection of runs.

void write_trace_svg(const std::string& path, const DrawMatrix& draws, int max_panels = 6);
void write_acf_svg(const std::string& path, const ChainSummary& summary, int max_panels = 6);
void write_coverage_svg(const std::string& path, const CoverageTable& table);

}  // namespace psun
