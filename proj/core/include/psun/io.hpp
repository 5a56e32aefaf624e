#pragma once

#include <string>
#include <vector>

#include "psun/diagnostics.hpp"
#include "psun/regression.hpp"
#include "psun/simstudy.hpp"

namespace psun {

struct IngestOptions {
  Link link = Link::kProbit;
  std::string response = "y";
  std::vector<std::string> drop_columns;
  bool standardize = false;
  bool add_intercept = false;
};

struct IngestReport {
  int rows_total = 0;
  int rows_dropped = 0;
};

// Reads a headed CSV with a binary response column and numeric covariates.
// Rows containing NA cells (empty, NA, NaN, N/A, case-insensitive) are
// dropped and counted.
BinaryDesign ingest_csv(const std::string& path, const IngestOptions& opts,
                        IngestReport* report = nullptr);

void write_draws_csv(const std::string& path, const DrawMatrix& draws);
DrawMatrix read_draws_csv(const std::string& path);

std::string summary_to_json(const ChainSummary& summary);
void write_summary_json(const std::string& path, const ChainSummary& summary);

void write_coverage_csv(const std::string& path, const CoverageTable& table);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace psun
