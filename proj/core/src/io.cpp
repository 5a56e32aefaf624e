#include "psun/io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace psun {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

bool is_na(const std::string& cell) {
  if (cell.empty()) return true;
  std::string lower;
  for (char c : cell) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  return lower == "na" || lower == "nan" || lower == "n/a";
}

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

BinaryDesign ingest_csv(const std::string& path, const IngestOptions& opts,
                        IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("ingest_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("ingest_csv: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);

  int y_col = -1;
  std::vector<int> keep_cols;
  std::vector<std::string> keep_names;
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == opts.response) {
      y_col = static_cast<int>(j);
      continue;
    }
    if (std::find(opts.drop_columns.begin(), opts.drop_columns.end(), header[j]) !=
        opts.drop_columns.end())
      continue;
    keep_cols.push_back(static_cast<int>(j));
    keep_names.push_back(header[j]);
  }
  if (y_col < 0)
    throw std::runtime_error("ingest_csv: no response column named '" + opts.response + "'");
  if (keep_cols.empty()) throw std::runtime_error("ingest_csv: no covariate columns");

  std::vector<std::vector<double>> rows;
  std::vector<int> ys;
  int total = 0, dropped = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    ++total;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("ingest_csv: row with wrong field count at data row " +
                               std::to_string(total));
    bool any_na = is_na(cells[y_col]);
    for (int c : keep_cols) any_na = any_na || is_na(cells[c]);
    if (any_na) {
      ++dropped;
      continue;
    }
    const double yv = std::stod(cells[y_col]);
    if (yv != 0.0 && yv != 1.0)
      throw std::runtime_error("ingest_csv: non-binary response value '" + cells[y_col] + "'");
    ys.push_back(static_cast<int>(yv));
    std::vector<double> row(keep_cols.size());
    for (std::size_t k = 0; k < keep_cols.size(); ++k) row[k] = std::stod(cells[keep_cols[k]]);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("ingest_csv: no complete rows after NA drop");
  if (report != nullptr) {
    report->rows_total = total;
    report->rows_dropped = dropped;
  }

  Eigen::MatrixXd x(rows.size(), keep_cols.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < keep_cols.size(); ++j) x(i, j) = rows[i][j];

  BinaryDesign design;
  design.link = opts.link;
  design.y.resize(static_cast<int>(ys.size()));
  for (std::size_t i = 0; i < ys.size(); ++i) design.y[static_cast<int>(i)] = ys[i];

  if (opts.standardize) {
    auto [xs, rec] = standardize(x, opts.add_intercept);
    design.x = xs;
    design.names.clear();
    if (opts.add_intercept) design.names.push_back("intercept");
    design.names.insert(design.names.end(), keep_names.begin(), keep_names.end());
  } else if (opts.add_intercept) {
    design.x.resize(x.rows(), x.cols() + 1);
    design.x.col(0).setOnes();
    design.x.rightCols(x.cols()) = x;
    design.names.push_back("intercept");
    design.names.insert(design.names.end(), keep_names.begin(), keep_names.end());
  } else {
    design.x = x;
    design.names = keep_names;
  }
  design.validate();
  return design;
}

void write_draws_csv(const std::string& path, const DrawMatrix& draws) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_draws_csv: cannot open " + path);
  out << "chain";
  const int p = static_cast<int>(draws.draws.cols());
  for (int j = 0; j < p; ++j) {
    out << ',' << (j < static_cast<int>(draws.names.size()) ? draws.names[j]
                                                            : "beta_" + std::to_string(j + 1));
  }
  out << '\n';
  for (int i = 0; i < draws.draws.rows(); ++i) {
    out << draws.chain[i];
    for (int j = 0; j < p; ++j) out << ',' << format_full(draws.draws(i, j));
    out << '\n';
  }
}

DrawMatrix read_draws_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("read_draws_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("read_draws_csv: empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::vector<std::string> header = split_csv_line(line);
  if (header.empty() || header[0] != "chain")
    throw std::runtime_error("read_draws_csv: first column must be 'chain'");
  DrawMatrix dm;
  dm.names.assign(header.begin() + 1, header.end());
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw std::runtime_error("read_draws_csv: inconsistent row length");
    dm.chain.push_back(std::stoi(cells[0]));
    std::vector<double> row(cells.size() - 1);
    for (std::size_t j = 1; j < cells.size(); ++j) row[j - 1] = std::stod(cells[j]);
    rows.push_back(std::move(row));
  }
  dm.draws.resize(rows.size(), dm.names.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < dm.names.size(); ++j) dm.draws(i, j) = rows[i][j];
  return dm;
}

std::string summary_to_json(const ChainSummary& summary) {
  nlohmann::json root;
  root["levels"] = summary.levels;
  nlohmann::json coeffs = nlohmann::json::array();
  for (const auto& c : summary.coefficients) {
    nlohmann::json jc;
    jc["coefficient"] = c.name;
    jc["mean"] = c.mean;
    jc["sd"] = c.sd;
    for (std::size_t l = 0; l < summary.levels.size(); ++l) {
      char key[16];
      std::snprintf(key, sizeof(key), "q%02d", static_cast<int>(std::lround(summary.levels[l] * 100)));
      jc[key] = c.quantiles[l];
    }
    jc["ess"] = c.ess;
    jc["mcse"] = c.mcse;
    coeffs.push_back(std::move(jc));
  }
  root["coefficients"] = std::move(coeffs);
  return root.dump(2);
}

void write_summary_json(const std::string& path, const ChainSummary& summary) {
  write_text_file(path, summary_to_json(summary));
}

void write_coverage_csv(const std::string& path, const CoverageTable& table) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_coverage_csv: cannot open " + path);
  out << "combo,group,reps_used";
  for (double l : table.levels) {
    char key[16];
    std::snprintf(key, sizeof(key), "c%02d", static_cast<int>(std::lround(l * 100)));
    out << ',' << key;
  }
  out << '\n';
  for (const auto& row : table.rows) {
    out << row.combo << ',' << row.group << ',' << row.reps_used;
    for (double c : row.coverage) out << ',' << format_full(c);
    out << '\n';
  }
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_text_file: cannot open " + path);
  out << content;
}

}  // namespace psun
