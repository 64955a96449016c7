#pragma once

// Plain-text matrix CSV and the experiment CSV schemas.

#include "matnorm/errors.hpp"
#include "matnorm/format.hpp"
#include "matnorm/linalg.hpp"
#include "matnorm/risk.hpp"

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace matnorm {

/// Rows of comma-separated numbers, no header. Blank lines are ignored.
inline Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<double> row;
    try {
      for (auto cell : split(line, ',')) row.push_back(parse_double(cell));
    } catch (const InvalidInput& e) {
      throw InvalidInput("matrix csv line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw InvalidInput("matrix csv line " + std::to_string(line_no) + ": ragged row");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw InvalidInput("matrix csv: no data");
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < rows[i].size(); ++j)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  return out;
}

inline Matrix read_matrix_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open '" + path + "'");
  return read_matrix_csv(in);
}

inline void write_matrix_csv(std::ostream& out, const Matrix& x) {
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) out << (j ? "," : "") << format_double(x(i, j));
    out << '\n';
  }
}

inline constexpr const char* kRiskCsvHeader = "scenario,estimator,sigma1,replicates,seed,risk_mean,risk_stderr";

/// `sigma1` holds the swept grid value (sigma_2 for scenarios that sweep it).
inline void write_risk_csv(std::ostream& out, const std::vector<RiskRow>& rows) {
  out << kRiskCsvHeader << '\n';
  for (const auto& r : rows)
    out << r.scenario << ',' << r.estimator << ',' << format_double(r.grid_value) << ',' << r.report.replicates
        << ',' << r.report.seed << ',' << format_double(r.report.mean) << ',' << format_double(r.report.stderr)
        << '\n';
}

struct KlRow {
  std::string prior;
  double sigma[3] = {0.0, 0.0, 0.0};
  std::uint64_t replicates = 0;
  std::uint64_t is_samples = 0;
  std::uint64_t seed = 0;
  double kl_mean = 0.0;
  double kl_stderr = 0.0;
  double min_ess_fraction = 0.0;
};

inline constexpr const char* kKlCsvHeader =
    "prior,sigma1,sigma2,sigma3,replicates,is_samples,seed,kl_mean,kl_stderr,min_ess_fraction";

inline void write_kl_csv(std::ostream& out, const std::vector<KlRow>& rows) {
  out << kKlCsvHeader << '\n';
  for (const auto& r : rows)
    out << r.prior << ',' << format_double(r.sigma[0]) << ',' << format_double(r.sigma[1]) << ','
        << format_double(r.sigma[2]) << ',' << r.replicates << ',' << r.is_samples << ',' << r.seed << ','
        << format_double(r.kl_mean) << ',' << format_double(r.kl_stderr) << ',' << format_double(r.min_ess_fraction)
        << '\n';
}

}  // namespace matnorm
