#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "pentest/bench.hpp"
#include "pentest/curves.hpp"
#include "pentest/pensim.hpp"

namespace pentest {

/// Shortest decimal that round-trips; "inf", "-inf" and "nan" otherwise.
std::string format_number(double x);

class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}
  /// Throws DomainError when the row width differs from the header.
  void add_row(std::vector<std::string> row);
  std::size_t rows() const noexcept { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

/// environment,n,k,gamma,zeta_upper,zeta_lower,pi_upper,measured_ratio,ci_halfwidth,trials,seed
CsvTable bounds_table(const std::vector<BoundReport>& rows);
nlohmann::json bounds_json(const std::vector<BoundReport>& rows);

/// q,v,V,U,u,U_ironed,u_ironed; one row per grid point.
CsvTable curves_table(const CurveBundle& bundle);
/// Standalone SVG of U and its concave hull with ironed intervals shaded.
std::string curves_svg(const CurveBundle& bundle);

struct RunRow {
  long long trial = 0;
  PenRun run;
  double omniscient = 0.0;
};
/// trial,chosen,total_residual,total_residual_before_padding,omniscient,tests
CsvTable runs_table(const std::vector<RunRow>& rows);
/// One JSON object per line: trial and its test log.
std::string runs_jsonl(const std::vector<RunRow>& rows);

/// Writes the file, creating parent directories. Throws IoError.
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace pentest
