#include "pentest/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pentest/errors.hpp"

namespace pentest {

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_subset(const Subset& s) {
  std::string out;
  for (int i : s) out += (out.empty() ? "" : " ") + std::to_string(i);
  return out;
}

}  // namespace

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != header_.size()) throw DomainError("CSV row width does not match the header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto line = [&out](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out += (i ? "," : "") + csv_field(cells[i]);
    out += '\n';
  };
  line(header_);
  for (const auto& r : rows_) line(r);
  return out;
}

CsvTable bounds_table(const std::vector<BoundReport>& rows) {
  CsvTable t({"environment", "n", "k", "gamma", "zeta_upper", "zeta_lower", "pi_upper", "measured_ratio",
              "ci_halfwidth", "trials", "seed"});
  for (const auto& r : rows) {
    t.add_row({r.environment, std::to_string(r.n), std::to_string(r.k), format_number(r.gamma),
               format_number(r.zeta_upper), format_number(r.zeta_lower), format_number(r.pi_upper),
               r.measured ? format_number(r.measured_ratio) : "", r.measured ? format_number(r.ci_halfwidth) : "",
               r.measured ? std::to_string(r.trials) : "", r.measured ? std::to_string(r.seed) : ""});
  }
  return t;
}

nlohmann::json bounds_json(const std::vector<BoundReport>& rows) {
  auto out = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::json j{{"environment", r.environment}, {"n", r.n},
                     {"k", r.k},                     {"gamma", r.gamma},
                     {"zeta_upper", r.zeta_upper},   {"zeta_lower", r.zeta_lower},
                     {"pi_upper", r.pi_upper},       {"epsilon", r.epsilon},
                     {"pi_source", r.pi_source}};
    if (r.measured) {
      j["measured_ratio"] = r.measured_ratio;
      j["ci_halfwidth"] = r.ci_halfwidth;
      j["trials"] = r.trials;
      j["seed"] = r.seed;
    }
    out.push_back(std::move(j));
  }
  return out;
}

CsvTable curves_table(const CurveBundle& b) {
  CsvTable t({"q", "v", "V", "U", "u", "U_ironed", "u_ironed"});
  for (std::size_t i = 0; i < b.grid.size(); ++i) {
    t.add_row({format_number(b.grid[i]), format_number(b.v[i]), format_number(b.V[i]), format_number(b.U[i]),
               format_number(b.u[i]), b.ironed() ? format_number(b.U_ironed[i]) : "",
               b.ironed() ? format_number(b.u_ironed[i]) : ""});
  }
  return t;
}

std::string curves_svg(const CurveBundle& b) {
  constexpr double kW = 640.0;
  constexpr double kH = 400.0;
  constexpr double kPad = 40.0;
  double top = 0.0;
  for (std::size_t i = 0; i < b.grid.size(); ++i) {
    top = std::max(top, b.U[i]);
    if (b.ironed()) top = std::max(top, b.U_ironed[i]);
  }
  if (!(top > 0.0)) top = 1.0;
  auto x = [&](double q) { return kPad + q * (kW - 2 * kPad); };
  auto y = [&](double u) { return kH - kPad - u / top * (kH - 2 * kPad); };
  // Thin the polyline to at most ~2000 points.
  const std::size_t step = std::max<std::size_t>(1, b.grid.size() / 2000);
  auto polyline = [&](const std::vector<double>& ys, const char* color, const char* dash) {
    std::string pts;
    for (std::size_t i = 0; i < b.grid.size(); i += step) {
      pts += format_number(x(b.grid[i])) + "," + format_number(y(ys[i])) + " ";
    }
    pts += format_number(x(b.grid.back())) + "," + format_number(y(ys.back()));
    return std::string("<polyline fill=\"none\" stroke=\"") + color + "\" stroke-width=\"1.5\"" + dash +
           " points=\"" + pts + "\"/>\n";
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH << "\" viewBox=\"0 0 "
     << kW << " " << kH << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (b.ironed()) {
    for (const auto& iv : b.ironed_intervals) {
      os << "<rect x=\"" << format_number(x(iv.lo)) << "\" y=\"" << kPad << "\" width=\""
         << format_number(x(iv.hi) - x(iv.lo)) << "\" height=\"" << kH - 2 * kPad
         << "\" fill=\"#f4d58d\" fill-opacity=\"0.5\"/>\n";
    }
  }
  os << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\"" << kW - kPad << "\" y2=\"" << kH - kPad
     << "\" stroke=\"black\"/>\n";
  os << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad << "\" y2=\"" << kH - kPad
     << "\" stroke=\"black\"/>\n";
  os << polyline(b.U, "#1f77b4", "");
  if (b.ironed()) os << polyline(b.U_ironed, "#d62728", " stroke-dasharray=\"6 3\"");
  os << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 8 << "\" font-size=\"12\" text-anchor=\"middle\">q</text>\n";
  os << "<text x=\"" << kPad + 8 << "\" y=\"" << kPad - 12 << "\" font-size=\"12\">U (solid), ironed U (dashed), max "
     << format_number(top) << "</text>\n";
  os << "</svg>\n";
  return os.str();
}

CsvTable runs_table(const std::vector<RunRow>& rows) {
  CsvTable t({"trial", "chosen", "total_residual", "total_residual_before_padding", "omniscient", "tests"});
  for (const auto& r : rows) {
    t.add_row({std::to_string(r.trial), join_subset(r.run.chosen), format_number(r.run.total_residual),
               format_number(r.run.total_residual_before_padding), format_number(r.omniscient),
               std::to_string(r.run.test_log.size())});
  }
  return t;
}

std::string runs_jsonl(const std::vector<RunRow>& rows) {
  std::string out;
  for (const auto& r : rows) {
    auto tests = nlohmann::json::array();
    for (const auto& t : r.run.test_log) {
      tests.push_back({{"pen", t.pen}, {"theta", t.theta}, {"success", t.signal == Signal::kSuccess}});
    }
    nlohmann::json j{{"trial", r.trial},
                     {"chosen", r.run.chosen},
                     {"chosen_before_padding", r.run.chosen_before_padding},
                     {"written", r.run.written},
                     {"tests", std::move(tests)}};
    out += j.dump() + "\n";
  }
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

}  // namespace pentest
