#include "cssir/io.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

namespace cssir::io {

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

[[noreturn]] void parse_error(std::string_view source, std::size_t line, std::size_t column, const std::string& what) {
  std::ostringstream os;
  os << source << ": line " << line << ", column " << column << ": " << what;
  throw Error(ErrorKind::kParse, os.str());
}

Json matrix_columns(const Matrix& m) {
  Json cols = Json::array();
  for (Index k = 0; k < m.cols(); ++k) {
    Json col = Json::array();
    for (Index j = 0; j < m.rows(); ++j) col.push_back(m(j, k));
    cols.push_back(std::move(col));
  }
  return cols;
}

Json one_based(const std::vector<Index>& idx) {
  Json out = Json::array();
  for (Index j : idx) out.push_back(j + 1);
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  const int len = std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf, static_cast<std::size_t>(len));
}

std::string dataset_to_csv(const Dataset& data) {
  std::string out = "y";
  for (Index j = 0; j < data.d(); ++j) out += ",x" + std::to_string(j + 1);
  out += '\n';
  for (Index i = 0; i < data.n(); ++i) {
    out += format_double(data.y()(i));
    for (Index j = 0; j < data.d(); ++j) {
      out += ',';
      out += format_double(data.x()(i, j));
    }
    out += '\n';
  }
  return out;
}

Dataset parse_dataset_csv(std::string_view text, std::string_view source) {
  std::vector<std::string_view> lines = split(text, '\n');
  while (!lines.empty() && trim(lines.back()).empty()) lines.pop_back();
  if (lines.empty()) parse_error(source, 1, 1, "empty file");

  const auto header = split(trim(lines[0]), ',');
  if (trim(header[0]) != "y") parse_error(source, 1, 1, "first column must be named 'y'");
  const std::size_t d = header.size() - 1;
  if (d < 1) parse_error(source, 1, 2, "no covariate columns");
  for (std::size_t j = 1; j <= d; ++j) {
    if (trim(header[j]) != "x" + std::to_string(j)) {
      parse_error(source, 1, j + 1, "expected column name 'x" + std::to_string(j) + "'");
    }
  }

  const std::size_t n = lines.size() - 1;
  Vector y(static_cast<Index>(n));
  Matrix x(static_cast<Index>(n), static_cast<Index>(d));
  for (std::size_t r = 0; r < n; ++r) {
    const auto fields = split(trim(lines[r + 1]), ',');
    if (fields.size() != d + 1) {
      parse_error(source, r + 2, std::min(fields.size(), d + 1) + 1,
                  "expected " + std::to_string(d + 1) + " fields, found " + std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c <= d; ++c) {
      const std::string_view field = trim(fields[c]);
      double value = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size() || field.empty()) {
        parse_error(source, r + 2, c + 1, "cannot parse '" + std::string(field) + "' as a number");
      }
      if (c == 0) {
        y(static_cast<Index>(r)) = value;
      } else {
        x(static_cast<Index>(r), static_cast<Index>(c - 1)) = value;
      }
    }
  }
  return Dataset(std::move(y), std::move(x));
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::kIo, "write to " + path.string() + " failed");
}

Dataset read_dataset_csv(const std::filesystem::path& path) { return parse_dataset_csv(read_text(path), path.string()); }

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data) { write_text(path, dataset_to_csv(data)); }

Json truth_to_json(const GroundTruth& truth, const SimSpec& spec) {
  return Json{{"setting", spec.setting},
              {"n", spec.n},
              {"d", spec.d},
              {"seed", spec.seed},
              {"rng", Rng::kRngName},
              {"K", truth.k},
              {"support", one_based(truth.support)},
              {"directions", matrix_columns(truth.directions)}};
}

Json solver_config_to_json(const SolverConfig& cfg) {
  return Json{{"rho", cfg.rho}, {"K", cfg.k}, {"nu", cfg.nu}, {"epsilon", cfg.epsilon}, {"max_iter", cfg.max_iter}};
}

Json fit_to_json(const FitResult& fit) {
  Json diag = Json::array();
  for (Index j = 0; j < fit.pi_hat.dim(); ++j) diag.push_back(fit.pi_hat(j, j));
  Json eigenvalues = Json::array();
  for (Index k = 0; k < fit.eigenvalues.size(); ++k) eigenvalues.push_back(fit.eigenvalues(k));
  return Json{{"d", fit.pi_hat.dim()},
              {"K", fit.k},
              {"rho", fit.rho},
              {"support", one_based(fit.support)},
              {"pi_diagonal", std::move(diag)},
              {"eigenvalues", std::move(eigenvalues)},
              {"directions", matrix_columns(fit.directions)},
              {"convergence",
               Json{{"converged", fit.report.converged},
                    {"iterations", fit.report.iterations},
                    {"final_step_norm", fit.report.final_step_norm},
                    {"final_residual_norm", fit.report.final_residual_norm},
                    {"final_objective",
                     fit.report.objective_trace.empty() ? Json(nullptr) : Json(fit.report.objective_trace.back())}}}};
}

Json cv_to_json(const CvReport& report) {
  Json grid = Json::array();
  for (std::size_t g = 0; g < report.grid.size(); ++g) {
    grid.push_back(Json{{"K", report.grid[g].first},
                        {"rho", report.grid[g].second},
                        {"error", report.errors[g]},
                        {"fold_errors", report.fold_errors[g]}});
  }
  return Json{{"folds", report.folds},
              {"best", Json{{"K", report.best.first}, {"rho", report.best.second}}},
              {"grid", std::move(grid)}};
}

void write_pi_binary(const std::filesystem::path& path, const SymMatrix& pi) {
  static_assert(std::endian::native == std::endian::little, "binary dump assumes a little-endian host");
  std::string buf = "CSSIRPI1";
  const std::uint64_t d = static_cast<std::uint64_t>(pi.dim());
  buf.append(reinterpret_cast<const char*>(&d), sizeof(d));
  for (Index i = 0; i < pi.dim(); ++i) {
    for (Index j = 0; j < pi.dim(); ++j) {
      const double v = pi(i, j);
      buf.append(reinterpret_cast<const char*>(&v), sizeof(v));
    }
  }
  write_text(path, buf);
}

SymMatrix read_pi_binary(const std::filesystem::path& path) {
  const std::string buf = read_text(path);
  if (buf.size() < 16 || buf.compare(0, 8, "CSSIRPI1") != 0) throw Error(ErrorKind::kParse, path.string() + ": bad magic");
  std::uint64_t d = 0;
  std::memcpy(&d, buf.data() + 8, sizeof(d));
  if (d == 0 || buf.size() != 16 + d * d * sizeof(double)) throw Error(ErrorKind::kParse, path.string() + ": bad size");
  Matrix m(static_cast<Index>(d), static_cast<Index>(d));
  const char* p = buf.data() + 16;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j, p += sizeof(double)) std::memcpy(&m(i, j), p, sizeof(double));
  }
  return SymMatrix(m);
}

std::string replicate_table_csv(const ReplicateTable& table) {
  std::set<std::string> names;
  for (const auto& row : table.rows) {
    for (const auto& [name, value] : row.metrics) names.insert(name);
  }
  std::string out = "replicate,seed,status";
  for (const auto& name : names) out += "," + name;
  out += '\n';
  for (const auto& row : table.rows) {
    out += std::to_string(row.index) + "," + std::to_string(row.seed) + "," + (row.failure ? "failed" : "ok");
    for (const auto& name : names) {
      out += ',';
      const auto it = row.metrics.find(name);
      if (it != row.metrics.end()) out += format_double(it->second);
    }
    out += '\n';
  }
  return out;
}

std::string summary_csv(const ReplicateTable& table) {
  std::string out = "metric,mean,se,count\n";
  for (const auto& [name, s] : table.summary) {
    out += name + "," + format_double(s.mean) + "," + (s.se ? format_double(*s.se) : std::string()) + "," +
           std::to_string(s.count) + "\n";
  }
  return out;
}

std::string scaling_csv(const std::vector<ScalingPoint>& points) {
  std::string out = "d,n,x,mean_distance,se,replicates\n";
  for (const auto& p : points) {
    out += std::to_string(p.d) + "," + std::to_string(p.n) + "," + format_double(p.x) + "," + format_double(p.mean) +
           "," + format_double(p.se) + "," + std::to_string(p.replicates) + "\n";
  }
  return out;
}

}  // namespace cssir::io
