#include "iocforge/estimate.hpp"

#include <fstream>
#include <map>
#include <sstream>
#include <vector>

#include "iocforge/errors.hpp"
#include "text_format.hpp"

namespace iocforge {

std::string to_string(SolverTag tag) {
  switch (tag) {
    case SolverTag::kNoiselessVanilla: return "noiseless-vanilla";
    case SolverTag::kNoisyVanilla: return "noisy-vanilla";
    case SolverTag::kNoiselessSimplified: return "noiseless-simplified";
    case SolverTag::kNoisySimplified: return "noisy-simplified";
  }
  throw std::logic_error("unknown solver tag");
}

SolverTag parse_solver_tag(const std::string& text) {
  if (text == "noiseless-vanilla") return SolverTag::kNoiselessVanilla;
  if (text == "noisy-vanilla") return SolverTag::kNoisyVanilla;
  if (text == "noiseless-simplified") return SolverTag::kNoiselessSimplified;
  if (text == "noisy-simplified") return SolverTag::kNoisySimplified;
  throw std::runtime_error("unknown solver tag: " + text);
}

namespace {

std::string row_major_values(const Mat& M) {
  std::string out;
  for (Index i = 0; i < M.rows(); ++i) {
    for (Index j = 0; j < M.cols(); ++j) {
      if (!out.empty()) out += ' ';
      out += detail::format_double(M(i, j));
    }
  }
  return out;
}

std::vector<double> parse_values(const std::string& text) {
  std::stringstream stream(text);
  std::vector<double> values;
  double x;
  while (stream >> x) values.push_back(x);
  return values;
}

}  // namespace

void write_weight_estimate(const WeightEstimate& estimate, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << "solver_tag: " << to_string(estimate.tag) << "\n";
  out << "Q_dim: " << estimate.Q_hat.rows() << "\n";
  out << "Q: " << row_major_values(estimate.Q_hat) << "\n";
  out << "R_dim: " << estimate.R_hat.rows() << "\n";
  out << "R: " << row_major_values(estimate.R_hat) << "\n";
  if (estimate.lambda_ini) {
    out << "lambda_ini: " << row_major_values(estimate.lambda_ini->transpose()) << "\n";
  }
  if (estimate.alpha) {
    out << "alpha: " << detail::format_double(*estimate.alpha) << "\n";
  }
  out << "residual: " << detail::format_double(estimate.residual) << "\n";
}

WeightEstimate read_weight_estimate(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::map<std::string, std::string> fields;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::runtime_error("malformed line in " + path.string() + ": " + line);
    }
    std::string key = line.substr(0, colon);
    std::string value = line.substr(colon + 1);
    if (!value.empty() && value.front() == ' ') value.erase(0, 1);
    fields[key] = value;
  }
  auto required = [&](const std::string& key) -> const std::string& {
    auto it = fields.find(key);
    if (it == fields.end()) {
      throw std::runtime_error("missing field '" + key + "' in " + path.string());
    }
    return it->second;
  };

  WeightEstimate estimate;
  estimate.tag = parse_solver_tag(required("solver_tag"));
  const Index qd = std::stol(required("Q_dim"));
  const Index rd = std::stol(required("R_dim"));
  auto fill = [&](const std::string& key, Index dim) {
    const auto values = parse_values(required(key));
    if (static_cast<Index>(values.size()) != dim * dim) {
      throw std::runtime_error("field '" + key + "' has wrong element count in " + path.string());
    }
    Mat M(dim, dim);
    for (Index i = 0; i < dim; ++i) {
      for (Index j = 0; j < dim; ++j) M(i, j) = values[i * dim + j];
    }
    return M;
  };
  estimate.Q_hat = fill("Q", qd);
  estimate.R_hat = fill("R", rd);
  if (fields.count("lambda_ini")) {
    const auto values = parse_values(fields["lambda_ini"]);
    Vec lam(static_cast<Index>(values.size()));
    for (Index i = 0; i < lam.size(); ++i) lam[i] = values[i];
    estimate.lambda_ini = lam;
  }
  if (fields.count("alpha")) estimate.alpha = std::stod(fields["alpha"]);
  estimate.residual = std::stod(required("residual"));
  return estimate;
}

}  // namespace iocforge
