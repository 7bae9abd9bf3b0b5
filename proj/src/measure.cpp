#include "lot/measure.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lot/errors.hpp"

namespace lot {

DiscreteMeasure::DiscreteMeasure(std::vector<Event> points,
                                 std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
  require(!points_.empty(), "measure needs at least one atom");
  require(points_.size() == weights_.size(),
          "points/weights length mismatch");
  const std::size_t dim = points_[0].size();
  require(dim >= 2, "events need dimension >= 2");
  double total = 0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    require(points_[i].size() == dim, "mixed event dimensions");
    for (double c : points_[i])
      require(std::isfinite(c), "event has non-finite coordinate");
    require(weights_[i] > 0.0, "weights must be positive");
    total += weights_[i];
  }
  require(std::abs(total - 1.0) <= 1e-12, "weights must sum to 1");
  for (std::size_t i = 0; i < points_.size(); ++i)
    for (std::size_t j = i + 1; j < points_.size(); ++j)
      require(points_[i] != points_[j], "atoms must be pairwise distinct");
}

DiscreteMeasure DiscreteMeasure::dirac(Event x) {
  return DiscreteMeasure({std::move(x)}, {1.0});
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Event> points) {
  const std::size_t n = points.size();
  require(n > 0, "measure needs at least one atom");
  // Weights k/n summed in order can miss 1 by an ulp; normalize the tail.
  std::vector<double> w(n, 1.0 / static_cast<double>(n));
  double partial = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) partial += w[i];
  w[n - 1] = 1.0 - partial;
  return DiscreteMeasure(std::move(points), std::move(w));
}

Coupling::Coupling(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), pi_(rows * cols, 0.0) {
  require(rows > 0 && cols > 0, "coupling needs positive shape");
}

Coupling::Coupling(std::size_t rows, std::size_t cols,
                   std::vector<double> entries)
    : rows_(rows), cols_(cols), pi_(std::move(entries)) {
  require(rows > 0 && cols > 0, "coupling needs positive shape");
  require(pi_.size() == rows * cols, "coupling entries shape mismatch");
  for (double v : pi_) require(v >= 0.0, "coupling entries must be >= 0");
}

double Coupling::row_sum(std::size_t i) const {
  double s = 0;
  for (std::size_t j = 0; j < cols_; ++j) s += pi_[i * cols_ + j];
  return s;
}

double Coupling::col_sum(std::size_t j) const {
  double s = 0;
  for (std::size_t i = 0; i < rows_; ++i) s += pi_[i * cols_ + j];
  return s;
}

std::vector<double> Coupling::row_sums() const {
  std::vector<double> out(rows_);
  for (std::size_t i = 0; i < rows_; ++i) out[i] = row_sum(i);
  return out;
}

std::vector<double> Coupling::col_sums() const {
  std::vector<double> out(cols_);
  for (std::size_t j = 0; j < cols_; ++j) out[j] = col_sum(j);
  return out;
}

double Coupling::marginal_defect(const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu) const {
  require(rows_ == mu.size() && cols_ == nu.size(),
          "coupling shape does not match the marginals");
  double defect = 0;
  for (std::size_t i = 0; i < rows_; ++i)
    defect = std::max(defect, std::abs(row_sum(i) - mu.weight(i)));
  for (std::size_t j = 0; j < cols_; ++j)
    defect = std::max(defect, std::abs(col_sum(j) - nu.weight(j)));
  return defect;
}

void Coupling::require_marginals(const DiscreteMeasure& mu,
                                 const DiscreteMeasure& nu, double tol) const {
  const double defect = marginal_defect(mu, nu);
  if (defect > tol) {
    std::ostringstream os;
    os << "coupling marginals off by " << defect << " (tol " << tol << ")";
    throw PreconditionError(os.str());
  }
}

Coupling Coupling::identity(const DiscreteMeasure& mu) {
  Coupling pi(mu.size(), mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) pi.at(i, i) = mu.weight(i);
  return pi;
}

Coupling Coupling::product(const DiscreteMeasure& mu,
                           const DiscreteMeasure& nu) {
  Coupling pi(mu.size(), nu.size());
  for (std::size_t i = 0; i < mu.size(); ++i)
    for (std::size_t j = 0; j < nu.size(); ++j)
      pi.at(i, j) = mu.weight(i) * nu.weight(j);
  return pi;
}

DiscreteMeasure parse_measure_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure file: invalid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("points") || !doc.contains("weights"))
    throw ConfigError("measure file: expected {\"points\": ..., \"weights\": ...}");
  std::vector<Event> points;
  std::vector<double> weights;
  try {
    for (const auto& row : doc.at("points"))
      points.push_back(row.get<std::vector<double>>());
    weights = doc.at("weights").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("measure file: bad field: ") + e.what());
  }
  try {
    return DiscreteMeasure(std::move(points), std::move(weights));
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("measure file: ") + e.what());
  }
}

DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open measure file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_measure_json(buf.str());
}

std::string measure_to_json(const DiscreteMeasure& m) {
  nlohmann::ordered_json doc;
  doc["points"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.size(); ++i) doc["points"].push_back(m.point(i));
  doc["weights"] = m.weights();
  return doc.dump(2);
}

void save_measure(const DiscreteMeasure& m, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write measure file: " + path);
  out << measure_to_json(m) << '\n';
}

}  // namespace lot
