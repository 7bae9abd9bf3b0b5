#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "lot/lorentz.hpp"

namespace lot {

// Finitely supported probability measure on R^{1,n-1}.
class DiscreteMeasure {
 public:
  DiscreteMeasure(std::vector<Event> points, std::vector<double> weights);

  std::size_t size() const { return points_.size(); }
  int dim() const { return static_cast<int>(points_[0].size()); }
  const Event& point(std::size_t i) const { return points_[i]; }
  double weight(std::size_t i) const { return weights_[i]; }
  const std::vector<Event>& points() const { return points_; }
  const std::vector<double>& weights() const { return weights_; }

  static DiscreteMeasure dirac(Event x);
  static DiscreteMeasure uniform(std::vector<Event> points);

 private:
  std::vector<Event> points_;
  std::vector<double> weights_;
};

// Joint plan between two finitely supported measures, stored densely.
class Coupling {
 public:
  Coupling(std::size_t rows, std::size_t cols);
  Coupling(std::size_t rows, std::size_t cols, std::vector<double> entries);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t j) const {
    return pi_[i * cols_ + j];
  }
  double& at(std::size_t i, std::size_t j) { return pi_[i * cols_ + j]; }
  const std::vector<double>& entries() const { return pi_; }

  double row_sum(std::size_t i) const;
  double col_sum(std::size_t j) const;
  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;

  // Largest deviation of the marginals from the given weights.
  double marginal_defect(const DiscreteMeasure& mu,
                         const DiscreteMeasure& nu) const;
  // Throws PreconditionError when the marginals miss by more than tol.
  void require_marginals(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                         double tol = 1e-10) const;

  static Coupling identity(const DiscreteMeasure& mu);
  static Coupling product(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> pi_;
};

// JSON measure files: {"points": [[t, x1, ...], ...], "weights": [...]}.
DiscreteMeasure load_measure(const std::string& path);
DiscreteMeasure parse_measure_json(const std::string& text);
std::string measure_to_json(const DiscreteMeasure& m);
void save_measure(const DiscreteMeasure& m, const std::string& path);

}  // namespace lot
