#pragma once

#include <string>
#include <vector>

namespace lot::acceptance {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;  // one-line measured-numbers summary
  double seconds = 0.0;
};

// Runs the twelve release criteria in order and returns one result per
// criterion. Never throws: an escaped exception fails the criterion and its
// message lands in `detail`.
std::vector<CriterionResult> run_all();

}  // namespace lot::acceptance
