#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace distrel::checks {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
};

// 1..10 are the acceptance criteria; 11 is the runtime comparison against a
// full-data l1-QR solve.
std::vector<int> all_criteria();

// The ones that finish in well under a minute.
std::vector<int> fast_criteria();

CriterionResult run_criterion(int id);

// Prints one PASS/FAIL line per criterion; true iff all pass.
bool run_criteria(const std::vector<int>& ids, std::ostream& out);

}  // namespace distrel::checks
