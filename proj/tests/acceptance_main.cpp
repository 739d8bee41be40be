// Runs the acceptance criteria named on the command line (default: all).

#include <spdlog/spdlog.h>

#include <cstdlib>
#include <iostream>
#include <string>

#include "checks/acceptance.hpp"

int main(int argc, char** argv) {
  spdlog::set_level(spdlog::level::err);
  std::vector<int> ids;
  for (int i = 1; i < argc; ++i) ids.push_back(std::stoi(argv[i]));
  if (ids.empty()) ids = distrel::checks::all_criteria();
  return distrel::checks::run_criteria(ids, std::cout) ? EXIT_SUCCESS : EXIT_FAILURE;
}
