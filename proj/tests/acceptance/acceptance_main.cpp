// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <filesystem>
#include <iostream>
#include <sstream>

#include "acceptance.hpp"
#include "prism/cli.hpp"

int main() {
  prism::acceptance::Config cfg;
  cfg.run_cli = [](const std::vector<std::string>& args) {
    std::ostringstream out;
    std::ostringstream err;
    const int rc = prism::cli::run(args, out, err);
    if (rc != 0) std::cerr << err.str();
    return rc;
  };
  cfg.scratch = std::filesystem::temp_directory_path() / "prism-acceptance-suite";

  bool all = true;
  for (const auto& r : prism::acceptance::run_all(cfg)) {
    std::cout << prism::acceptance::format(r) << "\n";
    all = all && r.passed;
  }
  std::cout << (all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED") << "\n";
  return all ? 0 : 1;
}
