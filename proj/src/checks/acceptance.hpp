#pragma once

// The acceptance suite: eleven end-to-end checks with pinned tolerances. Run
// by tests/acceptance and by `prism selftest`.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "prism/upsample.hpp"

namespace prism::acceptance {

struct CheckResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

using CliRunner = std::function<int(const std::vector<std::string>& args)>;

struct Config {
  SharpenMode mode = SharpenMode::Progressive;
  std::uint64_t seed = 0x5eed2021;
  // Breaks the duplicate-image check on purpose (selftest harness check).
  bool inject_fault = false;
  // Needed by the CLI determinism part of the format check.
  CliRunner run_cli;
  // Scratch space for files; created and removed by run_all.
  std::filesystem::path scratch;
};

std::vector<CheckResult> run_all(const Config& config);

// "PASS [n] name: detail" / "FAIL [n] name: detail"
std::string format(const CheckResult& r);

}  // namespace prism::acceptance
