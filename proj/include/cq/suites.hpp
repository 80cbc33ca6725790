#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cq {

inline constexpr const char* kToolVersion = "0.1.0";

struct SuiteConfig {
  std::string suite;
  std::vector<double> hbar;  // empty: suite default
  int dim = 0;               // 0: suite default
  int grid_n = 0;
  double grid_l = 0.0;
  int samples = 0;
  unsigned seed = 1;
  std::map<std::string, double> tol;
  std::string report;
  std::string format = "json";
  std::vector<std::string> only;  // check-name prefixes to keep; empty keeps all
};

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string method;     // derivative-method tag, empty when not applicable
  bool control = false;   // negative control: passes when the residual exceeds the tolerance
  std::string error;
  bool operator==(const CheckResult&) const = default;
};

struct VerificationReport {
  std::string suite;
  std::map<std::string, std::string> params;
  std::vector<CheckResult> checks;
  long long runtime_ms = 0;
  std::string version = kToolVersion;
  bool pass() const;
  bool operator==(const VerificationReport&) const = default;
};

struct CheckSpec {
  std::string name;
  double tolerance = 0.0;
  std::string method;
  bool control = false;
  std::function<double()> run;
};

struct SuiteInfo {
  std::string name;
  std::string description;
  std::function<std::vector<CheckSpec>(const SuiteConfig&, std::map<std::string, std::string>&)> build;
};

const std::vector<SuiteInfo>& suite_registry();
const SuiteInfo* find_suite(const std::string& name);

// Unknown suite names and unknown tolerance keys raise UsageError.
VerificationReport run_suite(const SuiteConfig& cfg);

}  // namespace cq
