#pragma once

// Deterministic property suites, one per acceptance criterion, producing
// JSON reports whose failing checks carry reproducing witnesses.

#include <cstdint>
#include <string>
#include <vector>

#include "prismkit/ring.hpp"

namespace prismkit {

struct RunConfig {
  std::vector<i64> primes{2, 3};
  int N = 6, M = 8, Q = 16, depth = 1;
  std::uint64_t seed = 0;
  // Overrides the per-suite sample counts when positive.
  int samples = 0;
};

json to_json(const RunConfig& c);

// Collects checks; advisory checks are reported but do not decide the verdict.
class SuiteReport {
 public:
  explicit SuiteReport(std::string name) : name_(std::move(name)) {}
  void add(const std::string& id, bool pass, json witness = nullptr, bool required = true);
  bool ok() const;
  bool strict_ok() const;
  json to_json() const;

 private:
  std::string name_;
  json checks_ = json::array();
};

const std::vector<std::string>& suite_names();
// Seed of a named suite, derived from the run seed by hashing the name.
std::uint64_t suite_seed(std::uint64_t seed, const std::string& name);
SuiteReport run_suite(const std::string& name, const RunConfig& cfg);
// {"schema": "1", "config", "suites", "summary"} over the listed suites.
json run_suites(const std::vector<std::string>& names, const RunConfig& cfg);
bool report_ok(const json& report, bool strict = false);

}  // namespace prismkit
