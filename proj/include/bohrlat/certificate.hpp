#pragma once

#include <algorithm>
#include <string>
#include <vector>

namespace bohrlat {

/// One verified identity.
struct Check {
  std::string name;
  bool pass = false;
  double deviation = 0.0;
  std::string detail;
};

/// The identities a reconstruction verified, in the order checked.
struct Certificate {
  std::vector<Check> checks;

  void add(std::string name, bool pass, double deviation = 0.0, std::string detail = {}) {
    checks.push_back({std::move(name), pass, deviation, std::move(detail)});
  }

  void append(const Certificate& other, const std::string& prefix = {}) {
    for (const auto& c : other.checks) {
      checks.push_back({prefix + c.name, c.pass, c.deviation, c.detail});
    }
  }

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }

  const Check* first_failure() const {
    for (const auto& c : checks)
      if (!c.pass) return &c;
    return nullptr;
  }
};

}  // namespace bohrlat
