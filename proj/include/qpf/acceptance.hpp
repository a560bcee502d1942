#pragma once

#include <string>
#include <vector>

#include "qpf/dcpf.hpp"

namespace qpf {

struct AcceptanceItem {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string details;  // observed vs expected
};

struct AcceptanceReport {
  std::vector<AcceptanceItem> items;
  bool all_passed = false;
};

// The pinned end-to-end validation suite for the bundled 5-bus system:
// reference solutions, bit strings, error levels, branch statistics, resource
// counts, engine equivalences, and error-trend behavior. Deterministic
// (fixed seeds), runs in a few minutes.
AcceptanceReport run_acceptance(const ScaledDcSystem& sys);

// One "[PASS]/[FAIL] <id>. <name>: <details>" line per item plus a summary.
std::string format_acceptance(const AcceptanceReport& report);

}  // namespace qpf
