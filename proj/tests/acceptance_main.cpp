#include <exception>
#include <iostream>

#include "qpf/acceptance.hpp"
#include "qpf/dcpf.hpp"

// Runs the pinned validation suite against the bundled benchmark system and
// prints one PASS/FAIL line per criterion. Exit 0 when everything passes,
// 3 when any criterion fails, 2 on setup errors.
int main() {
  try {
    const qpf::ScaledDcSystem sys = qpf::scale_system(qpf::bundled_five_bus());
    const qpf::AcceptanceReport report = qpf::run_acceptance(sys);
    std::cout << qpf::format_acceptance(report);
    return report.all_passed ? 0 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
