#pragma once

#include <string>
#include <vector>

#include "qpf/linalg.hpp"

namespace qpf {

enum class BusType { slack, pq, pv };

struct Bus {
  int id = 0;
  BusType type = BusType::pq;
  double p = 0.0;  // net active injection, per-unit
};

struct Branch {
  int from = 0;
  int to = 0;
  double x = 0.0;  // reactance, per-unit
};

struct GridModel {
  std::vector<Bus> buses;
  std::vector<Branch> branches;
};

// Reduced DC system: susceptance matrix with the slack row/column removed.
struct DcSystem {
  SymMatrix b;
  Vec p;                        // injections of the retained buses
  std::vector<int> bus_order;   // bus ids, in matrix row order
};

// Rescaled system with spectrum in (0,1) plus everything downstream needs:
// the spectral decomposition (projections against the unit-norm injection
// vector) and the classical reference solution.
struct ScaledDcSystem {
  SymMatrix b_scaled;            // B * 2^-s
  Vec p;                         // C_p * P, unit norm
  int scale_exponent = 0;        // s
  double c_p = 1.0;              // 1 / ||P||
  std::size_t dimension = 0;     // N
  int n_bottom = 0;              // ceil(log2 N)
  SpectralDecomposition spectral;  // of b_scaled, projections vs `p`
  Vec classical_theta;           // lu_solve(B, P), physical units
  Vec classical_normalized;      // theta / ||theta||
};

// Parses the JSON grid document (top-level keys `buses` and `branches` only;
// unknown keys anywhere are rejected with a field-precise diagnostic).
GridModel load_grid_text(const std::string& text);
GridModel load_grid_file(const std::string& path);

// B_ij = -1/x_ij per branch, B_ii = sum_k 1/x_ik, slack row/column removed.
DcSystem build_b_matrix(const GridModel& g);

// Plain-text fixture: N lines of N matrix entries, then one line with the N
// injection values, whitespace-separated.
DcSystem load_matrix_text(const std::string& text);
DcSystem load_matrix_file(const std::string& path);

// s = max(0, ceil(log2 Gershgorin)), checks positive definiteness, normalizes
// the injection vector, and precomputes spectra + classical reference.
ScaledDcSystem scale_system(const DcSystem& d);

struct ClassicalReference {
  Vec theta;
  Vec normalized;
};

ClassicalReference classical_reference(const DcSystem& d);

// ||estimate - reference|| / ||reference|| (Euclidean).
double relative_error(const Vec& estimate, const Vec& reference);

// The bundled 5-bus system (susceptance matrix + injections, slack removed).
DcSystem bundled_five_bus();

}  // namespace qpf
