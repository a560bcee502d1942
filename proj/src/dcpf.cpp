#include "qpf/dcpf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "qpf/errors.hpp"

namespace qpf {

namespace {

using json = nlohmann::json;

void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw validation_error("unknown key '" + it.key() + "' in " + where);
}

double require_number(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw validation_error("missing key '" + key + "' in " + where);
  if (!obj[key].is_number()) throw validation_error("key '" + key + "' in " + where + " must be a number");
  return obj[key].get<double>();
}

int require_int(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw validation_error("missing key '" + key + "' in " + where);
  if (!obj[key].is_number_integer()) throw validation_error("key '" + key + "' in " + where + " must be an integer");
  return obj[key].get<int>();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot open file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

GridModel load_grid_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw validation_error(std::string("grid document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw validation_error("grid document root must be an object");
  reject_unknown_keys(doc, {"buses", "branches"}, "grid document root");
  if (!doc.contains("buses") || !doc["buses"].is_array())
    throw validation_error("grid document needs a 'buses' array");
  if (!doc.contains("branches") || !doc["branches"].is_array())
    throw validation_error("grid document needs a 'branches' array");

  GridModel g;
  std::set<int> seen_ids;
  int slack_count = 0;
  std::size_t idx = 0;
  for (const auto& jb : doc["buses"]) {
    const std::string where = "buses[" + std::to_string(idx++) + "]";
    if (!jb.is_object()) throw validation_error(where + " must be an object");
    reject_unknown_keys(jb, {"id", "type", "p"}, where);
    Bus bus;
    bus.id = require_int(jb, "id", where);
    if (!jb.contains("type") || !jb["type"].is_string())
      throw validation_error("missing or non-string 'type' in " + where);
    const std::string t = jb["type"].get<std::string>();
    if (t == "slack")
      bus.type = BusType::slack;
    else if (t == "pq")
      bus.type = BusType::pq;
    else if (t == "pv")
      bus.type = BusType::pv;
    else
      throw validation_error("bus type '" + t + "' in " + where + " must be slack|pq|pv");
    bus.p = require_number(jb, "p", where);
    if (!seen_ids.insert(bus.id).second)
      throw validation_error("duplicate bus id " + std::to_string(bus.id) + " at " + where);
    if (bus.type == BusType::slack) ++slack_count;
    g.buses.push_back(bus);
  }
  idx = 0;
  for (const auto& jb : doc["branches"]) {
    const std::string where = "branches[" + std::to_string(idx++) + "]";
    if (!jb.is_object()) throw validation_error(where + " must be an object");
    reject_unknown_keys(jb, {"from", "to", "x"}, where);
    Branch br;
    br.from = require_int(jb, "from", where);
    br.to = require_int(jb, "to", where);
    br.x = require_number(jb, "x", where);
    if (!seen_ids.count(br.from) || !seen_ids.count(br.to))
      throw validation_error(where + " references an undeclared bus");
    if (br.from == br.to) throw validation_error(where + " connects a bus to itself");
    if (!(br.x > 0.0)) throw validation_error(where + " has nonpositive reactance");
    g.branches.push_back(br);
  }
  if (slack_count != 1)
    throw validation_error("grid must declare exactly one slack bus (found " +
                           std::to_string(slack_count) + ")");
  return g;
}

GridModel load_grid_file(const std::string& path) { return load_grid_text(read_file(path)); }

DcSystem build_b_matrix(const GridModel& g) {
  if (g.buses.empty()) throw validation_error("grid has no buses");
  // whole-network connectivity: every non-slack bus must reach the slack
  // through branches, otherwise the reduced matrix is singular
  std::map<int, std::size_t> pos;
  for (std::size_t i = 0; i < g.buses.size(); ++i) pos[g.buses[i].id] = i;
  std::vector<std::vector<std::size_t>> adj(g.buses.size());
  for (const auto& br : g.branches) {
    adj[pos.at(br.from)].push_back(pos.at(br.to));
    adj[pos.at(br.to)].push_back(pos.at(br.from));
  }
  std::vector<char> seen(g.buses.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i = 0; i < g.buses.size(); ++i)
    if (g.buses[i].type == BusType::slack) {
      stack.push_back(i);
      seen[i] = 1;
    }
  while (!stack.empty()) {
    std::size_t i = stack.back();
    stack.pop_back();
    for (std::size_t j : adj[i])
      if (!seen[j]) {
        seen[j] = 1;
        stack.push_back(j);
      }
  }
  for (std::size_t i = 0; i < g.buses.size(); ++i)
    if (!seen[i])
      throw validation_error("bus " + std::to_string(g.buses[i].id) +
                             " is disconnected from the slack after slack removal");

  std::vector<int> keep;
  for (const auto& bus : g.buses)
    if (bus.type != BusType::slack) keep.push_back(bus.id);
  std::sort(keep.begin(), keep.end());
  std::map<int, std::size_t> row;
  for (std::size_t i = 0; i < keep.size(); ++i) row[keep[i]] = i;

  const std::size_t n = keep.size();
  if (n == 0) throw validation_error("grid has no non-slack buses");
  std::vector<double> a(n * n, 0.0);
  for (const auto& br : g.branches) {
    const double y = 1.0 / br.x;
    auto fi = row.find(br.from), ti = row.find(br.to);
    if (fi != row.end()) a[fi->second * n + fi->second] += y;
    if (ti != row.end()) a[ti->second * n + ti->second] += y;
    if (fi != row.end() && ti != row.end()) {
      a[fi->second * n + ti->second] -= y;
      a[ti->second * n + fi->second] -= y;
    }
  }
  DcSystem d;
  d.b = SymMatrix(n, std::move(a));
  d.p.resize(n);
  for (const auto& bus : g.buses)
    if (bus.type != BusType::slack) d.p[row[bus.id]] = bus.p;
  d.bus_order = keep;
  return d;
}

DcSystem load_matrix_text(const std::string& text) {
  std::vector<Vec> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
    Vec row;
    std::istringstream ls(line);
    double v;
    while (ls >> v) row.push_back(v);
    if (!ls.eof())
      throw validation_error("matrix fixture line " + std::to_string(lineno) + " has a non-numeric token");
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2) throw validation_error("matrix fixture needs N matrix rows plus one injection row");
  const std::size_t n = rows.front().size();
  if (rows.size() != n + 1)
    throw validation_error("matrix fixture must have exactly " + std::to_string(n) +
                           " matrix rows followed by one injection row");
  for (std::size_t i = 0; i < n; ++i)
    if (rows[i].size() != n)
      throw validation_error("matrix fixture row " + std::to_string(i + 1) + " has " +
                             std::to_string(rows[i].size()) + " entries, expected " + std::to_string(n));
  if (rows[n].size() != n)
    throw validation_error("matrix fixture injection row has " + std::to_string(rows[n].size()) +
                           " entries, expected " + std::to_string(n));
  std::vector<double> a;
  a.reserve(n * n);
  for (std::size_t i = 0; i < n; ++i) a.insert(a.end(), rows[i].begin(), rows[i].end());
  DcSystem d;
  d.b = SymMatrix(n, std::move(a));
  d.p = rows[n];
  d.bus_order.resize(n);
  for (std::size_t i = 0; i < n; ++i) d.bus_order[i] = static_cast<int>(i + 1);
  return d;
}

DcSystem load_matrix_file(const std::string& path) { return load_matrix_text(read_file(path)); }

ScaledDcSystem scale_system(const DcSystem& d) {
  ScaledDcSystem sys;
  sys.dimension = d.b.n;
  sys.n_bottom = 0;
  while ((1ull << sys.n_bottom) < sys.dimension) ++sys.n_bottom;
  if (sys.n_bottom == 0) sys.n_bottom = 1;  // a register needs at least one qubit

  const double bound = gershgorin_bound(d.b);
  int s = static_cast<int>(std::ceil(std::log2(std::max(bound, 1e-300))));
  s = std::max(s, 0);
  sys.scale_exponent = s;
  std::vector<double> a = d.b.a;
  const double f = std::ldexp(1.0, -s);
  for (double& v : a) v *= f;
  sys.b_scaled = SymMatrix(d.b.n, std::move(a));

  SpectralDecomposition sd = eigh(sys.b_scaled);
  for (std::size_t j = 0; j < sd.dim(); ++j)
    if (!(sd.eigenvalues[j] > 0.0))
      throw numerical_error("matrix is not positive definite: eigenvalue " + std::to_string(j) +
                            " = " + std::to_string(sd.eigenvalues[j]));

  const double pn = norm2(d.p);
  if (pn == 0.0) throw validation_error("injection vector is zero");
  sys.c_p = 1.0 / pn;
  sys.p = d.p;
  for (double& v : sys.p) v *= sys.c_p;
  sys.spectral = with_projections(sd, sys.p);

  ClassicalReference ref = classical_reference(d);
  sys.classical_theta = ref.theta;
  sys.classical_normalized = ref.normalized;
  return sys;
}

ClassicalReference classical_reference(const DcSystem& d) {
  ClassicalReference ref;
  ref.theta = lu_solve(d.b, d.p);
  ref.normalized = normalized(ref.theta);
  return ref;
}

double relative_error(const Vec& estimate, const Vec& reference) {
  if (estimate.size() != reference.size()) throw validation_error("relative_error dimension mismatch");
  const double rn = norm2(reference);
  if (rn == 0.0) throw validation_error("relative_error against a zero reference");
  double s = 0.0;
  for (std::size_t i = 0; i < estimate.size(); ++i) {
    const double dlt = estimate[i] - reference[i];
    s += dlt * dlt;
  }
  return std::sqrt(s) / rn;
}

DcSystem bundled_five_bus() {
  DcSystem d;
  d.b = SymMatrix(4, {224.7319, -35.5872, 0.0,      -156.25,  //
                      -35.5872, 128.1798, -92.5926, 0.0,      //
                      0.0,      -92.5926, 126.2626, 0.0,      //
                      -156.25,  0.0,      0.0,      189.92});
  d.p = {-0.1113, -0.2623, 0.3169, 0.9046};
  d.bus_order = {1, 2, 3, 4};
  return d;
}

}  // namespace qpf
