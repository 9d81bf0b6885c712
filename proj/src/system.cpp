#include "risr/system.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <queue>
#include <sstream>

#include "json.hpp"

namespace risr {

namespace {

using nlohmann::json;

double require_number(const json& obj, const std::string& key,
                      const std::string& where) {
  if (!obj.contains(key))
    throw ScenarioError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ScenarioError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

double optional_number(const json& obj, const std::string& key, double fallback,
                       const std::string& where) {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number())
    throw ScenarioError(where + ": field '" + key + "' must be a number");
  return v.get<double>();
}

int require_int(const json& obj, const std::string& key,
                const std::string& where) {
  if (!obj.contains(key))
    throw ScenarioError(where + ": missing field '" + key + "'");
  const auto& v = obj.at(key);
  if (!v.is_number_integer())
    throw ScenarioError(where + ": field '" + key + "' must be an integer");
  return v.get<int>();
}

void check_connected(int n, const std::vector<TieLine>& ties) {
  if (n <= 1) return;
  std::vector<std::vector<int>> adj(n);
  for (const auto& t : ties) {
    adj[t.from].push_back(t.to);
    adj[t.to].push_back(t.from);
  }
  std::vector<char> seen(n, 0);
  std::queue<int> q;
  q.push(0);
  seen[0] = 1;
  int count = 1;
  while (!q.empty()) {
    int u = q.front();
    q.pop();
    for (int v : adj[u])
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        q.push(v);
      }
  }
  if (count != n)
    throw ScenarioError("tie_lines: graph is not connected (" +
                        std::to_string(count) + " of " + std::to_string(n) +
                        " regions reachable)");
}

}  // namespace

MultiRegionSystem::MultiRegionSystem(std::vector<Region> regions,
                                     std::vector<TieLine> ties,
                                     double nominal_freq_hz, double base_mva,
                                     bool allow_nonstandard_freq)
    : regions_(std::move(regions)),
      ties_(std::move(ties)),
      nominal_freq_hz_(nominal_freq_hz),
      base_mva_(base_mva) {
  if (regions_.empty()) throw ScenarioError("regions: array must be non-empty");
  if (!(base_mva_ > 0.0)) throw ScenarioError("base_mva: must be positive");
  if (!(nominal_freq_hz_ > 0.0))
    throw ScenarioError("nominal_freq_hz: must be positive");
  if (!allow_nonstandard_freq && nominal_freq_hz_ != 50.0 &&
      nominal_freq_hz_ != 60.0)
    throw ScenarioError(
        "nominal_freq_hz: expected 50 or 60 (set allow_nonstandard_freq to "
        "override)");

  std::sort(regions_.begin(), regions_.end(),
            [](const Region& a, const Region& b) { return a.id < b.id; });
  const int n = static_cast<int>(regions_.size());
  for (int i = 0; i < n; ++i) {
    const Region& r = regions_[i];
    const std::string where = "regions[id=" + std::to_string(r.id) + "]";
    if (r.id != i)
      throw ScenarioError("regions: ids must be dense 0.." +
                          std::to_string(n - 1) + ", got id " +
                          std::to_string(r.id));
    if (!(r.inertia > 0.0)) throw ScenarioError(where + ": inertia_s must be positive");
    if (r.inertia_lo < 0.0 || r.inertia_up < r.inertia_lo)
      throw ScenarioError(where + ": inertia range must satisfy 0 <= lo <= up");
    if (r.damping < 0.0)
      throw ScenarioError(where + ": damping_pu must be non-negative");
  }
  for (const auto& t : ties_) {
    const std::string where = "tie_lines[" + std::to_string(t.from) + "-" +
                              std::to_string(t.to) + "]";
    if (t.from < 0 || t.from >= n || t.to < 0 || t.to >= n)
      throw ScenarioError(where + ": region id out of range");
    if (t.from == t.to)
      throw ScenarioError(where + ": endpoints must differ");
    if (!(t.sync_coeff > 0.0))
      throw ScenarioError(where + ": sync_coeff_pu_per_rad must be positive");
  }
  check_connected(n, ties_);
}

double MultiRegionSystem::omega0() const {
  return 2.0 * std::numbers::pi * nominal_freq_hz_;
}

Eigen::VectorXd MultiRegionSystem::inertia_vector() const {
  Eigen::VectorXd h(size());
  for (int i = 0; i < size(); ++i) h(i) = regions_[i].inertia;
  return h;
}

Eigen::VectorXd MultiRegionSystem::damping_vector() const {
  Eigen::VectorXd d(size());
  for (int i = 0; i < size(); ++i) d(i) = regions_[i].damping;
  return d;
}

Eigen::VectorXd MultiRegionSystem::disturbance_vector() const {
  Eigen::VectorXd p(size());
  for (int i = 0; i < size(); ++i) p(i) = regions_[i].disturbance;
  return p;
}

double MultiRegionSystem::total_inertia() const {
  return inertia_vector().sum();
}

double MultiRegionSystem::total_disturbance() const {
  return disturbance_vector().sum();
}

MultiRegionSystem MultiRegionSystem::with_inertia(
    const Eigen::VectorXd& h) const {
  if (h.size() != size())
    throw ScenarioError("with_inertia: vector length mismatch");
  std::vector<Region> rs = regions_;
  for (int i = 0; i < size(); ++i) {
    if (!(h(i) > 0.0))
      throw ScenarioError("with_inertia: inertia must stay positive");
    rs[i].inertia = h(i);
  }
  return MultiRegionSystem(rs, ties_, nominal_freq_hz_, base_mva_, true);
}

MultiRegionSystem load_scenario(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario: root must be an object");

  const double freq = require_number(doc, "nominal_freq_hz", "scenario");
  const double base = require_number(doc, "base_mva", "scenario");
  const bool allow = doc.value("allow_nonstandard_freq", false);

  if (!doc.contains("regions") || !doc.at("regions").is_array())
    throw ScenarioError("scenario: missing 'regions' array");
  std::vector<Region> regions;
  for (const auto& rj : doc.at("regions")) {
    Region r;
    r.id = require_int(rj, "id", "regions");
    const std::string where = "regions[id=" + std::to_string(r.id) + "]";
    r.inertia = require_number(rj, "inertia_s", where);
    r.inertia_lo = optional_number(rj, "inertia_lo_s", r.inertia, where);
    r.inertia_up = optional_number(rj, "inertia_up_s", r.inertia, where);
    r.damping = optional_number(rj, "damping_pu", 0.0, where);
    r.disturbance = optional_number(rj, "disturbance_pu", 0.0, where);
    regions.push_back(r);
  }

  std::vector<TieLine> ties;
  if (doc.contains("tie_lines")) {
    if (!doc.at("tie_lines").is_array())
      throw ScenarioError("scenario: 'tie_lines' must be an array");
    for (const auto& tj : doc.at("tie_lines")) {
      TieLine t;
      t.from = require_int(tj, "from", "tie_lines");
      t.to = require_int(tj, "to", "tie_lines");
      t.sync_coeff = require_number(tj, "sync_coeff_pu_per_rad", "tie_lines");
      ties.push_back(t);
    }
  }

  return MultiRegionSystem(std::move(regions), std::move(ties), freq, base,
                           allow);
}

MultiRegionSystem load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ScenarioError("scenario: cannot open file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_scenario(ss.str());
}

Eigen::MatrixXd stiffness_laplacian(const MultiRegionSystem& sys) {
  const int n = sys.size();
  Eigen::MatrixXd tl = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : sys.tie_lines()) {
    tl(t.from, t.to) -= t.sync_coeff;
    tl(t.to, t.from) -= t.sync_coeff;
    tl(t.from, t.from) += t.sync_coeff;
    tl(t.to, t.to) += t.sync_coeff;
  }
  return tl;
}

Eigen::MatrixXd synchronizing_matrix(const MultiRegionSystem& sys) {
  const Eigen::MatrixXd tl = stiffness_laplacian(sys);
  const Eigen::VectorXd h = sys.inertia_vector();
  Eigen::MatrixXd k = tl;
  for (int i = 0; i < sys.size(); ++i) k.row(i) /= -2.0 * h(i);
  return k;
}

StateSpace build_state_space(const MultiRegionSystem& sys) {
  const int n = sys.size();
  StateSpace ss;
  ss.n_regions = n;
  ss.omega0 = sys.omega0();
  ss.inertia = sys.inertia_vector();
  ss.damping = sys.damping_vector();
  ss.a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ss.b = Eigen::VectorXd::Zero(2 * n);

  const Eigen::MatrixXd k = synchronizing_matrix(sys);
  for (int i = 0; i < n; ++i) {
    ss.a(i, i) = -ss.damping(i) / (2.0 * ss.inertia(i));
    ss.b(i) = -sys.region(i).disturbance / (2.0 * ss.inertia(i));
  }
  ss.a.topRightCorner(n, n) = k;
  ss.a.bottomLeftCorner(n, n) =
      ss.omega0 * Eigen::MatrixXd::Identity(n, n);
  return ss;
}

double coi_critical_inertia(double total_disturbance, double rocof_lim) {
  if (!(rocof_lim > 0.0))
    throw ScenarioError("rocof_lim: must be positive");
  return std::abs(total_disturbance) / (2.0 * rocof_lim);
}

}  // namespace risr
