#include "dsfs/network.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "dsfs/errors.hpp"
#include "dsfs/lp.hpp"
#include "dsfs/rng.hpp"

namespace dsfs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double load_shape(double hour, const GeneratorParams& gp) {
  const double rise0 = gp.day_start;
  const double rise1 = gp.day_start + gp.ramp_hours;
  const double fall0 = gp.day_end;
  const double fall1 = gp.day_end + gp.ramp_hours;
  if (hour >= rise1 && hour < fall0) return 1.0;
  if (hour >= rise0 && hour < rise1)
    return gp.night_level + (1.0 - gp.night_level) * (hour - rise0) / gp.ramp_hours;
  if (hour >= fall0 && hour < fall1)
    return 1.0 - (1.0 - gp.night_level) * (hour - fall0) / gp.ramp_hours;
  return gp.night_level;
}

double pv_shape(double hour) {
  if (hour <= 6.0 || hour >= 18.0) return 0.0;
  return std::sin(std::numbers::pi * (hour - 6.0) / 12.0);
}

void validate_feeder(const FeederSpec& f) {
  if (f.buses < 1) throw InvalidConfig("feeder: needs at least one bus");
  if (f.horizon < 1) throw InvalidConfig("feeder: horizon must be positive");
  if (!(f.step_hours > 0)) throw InvalidConfig("feeder: step_hours must be positive");
  if (!(f.v_min <= f.v_nom && f.v_nom <= f.v_max))
    throw InvalidConfig("feeder: voltage limits must bracket v_nom");
  if (static_cast<int>(f.loads.size()) != f.buses)
    throw DimensionMismatch("feeder: one load profile per bus required");
  for (const auto& d : f.loads) {
    if (d.size() != f.horizon)
      throw DimensionMismatch("feeder: load profile length != horizon");
    if (!d.allFinite() || (d.array() < 0).any())
      throw InvalidConfig("feeder: loads must be finite and nonnegative");
  }
  for (const auto& l : f.lines) {
    if (l.from < 0 || l.from >= f.buses || l.to < 0 || l.to >= f.buses ||
        l.from == l.to)
      throw InvalidConfig("feeder: line endpoints out of range");
    if (!std::isfinite(l.resistance) || l.resistance < 0 ||
        !std::isfinite(l.reactance))
      throw InvalidConfig("feeder: line impedance invalid");
  }
}

void validate_ders(const std::vector<DerSpec>& ders, int buses, int steps) {
  if (ders.empty()) throw InvalidConfig("ders: at least one resource required");
  for (const auto& d : ders) {
    if (d.bus < 1 || d.bus >= buses)
      throw InvalidConfig("ders: resource bus must be a non-substation bus");
    if (d.p_min.size() != steps || d.p_max.size() != steps)
      throw DimensionMismatch("ders: per-step limits must match the horizon");
    if (!d.p_min.allFinite() || !d.p_max.allFinite())
      throw InvalidConfig("ders: per-step limits must be finite");
    if ((d.p_min.array() > d.p_max.array()).any())
      throw InvalidConfig("ders: p_min exceeds p_max");
    if (d.kind == DerKind::Battery) {
      if (!std::isfinite(d.e_min) || !std::isfinite(d.e_max) ||
          !std::isfinite(d.e_init) ||
          !(d.e_min <= d.e_init && d.e_init <= d.e_max))
        throw InvalidConfig("ders: battery content window must hold e_init");
    }
    if (d.kind == DerKind::EnergyCapped) {
      if (!std::isfinite(d.e_total_min) || !std::isfinite(d.e_total_max) ||
          d.e_total_min > d.e_total_max)
        throw InvalidConfig("ders: total-energy window is empty");
    }
  }
}

// True when every coordinate is capped above and below by a +/- unit row,
// which makes the polytope a subset of a finite box.
bool unit_rows_cap_everything(const Eigen::MatrixXd& w) {
  const int cols = static_cast<int>(w.cols());
  std::vector<char> above(cols, 0), below(cols, 0);
  for (int i = 0; i < w.rows(); ++i) {
    int nz = -1;
    bool unit = true;
    for (int j = 0; j < cols; ++j) {
      const double v = w(i, j);
      if (v == 0.0) continue;
      if (nz >= 0 || (v != 1.0 && v != -1.0)) {
        unit = false;
        break;
      }
      nz = j;
    }
    if (!unit || nz < 0) continue;
    (w(i, nz) > 0 ? above : below)[nz] = 1;
  }
  for (int j = 0; j < cols; ++j) {
    if (!above[j] || !below[j]) return false;
  }
  return true;
}

}  // namespace

std::string to_string(DerKind k) {
  switch (k) {
    case DerKind::Interval:
      return "interval";
    case DerKind::Battery:
      return "battery";
    case DerKind::EnergyCapped:
      return "energy_capped";
  }
  return "unknown";
}

CompactModel make_compact_model(Eigen::MatrixXd w, Eigen::VectorXd z,
                                Eigen::MatrixXd d, Eigen::VectorXd b,
                                int ders, int steps, int buses,
                                std::string meta) {
  if (ders < 1 || steps < 1)
    throw InvalidConfig("compact model: ders and steps must be positive");
  const int cols = ders * steps;
  if (w.cols() != cols || w.rows() != z.size())
    throw DimensionMismatch("compact model: W/z shapes inconsistent");
  if (d.rows() != steps || d.cols() != cols || b.size() != steps)
    throw DimensionMismatch("compact model: D/b shapes inconsistent");
  if (!w.allFinite() || !z.allFinite() || !d.allFinite() || !b.allFinite())
    throw InvalidConfig("compact model: non-finite entries");

  lp::Problem probe;
  probe.objective = Eigen::VectorXd::Zero(cols);
  probe.lower = Eigen::VectorXd::Constant(cols, -kInf);
  probe.upper = Eigen::VectorXd::Constant(cols, kInf);
  probe.ineq_a = w;
  probe.ineq_b = z;
  probe.eq_a.resize(0, cols);
  probe.eq_b.resize(0);
  if (!lp::solve_feasibility(probe).feasible)
    throw EmptyInterior("compact model: operating set is empty");

  if (!unit_rows_cap_everything(w)) {
    // Recession cone probe: any nonzero direction with Wd <= 0 certifies an
    // unbounded coordinate. The box only normalizes the direction.
    lp::Problem cone;
    cone.objective = Eigen::VectorXd::Zero(cols);
    cone.lower = Eigen::VectorXd::Constant(cols, -1.0);
    cone.upper = Eigen::VectorXd::Constant(cols, 1.0);
    cone.ineq_a = w;
    cone.ineq_b = Eigen::VectorXd::Zero(w.rows());
    cone.eq_a.resize(0, cols);
    cone.eq_b.resize(0);
    for (int q = 0; q < cols; ++q) {
      cone.objective.setZero();
      cone.objective[q] = 1.0;
      const auto down = lp::solve(cone);  // most negative feasible d_q
      cone.objective[q] = -1.0;
      const auto up = lp::solve(cone);  // -(most positive feasible d_q)
      if (down.status != lp::Status::Optimal ||
          up.status != lp::Status::Optimal)
        throw SolverFailure("compact model: recession probe failed");
      if (down.objective < -1e-7 || up.objective < -1e-7)
        throw UnboundedModel("compact model: operating set is unbounded");
    }
  }

  CompactModel m;
  m.w = std::move(w);
  m.z = std::move(z);
  m.d = std::move(d);
  m.b = std::move(b);
  m.ders = ders;
  m.steps = steps;
  m.buses = buses;
  m.meta = std::move(meta);
  return m;
}

std::pair<FeederSpec, std::vector<DerSpec>> generate_feeder(
    std::uint64_t seed, int buses, int ders, int steps,
    const GeneratorParams& gp) {
  if (buses < 2) throw InvalidConfig("generate_feeder: need at least 2 buses");
  if (ders < 1) throw InvalidConfig("generate_feeder: need at least 1 resource");
  if (steps < 1) throw InvalidConfig("generate_feeder: need at least 1 step");
  if (!(gp.step_hours > 0) || !(gp.ramp_hours > 0) ||
      !(gp.day_start < gp.day_end) || gp.night_level < 0 ||
      gp.night_level > 1)
    throw InvalidConfig("generate_feeder: malformed shape parameters");
  if (gp.load_min > gp.load_max || gp.resistance_min > gp.resistance_max ||
      gp.der_cap_min > gp.der_cap_max)
    throw InvalidConfig("generate_feeder: empty parameter range");
  const double mix =
      gp.mix_interval + gp.mix_battery + gp.mix_energy_capped;
  if (!(mix > 0) || gp.mix_interval < 0 || gp.mix_battery < 0 ||
      gp.mix_energy_capped < 0)
    throw InvalidConfig("generate_feeder: resource mix must be nonnegative");

  SeedStream rng(derive_seed(seed, "feeder"));
  FeederSpec f;
  f.buses = buses;
  f.horizon = steps;
  f.step_hours = gp.step_hours;
  f.v_nom = gp.v_nom;
  f.v_min = gp.v_min;
  f.v_max = gp.v_max;

  // Random recursive tree: bus k attaches to a uniformly chosen earlier bus.
  f.lines.reserve(buses - 1);
  for (int k = 1; k < buses; ++k) {
    Line l;
    l.from = static_cast<int>(rng.uniform_int(k));
    l.to = k;
    f.lines.push_back(l);
  }
  for (auto& l : f.lines) {
    l.resistance = rng.uniform(gp.resistance_min, gp.resistance_max);
    l.reactance = l.resistance * gp.reactance_ratio;
  }

  const auto hour_of = [&](int t) {
    return std::fmod(gp.start_hour + t * gp.step_hours, 24.0);
  };

  f.loads.assign(buses, Eigen::VectorXd::Zero(steps));
  for (int k = 1; k < buses; ++k) {
    const double level = rng.uniform(gp.load_min, gp.load_max);
    for (int t = 0; t < steps; ++t)
      f.loads[k][t] = level * load_shape(hour_of(t), gp);
  }

  std::vector<DerSpec> fleet;
  fleet.reserve(ders);
  for (int j = 0; j < ders; ++j) {
    DerSpec d;
    d.bus = 1 + static_cast<int>(rng.uniform_int(buses - 1));
    const double u = rng.uniform() * mix;
    if (u < gp.mix_interval) {
      d.kind = DerKind::Interval;
    } else if (u < gp.mix_interval + gp.mix_battery) {
      d.kind = DerKind::Battery;
    } else {
      d.kind = DerKind::EnergyCapped;
    }
    const double cap = rng.uniform(gp.der_cap_min, gp.der_cap_max);
    d.p_min.resize(steps);
    d.p_max.resize(steps);
    switch (d.kind) {
      case DerKind::Interval:
        // Curtailable generation following a solar bell with a floor.
        for (int t = 0; t < steps; ++t) {
          d.p_min[t] = 0.0;
          d.p_max[t] = cap * std::max(gp.pv_floor, pv_shape(hour_of(t)));
        }
        break;
      case DerKind::Battery: {
        d.p_min.setConstant(-cap);
        d.p_max.setConstant(cap);
        d.e_min = 0.0;
        d.e_max = cap * gp.step_hours * rng.uniform(1.5, 3.0);
        d.e_init = d.e_max * rng.uniform(0.3, 0.7);
        break;
      }
      case DerKind::EnergyCapped: {
        d.p_min.setConstant(-cap);
        d.p_max.setConstant(cap);
        const double span = cap * gp.step_hours * steps;
        d.e_total_max = span * rng.uniform(0.1, 0.4);
        d.e_total_min = -span * rng.uniform(0.1, 0.4);
        break;
      }
    }
    fleet.push_back(std::move(d));
  }
  return {std::move(f), std::move(fleet)};
}

Eigen::MatrixXd voltage_sensitivity(const FeederSpec& f) {
  validate_feeder(f);
  const int n = f.buses;
  if (static_cast<int>(f.lines.size()) != n - 1)
    throw DisconnectedFeeder("feeder: line count is not buses - 1");

  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (const auto& l : f.lines) {
    adj[l.from].emplace_back(l.to, l.resistance);
    adj[l.to].emplace_back(l.from, l.resistance);
  }
  std::vector<int> parent(n, -1), depth(n, 0), order;
  std::vector<double> rpath(n, 0.0);
  std::vector<char> seen(n, 0);
  order.push_back(0);
  seen[0] = 1;
  for (std::size_t head = 0; head < order.size(); ++head) {
    const int u = order[head];
    for (const auto& [v, r] : adj[u]) {
      if (seen[v]) continue;
      seen[v] = 1;
      parent[v] = u;
      depth[v] = depth[u] + 1;
      rpath[v] = rpath[u] + r;
      order.push_back(v);
    }
  }
  if (static_cast<int>(order.size()) != n)
    throw DisconnectedFeeder("feeder: not all buses reachable from the root");

  Eigen::MatrixXd r(n, n);
  for (int i = 0; i < n; ++i) {
    for (int k = i; k < n; ++k) {
      int a = i, b = k;
      while (depth[a] > depth[b]) a = parent[a];
      while (depth[b] > depth[a]) b = parent[b];
      while (a != b) {
        a = parent[a];
        b = parent[b];
      }
      r(i, k) = r(k, i) = 2.0 * rpath[a];
    }
  }
  return r;
}

CompactModel assemble_compact(const FeederSpec& f,
                              const std::vector<DerSpec>& ders) {
  validate_feeder(f);
  validate_ders(ders, f.buses, f.horizon);
  const Eigen::MatrixXd r = voltage_sensitivity(f);

  const int m = static_cast<int>(ders.size());
  const int steps = f.horizon;
  const int n = f.buses;
  const int cols = m * steps;
  const double dt = f.step_hours;

  int k_rows = 2 * n * steps;
  for (const auto& d : ders) {
    k_rows += 2 * steps;
    if (d.kind == DerKind::Battery) k_rows += 2 * steps;
    if (d.kind == DerKind::EnergyCapped) k_rows += 2;
  }

  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k_rows, cols);
  Eigen::VectorXd z(k_rows);
  std::vector<const char*> row_class(k_rows, "");
  int row = 0;
  const auto col_of = [steps](int j, int t) { return j * steps + t; };

  for (int j = 0; j < m; ++j) {
    const auto& d = ders[j];
    for (int t = 0; t < steps; ++t) {
      w(row, col_of(j, t)) = 1.0;
      z[row] = d.p_max[t];
      row_class[row++] = "per-step upper limit";
    }
    for (int t = 0; t < steps; ++t) {
      w(row, col_of(j, t)) = -1.0;
      z[row] = -d.p_min[t];
      row_class[row++] = "per-step lower limit";
    }
    if (d.kind == DerKind::Battery) {
      for (int t = 0; t < steps; ++t) {
        for (int tau = 0; tau <= t; ++tau) w(row, col_of(j, tau)) = dt;
        z[row] = d.e_max - d.e_init;
        row_class[row++] = "battery content upper";
      }
      for (int t = 0; t < steps; ++t) {
        for (int tau = 0; tau <= t; ++tau) w(row, col_of(j, tau)) = -dt;
        z[row] = d.e_init - d.e_min;
        row_class[row++] = "battery content lower";
      }
    } else if (d.kind == DerKind::EnergyCapped) {
      for (int t = 0; t < steps; ++t) w(row, col_of(j, t)) = dt;
      z[row] = d.e_total_max;
      row_class[row++] = "total energy upper";
      for (int t = 0; t < steps; ++t) w(row, col_of(j, t)) = -dt;
      z[row] = -d.e_total_min;
      row_class[row++] = "total energy lower";
    }
  }

  // LinDistFlow voltage window at every bus and step. rload(i, t) is the
  // load-induced squared-voltage drop at bus i.
  Eigen::MatrixXd rload = Eigen::MatrixXd::Zero(n, steps);
  for (int i = 0; i < n; ++i) {
    for (int k = 1; k < n; ++k) {
      if (r(i, k) == 0.0) continue;
      for (int t = 0; t < steps; ++t) rload(i, t) += r(i, k) * f.loads[k][t];
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < steps; ++t) {
      for (int j = 0; j < m; ++j)
        w(row, col_of(j, t)) = r(i, ders[j].bus);
      z[row] = f.v_max - f.v_nom + rload(i, t);
      row_class[row++] = "voltage upper";
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int t = 0; t < steps; ++t) {
      for (int j = 0; j < m; ++j)
        w(row, col_of(j, t)) = -r(i, ders[j].bus);
      z[row] = f.v_nom - f.v_min - rload(i, t);
      row_class[row++] = "voltage lower";
    }
  }

  Eigen::MatrixXd dmat = Eigen::MatrixXd::Zero(steps, cols);
  for (int j = 0; j < m; ++j)
    for (int t = 0; t < steps; ++t) dmat(t, col_of(j, t)) = -1.0;
  Eigen::VectorXd b = Eigen::VectorXd::Zero(steps);
  for (int k = 0; k < n; ++k) b += f.loads[k];

  std::ostringstream meta;
  meta << "feeder buses=" << n << " ders=" << m << " steps=" << steps;

  lp::Problem probe;
  probe.objective = Eigen::VectorXd::Zero(cols);
  probe.lower = Eigen::VectorXd::Constant(cols, -kInf);
  probe.upper = Eigen::VectorXd::Constant(cols, kInf);
  probe.ineq_a = w;
  probe.ineq_b = z;
  probe.eq_a.resize(0, cols);
  probe.eq_b.resize(0);
  if (!lp::solve_feasibility(probe).feasible) {
    // Name the first rule class the clipped-zero schedule violates; it is
    // the most readable certificate of an over-tight configuration.
    Eigen::VectorXd p = Eigen::VectorXd::Zero(cols);
    for (int j = 0; j < m; ++j) {
      for (int t = 0; t < steps; ++t) {
        p[col_of(j, t)] =
            std::min(std::max(0.0, ders[j].p_min[t]), ders[j].p_max[t]);
      }
    }
    const Eigen::VectorXd resid = w * p - z;
    std::ostringstream msg;
    msg << "feeder: operating set is empty";
    for (int i = 0; i < k_rows; ++i) {
      if (resid[i] > 1e-9) {
        msg << " (clipped-zero schedule violates a " << row_class[i]
            << " row)";
        break;
      }
    }
    throw EmptyInterior(msg.str());
  }

  return make_compact_model(std::move(w), std::move(z), std::move(dmat),
                            std::move(b), m, steps, n, meta.str());
}

std::pair<FeederSpec, std::vector<DerSpec>> slice_window(
    const FeederSpec& f, const std::vector<DerSpec>& ders, int start,
    int length) {
  validate_feeder(f);
  validate_ders(ders, f.buses, f.horizon);
  if (start < 0 || length < 1 || start + length > f.horizon)
    throw OutOfRange("slice_window: window outside the horizon");

  FeederSpec out = f;
  out.horizon = length;
  for (int k = 0; k < f.buses; ++k)
    out.loads[k] = f.loads[k].segment(start, length).eval();

  std::vector<DerSpec> fleet = ders;
  const double share = static_cast<double>(length) / f.horizon;
  for (auto& d : fleet) {
    d.p_min = d.p_min.segment(start, length).eval();
    d.p_max = d.p_max.segment(start, length).eval();
    if (d.kind == DerKind::EnergyCapped) {
      d.e_total_min *= share;
      d.e_total_max *= share;
    }
  }
  return {std::move(out), std::move(fleet)};
}

}  // namespace dsfs
