#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace dsfs {

// One distribution line of a radial feeder. Bus 0 is the substation; the
// line set must form a spanning tree rooted there.
struct Line {
  int from = 0;
  int to = 0;
  double resistance = 0.0;  // p.u.
  double reactance = 0.0;   // p.u.
};

struct FeederSpec {
  int buses = 0;
  int horizon = 0;          // T steps
  double step_hours = 1.0;  // length of one step
  double v_nom = 1.0;       // squared nominal voltage, p.u.
  double v_min = 0.9025;    // squared voltage limits
  double v_max = 1.1025;
  std::vector<Line> lines;
  std::vector<Eigen::VectorXd> loads;  // per bus, length horizon, >= 0
};

enum class DerKind { Interval, Battery, EnergyCapped };

std::string to_string(DerKind k);

// A controllable resource at one bus. Sign convention: positive output
// injects power, reducing the substation import. Interval resources carry
// per-step limits only; batteries add running energy-content limits;
// energy-capped resources bound total energy over the horizon.
struct DerSpec {
  DerKind kind = DerKind::Interval;
  int bus = 0;
  Eigen::VectorXd p_min;  // per step
  Eigen::VectorXd p_max;
  double e_min = 0.0;  // battery content window relative to empty
  double e_max = 0.0;
  double e_init = 0.0;
  double e_total_min = 0.0;  // energy-capped totals over the horizon
  double e_total_max = 0.0;
};

// Knobs of the synthetic feeder generator. Loads follow a day/night
// trapezoid; resources are drawn from a kind mix with per-unit capacities.
struct GeneratorParams {
  double step_hours = 1.0;
  double start_hour = 8.0;    // hour of day at step 0
  double night_level = 0.35;  // load fraction outside the daytime plateau
  double day_start = 6.0;     // plateau ramp timing, hours
  double day_end = 17.0;
  double ramp_hours = 4.0;
  double load_min = 0.008;  // per-bus daytime load draw, p.u.
  double load_max = 0.02;
  double resistance_min = 0.004;
  double resistance_max = 0.012;
  double reactance_ratio = 0.5;  // x = ratio * r
  double v_nom = 1.0;
  double v_min = 0.9025;
  double v_max = 1.1025;
  double der_cap_min = 0.006;  // per-step power capability, p.u.
  double der_cap_max = 0.03;
  double mix_interval = 0.4;  // kind mix weights, need not sum to 1
  double mix_battery = 0.4;
  double mix_energy_capped = 0.2;
  double pv_floor = 0.15;  // interval resources keep this fraction at night
};

// Polytope form of the feeder operating rules: the resource schedule
// p (stacked per resource, steps fastest) is operable iff W p <= z, and the
// substation profile it induces is p0 = D p + b.
struct CompactModel {
  Eigen::MatrixXd w;  // K x (ders * steps)
  Eigen::VectorXd z;  // K
  Eigen::MatrixXd d;  // steps x (ders * steps)
  Eigen::VectorXd b;  // steps, total load per step
  int ders = 0;
  int steps = 0;
  int buses = 0;  // 0 for hand-built models
  std::string meta;
};

// Validates shapes, then verifies {p : Wp <= z} is nonempty and bounded.
// Throws EmptyInterior / UnboundedModel when the set fails those checks.
CompactModel make_compact_model(Eigen::MatrixXd w, Eigen::VectorXd z,
                                Eigen::MatrixXd d, Eigen::VectorXd b,
                                int ders, int steps, int buses = 0,
                                std::string meta = "");

// Draws a random radial feeder plus resource fleet. Deterministic in the
// seed. Requires buses >= 2, ders >= 1, steps >= 1.
std::pair<FeederSpec, std::vector<DerSpec>> generate_feeder(
    std::uint64_t seed, int buses, int ders, int steps,
    const GeneratorParams& params = {});

// Squared-voltage sensitivity matrix R of the LinDistFlow model:
// R(i, k) = 2 * (sum of line resistances shared by the root paths of buses
// i and k). Row and column 0 (substation) are zero. Throws
// DisconnectedFeeder when the lines do not form a spanning tree.
Eigen::MatrixXd voltage_sensitivity(const FeederSpec& feeder);

// Builds the compact operating polytope of a feeder: per-resource limit
// rows, battery energy-content rows, total-energy rows, then two voltage
// rows per bus and step from the LinDistFlow sensitivities.
CompactModel assemble_compact(const FeederSpec& feeder,
                              const std::vector<DerSpec>& ders);

// Restriction of a feeder to steps [start, start + length). Battery content
// windows carry over unchanged; total-energy caps scale with the kept share
// of the horizon.
std::pair<FeederSpec, std::vector<DerSpec>> slice_window(
    const FeederSpec& feeder, const std::vector<DerSpec>& ders, int start,
    int length);

}  // namespace dsfs
