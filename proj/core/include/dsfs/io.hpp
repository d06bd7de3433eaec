#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "dsfs/active_loop.hpp"
#include "dsfs/evaluation.hpp"
#include "dsfs/inner_set.hpp"
#include "dsfs/mlp.hpp"
#include "dsfs/network.hpp"
#include "dsfs/oracle.hpp"
#include "dsfs/robust_box.hpp"

// File formats of the toolkit. All writers are canonical: a fixed field
// order and %.17g number rendering make re-runs byte-identical, and every
// double survives the round trip exactly. JSON writers reject non-finite
// values (the format has no lexeme for them); CSV columns render them as
// nan/inf. All loaders throw IoError on missing files, malformed syntax, or
// schema violations.
namespace dsfs::io {

// Shortest exact decimal for a double under %.17g rules.
std::string format_double(double v);

void save_network(const std::string& path, const CompactModel& model);
CompactModel load_network(const std::string& path);

void save_feeder(const std::string& path, const FeederSpec& feeder,
                 const std::vector<DerSpec>& ders);
std::pair<FeederSpec, std::vector<DerSpec>> load_feeder(
    const std::string& path);

void save_inner_box(const std::string& path,
                    const robust_box::InnerBoxResult& box);
robust_box::InnerBoxResult load_inner_box(const std::string& path);

void save_inner_set(const std::string& path, const inner_set::InnerSet& set);
inner_set::InnerSet load_inner_set(const std::string& path);

// Provenance of a classifier checkpoint.
struct ModelMeta {
  std::uint64_t seed = 0;
  int epochs = 0;
  int source_window = -1;  // -1: not part of a rolling-horizon chain
};

void save_model(const std::string& path, const mlp::Params& params,
                const ModelMeta& meta = {});
std::pair<mlp::Params, ModelMeta> load_model(const std::string& path);

void save_report(const std::string& path, const evaluation::EvalReport& r);

// samples.csv: p0_1..p0_T, then label/provenance columns when the set is
// fully labeled. The loader accepts files without those columns (points to
// classify) and files carrying them.
void save_samples(const std::string& path,
                  const std::vector<oracle::SamplePoint>& samples);
std::vector<oracle::SamplePoint> load_samples(const std::string& path);

void save_classified(const std::string& path,
                     const std::vector<oracle::SamplePoint>& samples,
                     const Eigen::VectorXi& predicted,
                     const Eigen::VectorXd& posterior);

// history.csv: the epoch-0 snapshot followed by one row per epoch.
void save_history(const std::string& path,
                  const active_loop::RunResult& result);

void save_grid(const std::string& path,
               const std::vector<evaluation::GridRow>& rows);
void save_rolling(const std::string& path,
                  const std::vector<evaluation::WindowRow>& rows);
void save_robustness(const std::string& path,
                     const std::vector<evaluation::LevelRow>& rows);

}  // namespace dsfs::io
