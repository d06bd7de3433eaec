// dsfs: command line front end of the flexibility-set toolkit. Every
// subcommand is a pure function of its flags, config file and input files;
// re-running one overwrites its outputs with identical bytes.
//
// Exit codes: 0 success, 2 bad arguments or config, 3 solver or model
// failure, 4 training divergence, 5 file problems, 1 anything unexpected.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "dsfs/active_loop.hpp"
#include "dsfs/errors.hpp"
#include "dsfs/evaluation.hpp"
#include "dsfs/io.hpp"
#include "dsfs/mlp.hpp"
#include "dsfs/network.hpp"
#include "dsfs/oracle.hpp"
#include "dsfs/robust_box.hpp"
#include "run_config.hpp"

namespace {

using namespace dsfs;
using tools::RunConfig;

int fail(const std::string& cmd, const std::exception& e, int code) {
  std::fprintf(stderr, "dsfs %s: %s\n", cmd.c_str(), e.what());
  return code;
}

int run_guarded(const std::string& cmd, const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const IoError& e) {
    return fail(cmd, e, 5);
  } catch (const NonFiniteLoss& e) {
    return fail(cmd, e, 4);
  } catch (const SolverFailure& e) {
    return fail(cmd, e, 3);
  } catch (const NumericalFailure& e) {
    return fail(cmd, e, 3);
  } catch (const InfeasibleModel& e) {
    return fail(cmd, e, 3);
  } catch (const UnboundedModel& e) {
    return fail(cmd, e, 3);
  } catch (const EmptyInterior& e) {
    return fail(cmd, e, 3);
  } catch (const DisconnectedFeeder& e) {
    return fail(cmd, e, 3);
  } catch (const Error& e) {
    return fail(cmd, e, 2);
  } catch (const std::exception& e) {
    return fail(cmd, e, 1);
  }
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
}

std::string join(const std::string& dir, const std::string& name) {
  return dir.empty() || dir == "." ? name : dir + "/" + name;
}

RunConfig base_config(const std::string& config_path) {
  return config_path.empty() ? RunConfig{} : tools::load_run_config(config_path);
}

void print_report(const evaluation::EvalReport& r) {
  std::printf("tp %ld  fp %ld  fn %ld  tn %ld\n", r.tp, r.fp, r.fn, r.tn);
  std::printf("precision %.4f  recall %.4f  f1 %.4f  accuracy %.4f\n",
              r.precision, r.recall, r.f1, r.accuracy);
  if (r.timing.classify_per_sample_s > 0)
    std::printf("classify %.3g s/sample\n", r.timing.classify_per_sample_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flexibility set estimation toolkit"};
  app.require_subcommand(1);

  // gen-network --------------------------------------------------------
  std::uint64_t gen_seed = 0;
  int gen_buses = 12, gen_ders = 18, gen_horizon = 2;
  double gen_step_hours = 1.0;
  std::string gen_out = ".";
  CLI::App* gen = app.add_subcommand(
      "gen-network", "Generate a random radial feeder and its operating polytope");
  gen->add_option("--seed", gen_seed, "Generator seed");
  gen->add_option("--buses", gen_buses, "Bus count including the substation");
  gen->add_option("--ders", gen_ders, "Resource count");
  gen->add_option("--horizon", gen_horizon, "Planning steps");
  gen->add_option("--step-hours", gen_step_hours, "Hours per step");
  gen->add_option("--out-dir", gen_out, "Directory for feeder.json and network.json");

  // innerbox -----------------------------------------------------------
  std::string ib_network, ib_out = "innerbox.json";
  CLI::App* ib = app.add_subcommand(
      "innerbox", "Solve the adjustable robust inner hyperbox of a network");
  ib->add_option("--network", ib_network, "network.json path")->required();
  ib->add_option("--out", ib_out, "Output path");

  // train --------------------------------------------------------------
  std::string tr_config, tr_network, tr_warm, tr_strategy, tr_out;
  std::uint64_t tr_seed = 0;
  int tr_epochs = 0, tr_eval_count = 0;
  bool tr_no_inner_box = false, tr_no_hull = false;
  CLI::App* tr = app.add_subcommand(
      "train", "Run the active learning loop and write the classifier");
  tr->add_option("--config", tr_config, "run.json config file");
  tr->add_option("--network", tr_network, "network.json path");
  tr->add_option("--strategy", tr_strategy, "uncertainty or random");
  tr->add_option("--warm-start", tr_warm, "Checkpoint to transfer from");
  tr->add_option("--epochs", tr_epochs, "Active learning epochs");
  tr->add_option("--seed", tr_seed, "Root seed");
  tr->add_option("--eval-count", tr_eval_count,
                 "Oracle-labeled points for per-epoch history scores (0: skip)");
  tr->add_option("--out-dir", tr_out, "Directory for model.json, history.csv, innerset.json");
  tr->add_flag("--no-inner-box", tr_no_inner_box, "Skip the robust box seed");
  tr->add_flag("--no-hull-labeling", tr_no_hull, "Label every point with the oracle");

  // classify -----------------------------------------------------------
  std::string cl_model, cl_samples, cl_out = "classified.csv";
  CLI::App* cl = app.add_subcommand(
      "classify", "Append predicted labels and posteriors to a sample file");
  cl->add_option("--model", cl_model, "model.json path")->required();
  cl->add_option("--samples", cl_samples, "samples.csv path")->required();
  cl->add_option("--out", cl_out, "Output path");

  // evaluate -----------------------------------------------------------
  std::string ev_config, ev_model, ev_test, ev_network, ev_out = "report.json";
  std::uint64_t ev_seed = 0;
  int ev_count = 0, ev_threads = 0;
  CLI::App* ev = app.add_subcommand(
      "evaluate", "Score a classifier on an oracle-labeled test set");
  ev->add_option("--config", ev_config, "run.json config file");
  ev->add_option("--model", ev_model, "model.json path")->required();
  CLI::Option* ev_test_opt = ev->add_option("--test", ev_test, "Labeled test csv");
  ev->add_option("--network", ev_network, "network.json to draw a fresh test set from")
      ->excludes(ev_test_opt);
  ev->add_option("--count", ev_count, "Fresh test set size");
  ev->add_option("--seed", ev_seed, "Test set seed");
  ev->add_option("--threads", ev_threads, "Oracle labeling workers");
  ev->add_option("--out", ev_out, "Output path");

  // heatmap ------------------------------------------------------------
  std::string hm_config, hm_model, hm_network, hm_out = "grid.csv";
  int hm_resolution = 0;
  std::pair<int, int> hm_dims{0, 1};
  CLI::App* hm = app.add_subcommand(
      "heatmap", "Rasterize posterior, uncertainty and oracle over a 2-D slice");
  hm->add_option("--config", hm_config, "run.json config file");
  hm->add_option("--model", hm_model, "model.json path")->required();
  hm->add_option("--network", hm_network, "network.json path")->required();
  hm->add_option("--resolution", hm_resolution, "Grid cells per axis");
  hm->add_option("--dims", hm_dims, "Profile coordinates to sweep");
  hm->add_option("--out", hm_out, "Output path");

  // rolling ------------------------------------------------------------
  std::string ro_config, ro_feeder, ro_out;
  std::uint64_t ro_seed = 0;
  int ro_windows = 0, ro_length = 0, ro_eval = 0, ro_epochs = 0;
  CLI::App* ro = app.add_subcommand(
      "rolling", "Warm-start vs cold-start active learning over sliding windows");
  ro->add_option("--config", ro_config, "run.json config file");
  ro->add_option("--feeder", ro_feeder, "feeder.json path")->required();
  ro->add_option("--windows", ro_windows, "Window count");
  ro->add_option("--window-length", ro_length, "Steps per window");
  ro->add_option("--eval-count", ro_eval, "Test points per window");
  ro->add_option("--epochs", ro_epochs, "Epochs per window");
  ro->add_option("--seed", ro_seed, "Root seed");
  ro->add_option("--out-dir", ro_out, "Directory for rolling.csv");

  // robustness ---------------------------------------------------------
  std::string rb_config, rb_feeder, rb_model, rb_out = "robustness.csv";
  std::uint64_t rb_seed = 0;
  int rb_count = 0, rb_threads = 0;
  std::vector<double> rb_levels;
  CLI::App* rb = app.add_subcommand(
      "robustness", "Score fixed parameters under rising injection uncertainty");
  rb->add_option("--config", rb_config, "run.json config file");
  rb->add_option("--feeder", rb_feeder, "feeder.json path")->required();
  rb->add_option("--model", rb_model, "model.json path")->required();
  rb->add_option("--levels", rb_levels, "Perturbation levels in [0, 1]");
  rb->add_option("--count", rb_count, "Test points per level");
  rb->add_option("--seed", rb_seed, "Sweep seed");
  rb->add_option("--threads", rb_threads, "Oracle labeling workers");
  rb->add_option("--out", rb_out, "Output path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*gen)
    return run_guarded("gen-network", [&] {
      GeneratorParams gp;
      gp.step_hours = gen_step_hours;
      auto [feeder, ders] = generate_feeder(gen_seed, gen_buses, gen_ders, gen_horizon, gp);
      const CompactModel model = assemble_compact(feeder, ders);
      ensure_dir(gen_out);
      io::save_feeder(join(gen_out, "feeder.json"), feeder, ders);
      io::save_network(join(gen_out, "network.json"), model);
      std::printf("feeder: %d buses, %d resources, horizon %d\n", feeder.buses,
                  static_cast<int>(ders.size()), feeder.horizon);
      std::printf("model: %ld rows, %ld cols\n", static_cast<long>(model.w.rows()),
                  static_cast<long>(model.w.cols()));
    });

  if (*ib)
    return run_guarded("innerbox", [&] {
      const CompactModel model = io::load_network(ib_network);
      const robust_box::InnerBoxResult box = robust_box::solve_inner_box(model);
      io::save_inner_box(ib_out, box);
      std::printf("objective %s%s\n", io::format_double(box.objective).c_str(),
                  box.degenerate ? " (degenerate)" : "");
    });

  if (*tr)
    return run_guarded("train", [&] {
      RunConfig rc = base_config(tr_config);
      if (tr->count("--network")) rc.network = tr_network;
      if (rc.network.empty())
        throw InvalidConfig("train: no network given (--network or config \"network\")");
      if (tr->count("--seed")) rc.active.seed = tr_seed;
      if (tr->count("--epochs")) rc.active.epochs = tr_epochs;
      if (tr->count("--strategy")) rc.active.strategy = tools::parse_strategy(tr_strategy);
      if (tr->count("--out-dir")) rc.output_dir = tr_out;
      if (tr_no_inner_box) rc.active.use_inner_box = false;
      if (tr_no_hull) rc.active.use_hull_labeling = false;

      const CompactModel model = io::load_network(rc.network);
      mlp::Params warm;
      bool has_warm = false;
      if (!tr_warm.empty()) {
        warm = io::load_model(tr_warm).first;
        has_warm = true;
      }
      std::vector<oracle::SamplePoint> eval;
      if (tr_eval_count > 0)
        eval = evaluation::make_test_set(model, tr_eval_count, rc.active.seed,
                                         rc.active.inflation, rc.active.label_tol,
                                         rc.threads);

      const active_loop::RunResult result = active_loop::run(
          model, rc.active, has_warm ? &warm : nullptr, eval.empty() ? nullptr : &eval);

      ensure_dir(rc.output_dir);
      io::ModelMeta meta;
      meta.seed = rc.active.seed;
      meta.epochs = static_cast<int>(result.history.size());
      io::save_model(join(rc.output_dir, "model.json"), result.state.params, meta);
      io::save_history(join(rc.output_dir, "history.csv"), result);
      io::save_inner_set(join(rc.output_dir, "innerset.json"), result.state.inner);

      const auto& s = result.state;
      std::printf("epochs %d  labeled %d  oracle calls %ld  hull labels %ld\n",
                  s.epoch, static_cast<int>(s.labeled.size()), s.oracle_calls,
                  s.hull_labels);
      if (!result.history.empty()) {
        const auto& last = result.history.back();
        std::printf("final loss %.4g", last.mean_loss);
        if (tr_eval_count > 0) std::printf("  f1 %.4f", last.f1);
        std::printf("\n");
      }
    });

  if (*cl)
    return run_guarded("classify", [&] {
      const mlp::Params params = io::load_model(cl_model).first;
      const std::vector<oracle::SamplePoint> samples = io::load_samples(cl_samples);
      if (samples.empty()) throw EmptyDataset("classify: no points in " + cl_samples);
      Eigen::MatrixXd x(static_cast<Eigen::Index>(samples.size()), samples[0].p0.size());
      for (Eigen::Index i = 0; i < x.rows(); ++i) x.row(i) = samples[i].p0.transpose();
      const Eigen::VectorXd post = mlp::posterior(params, x);
      const Eigen::VectorXi pred = mlp::classify(params, x);
      io::save_classified(cl_out, samples, pred, post);
      std::printf("%d points, %d predicted feasible\n", static_cast<int>(samples.size()),
                  pred.sum());
    });

  if (*ev)
    return run_guarded("evaluate", [&] {
      RunConfig rc = base_config(ev_config);
      if (ev->count("--count")) rc.test_count = ev_count;
      if (ev->count("--threads")) rc.threads = ev_threads;
      if (ev->count("--seed")) rc.active.seed = ev_seed;

      const mlp::Params params = io::load_model(ev_model).first;
      std::vector<oracle::SamplePoint> test;
      if (ev->count("--test")) {
        test = io::load_samples(ev_test);
      } else if (ev->count("--network")) {
        const CompactModel model = io::load_network(ev_network);
        test = evaluation::make_test_set(model, rc.test_count, rc.active.seed,
                                         rc.active.inflation, rc.active.label_tol,
                                         rc.threads);
      } else {
        throw InvalidConfig("evaluate: give --test or --network");
      }
      const evaluation::EvalReport report = evaluation::score(params, test);
      io::save_report(ev_out, report);
      print_report(report);
    });

  if (*hm)
    return run_guarded("heatmap", [&] {
      RunConfig rc = base_config(hm_config);
      if (hm->count("--resolution")) rc.grid_resolution = hm_resolution;
      const mlp::Params params = io::load_model(hm_model).first;
      const CompactModel model = io::load_network(hm_network);
      const std::vector<evaluation::GridRow> rows = evaluation::heatmap_grid(
          params, model, hm_dims, rc.grid_resolution, rc.active.inflation,
          rc.active.label_tol);
      io::save_grid(hm_out, rows);
      std::printf("%d rows\n", static_cast<int>(rows.size()));
    });

  if (*ro)
    return run_guarded("rolling", [&] {
      RunConfig rc = base_config(ro_config);
      if (ro->count("--windows")) rc.windows = ro_windows;
      if (ro->count("--window-length")) rc.window_length = ro_length;
      if (ro->count("--eval-count")) rc.eval_count = ro_eval;
      if (ro->count("--epochs")) rc.active.epochs = ro_epochs;
      if (ro->count("--seed")) rc.active.seed = ro_seed;
      if (ro->count("--out-dir")) rc.output_dir = ro_out;

      auto [feeder, ders] = io::load_feeder(ro_feeder);
      const auto factory = [&](int w) {
        auto [wf, wd] = slice_window(feeder, ders, w, rc.window_length);
        return assemble_compact(wf, wd);
      };
      const evaluation::RollingResult result =
          evaluation::rolling_horizon(factory, rc.windows, rc.active, rc.eval_count);

      ensure_dir(rc.output_dir);
      io::save_rolling(join(rc.output_dir, "rolling.csv"), result.rows);
      for (int w = 0; w < rc.windows; ++w) {
        const evaluation::WindowRow* last = nullptr;
        for (const auto& row : result.rows)
          if (row.window == w) last = &row;
        if (last)
          std::printf("window %d: warm f1 %.4f  cold f1 %.4f\n", w, last->f1_warm,
                      last->f1_cold);
      }
    });

  if (*rb)
    return run_guarded("robustness", [&] {
      RunConfig rc = base_config(rb_config);
      if (rb->count("--levels")) rc.levels = rb_levels;
      if (rb->count("--count")) rc.test_count = rb_count;
      if (rb->count("--threads")) rc.threads = rb_threads;
      if (rb->count("--seed")) rc.active.seed = rb_seed;

      auto [feeder, ders] = io::load_feeder(rb_feeder);
      const mlp::Params params = io::load_model(rb_model).first;
      const std::vector<evaluation::LevelRow> rows = evaluation::robustness_sweep(
          feeder, ders, rc.levels, rc.test_count, params, rc.active.seed, rc.threads);
      io::save_robustness(rb_out, rows);
      for (const auto& row : rows)
        std::printf("level %.2f: f1 %.4f (retried %d)\n", row.level, row.f1,
                    row.scenarios_retried);
    });

  return 1;  // unreachable: require_subcommand guarantees one branch ran
}
