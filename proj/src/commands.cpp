#include "mrl/commands.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "mrl/csvio.hpp"
#include "mrl/eval.hpp"
#include "mrl/geometry.hpp"
#include "mrl/idx.hpp"
#include "mrl/training.hpp"

namespace mrl {

namespace {

namespace fs = std::filesystem;

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("cannot create output directory: " + dir);
}

void require_file(const std::string& path) {
  if (!fs::is_regular_file(path))
    throw ConfigError("missing input file: " + path);
}

par::Mode exec_mode(const Config& cfg) {
  std::string m = cfg.get_str("exec.mode", "parallel");
  if (m == "serial") return par::Mode::Serial;
  if (m == "parallel") return par::Mode::Parallel;
  throw ConfigError("exec.mode: expected serial or parallel");
}

const char* bool_str(bool b) { return b ? "true" : "false"; }

OptConfig resolve_opt(const Config& cfg) {
  OptConfig o;
  std::string kind = cfg.get_str("opt.kind", "adam");
  if (kind == "adam")
    o.kind = OptKind::Adam;
  else if (kind == "sgd")
    o.kind = OptKind::Sgd;
  else
    throw ConfigError("opt.kind: expected adam or sgd");
  o.lr = cfg.get_double("opt.lr", 0.1);
  o.beta1 = cfg.get_double("opt.beta1", 0.9);
  o.beta2 = cfg.get_double("opt.beta2", 0.999);
  o.eps = cfg.get_double("opt.eps", 1e-8);
  o.momentum = cfg.get_double("opt.momentum", 0.0);
  return o;
}

AttackConfig resolve_train_attack(const Config& cfg, TrainMode mode,
                                  const ManifoldSpec& spec) {
  AttackConfig a;
  if (mode == TrainMode::Natural) return a;
  std::string kind = cfg.get_str(
      "attack.kind", mode == TrainMode::BallAdv ? "ball_pgd" : "voronoi_pgd");
  a.kind = attack_from_name(kind);
  a.p = cfg.get_norm("attack.p", Norm::L2);
  a.iters = cfg.get_int("attack.iters", 40);
  if (a.kind == AttackKind::VoronoiPgd) {
    // Step defaults to a fraction of the reach when the geometry is known,
    // and to an image-scale step otherwise.
    double fallback =
        spec.has_reach() ? 0.05 * spec.reach_decision_axis : 0.01;
    a.step = cfg.get_double("attack.step", fallback);
  } else {
    a.epsilon = cfg.get_double("attack.epsilon", 0.0);
    a.random_start =
        cfg.get_bool("attack.random_start", a.kind == AttackKind::BallPgd);
    a.step = cfg.get_double(
        "attack.step", a.iters > 0 ? 2.5 * a.epsilon / a.iters : 0.0);
  }
  return a;
}

struct EvalPlan {
  std::vector<AttackConfig> suite;
  std::vector<double> grid;
  std::uint64_t seed = 1;
};

EvalPlan resolve_eval(const Config& cfg, const ManifoldSpec& spec,
                      std::uint64_t default_seed) {
  EvalPlan plan;
  // The evaluation suite is sign-method based, so the budget is an
  // l-infinity budget unless overridden.
  Norm p = cfg.get_norm("eval.p", Norm::Linf);
  int iters = cfg.get_int("eval.iters", 40);
  for (const std::string& name :
       cfg.get_str_list("eval.attacks", "fgsm,bim")) {
    AttackKind kind = attack_from_name(name);
    switch (kind) {
      case AttackKind::Fgsm:
        plan.suite.push_back(fgsm_config(p, 0.0));
        break;
      case AttackKind::Bim:
        plan.suite.push_back(bim_config(p, 0.0, iters));
        break;
      case AttackKind::BallPgd:
        plan.suite.push_back(ball_pgd_config(p, 0.0, iters));
        break;
      case AttackKind::VoronoiPgd:
        throw ConfigError(
            "eval.attacks: the cell-constrained attack is train-time only");
    }
  }
  double eps_max;
  if (cfg.has("eval.eps_max"))
    eps_max = cfg.require_double("eval.eps_max");
  else if (spec.has_reach())
    eps_max = 0.5 * spec.reach_decision_axis;
  else if (spec.kind == ManifoldKind::Ingested)
    eps_max = 0.5;  // unit-scaled pixels
  else
    throw ConfigError("eval.eps_max is required for this dataset");
  plan.grid = eps_grid_for(eps_max, cfg.get_int("eval.grid", 21));
  plan.seed = cfg.get_u64("eval.seed", default_seed);
  return plan;
}

LabeledDataset load_dataset(const std::string& csv_path) {
  require_file(csv_path);
  const std::string meta = meta_path_for(csv_path);
  require_file(meta);
  return read_dataset_csv(csv_path, meta);
}

void echo_attack(std::ostream& os, const AttackConfig& a) {
  os << "attack.kind=" << attack_name(a.kind) << '\n';
  os << "attack.p=" << norm_name(a.p) << '\n';
  os << "attack.epsilon=" << format_g17(a.epsilon) << '\n';
  os << "attack.step=" << format_g17(a.step) << '\n';
  os << "attack.iters=" << a.iters << '\n';
  os << "attack.random_start=" << bool_str(a.random_start) << '\n';
}

}  // namespace

int cmd_gen_data(const Config& cfg) {
  static const std::set<std::string> keys = {
      "data.kind",  "data.codim", "data.n_per_class",
      "data.n_test_per_class", "data.cover", "data.seed", "out.dir"};
  reject_unknown_keys(cfg, keys);
  const std::string kind = cfg.require_str("data.kind");
  const std::string out = cfg.require_str("out.dir");
  ensure_dir(out);
  const std::uint64_t seed = cfg.get_u64("data.seed", 1);

  LabeledDataset train, test;
  if (kind == "circles") {
    int codim = cfg.get_int("data.codim", 10);
    int npc = cfg.get_int("data.n_per_class", 500);
    int ntest = cfg.get_int("data.n_test_per_class", npc);
    train = make_circles(npc, codim, seed);
    test = make_circles(ntest, codim, derive_seed(seed, "test"));
    test.role = DatasetRole::Test;
  } else if (kind == "planes") {
    int codim = cfg.get_int("data.codim", 10);
    int verts = planes_vertices_for_cover(cfg.get_double("data.cover", 1.0));
    std::tie(train, test) = make_planes(verts, codim);
    train.seed = seed;
    test.seed = seed;
  } else {
    throw ConfigError("data.kind: expected circles or planes");
  }
  write_dataset_csv(train, out + "/train.csv", out + "/train.meta");
  write_dataset_csv(test, out + "/test.csv", out + "/test.meta");
  std::cout << "wrote " << out << "/train.csv (" << train.size()
            << " rows), " << out << "/test.csv (" << test.size() << " rows)\n";
  return 0;
}

int cmd_run(const Config& cfg) {
  static const std::set<std::string> keys = {
      "data.train",       "data.test",        "train.mode",
      "train.epochs",     "train.batch",      "train.retrainings",
      "train.hidden",     "train.m",          "train.early_stop",
      "train.seed",       "opt.kind",         "opt.lr",
      "opt.beta1",        "opt.beta2",        "opt.eps",
      "opt.momentum",     "attack.kind",      "attack.p",
      "attack.epsilon",   "attack.step",      "attack.iters",
      "attack.random_start", "eval.attacks",  "eval.p",
      "eval.eps_max",     "eval.grid",        "eval.iters",
      "eval.seed",        "exec.mode",        "out.dir"};
  reject_unknown_keys(cfg, keys);
  const std::string out = cfg.require_str("out.dir");
  ensure_dir(out);
  const par::Mode mode = exec_mode(cfg);

  LabeledDataset train_ds = load_dataset(cfg.require_str("data.train"));
  LabeledDataset test_ds = load_dataset(cfg.require_str("data.test"));

  TrainConfig tc;
  tc.mode = train_mode_from_name(cfg.get_str("train.mode", "natural"));
  tc.epochs = cfg.get_int("train.epochs", 200);
  tc.batch = cfg.get_int("train.batch", 64);
  tc.retrainings = cfg.get_int("train.retrainings", 20);
  tc.hidden = cfg.get_int("train.hidden", 100);
  tc.m = cfg.get_int("train.m", 10);
  tc.early_stop_loss = cfg.get_double("train.early_stop", 1e-4);
  tc.seed = cfg.get_u64("train.seed", 1);
  tc.opt = resolve_opt(cfg);
  tc.attack = resolve_train_attack(cfg, tc.mode, train_ds.spec);
  validate_train_config(tc, train_ds);

  EvalPlan plan = resolve_eval(cfg, test_ds.spec, tc.seed);

  std::vector<RobustnessCurve> curves;
  std::vector<std::uint64_t> run_seeds;
  std::vector<TrainedModel> runs;
  auto t0 = std::chrono::steady_clock::now();
  for (int r = 0; r < tc.retrainings; ++r) {
    TrainedModel run = train_single(train_ds, tc, tc.seed + r, mode);
    const std::string ckpt = out + "/model_r" + std::to_string(r) + ".mrlm";
    save_checkpoint(run.model, ckpt);
    curves.push_back(robustness_curve(run.model, test_ds, plan.suite,
                                      plan.grid,
                                      derive_seed(plan.seed, "eval", r),
                                      mode));
    run_seeds.push_back(run.seed);
    std::cerr << "retraining " << (r + 1) << "/" << tc.retrainings
              << ": epochs " << run.epochs_run << ", loss "
              << run.final_loss << ", min-curve tail "
              << curves.back().min_curve.back() << "\n";
    run.model = MlpModel();  // keep the manifest data, drop the weights
    runs.push_back(std::move(run));
  }
  auto t1 = std::chrono::steady_clock::now();
  double wall = std::chrono::duration<double>(t1 - t0).count();

  CurveAggregate agg = aggregate_curves(curves);
  write_curves_csv(out + "/curves.csv", curves, run_seeds);
  write_aggregate_csv(out + "/aggregate.csv", agg);

  std::ofstream ms(out + "/manifest.txt");
  if (!ms) throw ConfigError("cannot write manifest under " + out);
  ms << "command=run\n";
  ms << "data.train=" << cfg.require_str("data.train") << '\n';
  ms << "data.test=" << cfg.require_str("data.test") << '\n';
  ms << "train.mode=" << train_mode_name(tc.mode) << '\n';
  ms << "train.epochs=" << tc.epochs << '\n';
  ms << "train.batch=" << tc.batch << '\n';
  ms << "train.retrainings=" << tc.retrainings << '\n';
  ms << "train.hidden=" << tc.hidden << '\n';
  ms << "train.m=" << tc.m << '\n';
  ms << "train.early_stop=" << format_g17(tc.early_stop_loss) << '\n';
  ms << "train.seed=" << tc.seed << '\n';
  ms << "opt.kind=" << (tc.opt.kind == OptKind::Adam ? "adam" : "sgd")
     << '\n';
  ms << "opt.lr=" << format_g17(tc.opt.lr) << '\n';
  ms << "opt.beta1=" << format_g17(tc.opt.beta1) << '\n';
  ms << "opt.beta2=" << format_g17(tc.opt.beta2) << '\n';
  ms << "opt.eps=" << format_g17(tc.opt.eps) << '\n';
  ms << "opt.momentum=" << format_g17(tc.opt.momentum) << '\n';
  if (tc.mode != TrainMode::Natural) echo_attack(ms, tc.attack);
  ms << "eval.attacks=";
  for (std::size_t i = 0; i < plan.suite.size(); ++i)
    ms << (i ? "," : "") << attack_name(plan.suite[i].kind);
  ms << '\n';
  ms << "eval.p=" << norm_name(plan.suite.front().p) << '\n';
  ms << "eval.eps_max=" << format_g17(plan.grid.back()) << '\n';
  ms << "eval.grid=" << plan.grid.size() << '\n';
  ms << "eval.seed=" << plan.seed << '\n';
  for (int r = 0; r < tc.retrainings; ++r) {
    ms << "run" << r << ".seed=" << runs[r].seed << '\n';
    ms << "run" << r << ".epochs_run=" << runs[r].epochs_run << '\n';
    ms << "run" << r << ".final_loss=" << format_g17(runs[r].final_loss)
       << '\n';
    ms << "run" << r << ".nauc="
       << format_g17(nauc(curves[r].eps_grid, curves[r].min_curve)) << '\n';
  }
  ms << "nauc_mean=" << format_g17(agg.nauc_mean) << '\n';
  ms << "nauc_std=" << format_g17(agg.nauc_std) << '\n';
  ms << "wall_seconds=" << format_g17(wall) << '\n';
  if (!ms) throw ConfigError("manifest write failed under " + out);

  std::cout << "nauc_mean=" << format_g17(agg.nauc_mean) << " nauc_std="
            << format_g17(agg.nauc_std) << "\n";
  std::cout << "wrote " << out << "/curves.csv, aggregate.csv, manifest.txt, "
            << tc.retrainings << " checkpoints\n";
  return 0;
}

int cmd_theory(const Config& cfg) {
  static const std::set<std::string> keys = {
      "theory.sections", "theory.codim",  "theory.cover",
      "theory.eps",      "theory.dense_n", "theory.p",
      "theory.ks",       "theory.gap_eps", "theory.codims",
      "theory.vol_eps",  "theory.mc_points", "theory.seed",
      "exec.mode",       "out.dir"};
  reject_unknown_keys(cfg, keys);
  const std::string out = cfg.require_str("out.dir");
  ensure_dir(out);
  const par::Mode mode = exec_mode(cfg);
  const std::uint64_t seed = cfg.get_u64("theory.seed", 1);
  const double cover = cfg.get_double("theory.cover", 1.0);
  const int verts = planes_vertices_for_cover(cover);

  std::ostringstream csv, txt;
  txt << "theory report\n";

  for (const std::string& section : cfg.get_str_list(
           "theory.sections", "certification,covering_gap,volume_bound")) {
    if (section == "certification") {
      int codim = cfg.get_int("theory.codim", 10);
      auto [train, test] = make_planes(verts, codim);
      const ManifoldSpec& spec = train.spec;
      int dense_n = cfg.get_int("theory.dense_n", 100000);
      if (dense_n < 1) throw ConfigError("theory.dense_n must be positive");
      Norm p = cfg.get_norm("theory.p", Norm::L2);
      LabeledDataset ref;
      ref.spec = spec;
      ref.role = DatasetRole::Test;
      for (int cls = 1; cls <= spec.n_classes; ++cls) {
        auto pts = tube_sample(spec, cls, 0.0, p, dense_n / spec.n_classes,
                               derive_seed(seed, "dense", cls));
        ref.points.insert(ref.points.end(), pts.begin(), pts.end());
        ref.labels.insert(ref.labels.end(), pts.size() / spec.d, cls);
      }
      double delta = measure_delta_cover(train, ref, p, mode);
      csv << "# section: certification\n";
      csv << "delta,reach,epsilon,nn_ok,ball_ok,beyond_reach\n";
      for (double eps : cfg.get_double_list("theory.eps", "0,0.15,0.3,0.45")) {
        CertResult nn = certify_nn_cover(delta, spec.reach_decision_axis, eps);
        CertResult ball =
            certify_ball_cover(delta, spec.reach_decision_axis, eps);
        csv << format_g17(delta) << ','
            << format_g17(spec.reach_decision_axis) << ',' << format_g17(eps)
            << ',' << bool_str(nn.ok) << ',' << bool_str(ball.ok) << ','
            << bool_str(nn.beyond_reach) << '\n';
      }
      txt << "\ncertification: measured cover radius " << format_g17(delta)
          << " for " << train.size() << " grid vertices (cover level "
          << format_g17(cover) << ", ambient dimension " << spec.d
          << ", reach " << format_g17(spec.reach_decision_axis)
          << ").\nThe 1-NN rule certifies budgets up to reach - delta/2; "
             "plain ball covers need delta <= reach - budget.\n";
    } else if (section == "covering_gap") {
      csv << "# section: covering_gap\n";
      csv << "k,epsilon,delta_nn,delta_ball,ratio_lower,"
             "empirical_count_ratio\n";
      txt << "\ncovering gap: grid covers of the two patches, vertex counts "
             "at the radius each rule tolerates.\n";
      for (int k : cfg.get_int_list("theory.ks", "1,2,3,4,5,6")) {
        for (double eps :
             cfg.get_double_list("theory.gap_eps", "0,0.25,0.5")) {
          CoveringGap g = covering_gap(k, eps);
          CoverCounts c = cover_grid_counts(k, eps);
          csv << k << ',' << format_g17(eps) << ','
              << format_g17(g.delta_nn) << ',' << format_g17(g.delta_ball)
              << ',' << format_g17(g.count_ratio_lower) << ','
              << format_g17(c.ratio()) << '\n';
          txt << "  k=" << k << " eps=" << format_g17(eps) << ": "
              << format_g17(c.n_nn) << " vs " << format_g17(c.n_ball)
              << " cover points (ratio " << format_g17(c.ratio()) << ")\n";
        }
      }
    } else if (section == "volume_bound") {
      double vol_eps = cfg.get_double("theory.vol_eps", 0.5);
      int mc_points = cfg.get_int("theory.mc_points", 100000);
      csv << "# section: volume_bound\n";
      csv << "d,k,epsilon,n,bound,mc_estimate,mc_stderr\n";
      txt << "\nvolume bound: fraction of the sample tube covered by the "
             "training balls, bound vs Monte Carlo.\n";
      for (int codim : cfg.get_int_list("theory.codims", "1,10,100")) {
        auto [train, test] = make_planes(verts, codim);
        const ManifoldSpec& spec = train.spec;
        double bound = coverage_ratio_bound(spec.d, spec.k, vol_eps,
                                            train.size(), spec.vol_k);
        McEstimate mc = coverage_ratio_mc(
            train, vol_eps, mc_points,
            derive_seed(seed, "mc", static_cast<std::uint64_t>(codim)),
            mode);
        if (!(mc.value <= bound + 3.0 * mc.std_error))
          throw InvariantError(
              "volume_bound: Monte Carlo estimate " + format_g17(mc.value) +
              " exceeds bound " + format_g17(bound) + " + 3*" +
              format_g17(mc.std_error) + " at d=" + std::to_string(spec.d));
        csv << spec.d << ',' << spec.k << ',' << format_g17(vol_eps) << ','
            << train.size() << ',' << format_g17(bound) << ','
            << format_g17(mc.value) << ',' << format_g17(mc.std_error)
            << '\n';
        txt << "  d=" << spec.d << ": bound " << format_g17(bound)
            << ", estimate " << format_g17(mc.value) << " +- "
            << format_g17(mc.std_error) << " (" << mc.hits << "/" << mc.n
            << " hits)\n";
      }
    } else {
      throw ConfigError("theory.sections: unknown section '" + section +
                        "'");
    }
  }

  const std::string csv_path = out + "/theory_report.csv";
  const std::string txt_path = out + "/theory_report.txt";
  std::ofstream cs(csv_path);
  if (!cs) throw ConfigError("cannot write " + csv_path);
  cs << csv.str();
  std::ofstream ts(txt_path);
  if (!ts) throw ConfigError("cannot write " + txt_path);
  ts << txt.str();
  std::cout << "wrote " << csv_path << " and " << txt_path << "\n";
  return 0;
}

int cmd_ingest_idx(const Config& cfg) {
  static const std::set<std::string> keys = {
      "idx.images", "idx.labels", "idx.subset_n",
      "idx.seed",   "idx.role",   "out.dir"};
  reject_unknown_keys(cfg, keys);
  const std::string images = cfg.require_str("idx.images");
  const std::string labels = cfg.require_str("idx.labels");
  require_file(images);
  require_file(labels);
  const std::string out = cfg.require_str("out.dir");
  ensure_dir(out);
  int subset_n = cfg.get_int("idx.subset_n", 0);
  if (subset_n < 0) throw ConfigError("idx.subset_n must be >= 0");
  const std::string role_name = cfg.get_str("idx.role", "train");
  DatasetRole role;
  if (role_name == "train")
    role = DatasetRole::Train;
  else if (role_name == "test")
    role = DatasetRole::Test;
  else
    throw ConfigError("idx.role: expected train or test");

  LabeledDataset ds =
      ingest_idx(images, labels, static_cast<std::size_t>(subset_n),
                 cfg.get_u64("idx.seed", 1), role);
  const std::string base = out + "/" + role_name;
  write_dataset_csv(ds, base + ".csv", base + ".meta");

  std::vector<std::size_t> counts(ds.spec.n_classes, 0);
  for (int l : ds.labels) ++counts[l - 1];
  std::cout << "wrote " << base << ".csv (" << ds.size() << " rows, "
            << ds.dim() << " features)\nclass counts:";
  for (std::size_t c = 0; c < counts.size(); ++c)
    std::cout << ' ' << (c + 1) << ':' << counts[c];
  std::cout << "\n";
  return 0;
}

int cmd_eval(const Config& cfg) {
  static const std::set<std::string> keys = {
      "model.path", "data.test", "eval.attacks", "eval.p",
      "eval.eps_max", "eval.grid", "eval.iters", "eval.seed",
      "exec.mode",  "out.dir"};
  reject_unknown_keys(cfg, keys);
  const std::string model_path = cfg.require_str("model.path");
  require_file(model_path);
  const std::string out = cfg.require_str("out.dir");
  ensure_dir(out);
  const par::Mode mode = exec_mode(cfg);

  MlpModel model = load_checkpoint(model_path);
  LabeledDataset test_ds = load_dataset(cfg.require_str("data.test"));
  EvalPlan plan = resolve_eval(cfg, test_ds.spec, 1);

  std::vector<RobustnessCurve> curves{robustness_curve(
      model, test_ds, plan.suite, plan.grid,
      derive_seed(plan.seed, "eval", 0), mode)};
  CurveAggregate agg = aggregate_curves(curves);
  write_curves_csv(out + "/curves.csv", curves, {plan.seed});
  write_aggregate_csv(out + "/aggregate.csv", agg);
  std::cout << "nauc=" << format_g17(agg.nauc_mean) << "\n";
  std::cout << "wrote " << out << "/curves.csv, aggregate.csv\n";
  return 0;
}

namespace {

void usage(std::ostream& os) {
  os << "usage: mrl <command> [--config FILE] [--key value | --key=value]...\n"
        "\n"
        "commands:\n"
        "  gen-data    write a synthetic dataset (train/test CSV + sidecar)\n"
        "  run         train models and emit robustness curves\n"
        "  theory      emit the certification/covering-gap/volume report\n"
        "  ingest-idx  convert an IDX image/label pair to dataset CSV\n"
        "  eval        evaluate an existing checkpoint\n"
        "\n"
        "Configuration is a flat key=value space: --config loads a file\n"
        "(one pair per line, '#' comments), flags override it. Unknown\n"
        "keys are rejected. Exit codes: 0 ok, 2 config error, 3 invariant\n"
        "violation.\n";
}

}  // namespace

int dispatch(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  if (args.empty()) {
    usage(std::cerr);
    return 2;
  }
  const std::string sub = args[0];
  if (sub == "help" || sub == "--help" || sub == "-h") {
    usage(std::cout);
    return 0;
  }
  try {
    std::string config_path;
    std::vector<std::string> rest;
    for (std::size_t i = 1; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size())
          throw ConfigError("--config is missing a path");
        if (!config_path.empty()) throw ConfigError("duplicate --config");
        config_path = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        if (!config_path.empty()) throw ConfigError("duplicate --config");
        config_path = args[i].substr(9);
      } else {
        rest.push_back(args[i]);
      }
    }
    Config cfg;
    if (!config_path.empty()) cfg = load_config_file(config_path);
    apply_overrides(cfg, rest);

    if (sub == "gen-data") return cmd_gen_data(cfg);
    if (sub == "run") return cmd_run(cfg);
    if (sub == "theory") return cmd_theory(cfg);
    if (sub == "ingest-idx") return cmd_ingest_idx(cfg);
    if (sub == "eval") return cmd_eval(cfg);
    throw ConfigError("unknown command '" + sub + "'");
  } catch (const InvariantError& e) {
    std::cerr << "invariant violation: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace mrl
