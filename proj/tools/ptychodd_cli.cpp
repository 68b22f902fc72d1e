// Command-line driver: simulate -> reconstruct/blind -> evaluate over
// directory-based datasets and run outputs.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ptychodd/blind.hpp"
#include "ptychodd/ddplan.hpp"
#include "ptychodd/io.hpp"
#include "ptychodd/metrics.hpp"
#include "ptychodd/simulate.hpp"
#include "ptychodd/solver.hpp"

namespace fs = std::filesystem;
using namespace ptychodd;

namespace {

// Exit codes: 0 ok, 2 config, 3 format, 4 infeasible plan, 5 divergence.
constexpr int kExitConfig = 2;
constexpr int kExitFormat = 3;
constexpr int kExitPlan = 4;
constexpr int kExitDivergence = 5;

struct PlanError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

DecompositionPlan make_plan(const ScanGeometry& geometry, int D, const std::string& axis) {
  SplitAxis ax = SplitAxis::Auto;
  if (axis == "rows") ax = SplitAxis::Rows;
  else if (axis == "cols") ax = SplitAxis::Columns;
  else if (axis != "auto") throw std::invalid_argument("--split-axis must be auto|rows|cols");
  try {
    return plan_stripes(geometry, D, ax);
  } catch (const std::invalid_argument& e) {
    throw PlanError(e.what());
  }
}

struct SimulateArgs {
  int64_t size = 256;
  int64_t probe_side = 64;
  int64_t step = 8;
  double noise_snr_db = 0.0;  // 0 = noiseless
  uint64_t seed = 1;
  std::string out;
};

struct SolveArgs {
  std::string dataset;
  std::string out;
  int subdomains = 2;
  double epsilon = 0.5;
  double eta = 0.1;
  double r = 4.0e3;
  int max_iters = 0;  // 0 = stop-rule default (1000 rf / 200 re)
  double tol_rf = 1.0e-5;
  double tol_re = 1.0e-3;
  int threads = 0;
  bool record_lagrangian = false;
  std::string stop = "auto";
  std::string split_axis = "auto";
  bool quiet = false;
  // blind extras
  double mu = 2.0e2;
  double gamma = 0.0;  // 0 = 1e-3 * eta
  double support_radius = 0.0;
};

struct Dataset {
  ScanGeometry geometry;
  FrameStack frames;
  ComplexField2D probe;
  std::optional<ComplexField2D> truth;
  std::optional<RealField2D> pin;
  bool noisy = false;
  nlohmann::json meta;
};

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  ds.meta = read_json(dir / "meta.json");
  if (ds.meta.value("schema_version", 0) != 1)
    throw FormatError("unsupported dataset schema_version", 0);
  ds.geometry = geometry_from_json(ds.meta.at("geometry"));
  ds.frames.geometry = ds.geometry;
  ds.frames.frames = read_frames(dir / "frames.ptya");
  ds.frames.validate();
  ds.probe = read_complex_array(dir / "probe.ptya");
  if (fs::exists(dir / "sample.ptya")) ds.truth = read_complex_array(dir / "sample.ptya");
  if (fs::exists(dir / "pin.ptya")) ds.pin = read_real_array(dir / "pin.ptya");
  ds.noisy = !ds.meta.value("noise", nlohmann::json()).is_null();
  return ds;
}

void write_run_common(const fs::path& out, const nlohmann::json& params,
                      const std::vector<ComplexField2D>& subs, const ComplexField2D& merged,
                      const std::vector<ConvergenceRecord>& records, nlohmann::json summary) {
  fs::create_directories(out);
  write_array(out / "merged.ptya", merged);
  for (size_t d = 0; d < subs.size(); ++d)
    write_array(out / ("sub_" + std::to_string(d) + ".ptya"), subs[d]);
  write_convergence_csv(out / "convergence.csv", records);
  summary["virtual_seconds"] = virtual_seconds(records);
  double actual = 0.0;
  for (const auto& rec : records) actual += rec.t_actual_ms * 1e-3;
  summary["actual_seconds"] = actual;
  write_json(out / "summary.json", summary);
  nlohmann::json meta = {{"schema_version", 1}, {"kind", "run"}, {"params", params}};
  write_json(out / "meta.json", meta);
}

int cmd_simulate(const SimulateArgs& a) {
  const int64_t border = a.probe_side / 2;
  auto [mag, ph] = make_test_images(256, 256, 0, a.seed);
  if (a.size != 256) {
    mag = bilinear_resize(mag, a.size, a.size);
    ph = bilinear_resize(ph, a.size, a.size);
  }
  for (int64_t r = 0; r < a.size; ++r)
    for (int64_t c = 0; c < a.size; ++c)
      if (r < border || r >= a.size - border || c < border || c >= a.size - border) {
        mag.at(r, c) = 1.0;
        ph.at(r, c) = 0.0;
      }

  ScanGeometry geometry;
  try {
    geometry = make_raster_scan(a.size, a.size, a.probe_side, a.step);
  } catch (const std::invalid_argument& e) {
    throw PlanError(e.what());
  }
  const ComplexField2D sample = make_sample(mag, ph, &geometry);
  const ComplexField2D probe = make_zone_plate_probe(a.probe_side);
  FrameStack frames = simulate_frames(probe, sample, geometry);

  nlohmann::json noise = nullptr;
  if (a.noise_snr_db > 0.0) {
    const double scale = calibrate_noise_scale(frames, a.noise_snr_db, a.seed);
    auto [noisy, achieved] = add_poisson_noise(frames, NoiseSpec{scale, a.seed});
    frames = std::move(noisy);
    noise = {{"target_snr_db", a.noise_snr_db}, {"scale", scale},
             {"seed", a.seed}, {"achieved_snr_db", achieved}};
    std::cout << "poisson noise: scale " << scale << ", achieved SNR " << achieved << " dB\n";
  }

  const fs::path out = a.out;
  fs::create_directories(out);
  write_frames(out / "frames.ptya", frames.frames);
  write_array(out / "probe.ptya", probe);
  write_array(out / "sample.ptya", sample);
  write_array(out / "pin.ptya", vacuum_border_mask(a.size, a.size, border));
  nlohmann::json meta = {
      {"schema_version", 1},
      {"kind", "dataset"},
      {"geometry", geometry_to_json(geometry)},
      {"seed", a.seed},
      {"border", border},
      {"noise", noise},
  };
  write_json(out / "meta.json", meta);
  std::cout << "dataset: " << geometry.frame_count() << " frames (" << geometry.grid_rows << "x"
            << geometry.grid_cols << "), image " << a.size << "^2 -> " << out.string() << "\n";
  return 0;
}

NonblindConfig solve_config(const SolveArgs& a, bool noisy) {
  NonblindConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.eta = a.eta;
  cfg.r = a.r;
  cfg.tol_rf = a.tol_rf;
  cfg.tol_re = a.tol_re;
  cfg.threads = a.threads;
  cfg.record_lagrangian = a.record_lagrangian;
  const bool use_re = a.stop == "re" || (a.stop == "auto" && noisy);
  if (a.stop != "rf" && a.stop != "re" && a.stop != "auto")
    throw std::invalid_argument("--stop must be rf|re|auto");
  cfg.stop_rule = use_re ? StopRule::RelativeError : StopRule::RFactor;
  cfg.max_iters = a.max_iters > 0 ? a.max_iters : (use_re ? 200 : 1000);
  return cfg;
}

int cmd_reconstruct(const SolveArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const DecompositionPlan plan = make_plan(ds.geometry, a.subdomains, a.split_axis);
  const NonblindConfig cfg = solve_config(a, ds.noisy);
  NonblindSolver solver(plan, ds.frames, ds.probe, cfg, ds.pin ? &*ds.pin : nullptr);
  const NonblindResult result = solver.run([&](const ConvergenceRecord& rec) {
    if (!a.quiet && rec.iteration % 25 == 0)
      std::cout << "iter " << rec.iteration << "  rf " << rec.rf << "  re " << rec.re << "\n";
  });

  nlohmann::json params = {
      {"dataset", a.dataset}, {"subdomains", a.subdomains}, {"epsilon", cfg.epsilon},
      {"eta", cfg.eta}, {"r", cfg.r}, {"max_iters", cfg.max_iters},
      {"tol_rf", cfg.tol_rf}, {"tol_re", cfg.tol_re}, {"threads", cfg.threads},
      {"stop", cfg.stop_rule == StopRule::RFactor ? "rf" : "re"},
      {"split_axis", a.split_axis},
  };
  nlohmann::json summary = {
      {"solver", "nonblind"}, {"D", a.subdomains}, {"iterations", result.iterations},
      {"final_rf", result.final_rf}, {"final_re", result.final_re},
  };
  write_run_common(a.out, params, result.sub_solutions, result.merged, result.records,
                   std::move(summary));
  std::cout << "done: " << result.iterations << " iterations, RF " << result.final_rf << ", RE "
            << result.final_re << " -> " << a.out << "\n";
  return 0;
}

int cmd_blind(const SolveArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  const DecompositionPlan plan = make_plan(ds.geometry, a.subdomains, a.split_axis);
  BlindConfig cfg;
  cfg.epsilon = a.epsilon;
  cfg.eta = a.eta;
  cfg.r = a.r;
  cfg.mu = a.mu;
  cfg.gamma = a.gamma > 0.0 ? a.gamma : 1.0e-3 * a.eta;
  cfg.tol_rf = a.tol_rf;
  cfg.tol_re = a.tol_re;
  cfg.threads = a.threads;
  const bool use_re = a.stop == "re" || (a.stop == "auto" && ds.noisy);
  cfg.stop_rule = use_re ? StopRule::RelativeError : StopRule::RFactor;
  cfg.max_iters = a.max_iters > 0 ? a.max_iters : (use_re ? 200 : 1000);
  if (a.support_radius > 0.0)
    cfg.support_mask = disk_support_mask(ds.geometry.frame_side, a.support_radius);

  BlindSolver solver(plan, ds.frames, cfg, ds.pin ? &*ds.pin : nullptr);
  const BlindResult result = solver.run([&](const ConvergenceRecord& rec) {
    if (!a.quiet && rec.iteration % 25 == 0)
      std::cout << "iter " << rec.iteration << "  rf " << rec.rf << "  re " << rec.re << "\n";
  });

  nlohmann::json params = {
      {"dataset", a.dataset}, {"subdomains", a.subdomains}, {"epsilon", cfg.epsilon},
      {"eta", cfg.eta}, {"r", cfg.r}, {"mu", cfg.mu}, {"gamma", cfg.gamma},
      {"support_radius", a.support_radius}, {"max_iters", cfg.max_iters},
      {"tol_rf", cfg.tol_rf}, {"tol_re", cfg.tol_re}, {"threads", cfg.threads},
      {"stop", cfg.stop_rule == StopRule::RFactor ? "rf" : "re"},
      {"split_axis", a.split_axis},
  };
  nlohmann::json summary = {
      {"solver", "blind"}, {"D", a.subdomains}, {"iterations", result.iterations},
      {"final_rf", result.final_rf}, {"final_re", result.final_re},
  };
  write_run_common(a.out, params, result.sub_solutions, result.merged, result.records,
                   std::move(summary));
  write_array(fs::path(a.out) / "probe_recovered.ptya", result.probe);
  write_array(fs::path(a.out) / "probe_fourier.ptya", result.probe_fourier);
  write_array(fs::path(a.out) / "support_mask.ptya", result.support_mask);
  std::cout << "done: " << result.iterations << " iterations, RF " << result.final_rf << ", RE "
            << result.final_re << " -> " << a.out << "\n";
  return 0;
}

struct EvaluateArgs {
  std::string dataset;
  std::vector<std::string> runs;
  bool render = true;
};

int cmd_evaluate(const EvaluateArgs& a) {
  std::optional<ComplexField2D> truth;
  if (!a.dataset.empty()) {
    const Dataset ds = load_dataset(a.dataset);
    truth = ds.truth;
    if (!truth) std::cout << "note: dataset has no ground truth; SNR omitted\n";
  } else {
    std::cout << "note: no --dataset given; SNR omitted\n";
  }

  std::vector<RunTiming> timings;
  for (const auto& run : a.runs) {
    const fs::path dir = run;
    const nlohmann::json summary = read_json(dir / "summary.json");
    const ComplexField2D merged = read_complex_array(dir / "merged.ptya");

    std::cout << run << ": D " << summary.value("D", 0) << ", iterations "
              << summary.value("iterations", int64_t{0}) << ", RF " << summary.value("final_rf", 0.0)
              << ", virtual " << summary.value("virtual_seconds", 0.0) << " s";
    if (truth) {
      if (!merged.same_shape(*truth))
        throw FormatError("merged image shape does not match ground truth", 0);
      std::cout << ", SNR " << snr_db(merged, *truth) << " dB";
    }
    std::cout << "\n";

    if (a.render) {
      RealField2D mag(merged.height(), merged.width()), ph(merged.height(), merged.width());
      for (int64_t i = 0; i < merged.size(); ++i) {
        mag[i] = std::abs(merged[i]);
        const double p = std::arg(merged[i]);
        ph[i] = p < 0.0 ? p + 2.0 * std::numbers::pi : p;  // display in [0, 2pi), window [0, pi]
      }
      write_png_gray(dir / "magnitude.png", mag, 0.0, 1.0);
      write_png_gray(dir / "phase.png", ph, 0.0, std::numbers::pi);
    }

    RunTiming t;
    t.D = summary.value("D", 0);
    t.iterations = summary.value("iterations", int64_t{0});
    t.virtual_seconds = summary.value("virtual_seconds", 0.0);
    timings.push_back(t);
  }

  const bool have_baseline =
      std::any_of(timings.begin(), timings.end(), [](const RunTiming& t) { return t.D == 1; });
  if (timings.size() > 1 && have_baseline) {
    const SpeedupReport report = speedup_report(timings);
    std::cout << "\n  D  iterations  virtual_s  speedup  efficiency\n";
    for (const auto& row : report.rows) {
      std::printf("%3d  %10lld  %9.3f  %7.2f  %10.3f\n", row.D,
                  static_cast<long long>(row.iterations), row.virtual_seconds, row.speedup,
                  row.efficiency);
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ptychodd: ptychographic phase retrieval with overlapping domain decomposition"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* sim_cmd = app.add_subcommand("simulate", "Generate a synthetic dataset");
  sim_cmd->add_option("--size", sim.size, "Square image side in pixels")->capture_default_str();
  sim_cmd->add_option("--probe-side", sim.probe_side, "Probe frame side")->capture_default_str();
  sim_cmd->add_option("--step", sim.step, "Scan step in pixels")->capture_default_str();
  sim_cmd->add_option("--noise-snr-db", sim.noise_snr_db,
                      "Target intensity SNR for Poisson noise; 0 = noiseless")
      ->capture_default_str();
  sim_cmd->add_option("--seed", sim.seed, "RNG seed")->capture_default_str();
  sim_cmd->add_option("--out", sim.out, "Output dataset directory")->required();

  SolveArgs rec;
  auto* rec_cmd = app.add_subcommand("reconstruct", "Nonblind reconstruction (known probe)");
  SolveArgs bl;
  bl.r = 5.0e3;
  auto* bl_cmd = app.add_subcommand("blind", "Blind reconstruction (joint probe recovery)");
  for (auto [cmd, args] : {std::pair{rec_cmd, &rec}, std::pair{bl_cmd, &bl}}) {
    cmd->add_option("--dataset", args->dataset, "Dataset directory")->required();
    cmd->add_option("--out", args->out, "Run output directory")->required();
    cmd->add_option("--subdomains", args->subdomains, "Stripe count D")->capture_default_str();
    cmd->add_option("--epsilon", args->epsilon, "ST-AGM smoothing")->capture_default_str();
    cmd->add_option("--eta", args->eta, "Data-fit penalty weight")->capture_default_str();
    cmd->add_option("--r", args->r, "Overlap consensus weight")->capture_default_str();
    cmd->add_option("--max-iters", args->max_iters, "0 = stop-rule default")->capture_default_str();
    cmd->add_option("--tol-rf", args->tol_rf, "R-factor tolerance")->capture_default_str();
    cmd->add_option("--tol-re", args->tol_re, "Relative-error tolerance")->capture_default_str();
    cmd->add_option("--threads", args->threads, "0 = one per subdomain")->capture_default_str();
    cmd->add_option("--stop", args->stop, "rf|re|auto (auto: re for noisy data)")
        ->capture_default_str();
    cmd->add_option("--split-axis", args->split_axis, "auto|rows|cols")->capture_default_str();
    cmd->add_flag("--quiet", args->quiet, "Suppress per-iteration output");
  }
  rec_cmd->add_flag("--record-lagrangian", rec.record_lagrangian,
                    "Log the augmented Lagrangian per iteration");
  bl_cmd->add_option("--mu", bl.mu, "Probe consensus weight")->capture_default_str();
  bl_cmd->add_option("--gamma", bl.gamma, "Image proximal weight; 0 = 1e-3*eta")
      ->capture_default_str();
  bl_cmd->add_option("--support-radius", bl.support_radius,
                     "Fourier support disk radius in pixels; 0 = estimate from the data")
      ->capture_default_str();

  EvaluateArgs ev;
  auto* ev_cmd = app.add_subcommand("evaluate", "Score runs and render images");
  ev_cmd->add_option("--dataset", ev.dataset, "Dataset directory with ground truth");
  ev_cmd->add_option("--run", ev.runs, "Run directory (repeatable)")->required();
  ev_cmd->add_flag("!--no-render", ev.render, "Skip PNG rendering");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (sim_cmd->parsed()) return cmd_simulate(sim);
    if (rec_cmd->parsed()) return cmd_reconstruct(rec);
    if (bl_cmd->parsed()) return cmd_blind(bl);
    return cmd_evaluate(ev);
  } catch (const PlanError& e) {
    std::cerr << "infeasible plan: " << e.what() << "\n";
    return kExitPlan;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const FormatError& e) {
    std::cerr << "format error: " << e.what() << "\n";
    return kExitFormat;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}
