#pragma once

#include <array>
#include <functional>
#include <optional>

#include "ptychodd/ddplan.hpp"

namespace ptychodd {

enum class StopRule {
  RFactor,        // noiseless: stop when RF <= tol_rf
  RelativeError,  // noisy: stop when RE <= tol_re
};

struct NonblindConfig {
  double epsilon = 0.5;
  double eta = 0.1;
  double r = 4.0e3;
  int max_iters = 1000;
  double tol_rf = 1.0e-5;
  double tol_re = 1.0e-3;
  StopRule stop_rule = StopRule::RFactor;
  bool record_lagrangian = false;
  int threads = 0;  // 0 = one worker per subdomain

  void validate() const;
};

/// Per-iteration scalar diagnostics and timing.
struct ConvergenceRecord {
  int64_t iteration = 0;
  double rf = 0.0;
  double re = 0.0;
  std::optional<double> lagrangian;
  std::vector<double> t_sub_ms;  // per-subdomain compute time this iteration
  double t_virtual_ms = 0.0;     // max over subdomains
  double t_actual_ms = 0.0;      // measured wall time
};

/// ADMM iterates. Multiplier layout per overlap pair p = plan.overlaps[p]:
/// lambda[p][0] belongs to subdomain d1, lambda[p][1] to d2; v[p] is the
/// shared overlap variable.
struct SolverState {
  std::vector<ComplexField2D> u;
  std::vector<std::vector<ComplexField2D>> z;
  std::vector<std::vector<ComplexField2D>> gamma;
  std::vector<ComplexField2D> v;
  std::vector<std::array<ComplexField2D, 2>> lambda;
  int64_t iteration = 0;
};

struct NonblindResult {
  std::vector<ComplexField2D> sub_solutions;
  ComplexField2D merged;
  std::vector<ConvergenceRecord> records;
  int64_t iterations = 0;
  double final_rf = 0.0;
  double final_re = 0.0;
};

struct DivergenceError : std::runtime_error {
  int64_t iteration;
  explicit DivergenceError(int64_t iter)
      : std::runtime_error("solver diverged: non-finite iterate at iteration " +
                           std::to_string(iter)),
        iteration(iter) {}
};

/// Overlapping-DD ADMM driver over a stripe plan. D = 1 degenerates to the
/// whole-domain ADMM (no overlap variables).
class NonblindSolver {
 public:
  /// `pin_ones`: optional image-shaped 0/1 mask of pixels held at the vacuum
  /// value 1 after every image step. Pixels left uncovered by the scan are
  /// always pinned; the mask adds to that set (e.g. a known sample-free border).
  NonblindSolver(const DecompositionPlan& plan, const FrameStack& frames,
                 const ComplexField2D& probe, const NonblindConfig& config,
                 const RealField2D* pin_ones = nullptr);

  SolverState init_state() const;

  /// One full iteration in place (z -> v -> Gamma -> u -> Lambda); `au` caches
  /// A_d u_d of the incoming iterate and is replaced by the outgoing one.
  /// Returns per-subdomain compute seconds.
  std::vector<double> step(SolverState& state, std::vector<std::vector<ComplexField2D>>& au) const;

  NonblindResult run(const std::function<void(const ConvergenceRecord&)>& on_iteration = {}) const;

  const DecompositionPlan& plan() const { return plan_; }
  const std::vector<FrameStack>& partitioned_frames() const { return frames_; }
  const ComplexField2D& probe() const { return probe_; }
  const NonblindConfig& config() const { return config_; }

  /// Sum over all subdomains of || |A_d u_d| - sqrt(f_d) ||_1 over || sqrt(f_d) ||_1.
  double r_factor_of(const std::vector<std::vector<ComplexField2D>>& au) const;

 private:
  DecompositionPlan plan_;
  std::vector<FrameStack> frames_;
  ComplexField2D probe_;
  NonblindConfig config_;
  std::vector<RealField2D> denom_;                // eta*density + r*overlap coverage
  std::vector<std::vector<uint8_t>> pin_;         // subdomain-local pixels forced to 1
  std::vector<std::vector<RealField2D>> sqrt_f_;  // per-subdomain sqrt of measured frames
  double sqrt_f_l1_ = 0.0;
};

}  // namespace ptychodd
