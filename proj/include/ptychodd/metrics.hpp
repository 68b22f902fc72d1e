#pragma once

#include "ptychodd/solver.hpp"

namespace ptychodd {

/// l1 amplitude-fit residual over all subdomains:
/// sum_d || |A_d u_d| - sqrt(f_d) ||_1 / sum_d || sqrt(f_d) ||_1.
double r_factor(const std::vector<ComplexField2D>& sub_iterates,
                const std::vector<FrameStack>& frames, const ComplexField2D& probe);

/// max_d ||u_d^n - u_d^{n-1}|| / ||u_d^n||.
double relative_error(const std::vector<ComplexField2D>& current,
                      const std::vector<ComplexField2D>& previous);

/// -10 log10(||u_r - u_g||^2 / ||u_r||^2); +inf for identical fields.
double snr_db(const ComplexField2D& recovered, const ComplexField2D& truth);

/// Same formula on real-valued intensity stacks (noise-level measurement).
double snr_intensity_db(const FrameStack& noisy, const FrameStack& clean);

/// Augmented Lagrangian evaluated term by term; `au` holds A_d u_d of the state.
double augmented_lagrangian(const SolverState& state,
                            const std::vector<std::vector<ComplexField2D>>& au,
                            const std::vector<FrameStack>& frames, const DecompositionPlan& plan,
                            double epsilon, double eta, double r);

struct SpeedupRow {
  int D = 0;
  int64_t iterations = 0;
  double virtual_seconds = 0.0;
  double speedup = 0.0;     // vs the D=1 baseline
  double efficiency = 0.0;  // speedup / D
};

struct SpeedupReport {
  std::vector<SpeedupRow> rows;
};

struct RunTiming {
  int D = 0;
  int64_t iterations = 0;
  double virtual_seconds = 0.0;  // sum over iterations of max per-subdomain time
};

/// Ratios against the D=1 baseline; throws when the baseline is missing.
SpeedupReport speedup_report(const std::vector<RunTiming>& timings);

/// Virtual wall-clock seconds of a run: communication-free per-iteration
/// maxima summed over iterations.
double virtual_seconds(const std::vector<ConvergenceRecord>& records);

}  // namespace ptychodd
