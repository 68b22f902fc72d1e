#pragma once

#include "ptychodd/solver.hpp"

namespace ptychodd {

struct BlindConfig {
  double epsilon = 0.5;
  double eta = 0.1;
  double r = 5.0e3;
  double mu = 2.0e2;
  double gamma = 1.0e-4;  // proximal weight on the image update; default 1e-3 * eta
  RealField2D support_mask;  // frame-sized 0/1 field in Fourier coordinates; empty = estimate
  double support_energy = 0.995;  // energy fraction kept when estimating the mask from w^0
  int max_iters = 1000;
  double tol_rf = 1.0e-5;
  double tol_re = 1.0e-3;
  StopRule stop_rule = StopRule::RFactor;
  int threads = 0;

  void validate(int64_t frame_side) const;
};

struct BlindState {
  ComplexField2D w;                       // shared probe
  std::vector<ComplexField2D> w_copies;   // per-subdomain probe copies
  std::vector<ComplexField2D> delta;      // probe-consensus multipliers
  std::vector<ComplexField2D> u;
  std::vector<std::vector<ComplexField2D>> z;
  std::vector<std::vector<ComplexField2D>> gamma;
  std::vector<ComplexField2D> v;
  std::vector<std::array<ComplexField2D, 2>> lambda;
  int64_t iteration = 0;
};

struct BlindResult {
  ComplexField2D probe;          // recovered shared probe (spatial domain)
  ComplexField2D probe_fourier;  // its masked spectrum; exact zeros outside the support
  RealField2D support_mask;
  std::vector<ComplexField2D> sub_solutions;
  ComplexField2D merged;
  std::vector<ConvergenceRecord> records;
  int64_t iterations = 0;
  double final_rf = 0.0;
  double final_re = 0.0;
};

/// Centered-disk 0/1 mask in wrapped Fourier coordinates.
RealField2D disk_support_mask(int64_t side, double radius);

/// Smallest centered disk holding `energy_fraction` of the probe guess's
/// Fourier energy.
RealField2D estimate_support_mask(const ComplexField2D& probe_guess, double energy_fraction);

/// Joint probe/image ADMM over an overlapping stripe plan. Two subdomains is
/// the primary configuration; D != 2 generalizes the probe consensus average
/// to 1/D.
class BlindSolver {
 public:
  BlindSolver(const DecompositionPlan& plan, const FrameStack& frames, const BlindConfig& config,
              const RealField2D* pin_ones = nullptr);

  BlindState init_state() const;

  std::vector<double> step(BlindState& state) const;

  BlindResult run(const std::function<void(const ConvergenceRecord&)>& on_iteration = {}) const;

  const RealField2D& support_mask() const { return mask_; }
  const DecompositionPlan& plan() const { return plan_; }
  const std::vector<FrameStack>& partitioned_frames() const { return frames_; }

 private:
  ComplexField2D project_support(const ComplexField2D& probe, ComplexField2D* spectrum_out) const;

  DecompositionPlan plan_;
  std::vector<FrameStack> frames_;
  BlindConfig config_;
  RealField2D mask_;
  ComplexField2D w0_;
  std::vector<std::vector<uint8_t>> pin_;
  std::vector<RealField2D> rpen_;  // r * (# overlap pairs covering the pixel)
  std::vector<std::vector<RealField2D>> sqrt_f_;
  double sqrt_f_l1_ = 0.0;
};

}  // namespace ptychodd
