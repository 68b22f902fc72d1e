#include "ptychodd/metrics.hpp"

#include <cmath>
#include <limits>

#include "ptychodd/forward.hpp"
#include "ptychodd/stagm.hpp"

namespace ptychodd {

double r_factor(const std::vector<ComplexField2D>& sub_iterates,
                const std::vector<FrameStack>& frames, const ComplexField2D& probe) {
  if (sub_iterates.size() != frames.size())
    throw std::invalid_argument("r_factor: subdomain count mismatch");
  double num = 0.0, den = 0.0;
  for (size_t d = 0; d < frames.size(); ++d) {
    const auto au = forward(probe, sub_iterates[d], frames[d].geometry);
    for (size_t j = 0; j < au.size(); ++j)
      for (int64_t i = 0; i < au[j].size(); ++i) {
        const double sf = std::sqrt(frames[d].frames[j][i]);
        num += std::abs(std::abs(au[j][i]) - sf);
        den += sf;
      }
  }
  if (den <= 0.0) throw std::invalid_argument("r_factor: all-zero data, metric undefined");
  return num / den;
}

double relative_error(const std::vector<ComplexField2D>& current,
                      const std::vector<ComplexField2D>& previous) {
  if (current.size() != previous.size())
    throw std::invalid_argument("relative_error: subdomain count mismatch");
  double worst = 0.0;
  for (size_t d = 0; d < current.size(); ++d) {
    if (!current[d].same_shape(previous[d]))
      throw std::invalid_argument("relative_error: shape mismatch");
    double diff = 0.0, norm = 0.0;
    for (int64_t i = 0; i < current[d].size(); ++i) {
      diff += std::norm(current[d][i] - previous[d][i]);
      norm += std::norm(current[d][i]);
    }
    if (norm <= 0.0) throw std::invalid_argument("relative_error: zero current norm");
    worst = std::max(worst, std::sqrt(diff / norm));
  }
  return worst;
}

double snr_db(const ComplexField2D& recovered, const ComplexField2D& truth) {
  if (!recovered.same_shape(truth)) throw std::invalid_argument("snr_db: shape mismatch");
  double diff = 0.0, ref = 0.0;
  for (int64_t i = 0; i < recovered.size(); ++i) {
    diff += std::norm(recovered[i] - truth[i]);
    ref += std::norm(recovered[i]);
  }
  if (diff == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(diff / ref);
}

double snr_intensity_db(const FrameStack& noisy, const FrameStack& clean) {
  if (noisy.frames.size() != clean.frames.size())
    throw std::invalid_argument("snr_intensity_db: frame count mismatch");
  double diff = 0.0, ref = 0.0;
  for (size_t j = 0; j < noisy.frames.size(); ++j)
    for (int64_t i = 0; i < noisy.frames[j].size(); ++i) {
      const double e = noisy.frames[j][i] - clean.frames[j][i];
      diff += e * e;
      ref += noisy.frames[j][i] * noisy.frames[j][i];
    }
  if (diff == 0.0) return std::numeric_limits<double>::infinity();
  return -10.0 * std::log10(diff / ref);
}

double augmented_lagrangian(const SolverState& state,
                            const std::vector<std::vector<ComplexField2D>>& au,
                            const std::vector<FrameStack>& frames, const DecompositionPlan& plan,
                            double epsilon, double eta, double r) {
  double total = 0.0;
  for (int d = 0; d < plan.D; ++d) {
    total += stagm::value(state.z[d], frames[d], epsilon);
    // eta * (Re<Gamma, Au - z> + 1/2 ||Au - z||^2)
    for (size_t j = 0; j < au[d].size(); ++j)
      for (int64_t i = 0; i < au[d][j].size(); ++i) {
        const cdouble resid = au[d][j][i] - state.z[d][j][i];
        total += eta * (std::real(std::conj(state.gamma[d][j][i]) * resid) +
                        0.5 * std::norm(resid));
      }
  }
  for (size_t p = 0; p < plan.overlaps.size(); ++p) {
    const auto& pair = plan.overlaps[p];
    const int ds[2] = {pair.d1, pair.d2};
    for (int side = 0; side < 2; ++side) {
      ComplexField2D ru = restrict_overlap(state.u[ds[side]], plan, ds[side], ds[1 - side]);
      for (int64_t i = 0; i < ru.size(); ++i) {
        const cdouble resid = ru[i] - state.v[p][i];
        total += r * (std::real(std::conj(state.lambda[p][side][i]) * resid) +
                      0.5 * std::norm(resid));
      }
    }
  }
  return total;
}

double virtual_seconds(const std::vector<ConvergenceRecord>& records) {
  double s = 0.0;
  for (const auto& rec : records) s += rec.t_virtual_ms * 1e-3;
  return s;
}

SpeedupReport speedup_report(const std::vector<RunTiming>& timings) {
  const RunTiming* baseline = nullptr;
  for (const auto& t : timings)
    if (t.D == 1) baseline = &t;
  if (!baseline) throw std::invalid_argument("speedup_report: D=1 baseline run missing");
  SpeedupReport report;
  for (const auto& t : timings) {
    SpeedupRow row;
    row.D = t.D;
    row.iterations = t.iterations;
    row.virtual_seconds = t.virtual_seconds;
    row.speedup = baseline->virtual_seconds / t.virtual_seconds;
    row.efficiency = row.speedup / t.D;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace ptychodd
