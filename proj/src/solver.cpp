#include "ptychodd/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ptychodd/forward.hpp"
#include "ptychodd/metrics.hpp"
#include "ptychodd/parallel.hpp"
#include "ptychodd/stagm.hpp"

namespace ptychodd {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

void NonblindConfig::validate() const {
  stagm::check_epsilon(epsilon);
  if (eta <= 0.0 || r <= 0.0) throw std::invalid_argument("NonblindConfig: eta, r must be > 0");
  if (max_iters < 1) throw std::invalid_argument("NonblindConfig: max_iters >= 1");
  if (tol_rf <= 0.0 || tol_re <= 0.0)
    throw std::invalid_argument("NonblindConfig: tolerances must be > 0");
  if (threads < 0) throw std::invalid_argument("NonblindConfig: threads >= 0");
}

NonblindSolver::NonblindSolver(const DecompositionPlan& plan, const FrameStack& frames,
                               const ComplexField2D& probe, const NonblindConfig& config,
                               const RealField2D* pin_ones)
    : plan_(plan), probe_(probe), config_(config) {
  config_.validate();
  frames.validate();
  frames_ = partition_frames(frames, plan_);

  // Globally pinned pixels: outside scan coverage, plus any caller-declared
  // vacuum region.
  RealField2D coverage = scan_coverage(plan_.geometry);
  std::vector<uint8_t> global_pin(static_cast<size_t>(coverage.size()), 0);
  if (pin_ones && !(pin_ones->height() == coverage.height() && pin_ones->width() == coverage.width()))
    throw std::invalid_argument("NonblindSolver: pin mask shape mismatch");
  for (int64_t i = 0; i < coverage.size(); ++i)
    global_pin[i] = coverage[i] == 0.0 || (pin_ones && (*pin_ones)[i] > 0.5);

  for (int d = 0; d < plan_.D; ++d) {
    const Region& sub = plan_.subdomains[d];
    const ScanGeometry& local = plan_.local_geometries[d];
    RealField2D density = illumination_density(probe_, local);

    RealField2D denom(local.image_height, local.image_width, 0.0);
    for (int64_t i = 0; i < denom.size(); ++i) denom[i] = config_.eta * density[i];
    for (size_t p : plan_.pairs_of(d)) {
      Region ov = plan_.local_overlap(d, p);
      for (int64_t rr = ov.row_start; rr < ov.row_end; ++rr)
        for (int64_t cc = ov.col_start; cc < ov.col_end; ++cc)
          denom.at(rr, cc) += config_.r;
    }

    std::vector<uint8_t> pin(static_cast<size_t>(denom.size()), 0);
    for (int64_t rr = 0; rr < local.image_height; ++rr)
      for (int64_t cc = 0; cc < local.image_width; ++cc) {
        const int64_t gi = (sub.row_start + rr) * plan_.geometry.image_width + sub.col_start + cc;
        pin[rr * local.image_width + cc] = global_pin[gi];
      }

    for (int64_t i = 0; i < density.size(); ++i)
      if (!pin[i] && density[i] <= 0.0)
        throw std::runtime_error(
            "NonblindSolver: illumination density vanishes inside subdomain " + std::to_string(d) +
            "; A_d*A_d is singular (probe/scan leave interior pixels dark)");

    denom_.push_back(std::move(denom));
    pin_.push_back(std::move(pin));

    std::vector<RealField2D> sf;
    sf.reserve(frames_[d].frames.size());
    for (const auto& f : frames_[d].frames) {
      RealField2D s(f.height(), f.width());
      for (int64_t i = 0; i < f.size(); ++i) {
        s[i] = std::sqrt(f[i]);
        sqrt_f_l1_ += s[i];
      }
      sf.push_back(std::move(s));
    }
    sqrt_f_.push_back(std::move(sf));
  }
  if (sqrt_f_l1_ <= 0.0)
    throw std::invalid_argument("NonblindSolver: all-zero measurements, R-factor undefined");
}

SolverState NonblindSolver::init_state() const {
  SolverState s;
  for (int d = 0; d < plan_.D; ++d) {
    const ScanGeometry& local = plan_.local_geometries[d];
    s.u.emplace_back(local.image_height, local.image_width, cdouble{1.0, 0.0});
    s.z.push_back(forward(probe_, s.u.back(), local));
    std::vector<ComplexField2D> g;
    for (const auto& f : s.z.back()) g.emplace_back(f.height(), f.width());
    s.gamma.push_back(std::move(g));
  }
  for (const auto& pair : plan_.overlaps) {
    ComplexField2D r1 = restrict_overlap(s.u[pair.d1], plan_, pair.d1, pair.d2);
    ComplexField2D r2 = restrict_overlap(s.u[pair.d2], plan_, pair.d2, pair.d1);
    ComplexField2D v0(r1.height(), r1.width());
    for (int64_t i = 0; i < v0.size(); ++i) v0[i] = 0.5 * (r1[i] + r2[i]);
    s.v.push_back(std::move(v0));
    s.lambda.push_back({ComplexField2D(r1.height(), r1.width()),
                        ComplexField2D(r1.height(), r1.width())});
  }
  return s;
}

std::vector<double> NonblindSolver::step(SolverState& state,
                                         std::vector<std::vector<ComplexField2D>>& au) const {
  const int D = plan_.D;
  std::vector<double> t_sub(static_cast<size_t>(D), 0.0);
  WorkerPool pool(config_.threads > 0 ? std::min(config_.threads, D) : D);

  // z and Gamma updates, both from u^n.
  pool.for_each(D, [&](int d) {
    const auto t0 = Clock::now();
    auto& zd = state.z[d];
    auto& gd = state.gamma[d];
    const auto& fd = frames_[d].frames;
    for (size_t j = 0; j < zd.size(); ++j) {
      for (int64_t i = 0; i < zd[j].size(); ++i) {
        const cdouble y = gd[j][i] + au[d][j][i];
        const cdouble znew = stagm::pixel_prox(y, fd[j][i], config_.eta, config_.epsilon);
        zd[j][i] = znew;
        gd[j][i] = y - znew;
      }
    }
    t_sub[d] += ms_since(t0);
  });

  // Overlap consensus from the pre-update u^n and Lambda^n.
  pool.for_each(static_cast<int>(plan_.overlaps.size()), [&](int p) {
    const auto t0 = Clock::now();
    const auto& pair = plan_.overlaps[p];
    ComplexField2D r1 = restrict_overlap(state.u[pair.d1], plan_, pair.d1, pair.d2);
    ComplexField2D r2 = restrict_overlap(state.u[pair.d2], plan_, pair.d2, pair.d1);
    auto& vp = state.v[p];
    for (int64_t i = 0; i < vp.size(); ++i)
      vp[i] = 0.5 * (r1[i] + r2[i] + state.lambda[p][0][i] + state.lambda[p][1][i]);
    t_sub[pair.d1] += ms_since(t0);
  });

  // Image update.
  pool.for_each(D, [&](int d) {
    const auto t0 = Clock::now();
    const ScanGeometry& local = plan_.local_geometries[d];
    std::vector<ComplexField2D> resid;
    resid.reserve(state.z[d].size());
    for (size_t j = 0; j < state.z[d].size(); ++j) {
      ComplexField2D rj(local.frame_side, local.frame_side);
      for (int64_t i = 0; i < rj.size(); ++i) rj[i] = state.z[d][j][i] - state.gamma[d][j][i];
      resid.push_back(std::move(rj));
    }
    ComplexField2D num = adjoint(probe_, resid, local);
    for (auto& x : num.data()) x *= config_.eta;
    for (size_t p : plan_.pairs_of(d)) {
      const int side = plan_.overlaps[p].d1 == d ? 0 : 1;
      const Region ov = plan_.local_overlap(d, p);
      const auto& vp = state.v[p];
      const auto& lam = state.lambda[p][side];
      for (int64_t rr = 0; rr < ov.height(); ++rr)
        for (int64_t cc = 0; cc < ov.width(); ++cc)
          num.at(ov.row_start + rr, ov.col_start + cc) +=
              config_.r * (vp.at(rr, cc) - lam.at(rr, cc));
    }
    auto& ud = state.u[d];
    for (int64_t i = 0; i < ud.size(); ++i)
      ud[i] = pin_[d][i] ? cdouble{1.0, 0.0} : num[i] / denom_[d][i];
    t_sub[d] += ms_since(t0);
  });

  // Lambda update from u^{n+1} and v^{n+1}.
  pool.for_each(static_cast<int>(plan_.overlaps.size()), [&](int p) {
    const auto t0 = Clock::now();
    const auto& pair = plan_.overlaps[p];
    ComplexField2D r1 = restrict_overlap(state.u[pair.d1], plan_, pair.d1, pair.d2);
    ComplexField2D r2 = restrict_overlap(state.u[pair.d2], plan_, pair.d2, pair.d1);
    for (int64_t i = 0; i < state.v[p].size(); ++i) {
      state.lambda[p][0][i] += r1[i] - state.v[p][i];
      state.lambda[p][1][i] += r2[i] - state.v[p][i];
    }
    t_sub[pair.d1] += ms_since(t0);
  });

  // Fresh forward transform of u^{n+1}, reused by the next z step and the
  // R-factor gather.
  pool.for_each(D, [&](int d) {
    const auto t0 = Clock::now();
    au[d] = forward(probe_, state.u[d], plan_.local_geometries[d]);
    t_sub[d] += ms_since(t0);
  });

  ++state.iteration;
  return t_sub;
}

double NonblindSolver::r_factor_of(const std::vector<std::vector<ComplexField2D>>& au) const {
  double num = 0.0;
  for (int d = 0; d < plan_.D; ++d)
    for (size_t j = 0; j < au[d].size(); ++j)
      for (int64_t i = 0; i < au[d][j].size(); ++i)
        num += std::abs(std::abs(au[d][j][i]) - sqrt_f_[d][j][i]);
  return num / sqrt_f_l1_;
}

NonblindResult NonblindSolver::run(
    const std::function<void(const ConvergenceRecord&)>& on_iteration) const {
  SolverState state = init_state();
  std::vector<std::vector<ComplexField2D>> au;
  for (int d = 0; d < plan_.D; ++d) au.push_back(state.z[d]);  // z^0 = A u^0

  NonblindResult result;
  std::vector<ComplexField2D> u_prev = state.u;

  for (int64_t n = 1; n <= config_.max_iters; ++n) {
    const auto t0 = Clock::now();
    std::vector<double> t_sub = step(state, au);

    double re = 0.0;
    for (int d = 0; d < plan_.D; ++d) {
      double diff = 0.0, norm = 0.0;
      for (int64_t i = 0; i < state.u[d].size(); ++i) {
        diff += std::norm(state.u[d][i] - u_prev[d][i]);
        norm += std::norm(state.u[d][i]);
      }
      re = std::max(re, std::sqrt(diff) / std::sqrt(norm));
    }
    u_prev = state.u;

    const double rf = r_factor_of(au);
    if (!std::isfinite(rf) || !std::isfinite(re)) throw DivergenceError(n);

    ConvergenceRecord rec;
    rec.iteration = n;
    rec.rf = rf;
    rec.re = re;
    rec.t_sub_ms = std::move(t_sub);
    rec.t_virtual_ms = *std::max_element(rec.t_sub_ms.begin(), rec.t_sub_ms.end());
    rec.t_actual_ms = ms_since(t0);
    if (config_.record_lagrangian)
      rec.lagrangian = augmented_lagrangian(state, au, frames_, plan_, config_.epsilon, config_.eta,
                                            config_.r);
    if (on_iteration) on_iteration(rec);
    result.records.push_back(std::move(rec));
    result.final_rf = rf;
    result.final_re = re;
    result.iterations = n;

    const bool stop = config_.stop_rule == StopRule::RFactor ? rf <= config_.tol_rf
                                                             : re <= config_.tol_re;
    if (stop) break;
  }

  result.sub_solutions = state.u;
  result.merged = merge(state.u, plan_);
  return result;
}

}  // namespace ptychodd
