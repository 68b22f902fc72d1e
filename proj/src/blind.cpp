#include "ptychodd/blind.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "ptychodd/fft.hpp"
#include "ptychodd/forward.hpp"
#include "ptychodd/parallel.hpp"
#include "ptychodd/stagm.hpp"

namespace ptychodd {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

// Wrapped radial frequency distance from DC.
double freq_radius(int64_t k, int64_t l, int64_t side) {
  const double kk = static_cast<double>(std::min(k, side - k));
  const double ll = static_cast<double>(std::min(l, side - l));
  return std::sqrt(kk * kk + ll * ll);
}

}  // namespace

void BlindConfig::validate(int64_t frame_side) const {
  stagm::check_epsilon(epsilon);
  if (eta <= 0.0 || r <= 0.0 || mu <= 0.0 || gamma <= 0.0)
    throw std::invalid_argument("BlindConfig: eta, r, mu, gamma must be > 0");
  if (max_iters < 1) throw std::invalid_argument("BlindConfig: max_iters >= 1");
  if (tol_rf <= 0.0 || tol_re <= 0.0)
    throw std::invalid_argument("BlindConfig: tolerances must be > 0");
  if (support_mask.size() > 0) {
    if (support_mask.height() != frame_side || support_mask.width() != frame_side)
      throw std::invalid_argument("BlindConfig: support mask must be frame-sized");
    for (double m : support_mask.data())
      if (m != 0.0 && m != 1.0)
        throw std::invalid_argument("BlindConfig: support mask entries must be 0 or 1");
  }
}

RealField2D disk_support_mask(int64_t side, double radius) {
  RealField2D mask(side, side, 0.0);
  for (int64_t k = 0; k < side; ++k)
    for (int64_t l = 0; l < side; ++l)
      if (freq_radius(k, l, side) <= radius) mask.at(k, l) = 1.0;
  return mask;
}

RealField2D estimate_support_mask(const ComplexField2D& probe_guess, double energy_fraction) {
  const int64_t side = probe_guess.height();
  ComplexField2D spectrum = fft2_normalized(probe_guess);
  std::vector<std::pair<double, double>> by_radius;  // (radius, energy)
  by_radius.reserve(static_cast<size_t>(spectrum.size()));
  double total = 0.0;
  for (int64_t k = 0; k < side; ++k)
    for (int64_t l = 0; l < side; ++l) {
      const double e = std::norm(spectrum.at(k, l));
      by_radius.emplace_back(freq_radius(k, l, side), e);
      total += e;
    }
  std::sort(by_radius.begin(), by_radius.end());
  double acc = 0.0;
  double radius = 0.0;
  for (const auto& [rad, e] : by_radius) {
    acc += e;
    radius = rad;
    if (acc >= energy_fraction * total) break;
  }
  return disk_support_mask(side, radius);
}

BlindSolver::BlindSolver(const DecompositionPlan& plan, const FrameStack& frames,
                         const BlindConfig& config, const RealField2D* pin_ones)
    : plan_(plan), config_(config) {
  config_.validate(plan.geometry.frame_side);
  frames.validate();
  frames_ = partition_frames(frames, plan_);

  RealField2D coverage = scan_coverage(plan_.geometry);
  if (pin_ones && !(pin_ones->height() == coverage.height() && pin_ones->width() == coverage.width()))
    throw std::invalid_argument("BlindSolver: pin mask shape mismatch");
  for (int d = 0; d < plan_.D; ++d) {
    const Region& sub = plan_.subdomains[d];
    const ScanGeometry& local = plan_.local_geometries[d];
    std::vector<uint8_t> pin(static_cast<size_t>(local.image_height * local.image_width), 0);
    for (int64_t rr = 0; rr < local.image_height; ++rr)
      for (int64_t cc = 0; cc < local.image_width; ++cc) {
        const int64_t gr = sub.row_start + rr;
        const int64_t gc = sub.col_start + cc;
        pin[rr * local.image_width + cc] =
            coverage.at(gr, gc) == 0.0 || (pin_ones && pin_ones->at(gr, gc) > 0.5);
      }
    pin_.push_back(std::move(pin));

    RealField2D rpen(local.image_height, local.image_width, 0.0);
    for (size_t p : plan_.pairs_of(d)) {
      Region ov = plan_.local_overlap(d, p);
      for (int64_t rr = ov.row_start; rr < ov.row_end; ++rr)
        for (int64_t cc = ov.col_start; cc < ov.col_end; ++cc)
          rpen.at(rr, cc) += config_.r;
    }
    rpen_.push_back(std::move(rpen));

    std::vector<RealField2D> sf;
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
    throw std::invalid_argument("BlindSolver: all-zero measurements");

  // Probe initial guess: mean back-transform of the measured amplitudes.
  // The amplitudes carry no spatial-shift information, so the back-transform
  // peaks at the array origin; a checkerboard sign on the spectrum re-centers
  // the guess at (side/2, side/2) where the illumination lives.
  const int64_t side = plan_.geometry.frame_side;
  w0_ = ComplexField2D(side, side);
  int64_t count = 0;
  for (const auto& stack : frames_)
    for (const auto& f : stack.frames) {
      ComplexField2D amp(side, side);
      for (int64_t k = 0; k < side; ++k)
        for (int64_t l = 0; l < side; ++l)
          amp.at(k, l) = (k + l) % 2 == 0 ? std::sqrt(f.at(k, l)) : -std::sqrt(f.at(k, l));
      ifft2_normalized_inplace(amp);
      for (int64_t i = 0; i < amp.size(); ++i) w0_[i] += amp[i];
      ++count;
    }
  for (auto& x : w0_.data()) x /= static_cast<double>(count);

  // The averaged amplitudes underestimate the illumination flux (speckle
  // cancels in the mean). Rescale to the largest per-frame photon count,
  // which bounds ||w||^2 from below and is tight on near-vacuum patches.
  double flux = 0.0;
  for (const auto& stack : frames_)
    for (const auto& f : stack.frames) {
      double s = 0.0;
      for (double v : f.data()) s += v;
      flux = std::max(flux, s);
    }
  const double gain = std::sqrt(flux / w0_.norm_sq());
  for (auto& x : w0_.data()) x *= gain;

  mask_ = config_.support_mask.size() > 0 ? config_.support_mask
                                          : estimate_support_mask(w0_, config_.support_energy);
}

ComplexField2D BlindSolver::project_support(const ComplexField2D& probe,
                                            ComplexField2D* spectrum_out) const {
  ComplexField2D spectrum = fft2_normalized(probe);
  for (int64_t i = 0; i < spectrum.size(); ++i)
    if (mask_[i] == 0.0) spectrum[i] = {0.0, 0.0};
  if (spectrum_out) *spectrum_out = spectrum;
  ifft2_normalized_inplace(spectrum);
  return spectrum;
}

BlindState BlindSolver::init_state() const {
  BlindState s;
  s.w = w0_;
  for (int d = 0; d < plan_.D; ++d) {
    const ScanGeometry& local = plan_.local_geometries[d];
    s.w_copies.push_back(w0_);
    s.delta.emplace_back(local.frame_side, local.frame_side);
    s.u.emplace_back(local.image_height, local.image_width, cdouble{1.0, 0.0});
    s.z.push_back(forward(w0_, s.u.back(), local));
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

std::vector<double> BlindSolver::step(BlindState& state) const {
  const int D = plan_.D;
  std::vector<double> t_sub(static_cast<size_t>(D), 0.0);
  WorkerPool pool(config_.threads > 0 ? std::min(config_.threads, D) : D);

  // Shared probe: consensus average, Fourier support projection.
  {
    ComplexField2D avg(state.w.height(), state.w.width());
    for (int d = 0; d < D; ++d)
      for (int64_t i = 0; i < avg.size(); ++i) avg[i] += state.delta[d][i] + state.w_copies[d][i];
    for (auto& x : avg.data()) x /= static_cast<double>(D);
    state.w = project_support(avg, nullptr);
  }

  // Overlap consensus from u^n.
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

  // Z and Gamma from B(W^n, u^n), then probe copies W^{n+1}, then images U^{n+1}.
  pool.for_each(D, [&](int d) {
    const auto t0 = Clock::now();
    const ScanGeometry& local = plan_.local_geometries[d];
    const auto bn = forward(state.w_copies[d], state.u[d], local);
    auto& zd = state.z[d];
    auto& gd = state.gamma[d];
    const auto& fd = frames_[d].frames;
    for (size_t j = 0; j < zd.size(); ++j)
      for (int64_t i = 0; i < zd[j].size(); ++i) {
        const cdouble y = gd[j][i] + bn[j][i];
        const cdouble znew = stagm::pixel_prox(y, fd[j][i], config_.eta, config_.epsilon);
        zd[j][i] = znew;
        gd[j][i] = y - znew;
      }

    std::vector<ComplexField2D> resid;
    resid.reserve(zd.size());
    for (size_t j = 0; j < zd.size(); ++j) {
      ComplexField2D rj(local.frame_side, local.frame_side);
      for (int64_t i = 0; i < rj.size(); ++i) rj[i] = zd[j][i] - gd[j][i];
      resid.push_back(std::move(rj));
    }

    // W step uses u^n.
    {
      ComplexField2D num = adjoint_probe(state.u[d], resid, local);
      RealField2D den = probe_density(state.u[d], local);
      auto& wd = state.w_copies[d];
      for (int64_t i = 0; i < wd.size(); ++i)
        wd[i] = (config_.eta * num[i] + config_.mu * (state.w[i] - state.delta[d][i])) /
                (config_.eta * den[i] + config_.mu);
    }

    // U step uses W^{n+1} and the proximal anchor gamma * u^n.
    {
      ComplexField2D num = adjoint(state.w_copies[d], resid, local);
      RealField2D den = illumination_density(state.w_copies[d], local);
      for (auto& x : num.data()) x *= config_.eta;
      for (size_t p : plan_.pairs_of(d)) {
        const int side = plan_.overlaps[p].d1 == d ? 0 : 1;
        const Region ov = plan_.local_overlap(d, p);
        for (int64_t rr = 0; rr < ov.height(); ++rr)
          for (int64_t cc = 0; cc < ov.width(); ++cc)
            num.at(ov.row_start + rr, ov.col_start + cc) +=
                config_.r *
                (state.v[p].at(rr, cc) - state.lambda[p][side].at(rr, cc));
      }
      auto& ud = state.u[d];
      for (int64_t i = 0; i < ud.size(); ++i) {
        const double dd = config_.eta * den[i] + rpen_[d][i] + config_.gamma;
        ud[i] = pin_[d][i] ? cdouble{1.0, 0.0} : (num[i] + config_.gamma * ud[i]) / dd;
      }
    }

    // Probe-consensus multiplier.
    for (int64_t i = 0; i < state.delta[d].size(); ++i)
      state.delta[d][i] += state.w_copies[d][i] - state.w[i];
    t_sub[d] += ms_since(t0);
  });

  // Lambda from u^{n+1}, v^{n+1}.
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

  ++state.iteration;
  return t_sub;
}

BlindResult BlindSolver::run(
    const std::function<void(const ConvergenceRecord&)>& on_iteration) const {
  BlindState state = init_state();
  BlindResult result;
  std::vector<ComplexField2D> u_prev = state.u;
  WorkerPool pool(config_.threads > 0 ? std::min(config_.threads, plan_.D) : plan_.D);

  for (int64_t n = 1; n <= config_.max_iters; ++n) {
    const auto t0 = Clock::now();
    std::vector<double> t_sub = step(state);

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

    // RF with the shared probe, per the stopping rule for blind recovery.
    std::vector<double> rf_num(static_cast<size_t>(plan_.D), 0.0);
    pool.for_each(plan_.D, [&](int d) {
      const auto bw = forward(state.w, state.u[d], plan_.local_geometries[d]);
      double s = 0.0;
      for (size_t j = 0; j < bw.size(); ++j)
        for (int64_t i = 0; i < bw[j].size(); ++i)
          s += std::abs(std::abs(bw[j][i]) - sqrt_f_[d][j][i]);
      rf_num[d] = s;
    });
    double rf = 0.0;
    for (double s : rf_num) rf += s;
    rf /= sqrt_f_l1_;
    if (!std::isfinite(rf) || !std::isfinite(re)) throw DivergenceError(n);

    ConvergenceRecord rec;
    rec.iteration = n;
    rec.rf = rf;
    rec.re = re;
    rec.t_sub_ms = std::move(t_sub);
    rec.t_virtual_ms = *std::max_element(rec.t_sub_ms.begin(), rec.t_sub_ms.end());
    rec.t_actual_ms = ms_since(t0);
    if (on_iteration) on_iteration(rec);
    result.records.push_back(std::move(rec));
    result.final_rf = rf;
    result.final_re = re;
    result.iterations = n;

    const bool stop = config_.stop_rule == StopRule::RFactor ? rf <= config_.tol_rf
                                                             : re <= config_.tol_re;
    if (stop) break;
  }

  result.probe = project_support(state.w, &result.probe_fourier);
  result.support_mask = mask_;
  result.sub_solutions = state.u;
  result.merged = merge(state.u, plan_);
  return result;
}

}  // namespace ptychodd
