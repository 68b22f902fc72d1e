#include "ptychodd/ddplan.hpp"

#include <algorithm>

namespace ptychodd {

size_t DecompositionPlan::pair_index(int a, int b) const {
  if (a > b) std::swap(a, b);
  for (size_t p = 0; p < overlaps.size(); ++p)
    if (overlaps[p].d1 == a && overlaps[p].d2 == b) return p;
  throw std::invalid_argument("DecompositionPlan: subdomains are not neighbors");
}

Region DecompositionPlan::local_overlap(int d, size_t p) const {
  const Region& ov = overlaps[p].region;
  const Region& sub = subdomains[d];
  return {ov.row_start - sub.row_start, ov.row_end - sub.row_start, ov.col_start - sub.col_start,
          ov.col_end - sub.col_start};
}

std::vector<size_t> DecompositionPlan::pairs_of(int d) const {
  std::vector<size_t> out;
  for (size_t p = 0; p < overlaps.size(); ++p)
    if (overlaps[p].d1 == d || overlaps[p].d2 == d) out.push_back(p);
  return out;
}

DecompositionPlan plan_stripes(const ScanGeometry& geometry, int D, SplitAxis axis) {
  geometry.validate();
  if (D < 1) throw std::invalid_argument("plan_stripes: D must be >= 1");
  if (axis == SplitAxis::Auto)
    axis = geometry.grid_cols >= geometry.grid_rows ? SplitAxis::Columns : SplitAxis::Rows;
  const bool by_cols = axis == SplitAxis::Columns;
  const int64_t lines = by_cols ? geometry.grid_cols : geometry.grid_rows;
  if (D > lines)
    throw std::invalid_argument("plan_stripes: D exceeds the scan frame-line count");

  // Contiguous blocks of frame lines, earlier stripes take the remainder.
  std::vector<int64_t> block_begin(static_cast<size_t>(D) + 1, 0);
  const int64_t base = lines / D;
  const int64_t extra = lines % D;
  for (int d = 0; d < D; ++d) block_begin[d + 1] = block_begin[d] + base + (d < extra ? 1 : 0);

  DecompositionPlan plan;
  plan.D = D;
  plan.geometry = geometry;
  plan.frame_assignment.resize(static_cast<size_t>(geometry.frame_count()));
  plan.frames_of.resize(static_cast<size_t>(D));

  for (int64_t j = 0; j < geometry.frame_count(); ++j) {
    const int64_t line = by_cols ? j % geometry.grid_cols : j / geometry.grid_cols;
    const int d = static_cast<int>(
        std::upper_bound(block_begin.begin() + 1, block_begin.end(), line) - block_begin.begin() -
        1);
    plan.frame_assignment[j] = d;
    plan.frames_of[d].push_back(j);
  }

  for (int d = 0; d < D; ++d) {
    if (plan.frames_of[d].empty()) throw std::invalid_argument("plan_stripes: empty subdomain");
    Region sub = geometry.window(plan.frames_of[d].front());
    for (int64_t j : plan.frames_of[d]) {
      Region w = geometry.window(j);
      sub.row_start = std::min(sub.row_start, w.row_start);
      sub.row_end = std::max(sub.row_end, w.row_end);
      sub.col_start = std::min(sub.col_start, w.col_start);
      sub.col_end = std::max(sub.col_end, w.col_end);
    }
    plan.subdomains.push_back(sub);
  }

  for (int d1 = 0; d1 < D; ++d1)
    for (int d2 = d1 + 1; d2 < D; ++d2)
      if (plan.subdomains[d1].intersects(plan.subdomains[d2]))
        plan.overlaps.push_back({d1, d2, plan.subdomains[d1].intersection(plan.subdomains[d2])});

  for (int d = 0; d < D; ++d) {
    const Region& sub = plan.subdomains[d];
    ScanGeometry local;
    local.frame_side = geometry.frame_side;
    local.step = geometry.step;
    local.image_height = sub.height();
    local.image_width = sub.width();
    local.grid_rows = by_cols ? geometry.grid_rows : block_begin[d + 1] - block_begin[d];
    local.grid_cols = by_cols ? block_begin[d + 1] - block_begin[d] : geometry.grid_cols;
    for (int64_t j : plan.frames_of[d]) {
      auto [r, c] = geometry.positions[j];
      local.positions.emplace_back(r - sub.row_start, c - sub.col_start);
    }
    local.validate();
    plan.local_geometries.push_back(std::move(local));
  }
  return plan;
}

ComplexField2D restrict_overlap(const ComplexField2D& u_d, const DecompositionPlan& plan, int d,
                                int neighbor) {
  const size_t p = plan.pair_index(d, neighbor);
  if (!u_d.same_shape(ComplexField2D(plan.subdomains[d].height(), plan.subdomains[d].width())))
    throw std::invalid_argument("restrict_overlap: sub-solution shape mismatch");
  return extract(u_d, plan.local_overlap(d, p));
}

ComplexField2D merge(const std::vector<ComplexField2D>& sub_solutions,
                     const DecompositionPlan& plan) {
  if (static_cast<int>(sub_solutions.size()) != plan.D)
    throw std::invalid_argument("merge: one sub-solution per subdomain required");
  ComplexField2D out(plan.geometry.image_height, plan.geometry.image_width);
  RealField2D count(plan.geometry.image_height, plan.geometry.image_width, 0.0);
  for (int d = 0; d < plan.D; ++d) {
    const Region& sub = plan.subdomains[d];
    if (sub_solutions[d].height() != sub.height() || sub_solutions[d].width() != sub.width())
      throw std::invalid_argument("merge: sub-solution shape mismatch");
    embed_add(sub_solutions[d], sub, out);
    for (int64_t r = sub.row_start; r < sub.row_end; ++r)
      for (int64_t c = sub.col_start; c < sub.col_end; ++c) count.at(r, c) += 1.0;
  }
  for (int64_t i = 0; i < out.size(); ++i)
    out[i] = count[i] > 0.0 ? out[i] / count[i] : cdouble{1.0, 0.0};
  return out;
}

std::vector<FrameStack> partition_frames(const FrameStack& frames, const DecompositionPlan& plan) {
  if (static_cast<int64_t>(frames.frames.size()) != plan.geometry.frame_count())
    throw std::invalid_argument("partition_frames: frame count mismatch");
  std::vector<FrameStack> out(static_cast<size_t>(plan.D));
  for (int d = 0; d < plan.D; ++d) {
    out[d].geometry = plan.local_geometries[d];
    out[d].frames.reserve(plan.frames_of[d].size());
    for (int64_t j : plan.frames_of[d]) out[d].frames.push_back(frames.frames[j]);
  }
  return out;
}

}  // namespace ptychodd
