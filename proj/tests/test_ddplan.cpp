#include <random>
#include <set>

#include "doctest.h"
#include "ptychodd/ddplan.hpp"

using namespace ptychodd;

TEST_CASE("raster scan 256/64/8 yields the 25x25 grid") {
  ScanGeometry g = make_raster_scan(256, 256, 64, 8);
  CHECK(g.grid_rows == 25);
  CHECK(g.grid_cols == 25);
  CHECK(g.frame_count() == 625);
  CHECK(g.window(0) == Region{0, 64, 0, 64});
  CHECK(g.window(624) == Region{192, 256, 192, 256});
}

TEST_CASE("two stripes on the 256 configuration: 13/12 columns, 56-pixel overlap") {
  ScanGeometry g = make_raster_scan(256, 256, 64, 8);
  DecompositionPlan plan = plan_stripes(g, 2);
  REQUIRE(plan.D == 2);
  CHECK(plan.local_geometries[0].grid_cols == 13);
  CHECK(plan.local_geometries[1].grid_cols == 12);
  CHECK(plan.subdomains[0] == Region{0, 256, 0, 160});
  CHECK(plan.subdomains[1] == Region{0, 256, 104, 256});
  REQUIRE(plan.overlaps.size() == 1);
  CHECK(plan.overlaps[0].region.width() == 56);  // frame_side - step = 56
  CHECK(plan.overlaps[0].region.height() == 256);
}

TEST_CASE("two stripes on the 512/16 configuration overlap by 48 pixels") {
  ScanGeometry g = make_raster_scan(512, 512, 64, 16);
  CHECK(g.grid_cols == 29);
  DecompositionPlan plan = plan_stripes(g, 2);
  REQUIRE(plan.overlaps.size() == 1);
  CHECK(plan.overlaps[0].region.width() == 48);
}

TEST_CASE("stripe plans partition frames and keep invariants") {
  ScanGeometry g = make_raster_scan(512, 512, 64, 16);
  for (int D : {1, 2, 4, 6, 8, 10}) {
    DecompositionPlan plan = plan_stripes(g, D);
    // disjoint cover of frames
    std::set<int64_t> seen;
    for (int d = 0; d < D; ++d)
      for (int64_t j : plan.frames_of[d]) {
        CHECK(plan.frame_assignment[j] == d);
        CHECK(seen.insert(j).second);
      }
    CHECK(static_cast<int64_t>(seen.size()) == g.frame_count());
    for (int d = 0; d < D; ++d) {
      // subdomain is exactly the union of its windows
      const Region& sub = plan.subdomains[d];
      for (int64_t j : plan.frames_of[d]) CHECK(sub.contains(g.window(j)));
      // local geometry is the translated original
      const ScanGeometry& local = plan.local_geometries[d];
      CHECK(local.frame_count() == static_cast<int64_t>(plan.frames_of[d].size()));
      for (size_t k = 0; k < plan.frames_of[d].size(); ++k) {
        auto [gr, gc] = g.positions[plan.frames_of[d][k]];
        CHECK(local.positions[k].first == gr - sub.row_start);
        CHECK(local.positions[k].second == gc - sub.col_start);
      }
    }
    // overlaps are exactly the intersecting pairs, d1 < d2
    for (const auto& pair : plan.overlaps) {
      CHECK(pair.d1 < pair.d2);
      CHECK(pair.region ==
            plan.subdomains[pair.d1].intersection(plan.subdomains[pair.d2]));
      CHECK(plan.pair_index(pair.d2, pair.d1) == plan.pair_index(pair.d1, pair.d2));
    }
    // stripes only touch their neighbors in this configuration
    if (D > 1) CHECK(plan.overlaps.size() == static_cast<size_t>(D - 1));
  }
}

TEST_CASE("split-axis override and infeasible D") {
  ScanGeometry g = make_raster_scan(128, 256, 64, 8);  // 9 x 25 grid
  DecompositionPlan by_rows = plan_stripes(g, 3, SplitAxis::Rows);
  CHECK(by_rows.subdomains[0].width() == 256);
  DecompositionPlan automatic = plan_stripes(g, 3);  // longer axis = columns
  CHECK(automatic.subdomains[0].height() == 128);
  CHECK_THROWS_AS(plan_stripes(g, 10, SplitAxis::Rows), std::invalid_argument);
  CHECK_THROWS_AS(plan_stripes(g, 0), std::invalid_argument);
}

TEST_CASE("restrict/merge round trip is exact") {
  ScanGeometry g = make_raster_scan(96, 96, 32, 8);
  DecompositionPlan plan = plan_stripes(g, 3);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> nd;
  ComplexField2D global(96, 96);
  for (auto& x : global.data()) x = {nd(rng), nd(rng)};

  std::vector<ComplexField2D> subs;
  for (int d = 0; d < plan.D; ++d) subs.push_back(extract(global, plan.subdomains[d]));

  // restrictions from both sides agree with the global field on the overlap
  for (const auto& pair : plan.overlaps) {
    ComplexField2D r1 = restrict_overlap(subs[pair.d1], plan, pair.d1, pair.d2);
    ComplexField2D r2 = restrict_overlap(subs[pair.d2], plan, pair.d2, pair.d1);
    ComplexField2D expect = extract(global, pair.region);
    for (int64_t i = 0; i < expect.size(); ++i) {
      CHECK(r1[i] == expect[i]);
      CHECK(r2[i] == expect[i]);
    }
  }

  ComplexField2D merged = merge(subs, plan);
  RealField2D coverage = scan_coverage(g);
  for (int64_t r = 0; r < 96; ++r)
    for (int64_t c = 0; c < 96; ++c) {
      bool covered = false;
      for (const Region& sub : plan.subdomains) covered = covered || sub.contains(r, c);
      if (covered)
        CHECK(std::abs(merged.at(r, c) - global.at(r, c)) < 1e-12);
      else
        CHECK(merged.at(r, c) == cdouble{1.0, 0.0});
    }
}

TEST_CASE("pair_index rejects non-neighbors") {
  ScanGeometry g = make_raster_scan(512, 512, 64, 16);
  DecompositionPlan plan = plan_stripes(g, 6);
  CHECK_THROWS_AS(plan.pair_index(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(plan.pair_index(2, 2), std::invalid_argument);
}
