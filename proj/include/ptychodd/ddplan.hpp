#pragma once

#include "ptychodd/scan.hpp"

namespace ptychodd {

enum class SplitAxis { Auto, Columns, Rows };

/// Overlapping stripe decomposition aligned to scan-frame boundaries.
/// Subdomain rectangles are unions of their assigned scan windows; frames are
/// partitioned disjointly; overlaps are the pairwise rectangle intersections.
struct DecompositionPlan {
  struct OverlapPair {
    int d1 = 0;  // d1 < d2
    int d2 = 0;
    Region region;  // image coordinates
  };

  int D = 0;
  ScanGeometry geometry;                         // global scan
  std::vector<Region> subdomains;                // image coordinates
  std::vector<int> frame_assignment;             // global frame index -> subdomain
  std::vector<std::vector<int64_t>> frames_of;   // ordered global frame indices per subdomain
  std::vector<OverlapPair> overlaps;
  std::vector<ScanGeometry> local_geometries;    // positions in subdomain-local coordinates

  /// Index into `overlaps` for the unordered pair {a,b}; throws for non-neighbors.
  size_t pair_index(int a, int b) const;

  /// Overlap rectangle of pair p expressed in subdomain-d local coordinates.
  Region local_overlap(int d, size_t p) const;

  /// Pairs involving subdomain d.
  std::vector<size_t> pairs_of(int d) const;
};

/// Split the scan grid into D contiguous stripes along `axis` (Auto = longer
/// scan axis), block sizes differing by at most one frame line. Throws
/// std::invalid_argument when D exceeds the frame-line count.
DecompositionPlan plan_stripes(const ScanGeometry& geometry, int D,
                               SplitAxis axis = SplitAxis::Auto);

/// Overlap-region pixels of u_d for the pair {d, neighbor}, in overlap-local coordinates.
ComplexField2D restrict_overlap(const ComplexField2D& u_d, const DecompositionPlan& plan, int d,
                                int neighbor);

/// Global image: each covered pixel is the mean over sub-solutions covering
/// it; pixels outside every subdomain take the vacuum value 1.
ComplexField2D merge(const std::vector<ComplexField2D>& sub_solutions,
                     const DecompositionPlan& plan);

/// Split measured frames by plan assignment, preserving order, with local geometries.
std::vector<FrameStack> partition_frames(const FrameStack& frames, const DecompositionPlan& plan);

}  // namespace ptychodd
