#pragma once

#include <span>
#include <utility>

#include "tubelink/types.hpp"

namespace tubelink {

// Intersection-over-union of two boxes. Returns 0 when the union has zero
// area, so degenerate boxes never produce 0/0.
inline double iou(const BBox& a, const BBox& b) {
  const double ix = std::min(a.x2, b.x2) - std::max(a.x1, b.x1);
  const double iy = std::min(a.y2, b.y2) - std::max(a.y1, b.y1);
  if (ix <= 0.0 || iy <= 0.0) return 0.0;
  const double inter = ix * iy;
  const double uni = a.area() + b.area() - inter;
  if (uni <= 0.0) return 0.0;
  return inter / uni;
}

using TimedBox = std::pair<int, BBox>;  // (frame_index, box)

// Spatio-temporal overlap of two tubes: mean per-frame iou over the
// temporal UNION of their frames, counting 0 for frames where either tube
// has no box. Both tubes must be nonempty and sorted by frame index.
double tube_iou(std::span<const TimedBox> a, std::span<const TimedBox> b);

}  // namespace tubelink
