#include "tubelink/geometry.hpp"

#include "tubelink/errors.hpp"

namespace tubelink {

double tube_iou(std::span<const TimedBox> a, std::span<const TimedBox> b) {
  if (a.empty() || b.empty()) throw_validation("tube_iou: empty tube");
  double sum = 0.0;
  std::size_t union_frames = 0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    ++union_frames;
    if (a[i].first == b[j].first) {
      sum += iou(a[i].second, b[j].second);
      ++i;
      ++j;
    } else if (a[i].first < b[j].first) {
      ++i;  // frame only in a; counts 0
    } else {
      ++j;  // frame only in b; counts 0
    }
  }
  union_frames += (a.size() - i) + (b.size() - j);
  return sum / static_cast<double>(union_frames);
}

}  // namespace tubelink
