#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "tubelink/types.hpp"

namespace tubelink {

// Exact trellis optimization and exhaustive enumeration. Kept strictly
// separate from the greedy linker (only linking_score is shared) so that
// agreement between the two is a meaningful check.

struct OptimalPath {
  std::vector<int> path;  // one region index per frame
  double score = 0.0;     // tau of that path
};

// The path maximizing the cumulative linking score over all N^T paths,
// computed by a max-sum chain recurrence in O(T*N^2). Ties resolve to the
// lexicographically smallest path. Every frame must be nonempty.
OptimalPath dp_optimal_path(const StreamDetections& video);

// Every path with its exact score. Guarded: throws when the path count
// exceeds max_paths. Scores accumulate right-associated, matching the
// recurrence above exactly.
std::vector<OptimalPath> enumerate_paths(const StreamDetections& video,
                                         std::uint64_t max_paths);

}  // namespace tubelink
