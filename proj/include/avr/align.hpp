#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "avr/context.hpp"

namespace avr {

/// Pairwise frame distances, n x m row-major doubles, each in [0, 2].
struct CostMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    CostMatrix() = default;
    CostMatrix(std::size_t n, std::size_t m, std::vector<double> v);
    CostMatrix(std::size_t n, std::size_t m, double fill = 0.0);

    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
};

/// One tuple of an alignment path. Indices are 1-based, matching the
/// path definition (1,1) -> (n,m).
struct PathStep {
    std::uint32_t i = 0;
    std::uint32_t j = 0;

    auto operator<=>(const PathStep&) const = default;
};

using AlignmentPath = std::vector<PathStep>;

/// Which sequence keeps its original timeline in still-frame skipping and
/// label warping: First = the row/query side, Second = the column side.
enum class Side { First, Second };

/// Endpoints (1,1) and (n,m), both coordinates non-decreasing, consecutive
/// steps in {(0,1),(1,0),(1,1)}, max(n,m) <= L <= n+m.
bool is_valid_path(const AlignmentPath& path, std::size_t n, std::size_t m);

/// Cosine distance 1 - cos(a_i, b_j) per cell. When either frame has norm
/// below 1e-12 the distance is 1 (neutral midpoint). Throws on width mismatch.
CostMatrix cost_matrix(const ContextualizedSequence& a, const ContextualizedSequence& b);

struct DtwResult {
    AlignmentPath path;
    double cost = 0.0;
};

/// Minimum cumulative cost path from (1,1) to (n,m) over moves
/// {(0,1),(1,0),(1,1)}, with D(1,1) = C(1,1). Backtrace ties prefer
/// diagonal, then advancing i, then advancing j. Accumulates in double.
DtwResult dtw(const CostMatrix& c);

/// Deletes tuples whose kept-side index repeats an earlier tuple's index,
/// retaining the first tuple per kept-side index. The result pairs each
/// kept-side index 1..len with exactly one other-side index, monotonically.
AlignmentPath skip_still_frames(const AlignmentPath& path, Side keep_unwarped);

/// Propagates labels from the warped side onto the kept side's timeline.
/// source_labels must cover the warped side's sequence length; output has
/// one label per kept-side frame.
template <typename Label>
std::vector<Label> warp_labels(const AlignmentPath& path,
                               std::span<const Label> source_labels,
                               Side keep_unwarped);

extern template std::vector<int> warp_labels<int>(const AlignmentPath&,
                                                  std::span<const int>, Side);
extern template std::vector<double> warp_labels<double>(const AlignmentPath&,
                                                        std::span<const double>, Side);

}  // namespace avr
