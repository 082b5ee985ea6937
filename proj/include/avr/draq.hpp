#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "avr/align.hpp"

namespace avr {

enum class Indicator { Draq, DtwCost, NegKendallTau };

/// How the random-path sampler interprets a drawn direction: PerStep draws a
/// fresh direction at every step; RepeatDirection keeps applying a drawn
/// direction until it can no longer move, then redraws.
enum class SamplerMode { PerStep, RepeatDirection };

/// Scalar alignability indicator value; lower is better for all three
/// indicator kinds. `degenerate` marks the 0/0 DRAQ convention.
struct AlignabilityScore {
    double value = 0.0;
    Indicator indicator = Indicator::Draq;
    bool degenerate = false;
};

struct RandomPathConfig {
    int num_paths = 100;
    std::uint64_t seed = 0;
    SamplerMode mode = SamplerMode::PerStep;
};

/// Deterministic per-task stream seed from a base seed and a pair id.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view pair_id);

/// Biased random path from (1,1) to (n,m), sampled backwards from (n,m):
/// delta_i = -1 with probability i/(i+j) and delta_j = -1 independently with
/// probability j/(i+j); (0,0) outcomes are discarded; at i=1 (resp. j=1) the
/// corresponding delta is clamped to 0. Result is stored in forward order.
AlignmentPath sample_random_path(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                 SamplerMode mode = SamplerMode::PerStep);

/// Mean over cfg.num_paths sampled paths of the sum of C along each path.
double random_path_cost(const CostMatrix& c, const RandomPathConfig& cfg);

/// DRAQ = D(n,m) / Cost_random. When Cost_random < 1e-12 the score is 1.0
/// with the degenerate flag set (a zero-cost matrix carries no evidence).
AlignabilityScore draq(const CostMatrix& c, const RandomPathConfig& cfg);

/// Same, reusing an already computed optimal DTW cost for c.
AlignabilityScore draq(const CostMatrix& c, const RandomPathConfig& cfg,
                       double optimal_cost);

/// Optimal DTW path cost as an indicator.
AlignabilityScore dtw_cost_indicator(const CostMatrix& c);

/// Matches every frame of `a` to its nearest frame of `b` by cosine distance
/// (lowest index on ties) and returns -tau of the matched index sequence,
/// tau-a formulation with tied matches counted as neither concordant nor
/// discordant. Requires a.frames() >= 2 and equal widths.
AlignabilityScore kendall_tau_indicator(const ContextualizedSequence& a,
                                        const ContextualizedSequence& b);

}  // namespace avr
