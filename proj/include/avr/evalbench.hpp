#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "avr/pipeline.hpp"

namespace avr {

/// Fraction of path tuples (i,j) whose labels agree: a_labels[i] == b_labels[j].
double apa(std::span<const int> a_labels, std::span<const int> b_labels,
           const AlignmentPath& path);

/// Variant averaging over frames of one designated side after warping instead
/// of over path tuples: agreement between the kept side's own labels and the
/// labels propagated from the other side.
double apa_frame_averaged(std::span<const int> a_labels, std::span<const int> b_labels,
                          const AlignmentPath& path, Side frame_side);

enum class CpeMode { AbsoluteDifference, MismatchRate };

struct CycleOptions {
    bool use_context = true;
    CpeMode cpe_mode = CpeMode::AbsoluteDifference;
};

struct CycleErrors {
    double fpe = 0.0;
    std::optional<double> cpe;
};

/// Warps query frame positions (and phases, when given) onto the match
/// timeline with the match unwarped, then back onto the query timeline with
/// the query unwarped, both through the single DTW path. FPE is the MSE
/// between positions 1..n and their cycle-warped values; CPE the mean error
/// between original and cycle-warped phases.
CycleErrors cycle_consistency(const FeatureSequence& query,
                              const std::optional<std::vector<int>>& query_phases,
                              const FeatureSequence& match,
                              const CycleOptions& options = {});

struct PairEvaluation {
    std::string id_a;
    std::string id_b;
    double apa = 0.0;
    double draq = 0.0;
    double dtw_cost = 0.0;
    double neg_tau = 0.0;
    bool draq_degenerate = false;
    bool alignable_truth = false;  // ground truth: same action
};

struct PairEvalOptions {
    bool use_context = true;
    RandomPathConfig path_config;
};

/// DTW-aligns the pair on (optionally) contextualized features and computes
/// APA plus all three indicators. The random-path stream is derived from
/// (seed, "idA|idB").
PairEvaluation evaluate_pair(const FeatureSequence& a, const FeatureSequence& b,
                             std::span<const int> labels_a, std::span<const int> labels_b,
                             bool alignable_truth, const PairEvalOptions& options = {});

struct SweepPoint {
    double percentile = 0.0;
    std::optional<double> mean_apa;  // absent when the pair subset is empty
    std::size_t pair_count = 0;
};

struct SweepSeries {
    Indicator indicator = Indicator::Draq;
    std::vector<SweepPoint> points;
};

struct SweepReport {
    std::vector<SweepSeries> series;
};

/// For each indicator and percentile p: mean APA over pairs whose indicator
/// value is <= the nearest-rank p-th percentile of that indicator. Pair
/// subsets are nested as the percentile grows.
SweepReport sweep_indicators(std::span<const PairEvaluation> pairs,
                             std::span<const Indicator> indicators,
                             std::span<const double> percentiles);

/// Mann-Whitney AUC of `scores` separating positives from negatives where
/// lower scores predict positive; ties count half.
double roc_auc_lower_positive(std::span<const double> scores,
                              std::span<const char> is_positive);

struct RecallRow {
    std::size_t k = 0;
    double recall_before = 0.0;
    double recall_after = 0.0;
};

struct RecallReport {
    std::size_t topk_rerank = 0;
    std::size_t query_count = 0;
    std::vector<RecallRow> rows;
};

/// recall@k over queries (correct = same action class) for the raw retrieval
/// order and for the order after DRAQ re-ranking of the top `topk_rerank`
/// candidates. Queries lacking an action label are rejected.
RecallReport rerank_recall(const RetrievalIndex& index, const SequenceStore& store,
                           const std::map<std::string, std::string>& actions,
                           std::span<const std::string> query_ids,
                           std::size_t topk_rerank, std::span<const std::size_t> ks,
                           const RandomPathConfig& path_config,
                           bool use_context = true);

/// Uniform sample without replacement of clips sharing the query's action
/// class, the query itself excluded; fewer than topk when the class is small,
/// empty when the class is absent. Deterministic given the seed.
std::vector<std::string> oracle_candidates(const std::map<std::string, std::string>& actions,
                                           const std::string& query_id, std::size_t topk,
                                           std::uint64_t seed);

struct CycleEntry {
    std::string query_id;
    std::string match_id;  // empty when filtered
    double fpe = 0.0;
    std::optional<double> cpe;
    bool filtered = false;
};

struct CycleReport {
    std::vector<CycleEntry> entries;
    std::optional<double> mean_fpe;
    std::optional<double> mean_cpe;
};

struct CycleBenchOptions {
    AvrOptions avr;
    bool oracle = false;  // oracle candidate generation instead of retrieval
    CpeMode cpe_mode = CpeMode::AbsoluteDifference;
};

/// Runs the AVR pipeline (or oracle candidate generation + DRAQ re-ranking)
/// for every query and reports cycle-consistency errors against the chosen
/// best match. Aggregates average over non-filtered queries.
CycleReport run_cycle_benchmark(const RetrievalIndex& index, const SequenceStore& store,
                                const std::map<std::string, SequenceLabels>& labels,
                                const SequenceStore& query_store,
                                std::span<const std::string> query_ids,
                                const std::map<std::string, SequenceLabels>& query_labels,
                                const CycleBenchOptions& options = {});

}  // namespace avr
