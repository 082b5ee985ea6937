#include "avr/evalbench.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "avr/context.hpp"
#include "rng_util.hpp"

namespace avr {

namespace {

void check_label_coverage(std::span<const int> labels, std::size_t needed, const char* side) {
    if (labels.size() != needed) {
        throw std::invalid_argument(std::string("apa: ") + side + " labels cover " +
                                    std::to_string(labels.size()) + " frames, path needs " +
                                    std::to_string(needed));
    }
}

double indicator_value(const PairEvaluation& pair, Indicator indicator) {
    switch (indicator) {
        case Indicator::Draq: return pair.draq;
        case Indicator::DtwCost: return pair.dtw_cost;
        case Indicator::NegKendallTau: return pair.neg_tau;
    }
    return 0.0;
}

}  // namespace

double apa(std::span<const int> a_labels, std::span<const int> b_labels,
           const AlignmentPath& path) {
    if (path.empty()) {
        throw std::invalid_argument("apa: empty path");
    }
    check_label_coverage(a_labels, path.back().i, "first");
    check_label_coverage(b_labels, path.back().j, "second");
    std::size_t agree = 0;
    for (const PathStep& step : path) {
        if (a_labels[step.i - 1] == b_labels[step.j - 1]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(path.size());
}

double apa_frame_averaged(std::span<const int> a_labels, std::span<const int> b_labels,
                          const AlignmentPath& path, Side frame_side) {
    if (path.empty()) {
        throw std::invalid_argument("apa: empty path");
    }
    check_label_coverage(a_labels, path.back().i, "first");
    check_label_coverage(b_labels, path.back().j, "second");
    const AlignmentPath kept = skip_still_frames(path, frame_side);
    std::size_t agree = 0;
    for (const PathStep& step : kept) {
        if (a_labels[step.i - 1] == b_labels[step.j - 1]) ++agree;
    }
    return static_cast<double>(agree) / static_cast<double>(kept.size());
}

CycleErrors cycle_consistency(const FeatureSequence& query,
                              const std::optional<std::vector<int>>& query_phases,
                              const FeatureSequence& match, const CycleOptions& options) {
    const std::size_t n = query.frames();
    if (query_phases && query_phases->size() != n) {
        throw std::invalid_argument("cycle_consistency: query has " + std::to_string(n) +
                                    " frames but " + std::to_string(query_phases->size()) +
                                    " phases");
    }

    const ContextualizedSequence cq = contextualize(query, options.use_context);
    const ContextualizedSequence cm = contextualize(match, options.use_context);
    const AlignmentPath path = dtw(cost_matrix(cq, cm)).path;

    std::vector<double> positions(n);
    for (std::size_t i = 0; i < n; ++i) positions[i] = static_cast<double>(i + 1);

    // Out onto the match timeline (match unwarped), back onto the query
    // timeline (query unwarped), both through the same optimal path.
    const std::vector<double> on_match =
        warp_labels<double>(path, positions, Side::Second);
    const std::vector<double> cycled = warp_labels<double>(path, on_match, Side::First);

    CycleErrors errors;
    double sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double diff = positions[i] - cycled[i];
        sq += diff * diff;
    }
    errors.fpe = sq / static_cast<double>(n);

    if (query_phases) {
        std::vector<double> phases(n);
        for (std::size_t i = 0; i < n; ++i) phases[i] = (*query_phases)[i];
        const std::vector<double> phases_on_match =
            warp_labels<double>(path, phases, Side::Second);
        const std::vector<double> phases_cycled =
            warp_labels<double>(path, phases_on_match, Side::First);
        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (options.cpe_mode == CpeMode::AbsoluteDifference) {
                err += std::abs(phases[i] - phases_cycled[i]);
            } else {
                err += phases[i] == phases_cycled[i] ? 0.0 : 1.0;
            }
        }
        errors.cpe = err / static_cast<double>(n);
    }
    return errors;
}

PairEvaluation evaluate_pair(const FeatureSequence& a, const FeatureSequence& b,
                             std::span<const int> labels_a, std::span<const int> labels_b,
                             bool alignable_truth, const PairEvalOptions& options) {
    const ContextualizedSequence ca = contextualize(a, options.use_context);
    const ContextualizedSequence cb = contextualize(b, options.use_context);
    const CostMatrix c = cost_matrix(ca, cb);
    const DtwResult aligned = dtw(c);

    RandomPathConfig cfg = options.path_config;
    cfg.seed = derive_stream_seed(options.path_config.seed, a.id() + "|" + b.id());
    const AlignabilityScore draq_score = draq(c, cfg, aligned.cost);

    PairEvaluation out;
    out.id_a = a.id();
    out.id_b = b.id();
    out.apa = apa(labels_a, labels_b, aligned.path);
    out.draq = draq_score.value;
    out.draq_degenerate = draq_score.degenerate;
    out.dtw_cost = aligned.cost;
    out.neg_tau = kendall_tau_indicator(ca, cb).value;
    out.alignable_truth = alignable_truth;
    return out;
}

SweepReport sweep_indicators(std::span<const PairEvaluation> pairs,
                             std::span<const Indicator> indicators,
                             std::span<const double> percentiles) {
    for (double p : percentiles) {
        if (p < 0.0 || p > 100.0) {
            throw std::invalid_argument("sweep_indicators: percentile " + std::to_string(p) +
                                        " outside [0, 100]");
        }
    }
    SweepReport report;
    for (Indicator indicator : indicators) {
        std::vector<double> values;
        values.reserve(pairs.size());
        for (const auto& pair : pairs) values.push_back(indicator_value(pair, indicator));
        std::vector<double> sorted = values;
        std::sort(sorted.begin(), sorted.end());

        SweepSeries series;
        series.indicator = indicator;
        for (double p : percentiles) {
            SweepPoint point;
            point.percentile = p;
            // Nearest-rank percentile; p=0 selects nothing and stays absent.
            const std::size_t rank = static_cast<std::size_t>(
                std::ceil(p / 100.0 * static_cast<double>(sorted.size())));
            if (rank >= 1 && !sorted.empty()) {
                const double threshold = sorted[std::min(rank, sorted.size()) - 1];
                double sum = 0.0;
                std::size_t count = 0;
                for (std::size_t idx = 0; idx < pairs.size(); ++idx) {
                    if (values[idx] <= threshold) {
                        sum += pairs[idx].apa;
                        ++count;
                    }
                }
                point.pair_count = count;
                if (count > 0) point.mean_apa = sum / static_cast<double>(count);
            }
            series.points.push_back(point);
        }
        report.series.push_back(std::move(series));
    }
    return report;
}

double roc_auc_lower_positive(std::span<const double> scores,
                              std::span<const char> is_positive) {
    if (scores.size() != is_positive.size()) {
        throw std::invalid_argument("roc_auc: scores and labels differ in length");
    }
    std::vector<double> pos, neg;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        (is_positive[i] ? pos : neg).push_back(scores[i]);
    }
    if (pos.empty() || neg.empty()) {
        throw std::invalid_argument("roc_auc: need at least one positive and one negative");
    }
    double wins = 0.0;
    for (double p : pos) {
        for (double n : neg) {
            if (p < n) wins += 1.0;
            else if (p == n) wins += 0.5;
        }
    }
    return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

RecallReport rerank_recall(const RetrievalIndex& index, const SequenceStore& store,
                           const std::map<std::string, std::string>& actions,
                           std::span<const std::string> query_ids, std::size_t topk_rerank,
                           std::span<const std::size_t> ks,
                           const RandomPathConfig& path_config, bool use_context) {
    RecallReport report;
    report.topk_rerank = topk_rerank;
    report.query_count = query_ids.size();

    std::vector<std::size_t> correct_before(ks.size(), 0), correct_after(ks.size(), 0);
    AvrOptions options;
    options.topk = topk_rerank;
    options.path_config = path_config;
    options.rerank = RerankMode::Draq;
    options.draq_threshold = std::numeric_limits<double>::infinity();
    options.use_context = use_context;

    for (const std::string& qid : query_ids) {
        const auto action_it = actions.find(qid);
        if (action_it == actions.end()) {
            throw std::invalid_argument("rerank_recall: no action label for query \"" + qid +
                                        "\"");
        }
        const std::string& query_action = action_it->second;
        const auto query_seq = store.get(qid);

        std::vector<SearchHit> hits = query_topk(index, *query_seq, topk_rerank + 1);
        std::erase_if(hits, [&](const SearchHit& h) { return h.id == qid; });
        if (hits.size() > topk_rerank) hits.resize(topk_rerank);

        const AvrResult reranked = avr_query_candidates(store, *query_seq, hits, options);

        auto hit_matches = [&](const std::string& id) {
            const auto it = actions.find(id);
            return it != actions.end() && it->second == query_action;
        };
        for (std::size_t ki = 0; ki < ks.size(); ++ki) {
            const std::size_t k = std::min(ks[ki], hits.size());
            bool before = false, after = false;
            for (std::size_t r = 0; r < k; ++r) {
                before = before || hit_matches(hits[r].id);
                after = after || hit_matches(reranked.ranked[r].id);
            }
            if (before) ++correct_before[ki];
            if (after) ++correct_after[ki];
        }
    }

    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
        RecallRow row;
        row.k = ks[ki];
        const double n = static_cast<double>(query_ids.size());
        row.recall_before = n > 0 ? correct_before[ki] / n : 0.0;
        row.recall_after = n > 0 ? correct_after[ki] / n : 0.0;
        report.rows.push_back(row);
    }
    return report;
}

std::vector<std::string> oracle_candidates(const std::map<std::string, std::string>& actions,
                                           const std::string& query_id, std::size_t topk,
                                           std::uint64_t seed) {
    const auto it = actions.find(query_id);
    if (it == actions.end()) {
        return {};
    }
    std::vector<std::string> same_class;
    for (const auto& [id, action] : actions) {
        if (id != query_id && action == it->second) same_class.push_back(id);
    }
    std::mt19937_64 rng(derive_stream_seed(seed, query_id));
    detail::shuffle(same_class, rng);
    if (same_class.size() > topk) same_class.resize(topk);
    return same_class;
}

CycleReport run_cycle_benchmark(const RetrievalIndex& index, const SequenceStore& store,
                                const std::map<std::string, SequenceLabels>& labels,
                                const SequenceStore& query_store,
                                std::span<const std::string> query_ids,
                                const std::map<std::string, SequenceLabels>& query_labels,
                                const CycleBenchOptions& options) {
    std::map<std::string, std::string> actions;
    if (options.oracle) {
        for (const auto& [id, lab] : labels) {
            if (lab.action) actions[id] = *lab.action;
        }
    }

    CycleReport report;
    double fpe_sum = 0.0, cpe_sum = 0.0;
    std::size_t fpe_count = 0, cpe_count = 0;

    for (const std::string& qid : query_ids) {
        const auto query_seq = query_store.get(qid);
        std::optional<std::vector<int>> phases;
        if (const auto it = query_labels.find(qid); it != query_labels.end()) {
            phases = it->second.phases;
        }

        AvrResult res;
        if (options.oracle) {
            auto with_query = actions;
            if (const auto it = query_labels.find(qid);
                it != query_labels.end() && it->second.action) {
                with_query[qid] = *it->second.action;
            }
            const std::vector<std::string> ids = oracle_candidates(
                with_query, qid, options.avr.topk, options.avr.path_config.seed);
            std::vector<SearchHit> hits;
            for (const auto& id : ids) hits.push_back({id, 0.0});
            res = avr_query_candidates(store, *query_seq, hits, options.avr);
        } else {
            res = avr_query(index, store, *query_seq, options.avr);
        }

        CycleEntry entry;
        entry.query_id = qid;
        if (res.best) {
            entry.match_id = res.best->id;
            const auto match = store.get(res.best->id);
            const CycleOptions copt{options.avr.use_context, options.cpe_mode};
            const CycleErrors errors = cycle_consistency(*query_seq, phases, *match, copt);
            entry.fpe = errors.fpe;
            entry.cpe = errors.cpe;
            fpe_sum += errors.fpe;
            ++fpe_count;
            if (errors.cpe) {
                cpe_sum += *errors.cpe;
                ++cpe_count;
            }
        } else {
            entry.filtered = true;
        }
        report.entries.push_back(std::move(entry));
    }

    if (fpe_count > 0) report.mean_fpe = fpe_sum / static_cast<double>(fpe_count);
    if (cpe_count > 0) report.mean_cpe = cpe_sum / static_cast<double>(cpe_count);
    return report;
}

}  // namespace avr
