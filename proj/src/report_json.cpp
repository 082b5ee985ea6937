#include "avr/report_json.hpp"

#include <sstream>

#include <json.hpp>

namespace avr {

namespace {

using nlohmann::ordered_json;

ordered_json path_to_json(const AlignmentPath& path) {
    ordered_json out = ordered_json::array();
    for (const PathStep& step : path) {
        out.push_back({step.i, step.j});
    }
    return out;
}

}  // namespace

std::string indicator_name(Indicator indicator) {
    switch (indicator) {
        case Indicator::Draq: return "draq";
        case Indicator::DtwCost: return "dtw_cost";
        case Indicator::NegKendallTau: return "neg_tau";
    }
    return "unknown";
}

std::string align_result_json(const DtwResult& result) {
    ordered_json out;
    out["path"] = path_to_json(result.path);
    out["cost"] = result.cost;
    return out.dump(2) + "\n";
}

std::string draq_scores_json(double draq_value, double dtw_cost, double neg_tau,
                             bool degenerate) {
    ordered_json out;
    out["draq"] = draq_value;
    out["dtw_cost"] = dtw_cost;
    out["neg_tau"] = neg_tau;
    out["degenerate"] = degenerate;
    return out.dump(2) + "\n";
}

std::string avr_result_json(const AvrResult& result) {
    ordered_json out;
    out["query_id"] = result.query_id;
    ordered_json ranked = ordered_json::array();
    for (const RankedCandidate& c : result.ranked) {
        ordered_json item;
        item["id"] = c.id;
        item["retrieval_sim"] = c.retrieval_sim;
        item["draq"] = c.draq;
        item["dtw_cost"] = c.dtw_cost;
        item["degenerate"] = c.degenerate;
        ranked.push_back(std::move(item));
    }
    out["ranked_candidates"] = std::move(ranked);
    if (result.best) {
        ordered_json best;
        best["id"] = result.best->id;
        best["alignment"] = path_to_json(result.best->alignment);
        best["draq"] = result.best->draq;
        out["best"] = std::move(best);
    } else {
        out["best"] = nullptr;
    }
    out["filtered"] = result.filtered;
    return out.dump(2) + "\n";
}

std::string cycle_report_json(const CycleReport& report) {
    ordered_json out;
    ordered_json entries = ordered_json::array();
    for (const CycleEntry& entry : report.entries) {
        ordered_json item;
        item["query_id"] = entry.query_id;
        item["match_id"] = entry.filtered ? ordered_json(nullptr) : ordered_json(entry.match_id);
        item["fpe"] = entry.filtered ? ordered_json(nullptr) : ordered_json(entry.fpe);
        item["cpe"] = entry.cpe ? ordered_json(*entry.cpe) : ordered_json(nullptr);
        item["filtered"] = entry.filtered;
        entries.push_back(std::move(item));
    }
    out["entries"] = std::move(entries);
    out["mean_fpe"] = report.mean_fpe ? ordered_json(*report.mean_fpe) : ordered_json(nullptr);
    out["mean_cpe"] = report.mean_cpe ? ordered_json(*report.mean_cpe) : ordered_json(nullptr);
    return out.dump(2) + "\n";
}

std::string recall_report_json(const RecallReport& report) {
    ordered_json out;
    out["topk_rerank"] = report.topk_rerank;
    out["query_count"] = report.query_count;
    ordered_json rows = ordered_json::array();
    for (const RecallRow& row : report.rows) {
        ordered_json item;
        item["k"] = row.k;
        item["recall_before"] = row.recall_before;
        item["recall_after"] = row.recall_after;
        rows.push_back(std::move(item));
    }
    out["rows"] = std::move(rows);
    return out.dump(2) + "\n";
}

std::string sweep_report_csv(const SweepReport& report) {
    std::ostringstream out;
    out << "indicator,percentile,mean_apa,n_pairs\n";
    for (const SweepSeries& series : report.series) {
        for (const SweepPoint& point : series.points) {
            out << indicator_name(series.indicator) << ',' << point.percentile << ',';
            if (point.mean_apa) {
                out << ordered_json(*point.mean_apa).dump();
            }
            out << ',' << point.pair_count << '\n';
        }
    }
    return out.str();
}

}  // namespace avr
