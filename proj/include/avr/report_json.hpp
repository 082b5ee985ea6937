#pragma once

// Canonical serializations for CLI outputs and reports. Byte-deterministic
// for identical inputs, which the pipeline determinism guarantees rely on.

#include <string>

#include "avr/evalbench.hpp"
#include "avr/pipeline.hpp"

namespace avr {

std::string indicator_name(Indicator indicator);

/// {"path": [[i,j],...], "cost": c}
std::string align_result_json(const DtwResult& result);

/// {"draq": ..., "dtw_cost": ..., "neg_tau": ..., "degenerate": ...}
std::string draq_scores_json(double draq_value, double dtw_cost, double neg_tau,
                             bool degenerate);

std::string avr_result_json(const AvrResult& result);
std::string cycle_report_json(const CycleReport& report);
std::string recall_report_json(const RecallReport& report);

/// CSV with header indicator,percentile,mean_apa,n_pairs; mean_apa empty
/// for absent points.
std::string sweep_report_csv(const SweepReport& report);

}  // namespace avr
