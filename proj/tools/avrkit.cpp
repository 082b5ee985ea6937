// avrkit command-line tool: retrieval index management, pairwise alignment,
// alignability scoring, the full AVR pipeline, evaluation protocols, and the
// synthetic corpus generator.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "avr/evalbench.hpp"
#include "avr/report_json.hpp"
#include "avr/synthetic.hpp"

using namespace avr;
namespace fs = std::filesystem;

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw std::runtime_error("cannot write " + path.string());
    }
    out << text;
}

void emit(const std::optional<std::string>& out_path, const std::string& text) {
    if (out_path) {
        write_text(*out_path, text);
    } else {
        std::cout << text;
    }
}

RerankMode parse_rerank(const std::string& name) {
    if (name == "draq") return RerankMode::Draq;
    if (name == "dtw") return RerankMode::Dtw;
    if (name == "none") return RerankMode::None;
    throw CLI::ValidationError("--rerank", "expected draq, dtw or none");
}

std::map<std::string, SequenceLabels> load_manifest_labels(const DatasetManifest& manifest) {
    std::map<std::string, SequenceLabels> labels;
    for (const auto& entry : manifest.entries) {
        if (entry.label_path) {
            labels[entry.id] = load_labels(*entry.label_path);
        }
    }
    return labels;
}

std::map<std::string, std::string> actions_of(
    const std::map<std::string, SequenceLabels>& labels) {
    std::map<std::string, std::string> actions;
    for (const auto& [id, lab] : labels) {
        if (lab.action) actions[id] = *lab.action;
    }
    return actions;
}

DatasetManifest merge_manifests(const DatasetManifest& a, const DatasetManifest& b) {
    DatasetManifest merged = a;
    for (const auto& entry : b.entries) {
        if (merged.find(entry.id) == nullptr) merged.entries.push_back(entry);
    }
    return merged;
}

struct PairScoringFlags {
    int num_paths = 100;
    std::uint64_t seed = 0;
    bool no_context = false;
};

void add_scoring_flags(CLI::App* cmd, PairScoringFlags& flags) {
    cmd->add_option("--k", flags.num_paths, "Number of random paths for DRAQ")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--seed", flags.seed, "Random path seed");
    cmd->add_flag("--no-context", flags.no_context,
                  "Align on zero-centered raw features without the cumulative term");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"alignable video retrieval toolkit"};
    app.require_subcommand(1);

    // ---- index build / index query ----
    auto* index_cmd = app.add_subcommand("index", "Build or query a retrieval index");
    index_cmd->require_subcommand(1);

    std::string build_manifest, build_out;
    auto* index_build = index_cmd->add_subcommand("build", "Embed a manifest into an index");
    index_build->add_option("--manifest", build_manifest, "Dataset manifest JSON")->required();
    index_build->add_option("--out", build_out, "Output .avri path")->required();
    index_build->callback([&] {
        save_index(build_index(load_manifest(build_manifest)), build_out);
    });

    std::string query_index, query_file;
    std::size_t query_topk_count = 10;
    std::optional<std::string> query_out;
    auto* index_query = index_cmd->add_subcommand("query", "Cosine top-k search");
    index_query->add_option("--index", query_index, "Index .avri path")->required();
    index_query->add_option("--query", query_file, "Query .avrf feature file")->required();
    index_query->add_option("--topk", query_topk_count, "Number of hits");
    index_query->add_option("--out", query_out, "Output JSON (stdout when omitted)");
    index_query->callback([&] {
        const RetrievalIndex index = load_index(query_index);
        const auto hits = query_topk(index, load_sequence(query_file), query_topk_count);
        std::string text = "[\n";
        for (std::size_t r = 0; r < hits.size(); ++r) {
            text += "  {\"id\": \"" + hits[r].id +
                    "\", \"similarity\": " + std::to_string(hits[r].similarity) + "}";
            text += r + 1 < hits.size() ? ",\n" : "\n";
        }
        text += "]\n";
        emit(query_out, text);
    });

    // ---- align ----
    std::string align_query, align_target, keep_unwarped;
    std::optional<std::string> align_out;
    bool align_no_context = false;
    auto* align_cmd = app.add_subcommand("align", "Optimal temporal alignment of two clips");
    align_cmd->add_option("--query", align_query, "Query .avrf")->required();
    align_cmd->add_option("--target", align_target, "Target .avrf")->required();
    align_cmd->add_option("--keep-unwarped", keep_unwarped,
                          "Drop still frames of this side: query or target");
    align_cmd->add_flag("--no-context", align_no_context, "Skip the cumulative context term");
    align_cmd->add_option("--out", align_out, "Output JSON (stdout when omitted)");
    align_cmd->callback([&] {
        const FeatureSequence a = load_sequence(align_query);
        const FeatureSequence b = load_sequence(align_target);
        DtwResult result = dtw(cost_matrix(contextualize(a, !align_no_context),
                                           contextualize(b, !align_no_context)));
        if (!keep_unwarped.empty()) {
            if (keep_unwarped != "query" && keep_unwarped != "target") {
                throw CLI::ValidationError("--keep-unwarped", "expected query or target");
            }
            result.path = skip_still_frames(
                result.path, keep_unwarped == "query" ? Side::First : Side::Second);
        }
        emit(align_out, align_result_json(result));
    });

    // ---- draq ----
    std::string draq_query, draq_target;
    std::optional<std::string> draq_out;
    PairScoringFlags draq_flags;
    auto* draq_cmd = app.add_subcommand("draq", "Alignability indicators for a clip pair");
    draq_cmd->add_option("--query", draq_query, "Query .avrf")->required();
    draq_cmd->add_option("--target", draq_target, "Target .avrf")->required();
    add_scoring_flags(draq_cmd, draq_flags);
    draq_cmd->add_option("--out", draq_out, "Output JSON (stdout when omitted)");
    draq_cmd->callback([&] {
        const FeatureSequence a = load_sequence(draq_query);
        const FeatureSequence b = load_sequence(draq_target);
        const ContextualizedSequence ca = contextualize(a, !draq_flags.no_context);
        const ContextualizedSequence cb = contextualize(b, !draq_flags.no_context);
        const CostMatrix c = cost_matrix(ca, cb);
        const DtwResult aligned = dtw(c);
        const AlignabilityScore score =
            draq(c, {draq_flags.num_paths, draq_flags.seed}, aligned.cost);
        const AlignabilityScore tau = kendall_tau_indicator(ca, cb);
        emit(draq_out, draq_scores_json(score.value, aligned.cost, tau.value,
                                        score.degenerate));
    });

    // ---- avr ----
    std::string avr_index, avr_manifest, avr_query_file, avr_out;
    std::string avr_rerank = "draq";
    std::size_t avr_topk = 10, avr_cache = 64;
    double avr_threshold = 0.6;
    PairScoringFlags avr_flags;
    auto* avr_cmd = app.add_subcommand("avr", "Retrieve, re-rank and align the best match");
    avr_cmd->add_option("--index", avr_index, "Index .avri path")->required();
    avr_cmd->add_option("--manifest", avr_manifest, "Manifest resolving candidate ids")
        ->required();
    avr_cmd->add_option("--query", avr_query_file, "Query .avrf")->required();
    avr_cmd->add_option("--topk", avr_topk, "Candidates to retrieve");
    avr_cmd->add_option("--threshold", avr_threshold,
                        "DRAQ filter threshold (inf disables filtering)");
    avr_cmd->add_option("--rerank", avr_rerank, "draq, dtw or none");
    avr_cmd->add_option("--cache", avr_cache, "Candidate LRU cache size");
    add_scoring_flags(avr_cmd, avr_flags);
    avr_cmd->add_option("--out", avr_out, "Output JSON")->required();
    avr_cmd->callback([&] {
        const RetrievalIndex index = load_index(avr_index);
        const SequenceStore store(load_manifest(avr_manifest), avr_cache);
        AvrOptions options;
        options.topk = avr_topk;
        options.path_config = {avr_flags.num_paths, avr_flags.seed};
        options.draq_threshold = avr_threshold;
        options.rerank = parse_rerank(avr_rerank);
        options.use_context = !avr_flags.no_context;
        const AvrResult result =
            avr_query(index, store, load_sequence(avr_query_file), options);
        write_text(avr_out, avr_result_json(result));
    });

    // ---- eval cycle / sweep / recall ----
    auto* eval_cmd = app.add_subcommand("eval", "Evaluation protocols");
    eval_cmd->require_subcommand(1);

    std::string cyc_index, cyc_manifest, cyc_queries, cyc_out;
    std::string cyc_rerank = "draq", cyc_cpe_mode = "abs";
    std::size_t cyc_topk = 10;
    double cyc_threshold = 0.6;
    bool cyc_oracle = false;
    PairScoringFlags cyc_flags;
    auto* eval_cycle = eval_cmd->add_subcommand("cycle", "Cycle-consistency FPE/CPE");
    eval_cycle->add_option("--index", cyc_index, "Index .avri path")->required();
    eval_cycle->add_option("--manifest", cyc_manifest, "Candidate manifest")->required();
    eval_cycle->add_option("--queries", cyc_queries, "Query manifest")->required();
    eval_cycle->add_flag("--oracle", cyc_oracle, "Same-class oracle candidates");
    eval_cycle->add_option("--topk", cyc_topk, "Candidates per query");
    eval_cycle->add_option("--threshold", cyc_threshold, "DRAQ filter threshold");
    eval_cycle->add_option("--rerank", cyc_rerank, "draq, dtw or none");
    eval_cycle->add_option("--cpe-mode", cyc_cpe_mode,
                           "abs (index difference) or mismatch (0/1 rate)");
    add_scoring_flags(eval_cycle, cyc_flags);
    eval_cycle->add_option("--out", cyc_out, "Output JSON")->required();
    eval_cycle->callback([&] {
        const DatasetManifest manifest = load_manifest(cyc_manifest);
        const DatasetManifest queries = load_manifest(cyc_queries);
        const RetrievalIndex index = load_index(cyc_index);
        const SequenceStore store(manifest, 64);
        const SequenceStore query_store(queries, 64);

        std::vector<std::string> query_ids;
        for (const auto& entry : queries.entries) query_ids.push_back(entry.id);

        CycleBenchOptions options;
        options.avr.topk = cyc_topk;
        options.avr.path_config = {cyc_flags.num_paths, cyc_flags.seed};
        options.avr.draq_threshold = cyc_threshold;
        options.avr.rerank = parse_rerank(cyc_rerank);
        options.avr.use_context = !cyc_flags.no_context;
        options.oracle = cyc_oracle;
        if (cyc_cpe_mode == "mismatch") {
            options.cpe_mode = CpeMode::MismatchRate;
        } else if (cyc_cpe_mode != "abs") {
            throw CLI::ValidationError("--cpe-mode", "expected abs or mismatch");
        }

        const CycleReport report =
            run_cycle_benchmark(index, store, load_manifest_labels(manifest), query_store,
                                query_ids, load_manifest_labels(queries), options);
        write_text(cyc_out, cycle_report_json(report));
    });

    std::string sweep_pairs, sweep_out;
    std::vector<double> sweep_percentiles;
    PairScoringFlags sweep_flags;
    auto* eval_sweep = eval_cmd->add_subcommand("sweep", "Indicator threshold sweep");
    eval_sweep->add_option("--pairs", sweep_pairs, "Pairs JSON")->required();
    eval_sweep
        ->add_option("--percentiles", sweep_percentiles, "Comma-separated percentiles")
        ->required()
        ->delimiter(',');
    add_scoring_flags(eval_sweep, sweep_flags);
    eval_sweep->add_option("--out", sweep_out, "Output CSV")->required();
    eval_sweep->callback([&] {
        const PairsFile pairs_file = load_pairs(sweep_pairs);
        const DatasetManifest manifest = load_manifest(pairs_file.manifest_path);
        const SequenceStore store(manifest, 0);
        const auto labels = load_manifest_labels(manifest);

        PairEvalOptions options;
        options.use_context = !sweep_flags.no_context;
        options.path_config = {sweep_flags.num_paths, sweep_flags.seed};

        std::vector<PairEvaluation> evaluations;
        for (const auto& pair : pairs_file.pairs) {
            const auto a = store.get(pair.id_a);
            const auto b = store.get(pair.id_b);
            const auto& la = labels.at(pair.id_a).phases;
            const auto& lb = labels.at(pair.id_b).phases;
            if (!la || !lb) {
                throw std::runtime_error("sweep needs phase labels for " + pair.id_a +
                                         " and " + pair.id_b);
            }
            evaluations.push_back(
                evaluate_pair(*a, *b, *la, *lb, pair.alignable, options));
        }
        const std::vector<Indicator> indicators{Indicator::Draq, Indicator::DtwCost,
                                                Indicator::NegKendallTau};
        write_text(sweep_out, sweep_report_csv(
                                  sweep_indicators(evaluations, indicators,
                                                   sweep_percentiles)));
    });

    std::string recall_index, recall_manifest, recall_queries, recall_out;
    std::size_t recall_depth = 25;
    std::vector<std::size_t> recall_ks{1, 10};
    PairScoringFlags recall_flags;
    auto* eval_recall = eval_cmd->add_subcommand("recall", "Recall@k with DRAQ re-ranking");
    eval_recall->add_option("--index", recall_index, "Index .avri path")->required();
    eval_recall->add_option("--manifest", recall_manifest, "Candidate manifest")->required();
    eval_recall->add_option("--queries", recall_queries, "Query manifest")->required();
    eval_recall->add_option("--topk-rerank", recall_depth, "Re-ranking depth");
    eval_recall->add_option("--ks", recall_ks, "Comma-separated recall cutoffs")
        ->delimiter(',');
    add_scoring_flags(eval_recall, recall_flags);
    eval_recall->add_option("--out", recall_out, "Output JSON")->required();
    eval_recall->callback([&] {
        const DatasetManifest manifest = load_manifest(recall_manifest);
        const DatasetManifest queries = load_manifest(recall_queries);
        const RetrievalIndex index = load_index(recall_index);
        const SequenceStore store(merge_manifests(manifest, queries), 64);

        auto actions = actions_of(load_manifest_labels(manifest));
        for (const auto& [id, action] : actions_of(load_manifest_labels(queries))) {
            actions.emplace(id, action);
        }
        std::vector<std::string> query_ids;
        for (const auto& entry : queries.entries) query_ids.push_back(entry.id);

        const RecallReport report = rerank_recall(
            index, store, actions, query_ids, recall_depth, recall_ks,
            {recall_flags.num_paths, recall_flags.seed}, !recall_flags.no_context);
        write_text(recall_out, recall_report_json(report));
    });

    // ---- synth generate ----
    auto* synth_cmd = app.add_subcommand("synth", "Synthetic corpus generation");
    synth_cmd->require_subcommand(1);
    std::optional<std::string> synth_spec;
    std::string synth_out;
    auto* synth_generate =
        synth_cmd->add_subcommand("generate", "Write a seeded alignable corpus");
    synth_generate->add_option("--spec", synth_spec,
                               "Generator spec JSON (defaults when omitted)");
    synth_generate->add_option("--out", synth_out, "Output directory")->required();
    synth_generate->callback([&] {
        const SyntheticSpec spec =
            synth_spec ? load_synthetic_spec(*synth_spec) : SyntheticSpec{};
        write_synthetic(generate_synthetic(spec), synth_out);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
