#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "avr/evalbench.hpp"
#include "avr/synthetic.hpp"
#include "oracles.hpp"

using namespace avr;
namespace fs = std::filesystem;

namespace {

SyntheticSpec tiny_spec() {
    SyntheticSpec spec;
    spec.prototypes = 3;
    spec.clips_per_prototype = 3;
    spec.phases_per_prototype = 3;
    spec.min_frames = 20;
    spec.max_frames = 28;
    spec.latent_dim = 6;
    spec.alignable_pairs = 6;
    spec.cross_pairs = 6;
    spec.seed = 77;
    return spec;
}

FeatureSequence duplicate_frames(const FeatureSequence& seq, const std::string& id) {
    std::vector<float> data;
    data.reserve(seq.data().size() * 2);
    for (std::size_t j = 0; j < seq.frames(); ++j) {
        const auto frame = seq.frame(j);
        data.insert(data.end(), frame.begin(), frame.end());
        data.insert(data.end(), frame.begin(), frame.end());
    }
    return {id, 2 * seq.frames(), seq.dim(), std::move(data)};
}

}  // namespace

TEST_CASE("apa counts agreeing path tuples") {
    SUBCASE("identity path with equal labels is 1") {
        const AlignmentPath p{{1, 1}, {2, 2}, {3, 3}};
        const std::vector<int> labels{4, 4, 5};
        CHECK(apa(labels, labels, p) == 1.0);
    }
    SUBCASE("disjoint label alphabets give 0") {
        const AlignmentPath p{{1, 1}, {1, 2}, {2, 3}};
        const std::vector<int> a{0, 1};
        const std::vector<int> b{5, 6, 7};
        CHECK(apa(a, b, p) == 0.0);
    }
    SUBCASE("diagonal path over a=[1,1,2], b=[1,2,2]") {
        // Tuples (1,1) and (3,3) agree, (2,2) does not.
        const AlignmentPath p{{1, 1}, {2, 2}, {3, 3}};
        const std::vector<int> a{1, 1, 2};
        const std::vector<int> b{1, 2, 2};
        CHECK(apa(a, b, p) == doctest::Approx(2.0 / 3.0));
    }
    SUBCASE("label coverage is checked") {
        const AlignmentPath p{{1, 1}, {2, 2}};
        const std::vector<int> a{1};
        const std::vector<int> b{1, 2};
        CHECK_THROWS_AS(apa(a, b, p), std::invalid_argument);
    }
}

TEST_CASE("frame-averaged apa follows the kept side") {
    const AlignmentPath p{{1, 1}, {2, 1}, {3, 2}};
    const std::vector<int> a{7, 8, 9};
    const std::vector<int> b{7, 9};
    // Keeping the second side pairs j=1 with i=1 (7==7) and j=2 with i=3 (9==9).
    CHECK(apa_frame_averaged(a, b, p, Side::Second) == 1.0);
    // Keeping the first side pairs i=1..3 with j=1,1,2: agreements 7==7, 8!=7, 9==9.
    CHECK(apa_frame_averaged(a, b, p, Side::First) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("cycle consistency of an exact copy is zero") {
    std::mt19937_64 rng(31);
    const FeatureSequence query = oracles::random_sequence("q", 15, 5, rng);
    const FeatureSequence match("m", query.frames(), query.dim(),
                                std::vector<float>(query.data()));
    std::vector<int> phases(query.frames());
    for (std::size_t j = 0; j < phases.size(); ++j) phases[j] = static_cast<int>(j / 5);

    const CycleErrors errors = cycle_consistency(query, phases, match);
    CHECK(errors.fpe == 0.0);
    REQUIRE(errors.cpe.has_value());
    CHECK(*errors.cpe == 0.0);
}

TEST_CASE("cycle consistency without phases reports no cpe") {
    std::mt19937_64 rng(33);
    const FeatureSequence query = oracles::random_sequence("q", 10, 4, rng);
    const CycleErrors errors = cycle_consistency(query, std::nullopt, query);
    CHECK(errors.fpe == 0.0);
    CHECK_FALSE(errors.cpe.has_value());
}

TEST_CASE("frame-duplicated match keeps the cycle within one frame") {
    const SyntheticDataset data = generate_synthetic(tiny_spec());
    const FeatureSequence& query = data.clips.front().sequence;
    const FeatureSequence match = duplicate_frames(query, "doubled");
    const CycleErrors errors =
        cycle_consistency(query, data.clips.front().labels.phases, match);
    CHECK(errors.fpe <= 1.0);
}

TEST_CASE("phase length mismatches are rejected") {
    std::mt19937_64 rng(35);
    const FeatureSequence query = oracles::random_sequence("q", 6, 2, rng);
    const std::vector<int> short_phases{0, 1};
    CHECK_THROWS_AS(cycle_consistency(query, short_phases, query), std::invalid_argument);
}

TEST_CASE("sweep over identical copies is flat at 1") {
    std::mt19937_64 rng(37);
    std::vector<PairEvaluation> pairs;
    for (int p = 0; p < 4; ++p) {
        const FeatureSequence a = oracles::random_sequence("a" + std::to_string(p), 10, 3, rng);
        std::vector<int> labels(a.frames(), p);
        PairEvalOptions options;
        options.path_config.seed = 5;
        pairs.push_back(evaluate_pair(a, a, labels, labels, true, options));
        CHECK(pairs.back().apa == 1.0);
    }

    const std::vector<Indicator> indicators{Indicator::Draq, Indicator::DtwCost,
                                            Indicator::NegKendallTau};
    const std::vector<double> percentiles{10, 50, 100};
    const SweepReport report = sweep_indicators(pairs, indicators, percentiles);
    REQUIRE(report.series.size() == 3);
    for (const auto& series : report.series) {
        for (const auto& point : series.points) {
            REQUIRE(point.mean_apa.has_value());
            CHECK(*point.mean_apa == 1.0);
        }
    }
}

TEST_CASE("sweep subsets are nested and a single pair gives one-point curves") {
    std::mt19937_64 rng(39);
    const SyntheticDataset data = generate_synthetic(tiny_spec());
    std::vector<PairEvaluation> pairs;
    PairEvalOptions options;
    for (const auto& pair : data.pairs) {
        const SyntheticClip* a = nullptr;
        const SyntheticClip* b = nullptr;
        for (const auto& clip : data.clips) {
            if (clip.sequence.id() == pair.id_a) a = &clip;
            if (clip.sequence.id() == pair.id_b) b = &clip;
        }
        REQUIRE(a);
        REQUIRE(b);
        pairs.push_back(evaluate_pair(a->sequence, b->sequence, *a->labels.phases,
                                      *b->labels.phases, pair.alignable, options));
    }

    const std::vector<Indicator> indicators{Indicator::Draq, Indicator::DtwCost};
    const std::vector<double> percentiles{0, 10, 20, 40, 60, 80, 100};
    const SweepReport report = sweep_indicators(pairs, indicators, percentiles);
    for (const auto& series : report.series) {
        CHECK_FALSE(series.points[0].mean_apa.has_value());  // percentile 0 is empty
        for (std::size_t k = 1; k < series.points.size(); ++k) {
            CHECK(series.points[k].pair_count >= series.points[k - 1].pair_count);
        }
        CHECK(series.points.back().pair_count == pairs.size());
    }

    const SweepReport single = sweep_indicators({pairs.data(), 1}, indicators, percentiles);
    for (const auto& series : single.series) {
        for (std::size_t k = 1; k < series.points.size(); ++k) {
            REQUIRE(series.points[k].mean_apa.has_value());
            CHECK(*series.points[k].mean_apa == pairs[0].apa);
        }
    }
}

TEST_CASE("percentiles outside [0,100] are rejected") {
    const std::vector<PairEvaluation> pairs(1);
    const std::vector<Indicator> indicators{Indicator::Draq};
    const std::vector<double> bad{-5.0};
    CHECK_THROWS_AS(sweep_indicators(pairs, indicators, bad), std::invalid_argument);
}

TEST_CASE("roc auc separates clean score distributions") {
    const std::vector<double> scores{0.1, 0.2, 0.8, 0.9};
    const std::vector<char> truth{1, 1, 0, 0};
    CHECK(roc_auc_lower_positive(scores, truth) == 1.0);

    const std::vector<double> tied{0.5, 0.5};
    const std::vector<char> half{1, 0};
    CHECK(roc_auc_lower_positive(tied, half) == 0.5);

    const std::vector<double> inverted{0.9, 0.1};
    CHECK(roc_auc_lower_positive(inverted, half) == 0.0);

    const std::vector<char> one_class{1, 1};
    CHECK_THROWS_AS(roc_auc_lower_positive(tied, one_class), std::invalid_argument);
}

TEST_CASE("oracle candidates sample the query's class") {
    const std::map<std::string, std::string> actions{
        {"q", "swing"}, {"a", "swing"}, {"b", "swing"}, {"c", "jump"}, {"d", "swing"}};

    SUBCASE("class with exactly topk members is fully returned") {
        auto ids = oracle_candidates(actions, "q", 3, 1);
        std::sort(ids.begin(), ids.end());
        CHECK(ids == std::vector<std::string>{"a", "b", "d"});
    }
    SUBCASE("query itself is excluded and topk truncates") {
        const auto ids = oracle_candidates(actions, "q", 2, 1);
        CHECK(ids.size() == 2);
        for (const auto& id : ids) CHECK(id != "q");
    }
    SUBCASE("singleton class is empty") {
        CHECK(oracle_candidates(actions, "c", 5, 1).empty());
    }
    SUBCASE("absent query id is empty") {
        CHECK(oracle_candidates(actions, "zz", 5, 1).empty());
    }
    SUBCASE("seeded runs repeat exactly") {
        CHECK(oracle_candidates(actions, "q", 2, 9) == oracle_candidates(actions, "q", 2, 9));
    }
}

TEST_CASE("recall over singleton classes is zero and unchanged by reranking") {
    std::mt19937_64 rng(41);
    std::vector<FeatureSequence> corpus;
    std::map<std::string, std::string> actions;
    for (int e = 0; e < 5; ++e) {
        const std::string id = "c" + std::to_string(e);
        corpus.push_back(oracles::random_sequence(id, 8, 3, rng));
        actions[id] = "class" + std::to_string(e);  // everyone alone in a class
    }
    const RetrievalIndex index = build_index(corpus);
    const std::vector<std::string> queries{"c0", "c1"};
    const SequenceStore store = SequenceStore::in_memory(std::move(corpus));

    const std::vector<std::size_t> ks{1, 3};
    const RecallReport report = rerank_recall(index, store, actions, queries, 4, ks, {100, 3});
    for (const auto& row : report.rows) {
        CHECK(row.recall_before == 0.0);
        CHECK(row.recall_after == 0.0);
    }
}

TEST_CASE("recall at the rerank depth is invariant under reranking") {
    const SyntheticDataset data = generate_synthetic(tiny_spec());
    std::vector<FeatureSequence> train;
    std::vector<std::string> queries;
    std::map<std::string, std::string> actions;
    std::vector<FeatureSequence> everything;
    for (const auto& clip : data.clips) {
        actions[clip.sequence.id()] = *clip.labels.action;
        everything.push_back(clip.sequence);
        if (clip.is_query) queries.push_back(clip.sequence.id());
        else train.push_back(clip.sequence);
    }
    const RetrievalIndex index = build_index(train);
    const SequenceStore store = SequenceStore::in_memory(std::move(everything));

    const std::size_t depth = 4;
    const std::vector<std::size_t> ks{1, depth};
    const RecallReport report =
        rerank_recall(index, store, actions, queries, depth, ks, {100, 11});
    CHECK(report.rows.back().recall_before == report.rows.back().recall_after);
}

TEST_CASE("missing query action labels are rejected") {
    std::mt19937_64 rng(43);
    std::vector<FeatureSequence> corpus{oracles::random_sequence("a", 6, 2, rng),
                                        oracles::random_sequence("b", 6, 2, rng)};
    const RetrievalIndex index = build_index(corpus);
    const std::vector<std::string> queries{"a"};
    const SequenceStore store = SequenceStore::in_memory(std::move(corpus));
    const std::vector<std::size_t> ks{1};
    CHECK_THROWS_AS(rerank_recall(index, store, {}, queries, 2, ks, {100, 1}),
                    std::invalid_argument);
}

TEST_CASE("noiseless identity-warp clips of one prototype align diagonally") {
    SyntheticSpec spec = tiny_spec();
    spec.prototypes = 1;
    spec.clips_per_prototype = 2;
    spec.min_frames = 24;
    spec.max_frames = 24;
    spec.warp_slope_min = 1.0;
    spec.warp_slope_max = 1.0;
    spec.noise_sigma = 0.0;
    spec.alignable_pairs = 1;
    spec.cross_pairs = 0;
    const SyntheticDataset data = generate_synthetic(spec);
    REQUIRE(data.clips.size() == 2);
    CHECK(data.clips[0].sequence.data() == data.clips[1].sequence.data());

    const auto path =
        dtw(cost_matrix(contextualize(data.clips[0].sequence),
                        contextualize(data.clips[1].sequence)))
            .path;
    REQUIRE(path.size() == 24);
    for (std::uint32_t k = 0; k < 24; ++k) CHECK(path[k] == PathStep{k + 1, k + 1});
    CHECK(apa(*data.clips[0].labels.phases, *data.clips[1].labels.phases, path) == 1.0);
}

TEST_CASE("dtw recovers the generator's ground-truth warp within 2 frames") {
    SyntheticSpec spec = tiny_spec();
    spec.prototypes = 2;
    spec.clips_per_prototype = 2;
    spec.noise_sigma = 0.0;
    spec.min_frames = 36;
    spec.max_frames = 48;
    spec.alignable_pairs = 2;
    spec.cross_pairs = 1;
    const SyntheticDataset data = generate_synthetic(spec);

    const SyntheticClip& a = data.clips[0];
    const SyntheticClip& b = data.clips[1];
    REQUIRE(a.prototype == b.prototype);

    const AlignmentPath path =
        dtw(cost_matrix(contextualize(a.sequence), contextualize(b.sequence))).path;
    const AlignmentPath map = skip_still_frames(path, Side::First);

    // Ground-truth correspondence: the b-frame whose prototype position is
    // nearest to a's frame position.
    double total = 0.0;
    for (const PathStep& step : map) {
        const double u = a.positions[step.i - 1];
        std::size_t best = 0;
        for (std::size_t j = 1; j < b.positions.size(); ++j) {
            if (std::abs(b.positions[j] - u) < std::abs(b.positions[best] - u)) best = j;
        }
        total += std::abs(static_cast<double>(step.j) - static_cast<double>(best + 1));
    }
    CHECK(total / static_cast<double>(map.size()) <= 2.0);
}

TEST_CASE("synthetic generation is deterministic on disk") {
    const fs::path base = fs::temp_directory_path() /
                          ("avrkit_synth_" + std::to_string(std::random_device{}()));
    const SyntheticSpec spec = tiny_spec();
    write_synthetic(generate_synthetic(spec), base / "one");
    write_synthetic(generate_synthetic(spec), base / "two");

    std::size_t compared = 0;
    for (const auto& entry : fs::directory_iterator(base / "one")) {
        const fs::path other = base / "two" / entry.path().filename();
        REQUIRE(fs::exists(other));
        std::ifstream f1(entry.path(), std::ios::binary), f2(other, std::ios::binary);
        const std::string b1((std::istreambuf_iterator<char>(f1)), {});
        const std::string b2((std::istreambuf_iterator<char>(f2)), {});
        CHECK(b1 == b2);
        ++compared;
    }
    CHECK(compared > 0);
    fs::remove_all(base);
}

TEST_CASE("generated corpora load back through the manifests") {
    const fs::path dir = fs::temp_directory_path() /
                         ("avrkit_gen_" + std::to_string(std::random_device{}()));
    const SyntheticDataset data = generate_synthetic(tiny_spec());
    write_synthetic(data, dir);

    const DatasetManifest manifest = load_manifest(dir / "manifest.json");
    CHECK(manifest.entries.size() == data.clips.size());
    for (const auto& entry : manifest.entries) {
        const FeatureSequence seq = load_sequence(entry.feature_path, entry.id);
        REQUIRE(entry.label_path.has_value());
        const SequenceLabels labels = load_labels(*entry.label_path);
        validate_labels(seq, labels);
        CHECK(labels.action.has_value());
    }

    const PairsFile pairs = load_pairs(dir / "pairs.json");
    CHECK(pairs.pairs.size() == data.pairs.size());
    CHECK(fs::equivalent(pairs.manifest_path, dir / "manifest.json"));

    const DatasetManifest train = load_manifest(dir / "train_manifest.json");
    const DatasetManifest val = load_manifest(dir / "val_manifest.json");
    CHECK(train.entries.size() + val.entries.size() == manifest.entries.size());
    fs::remove_all(dir);
}

TEST_CASE("cycle benchmark runs end to end on a synthetic corpus") {
    const SyntheticDataset data = generate_synthetic(tiny_spec());
    std::vector<FeatureSequence> train, val;
    std::map<std::string, SequenceLabels> train_labels, val_labels;
    std::vector<std::string> queries;
    for (const auto& clip : data.clips) {
        if (clip.is_query) {
            queries.push_back(clip.sequence.id());
            val.push_back(clip.sequence);
            val_labels[clip.sequence.id()] = clip.labels;
        } else {
            train.push_back(clip.sequence);
            train_labels[clip.sequence.id()] = clip.labels;
        }
    }
    const RetrievalIndex index = build_index(train);
    const SequenceStore store = SequenceStore::in_memory(std::move(train));
    const SequenceStore query_store = SequenceStore::in_memory(std::move(val));

    CycleBenchOptions options;
    options.avr.path_config.seed = 21;
    const CycleReport report = run_cycle_benchmark(index, store, train_labels, query_store,
                                                   queries, val_labels, options);
    REQUIRE(report.entries.size() == queries.size());
    for (const auto& entry : report.entries) {
        if (!entry.filtered) {
            CHECK(entry.fpe >= 0.0);
            REQUIRE(entry.cpe.has_value());
            CHECK(*entry.cpe >= 0.0);
        }
    }
    REQUIRE(report.mean_fpe.has_value());

    SUBCASE("oracle mode restricts candidates to the query's class") {
        options.oracle = true;
        const CycleReport oracle_report = run_cycle_benchmark(
            index, store, train_labels, query_store, queries, val_labels, options);
        REQUIRE(oracle_report.entries.size() == queries.size());
        for (const auto& entry : oracle_report.entries) {
            if (!entry.filtered) {
                // Same prototype prefix means same action class.
                CHECK(entry.match_id.substr(0, 3) == entry.query_id.substr(0, 3));
            }
        }
    }
}
