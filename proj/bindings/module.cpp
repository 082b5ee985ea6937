// Python bindings for the avrkit core: feature IO, contextualization, DTW
// alignment, DRAQ scoring, retrieval, the AVR pipeline, evaluation metrics,
// and the synthetic corpus generator.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <optional>

#include "avr/evalbench.hpp"
#include "avr/report_json.hpp"
#include "avr/synthetic.hpp"

namespace py = pybind11;
using namespace avr;

namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;
using DoubleArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using PathTuples = std::vector<std::pair<std::uint32_t, std::uint32_t>>;

FeatureSequence sequence_from_array(const std::string& id, const FloatArray& frames) {
    if (frames.ndim() != 2) {
        throw std::invalid_argument("frames must be a 2-D array of shape (T, d)");
    }
    const auto rows = static_cast<std::size_t>(frames.shape(0));
    const auto cols = static_cast<std::size_t>(frames.shape(1));
    std::vector<float> data(rows * cols);
    std::memcpy(data.data(), frames.data(), data.size() * sizeof(float));
    return {id, rows, cols, std::move(data)};
}

py::array_t<float> array_of(std::size_t rows, std::size_t cols,
                            const std::vector<float>& data) {
    py::array_t<float> out({rows, cols});
    std::memcpy(out.mutable_data(), data.data(), data.size() * sizeof(float));
    return out;
}

CostMatrix cost_from_array(const DoubleArray& values) {
    if (values.ndim() != 2) {
        throw std::invalid_argument("cost matrix must be 2-D");
    }
    const auto rows = static_cast<std::size_t>(values.shape(0));
    const auto cols = static_cast<std::size_t>(values.shape(1));
    std::vector<double> data(rows * cols);
    std::memcpy(data.data(), values.data(), data.size() * sizeof(double));
    return {rows, cols, std::move(data)};
}

AlignmentPath path_from_tuples(const PathTuples& tuples) {
    AlignmentPath path;
    path.reserve(tuples.size());
    for (const auto& [i, j] : tuples) path.push_back({i, j});
    return path;
}

PathTuples tuples_from_path(const AlignmentPath& path) {
    PathTuples tuples;
    tuples.reserve(path.size());
    for (const PathStep& step : path) tuples.emplace_back(step.i, step.j);
    return tuples;
}

Side parse_side(const std::string& name) {
    if (name == "first" || name == "query") return Side::First;
    if (name == "second" || name == "target" || name == "match") return Side::Second;
    throw std::invalid_argument("side must be 'first'/'query' or 'second'/'target'");
}

RerankMode parse_rerank(const std::string& name) {
    if (name == "draq") return RerankMode::Draq;
    if (name == "dtw") return RerankMode::Dtw;
    if (name == "none") return RerankMode::None;
    throw std::invalid_argument("rerank must be 'draq', 'dtw' or 'none'");
}

py::dict result_to_dict(const AvrResult& result) {
    py::dict out;
    out["query_id"] = result.query_id;
    py::list ranked;
    for (const RankedCandidate& c : result.ranked) {
        py::dict item;
        item["id"] = c.id;
        item["retrieval_sim"] = c.retrieval_sim;
        item["draq"] = c.draq;
        item["dtw_cost"] = c.dtw_cost;
        item["degenerate"] = c.degenerate;
        ranked.append(item);
    }
    out["ranked_candidates"] = ranked;
    if (result.best) {
        py::dict best;
        best["id"] = result.best->id;
        best["alignment"] = tuples_from_path(result.best->alignment);
        best["draq"] = result.best->draq;
        out["best"] = best;
    } else {
        out["best"] = py::none();
    }
    out["filtered"] = result.filtered;
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Alignable video retrieval: DTW alignment, DRAQ scoring, retrieval "
              "and evaluation over per-frame feature sequences";

    py::class_<FeatureSequence>(m, "FeatureSequence")
        .def(py::init(&sequence_from_array), py::arg("id"), py::arg("frames"))
        .def_property_readonly("id", &FeatureSequence::id)
        .def_property_readonly("num_frames", &FeatureSequence::frames)
        .def_property_readonly("dim", &FeatureSequence::dim)
        .def("frames",
             [](const FeatureSequence& s) { return array_of(s.frames(), s.dim(), s.data()); })
        .def("__repr__", [](const FeatureSequence& s) {
            return "FeatureSequence(id='" + s.id() + "', T=" + std::to_string(s.frames()) +
                   ", d=" + std::to_string(s.dim()) + ")";
        });

    py::class_<ContextualizedSequence>(m, "ContextualizedSequence")
        .def_property_readonly("id", &ContextualizedSequence::id)
        .def_property_readonly("num_frames", &ContextualizedSequence::frames)
        .def_property_readonly("width", &ContextualizedSequence::width)
        .def_property_readonly("with_context", &ContextualizedSequence::with_context)
        .def("frames", [](const ContextualizedSequence& s) {
            return array_of(s.frames(), s.width(), s.data());
        });

    py::class_<CostMatrix>(m, "CostMatrix")
        .def(py::init(&cost_from_array), py::arg("values"))
        .def_property_readonly("shape",
                               [](const CostMatrix& c) {
                                   return py::make_tuple(c.rows, c.cols);
                               })
        .def("numpy", [](const CostMatrix& c) {
            py::array_t<double> out({c.rows, c.cols});
            std::memcpy(out.mutable_data(), c.values.data(),
                        c.values.size() * sizeof(double));
            return out;
        });

    py::class_<AlignabilityScore>(m, "AlignabilityScore")
        .def_readonly("value", &AlignabilityScore::value)
        .def_readonly("degenerate", &AlignabilityScore::degenerate)
        .def_property_readonly("indicator",
                               [](const AlignabilityScore& s) {
                                   return indicator_name(s.indicator);
                               })
        .def("__repr__", [](const AlignabilityScore& s) {
            return "AlignabilityScore(" + indicator_name(s.indicator) + "=" +
                   std::to_string(s.value) + (s.degenerate ? ", degenerate" : "") + ")";
        });

    // featureio
    m.def("load_sequence",
          [](const std::filesystem::path& path, const std::optional<std::string>& id) {
              return id ? load_sequence(path, *id) : load_sequence(path);
          },
          py::arg("path"), py::arg("id") = py::none());
    m.def("save_sequence", &save_sequence, py::arg("sequence"), py::arg("path"));

    // context
    m.def("contextualize",
          py::overload_cast<const FeatureSequence&, bool>(&contextualize),
          py::arg("sequence"), py::arg("with_context") = true);

    // align
    m.def("cost_matrix", &cost_matrix, py::arg("a"), py::arg("b"));
    m.def("dtw",
          [](const CostMatrix& c) {
              DtwResult result = dtw(c);
              return py::make_tuple(tuples_from_path(result.path), result.cost);
          },
          py::arg("cost"), "Returns (path, total_cost) with 1-based path tuples");
    m.def("skip_still_frames",
          [](const PathTuples& path, const std::string& keep_unwarped) {
              return tuples_from_path(
                  skip_still_frames(path_from_tuples(path), parse_side(keep_unwarped)));
          },
          py::arg("path"), py::arg("keep_unwarped"));
    m.def("warp_labels",
          [](const PathTuples& path, const std::vector<double>& labels,
             const std::string& keep_unwarped) {
              return warp_labels<double>(path_from_tuples(path), labels,
                                         parse_side(keep_unwarped));
          },
          py::arg("path"), py::arg("source_labels"), py::arg("keep_unwarped"));

    // draq
    m.def("sample_random_path",
          [](std::size_t n, std::size_t m, std::uint64_t seed, const std::string& mode) {
              std::mt19937_64 rng(seed);
              const SamplerMode sampler_mode = mode == "repeat_direction"
                                                   ? SamplerMode::RepeatDirection
                                                   : SamplerMode::PerStep;
              return tuples_from_path(sample_random_path(n, m, rng, sampler_mode));
          },
          py::arg("n"), py::arg("m"), py::arg("seed") = 0,
          py::arg("mode") = "per_step");
    m.def("random_path_cost",
          [](const CostMatrix& c, int k, std::uint64_t seed) {
              return random_path_cost(c, {k, seed});
          },
          py::arg("cost"), py::arg("k") = 100, py::arg("seed") = 0);
    m.def("draq",
          [](const CostMatrix& c, int k, std::uint64_t seed) {
              return draq(c, {k, seed});
          },
          py::arg("cost"), py::arg("k") = 100, py::arg("seed") = 0);
    m.def("dtw_cost_indicator", &dtw_cost_indicator, py::arg("cost"));
    m.def("kendall_tau_indicator", &kendall_tau_indicator, py::arg("a"), py::arg("b"));

    // retrieve
    py::class_<RetrievalIndex>(m, "RetrievalIndex")
        .def_property_readonly("dimension", &RetrievalIndex::dimension)
        .def("__len__", &RetrievalIndex::size)
        .def("ids", [](const RetrievalIndex& index) {
            std::vector<std::string> ids;
            for (const auto& e : index.entries()) ids.push_back(e.id);
            return ids;
        });
    m.def("embed_clip",
          [](const FeatureSequence& seq) {
              const ClipEmbedding e = embed_clip(seq);
              return array_of(1, e.values.size(), e.values);
          },
          py::arg("sequence"));
    m.def("build_index",
          [](const std::vector<FeatureSequence>& seqs) {
              return build_index(std::span<const FeatureSequence>(seqs));
          },
          py::arg("sequences"));
    m.def("build_index_from_manifest",
          [](const std::filesystem::path& path) { return build_index(load_manifest(path)); },
          py::arg("manifest_path"));
    m.def("query_topk",
          [](const RetrievalIndex& index, const FeatureSequence& query, std::size_t k) {
              std::vector<std::pair<std::string, double>> out;
              for (const auto& hit : query_topk(index, query, k)) {
                  out.emplace_back(hit.id, hit.similarity);
              }
              return out;
          },
          py::arg("index"), py::arg("query"), py::arg("k") = 10);
    m.def("save_index", &save_index, py::arg("index"), py::arg("path"));
    m.def("load_index", &load_index, py::arg("path"));

    // pipeline
    py::class_<SequenceStore>(m, "SequenceStore")
        .def(py::init([](const std::filesystem::path& manifest, std::size_t cache) {
                 return SequenceStore(load_manifest(manifest), cache);
             }),
             py::arg("manifest_path"), py::arg("cache_capacity") = 64)
        .def_static("in_memory", &SequenceStore::in_memory, py::arg("sequences"))
        .def("__contains__", &SequenceStore::contains)
        .def("ids", &SequenceStore::ids);
    m.def("avr_query",
          [](const RetrievalIndex& index, const SequenceStore& store,
             const FeatureSequence& query, std::size_t topk, int k, std::uint64_t seed,
             double threshold, const std::string& rerank, bool use_context) {
              AvrOptions options;
              options.topk = topk;
              options.path_config = {k, seed};
              options.draq_threshold = threshold;
              options.rerank = parse_rerank(rerank);
              options.use_context = use_context;
              return result_to_dict(avr_query(index, store, query, options));
          },
          py::arg("index"), py::arg("store"), py::arg("query"), py::arg("topk") = 10,
          py::arg("k") = 100, py::arg("seed") = 0, py::arg("threshold") = 0.6,
          py::arg("rerank") = "draq", py::arg("use_context") = true);

    // evalbench
    m.def("apa",
          [](const std::vector<int>& a, const std::vector<int>& b, const PathTuples& path) {
              return apa(a, b, path_from_tuples(path));
          },
          py::arg("a_labels"), py::arg("b_labels"), py::arg("path"));
    m.def("cycle_consistency",
          [](const FeatureSequence& query, const std::optional<std::vector<int>>& phases,
             const FeatureSequence& match, bool use_context, const std::string& cpe_mode) {
              CycleOptions options;
              options.use_context = use_context;
              options.cpe_mode = cpe_mode == "mismatch" ? CpeMode::MismatchRate
                                                        : CpeMode::AbsoluteDifference;
              const CycleErrors errors = cycle_consistency(query, phases, match, options);
              return py::make_tuple(errors.fpe,
                                    errors.cpe ? py::cast(*errors.cpe) : py::none());
          },
          py::arg("query"), py::arg("query_phases"), py::arg("match"),
          py::arg("use_context") = true, py::arg("cpe_mode") = "abs");
    m.def("oracle_candidates", &oracle_candidates, py::arg("actions"), py::arg("query_id"),
          py::arg("topk"), py::arg("seed") = 0);

    // synthetic
    py::class_<SyntheticSpec>(m, "SyntheticSpec")
        .def(py::init<>())
        .def_readwrite("prototypes", &SyntheticSpec::prototypes)
        .def_readwrite("phases_per_prototype", &SyntheticSpec::phases_per_prototype)
        .def_readwrite("clips_per_prototype", &SyntheticSpec::clips_per_prototype)
        .def_readwrite("val_clips_per_prototype", &SyntheticSpec::val_clips_per_prototype)
        .def_readwrite("min_frames", &SyntheticSpec::min_frames)
        .def_readwrite("max_frames", &SyntheticSpec::max_frames)
        .def_readwrite("warp_segments", &SyntheticSpec::warp_segments)
        .def_readwrite("warp_slope_min", &SyntheticSpec::warp_slope_min)
        .def_readwrite("warp_slope_max", &SyntheticSpec::warp_slope_max)
        .def_readwrite("noise_sigma", &SyntheticSpec::noise_sigma)
        .def_readwrite("latent_dim", &SyntheticSpec::latent_dim)
        .def_readwrite("alignable_pairs", &SyntheticSpec::alignable_pairs)
        .def_readwrite("cross_pairs", &SyntheticSpec::cross_pairs)
        .def_readwrite("reversed_decoys", &SyntheticSpec::reversed_decoys)
        .def_readwrite("seed", &SyntheticSpec::seed);
    m.def("generate_synthetic",
          [](const SyntheticSpec& spec, const std::optional<std::filesystem::path>& out_dir) {
              const SyntheticDataset data = generate_synthetic(spec);
              if (out_dir) write_synthetic(data, *out_dir);
              std::vector<std::string> ids;
              for (const auto& clip : data.clips) ids.push_back(clip.sequence.id());
              return ids;
          },
          py::arg("spec"), py::arg("out_dir") = py::none(),
          "Generates the corpus, optionally writes it to out_dir, returns clip ids");
}
