#include "avr/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "binary_io.hpp"
#include "rng_util.hpp"

namespace avr {

namespace {

using nlohmann::json;
using detail::bounded;
using detail::gaussian;
using detail::uniform_range;

struct Sinusoid {
    double amp;
    double freq;  // cycles over the whole curve
    double phase;
};

// Latent curve of one action prototype. All prototypes share a harmonic
// frequency family (2 and 4 cycles per clip), so clips of different actions
// still look locally similar and cheap-but-wrong warps exist; a prototype
// owns its wave amplitudes/phases, a low-amplitude non-harmonic detail wave,
// and small per-phase offsets that make phases labelable. The periodic base
// means raw frame values revisit, so alignment genuinely benefits from
// temporal context.
struct Prototype {
    std::size_t phases = 1;
    std::vector<std::vector<Sinusoid>> waves;       // [dim][wave], 3-5 waves
    std::vector<std::vector<double>> phase_offset;  // [phase][dim]

    std::size_t phase_of(double u) const {
        const auto k = static_cast<std::size_t>(u * static_cast<double>(phases));
        return std::min(k, phases - 1);
    }

    double value(std::size_t dim, double u) const {
        double v = phase_offset[phase_of(u)][dim];
        for (const Sinusoid& w : waves[dim]) {
            v += w.amp * std::sin(2.0 * std::numbers::pi * w.freq * u + w.phase);
        }
        return v;
    }
};

Prototype make_prototype(std::size_t phases, std::size_t dim, std::mt19937_64& rng) {
    Prototype proto;
    proto.phases = phases;
    proto.waves.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        // Two shared harmonics plus one prototype-specific detail wave, then
        // up to two extra harmonics so wave counts span 3-5.
        proto.waves[k].push_back({uniform_range(rng, 0.4, 1.0), 2.0,
                                  uniform_range(rng, 0.0, 2.0 * std::numbers::pi)});
        proto.waves[k].push_back({uniform_range(rng, 0.4, 1.0), 4.0,
                                  uniform_range(rng, 0.0, 2.0 * std::numbers::pi)});
        proto.waves[k].push_back({uniform_range(rng, 0.1, 0.2),
                                  uniform_range(rng, 2.5, 3.5),
                                  uniform_range(rng, 0.0, 2.0 * std::numbers::pi)});
        const std::size_t extra = bounded(rng, 3);
        for (std::size_t w = 0; w < extra; ++w) {
            proto.waves[k].push_back({uniform_range(rng, 0.2, 0.5), w == 0 ? 2.0 : 4.0,
                                      uniform_range(rng, 0.0, 2.0 * std::numbers::pi)});
        }
    }
    proto.phase_offset.resize(phases);
    for (auto& offset : proto.phase_offset) {
        offset.resize(dim);
        for (auto& v : offset) v = uniform_range(rng, -0.15, 0.15);
    }
    return proto;
}

// Strictly increasing piecewise-linear warp of [0,1] onto [0,1].
struct Warp {
    std::vector<double> knots;  // size segments+1, knots[0]=0, knots.back()=1

    double operator()(double t) const {
        const std::size_t segments = knots.size() - 1;
        auto r = static_cast<std::size_t>(t * static_cast<double>(segments));
        r = std::min(r, segments - 1);
        const double frac = t * static_cast<double>(segments) - static_cast<double>(r);
        return knots[r] + frac * (knots[r + 1] - knots[r]);
    }
};

Warp make_warp(std::size_t segments, double slope_min, double slope_max,
               std::mt19937_64& rng) {
    std::vector<double> slopes(segments);
    double total = 0.0;
    const bool fixed_speed = slope_min == slope_max;
    for (auto& s : slopes) {
        s = uniform_range(rng, slope_min, slope_max);
        // Occasional near-pause: the clip lingers while barely progressing,
        // like held poses in real footage. Still strictly monotonic. A
        // degenerate slope range means a fixed-speed family and stays exact.
        if (!fixed_speed && uniform_range(rng, 0.0, 1.0) < 0.15) s *= 0.15;
        total += s;
    }
    Warp warp;
    warp.knots.resize(segments + 1);
    warp.knots[0] = 0.0;
    double acc = 0.0;
    for (std::size_t r = 0; r < segments; ++r) {
        acc += slopes[r];
        warp.knots[r + 1] = acc / total;
    }
    warp.knots[segments] = 1.0;
    return warp;
}

std::string zero_pad(std::size_t v) {
    std::string s = std::to_string(v);
    return s.size() < 2 ? "0" + s : s;
}

SyntheticClip reverse_clip(const SyntheticClip& clip) {
    const auto& seq = clip.sequence;
    std::vector<float> data(seq.data().size());
    for (std::size_t j = 0; j < seq.frames(); ++j) {
        const auto frame = seq.frame(seq.frames() - 1 - j);
        std::copy(frame.begin(), frame.end(), data.begin() + j * seq.dim());
    }
    SyntheticClip decoy;
    decoy.sequence = FeatureSequence(seq.id() + "_rev", seq.frames(), seq.dim(),
                                     std::move(data));
    decoy.labels.id = decoy.sequence.id();
    decoy.labels.action = clip.labels.action ? std::optional(*clip.labels.action + "_rev")
                                             : std::nullopt;
    if (clip.labels.phases) {
        auto phases = *clip.labels.phases;
        std::reverse(phases.begin(), phases.end());
        decoy.labels.phases = std::move(phases);
    }
    decoy.positions.assign(clip.positions.rbegin(), clip.positions.rend());
    decoy.prototype = clip.prototype;
    decoy.is_query = false;
    return decoy;
}

}  // namespace

SyntheticDataset generate_synthetic(const SyntheticSpec& spec) {
    if (spec.prototypes < 1 || spec.clips_per_prototype < 1 || spec.latent_dim < 1 ||
        spec.phases_per_prototype < 1 || spec.warp_segments < 1) {
        throw std::invalid_argument("generate_synthetic: counts must be >= 1");
    }
    if (spec.min_frames < 2 || spec.max_frames < spec.min_frames) {
        throw std::invalid_argument("generate_synthetic: need max_frames >= min_frames >= 2");
    }
    if (spec.val_clips_per_prototype >= spec.clips_per_prototype) {
        throw std::invalid_argument("generate_synthetic: every prototype needs a train clip");
    }
    if (spec.warp_slope_min <= 0.0 || spec.warp_slope_max < spec.warp_slope_min) {
        throw std::invalid_argument("generate_synthetic: warp slopes must be positive");
    }

    std::mt19937_64 rng(spec.seed);
    SyntheticDataset dataset;

    for (std::size_t p = 0; p < spec.prototypes; ++p) {
        const Prototype proto = make_prototype(spec.phases_per_prototype, spec.latent_dim, rng);
        const std::string action = "act" + zero_pad(p);

        for (std::size_t c = 0; c < spec.clips_per_prototype; ++c) {
            const std::size_t frames =
                spec.min_frames + bounded(rng, spec.max_frames - spec.min_frames + 1);
            const Warp warp =
                make_warp(spec.warp_segments, spec.warp_slope_min, spec.warp_slope_max, rng);

            SyntheticClip clip;
            clip.prototype = p;
            clip.is_query = c < spec.val_clips_per_prototype;
            clip.positions.resize(frames);
            // Per-clip noise scale in [0.5, 2]x: appearance quality varies
            // between clips the way capture conditions vary between videos.
            const double clip_sigma =
                spec.noise_sigma * std::exp2(uniform_range(rng, -1.0, 1.0));
            std::vector<int> phases(frames);
            std::vector<float> data(frames * spec.latent_dim);
            for (std::size_t j = 0; j < frames; ++j) {
                const double t = static_cast<double>(j) / static_cast<double>(frames - 1);
                const double u = warp(t);
                clip.positions[j] = u;
                phases[j] = static_cast<int>(p * spec.phases_per_prototype + proto.phase_of(u));
                for (std::size_t k = 0; k < spec.latent_dim; ++k) {
                    data[j * spec.latent_dim + k] = static_cast<float>(
                        proto.value(k, u) + clip_sigma * gaussian(rng));
                }
            }
            const std::string id = "p" + zero_pad(p) + "_c" + zero_pad(c);
            clip.sequence = FeatureSequence(id, frames, spec.latent_dim, std::move(data));
            clip.labels = {id, action, std::move(phases)};
            dataset.clips.push_back(std::move(clip));
        }
    }

    if (spec.reversed_decoys) {
        const std::size_t base = dataset.clips.size();
        for (std::size_t idx = 0; idx < base; ++idx) {
            if (dataset.clips[idx].is_query) {
                dataset.clips.push_back(reverse_clip(dataset.clips[idx]));
            }
        }
    }

    // Balanced pair list over the non-decoy clips.
    std::vector<PairSpec> same, cross;
    for (std::size_t a = 0; a < dataset.clips.size(); ++a) {
        for (std::size_t b = a + 1; b < dataset.clips.size(); ++b) {
            const auto& ca = dataset.clips[a];
            const auto& cb = dataset.clips[b];
            if (ca.sequence.id().ends_with("_rev") || cb.sequence.id().ends_with("_rev")) {
                continue;
            }
            PairSpec pair{ca.sequence.id(), cb.sequence.id(), ca.prototype == cb.prototype};
            (pair.alignable ? same : cross).push_back(pair);
        }
    }
    detail::shuffle(same, rng);
    detail::shuffle(cross, rng);
    if (same.size() < spec.alignable_pairs || cross.size() < spec.cross_pairs) {
        throw std::invalid_argument("generate_synthetic: not enough clips for the requested "
                                    "pair counts");
    }
    same.resize(spec.alignable_pairs);
    cross.resize(spec.cross_pairs);
    dataset.pairs = std::move(same);
    dataset.pairs.insert(dataset.pairs.end(), cross.begin(), cross.end());
    return dataset;
}

void write_synthetic(const SyntheticDataset& dataset, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    DatasetManifest all, train, val;
    for (const auto& clip : dataset.clips) {
        const std::string& id = clip.sequence.id();
        save_sequence(clip.sequence, dir / (id + ".avrf"));
        save_labels(clip.labels, dir / (id + ".labels.json"));

        json warp;
        warp["id"] = id;
        warp["positions"] = clip.positions;
        detail::write_file(dir / (id + ".warp.json"), warp.dump(2) + "\n");

        ManifestEntry entry{id, id + ".avrf", id + ".labels.json"};
        all.entries.push_back(entry);
        (clip.is_query ? val : train).entries.push_back(entry);
    }
    save_manifest(all, dir / "manifest.json");
    save_manifest(train, dir / "train_manifest.json");
    save_manifest(val, dir / "val_manifest.json");

    json pairs = json::array();
    for (const auto& pair : dataset.pairs) {
        pairs.push_back({{"a", pair.id_a}, {"b", pair.id_b}, {"alignable", pair.alignable}});
    }
    json pairs_file;
    pairs_file["manifest"] = "manifest.json";
    pairs_file["pairs"] = std::move(pairs);
    detail::write_file(dir / "pairs.json", pairs_file.dump(2) + "\n");
}

SyntheticSpec load_synthetic_spec(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
    }

    SyntheticSpec spec;
    auto load = [&](const char* key, auto& field) {
        if (parsed.contains(key)) parsed.at(key).get_to(field);
    };
    load("prototypes", spec.prototypes);
    load("phases_per_prototype", spec.phases_per_prototype);
    load("clips_per_prototype", spec.clips_per_prototype);
    load("val_clips_per_prototype", spec.val_clips_per_prototype);
    load("min_frames", spec.min_frames);
    load("max_frames", spec.max_frames);
    load("warp_segments", spec.warp_segments);
    load("warp_slope_min", spec.warp_slope_min);
    load("warp_slope_max", spec.warp_slope_max);
    load("noise_sigma", spec.noise_sigma);
    load("latent_dim", spec.latent_dim);
    load("alignable_pairs", spec.alignable_pairs);
    load("cross_pairs", spec.cross_pairs);
    load("reversed_decoys", spec.reversed_decoys);
    load("seed", spec.seed);
    return spec;
}

void save_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path) {
    json out;
    out["prototypes"] = spec.prototypes;
    out["phases_per_prototype"] = spec.phases_per_prototype;
    out["clips_per_prototype"] = spec.clips_per_prototype;
    out["val_clips_per_prototype"] = spec.val_clips_per_prototype;
    out["min_frames"] = spec.min_frames;
    out["max_frames"] = spec.max_frames;
    out["warp_segments"] = spec.warp_segments;
    out["warp_slope_min"] = spec.warp_slope_min;
    out["warp_slope_max"] = spec.warp_slope_max;
    out["noise_sigma"] = spec.noise_sigma;
    out["latent_dim"] = spec.latent_dim;
    out["alignable_pairs"] = spec.alignable_pairs;
    out["cross_pairs"] = spec.cross_pairs;
    out["reversed_decoys"] = spec.reversed_decoys;
    out["seed"] = spec.seed;
    detail::write_file(path, out.dump(2) + "\n");
}

PairsFile load_pairs(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    json parsed;
    try {
        parsed = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
    }

    PairsFile pairs;
    std::filesystem::path manifest(parsed.at("manifest").get<std::string>());
    if (!manifest.is_absolute() && path.has_parent_path()) {
        manifest = path.parent_path() / manifest;
    }
    pairs.manifest_path = manifest;
    for (const auto& item : parsed.at("pairs")) {
        pairs.pairs.push_back({item.at("a").get<std::string>(),
                               item.at("b").get<std::string>(),
                               item.value("alignable", false)});
    }
    return pairs;
}

}  // namespace avr
