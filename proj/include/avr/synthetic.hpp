#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "avr/featureio.hpp"

namespace avr {

/// Parameters of the synthetic alignable-corpus generator. Each prototype is
/// a smooth phase-segmented latent curve; clips are monotonic piecewise-linear
/// re-timings of a prototype plus Gaussian noise. Fully seeded.
struct SyntheticSpec {
    std::size_t prototypes = 10;
    std::size_t phases_per_prototype = 4;
    std::size_t clips_per_prototype = 4;
    std::size_t val_clips_per_prototype = 1;  // queries; the rest index as train
    std::size_t min_frames = 16;
    std::size_t max_frames = 120;
    std::size_t warp_segments = 5;
    double warp_slope_min = 0.3;
    double warp_slope_max = 3.0;
    double noise_sigma = 0.45;
    std::size_t latent_dim = 4;
    std::size_t alignable_pairs = 50;
    std::size_t cross_pairs = 50;
    bool reversed_decoys = false;  // adds a time-reversed twin per query to train
    std::uint64_t seed = 2024;
};

struct SyntheticClip {
    FeatureSequence sequence;
    SequenceLabels labels;           // action = prototype id, phases from segments
    std::vector<double> positions;   // ground-truth prototype position per frame
    std::size_t prototype = 0;
    bool is_query = false;
};

struct PairSpec {
    std::string id_a;
    std::string id_b;
    bool alignable = false;  // same prototype
};

struct SyntheticDataset {
    std::vector<SyntheticClip> clips;
    std::vector<PairSpec> pairs;  // balanced: alignable then cross, seeded
};

SyntheticDataset generate_synthetic(const SyntheticSpec& spec);

/// Writes AVRF files, label sidecars, ground-truth warp sidecars
/// ({id}.warp.json with the per-frame prototype positions), manifests
/// (manifest.json with everything, train_manifest.json, val_manifest.json)
/// and pairs.json into dir. Byte-identical for identical specs.
void write_synthetic(const SyntheticDataset& dataset, const std::filesystem::path& dir);

// spec JSON round trip for the CLI; missing fields keep their defaults.
SyntheticSpec load_synthetic_spec(const std::filesystem::path& path);
void save_synthetic_spec(const SyntheticSpec& spec, const std::filesystem::path& path);

/// Pair list sidecar: {"manifest": path, "pairs": [{"a","b","alignable"},...]},
/// manifest resolved relative to the pairs file.
struct PairsFile {
    std::filesystem::path manifest_path;
    std::vector<PairSpec> pairs;
};
PairsFile load_pairs(const std::filesystem::path& path);

}  // namespace avr
