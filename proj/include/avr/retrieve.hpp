#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "avr/featureio.hpp"

namespace avr {

/// Clip-level embedding: the temporal mean of the raw frame features.
struct ClipEmbedding {
    std::string id;
    std::vector<float> values;
};

/// Per-dimension mean and population standard deviation of the raw clip
/// embeddings an index was built from. Entries with stddev below 1e-12 are
/// clamped to 1e-12 when standardizing.
struct StandardizationStats {
    std::vector<float> mean;
    std::vector<float> stddev;
};

/// Immutable exact-search index over standardized clip embeddings.
class RetrievalIndex {
public:
    RetrievalIndex() = default;
    RetrievalIndex(std::size_t dimension, std::vector<ClipEmbedding> standardized,
                   StandardizationStats stats);

    std::size_t dimension() const { return dimension_; }
    std::size_t size() const { return entries_.size(); }
    const std::vector<ClipEmbedding>& entries() const { return entries_; }
    const StandardizationStats& stats() const { return stats_; }

private:
    std::size_t dimension_ = 0;
    std::vector<ClipEmbedding> entries_;  // standardized vectors
    StandardizationStats stats_;
};

struct SearchHit {
    std::string id;
    double similarity = 0.0;
};

/// Column mean of the raw frames, accumulated in double, narrowed to float32.
ClipEmbedding embed_clip(const FeatureSequence& seq);

/// Loads every manifest entry, embeds it, and standardizes per dimension as
/// (v - mean) / std with population std clamped at 1e-12.
RetrievalIndex build_index(const DatasetManifest& manifest);
RetrievalIndex build_index(std::span<const FeatureSequence> sequences);

/// Exact brute-force scan: descending cosine similarity over standardized
/// vectors, ties broken by ascending id; returns min(k, size) hits. The
/// query is standardized with the index's stats first.
std::vector<SearchHit> query_topk(const RetrievalIndex& index,
                                  const FeatureSequence& query, std::size_t k);

// AVRI index file: magic "AVRI", version u32=1, dimension u32, count u32,
// stats (mean then stddev, dimension float32 each), then per entry a
// u32-length-prefixed UTF-8 id and dimension float32 values.
void save_index(const RetrievalIndex& index, const std::filesystem::path& path);
RetrievalIndex load_index(const std::filesystem::path& path);

}  // namespace avr
