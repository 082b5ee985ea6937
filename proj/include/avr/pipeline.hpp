#pragma once

#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "avr/align.hpp"
#include "avr/draq.hpp"
#include "avr/retrieve.hpp"

namespace avr {

enum class RerankMode { Draq, Dtw, None };

/// Lazy id -> FeatureSequence lookup over a manifest, with a small LRU cache
/// so large corpora stay bounded in memory. Thread-safe.
class SequenceStore {
public:
    explicit SequenceStore(DatasetManifest manifest, std::size_t cache_capacity = 64);

    /// Store over already loaded sequences; nothing is ever evicted.
    static SequenceStore in_memory(std::vector<FeatureSequence> sequences);

    std::shared_ptr<const FeatureSequence> get(const std::string& id) const;
    bool contains(const std::string& id) const;
    std::vector<std::string> ids() const;
    const DatasetManifest& manifest() const { return manifest_; }

private:
    SequenceStore() = default;

    DatasetManifest manifest_;
    std::size_t capacity_ = 0;  // 0 = unbounded
    mutable std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
    mutable std::unordered_map<std::string, std::shared_ptr<const FeatureSequence>> cache_;
    mutable std::list<std::string> lru_;  // front = most recent
};

struct RankedCandidate {
    std::string id;
    double retrieval_sim = 0.0;
    double draq = 0.0;
    double dtw_cost = 0.0;
    bool degenerate = false;
};

struct BestMatch {
    std::string id;
    AlignmentPath alignment;  // still frames of the match already skipped
    double draq = 0.0;
};

struct AvrResult {
    std::string query_id;
    std::vector<RankedCandidate> ranked;
    std::optional<BestMatch> best;
    bool filtered = false;
};

struct AvrOptions {
    std::size_t topk = 10;
    RandomPathConfig path_config;
    double draq_threshold = 0.6;
    RerankMode rerank = RerankMode::Draq;
    bool use_context = true;
};

/// Full AVR query: retrieve topk candidates (the query's own id is excluded),
/// score each on contextualized features, re-rank per options, and align the
/// first candidate passing the DRAQ threshold, keeping the match unwarped.
/// filtered is true when no candidate passes (or the index is empty).
AvrResult avr_query(const RetrievalIndex& index, const SequenceStore& store,
                    const FeatureSequence& query, const AvrOptions& options = {});

/// Re-ranking stage alone, over an externally chosen candidate list (e.g.
/// oracle retrieval). Candidates keep their given order under RerankMode::None.
AvrResult avr_query_candidates(const SequenceStore& store, const FeatureSequence& query,
                               std::span<const SearchHit> candidates,
                               const AvrOptions& options = {});

}  // namespace avr
