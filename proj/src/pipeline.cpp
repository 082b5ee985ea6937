#include "avr/pipeline.hpp"

#include <algorithm>
#include <stdexcept>

#include "avr/context.hpp"

namespace avr {

SequenceStore::SequenceStore(DatasetManifest manifest, std::size_t cache_capacity)
    : manifest_(std::move(manifest)), capacity_(cache_capacity) {}

SequenceStore SequenceStore::in_memory(std::vector<FeatureSequence> sequences) {
    SequenceStore store;
    for (auto& seq : sequences) {
        const std::string id = seq.id();
        if (store.cache_.count(id)) {
            throw std::invalid_argument("SequenceStore: duplicate id \"" + id + "\"");
        }
        store.manifest_.entries.push_back({id, {}, std::nullopt});
        store.cache_.emplace(id, std::make_shared<FeatureSequence>(std::move(seq)));
    }
    return store;
}

std::shared_ptr<const FeatureSequence> SequenceStore::get(const std::string& id) const {
    std::lock_guard lock(*mutex_);
    if (auto it = cache_.find(id); it != cache_.end()) {
        if (capacity_ > 0) {
            lru_.remove(id);
            lru_.push_front(id);
        }
        return it->second;
    }
    const ManifestEntry* entry = manifest_.find(id);
    if (entry == nullptr || entry->feature_path.empty()) {
        throw std::runtime_error("no sequence for id \"" + id + "\"");
    }
    auto loaded = std::make_shared<FeatureSequence>(load_sequence(entry->feature_path, id));
    if (capacity_ > 0) {
        cache_.emplace(id, loaded);
        lru_.push_front(id);
        if (lru_.size() > capacity_) {
            cache_.erase(lru_.back());
            lru_.pop_back();
        }
    }
    return loaded;
}

bool SequenceStore::contains(const std::string& id) const {
    std::lock_guard lock(*mutex_);
    return cache_.count(id) > 0 || manifest_.find(id) != nullptr;
}

std::vector<std::string> SequenceStore::ids() const {
    std::vector<std::string> out;
    out.reserve(manifest_.entries.size());
    for (const auto& entry : manifest_.entries) out.push_back(entry.id);
    return out;
}

AvrResult avr_query(const RetrievalIndex& index, const SequenceStore& store,
                    const FeatureSequence& query, const AvrOptions& options) {
    if (options.topk < 1) {
        throw std::invalid_argument("avr_query: topk must be >= 1");
    }
    AvrResult result;
    result.query_id = query.id();
    if (index.size() == 0) {
        result.filtered = true;
        return result;
    }

    // One extra hit so dropping the query's own id still yields topk.
    std::vector<SearchHit> hits = query_topk(index, query, options.topk + 1);
    std::erase_if(hits, [&](const SearchHit& h) { return h.id == query.id(); });
    if (hits.size() > options.topk) hits.resize(options.topk);

    return avr_query_candidates(store, query, hits, options);
}

AvrResult avr_query_candidates(const SequenceStore& store, const FeatureSequence& query,
                               std::span<const SearchHit> candidates,
                               const AvrOptions& options) {
    AvrResult result;
    result.query_id = query.id();
    if (candidates.empty()) {
        result.filtered = true;
        return result;
    }

    const ContextualizedSequence ctx_query = contextualize(query, options.use_context);

    struct Scored {
        RankedCandidate candidate;
        AlignmentPath path;
    };
    std::vector<Scored> scored;
    scored.reserve(candidates.size());
    for (const SearchHit& hit : candidates) {
        const auto seq = store.get(hit.id);
        const ContextualizedSequence ctx_cand = contextualize(*seq, options.use_context);
        const CostMatrix c = cost_matrix(ctx_query, ctx_cand);
        DtwResult aligned = dtw(c);

        RandomPathConfig cfg = options.path_config;
        cfg.seed = derive_stream_seed(options.path_config.seed, query.id() + "|" + hit.id);
        const AlignabilityScore score = draq(c, cfg, aligned.cost);

        Scored s;
        s.candidate = {hit.id, hit.similarity, score.value, aligned.cost, score.degenerate};
        s.path = std::move(aligned.path);
        scored.push_back(std::move(s));
    }

    switch (options.rerank) {
        case RerankMode::Draq:
            std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
                if (a.candidate.draq != b.candidate.draq) {
                    return a.candidate.draq < b.candidate.draq;
                }
                return a.candidate.id < b.candidate.id;
            });
            break;
        case RerankMode::Dtw:
            std::sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
                if (a.candidate.dtw_cost != b.candidate.dtw_cost) {
                    return a.candidate.dtw_cost < b.candidate.dtw_cost;
                }
                return a.candidate.id < b.candidate.id;
            });
            break;
        case RerankMode::None:
            break;  // retrieval order already is (similarity desc, id asc)
    }

    for (const Scored& s : scored) {
        result.ranked.push_back(s.candidate);
    }

    for (const Scored& s : scored) {
        if (s.candidate.draq < options.draq_threshold) {
            BestMatch best;
            best.id = s.candidate.id;
            best.draq = s.candidate.draq;
            best.alignment = skip_still_frames(s.path, Side::Second);  // match unwarped
            result.best = std::move(best);
            break;
        }
    }
    result.filtered = !result.best.has_value();
    return result;
}

}  // namespace avr
