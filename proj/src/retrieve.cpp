#include "avr/retrieve.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <set>
#include <stdexcept>

#include "binary_io.hpp"

namespace avr {

namespace {

using detail::append_f32;
using detail::append_u32;
using detail::read_f32;
using detail::read_file;
using detail::read_u32;
using detail::write_file;

constexpr char kMagic[4] = {'A', 'V', 'R', 'I'};
constexpr std::uint32_t kVersion = 1;
constexpr double kStdFloor = 1e-12;

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += static_cast<double>(a[k]) * b[k];
        na += static_cast<double>(a[k]) * a[k];
        nb += static_cast<double>(b[k]) * b[k];
    }
    if (na < kStdFloor || nb < kStdFloor) {
        return 0.0;  // zero vectors carry no direction
    }
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<float> standardize(std::span<const float> v, const StandardizationStats& stats) {
    std::vector<float> out(v.size());
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double sd = std::max(static_cast<double>(stats.stddev[k]), kStdFloor);
        out[k] = static_cast<float>((static_cast<double>(v[k]) - stats.mean[k]) / sd);
    }
    return out;
}

RetrievalIndex build_from_embeddings(std::vector<ClipEmbedding> raw) {
    if (raw.empty()) {
        throw std::invalid_argument("build_index: empty input");
    }
    const std::size_t dim = raw.front().values.size();
    std::set<std::string> seen;
    for (const auto& e : raw) {
        if (e.values.size() != dim) {
            throw std::invalid_argument("build_index: dimension mismatch for \"" + e.id +
                                        "\", expected " + std::to_string(dim) + " got " +
                                        std::to_string(e.values.size()));
        }
        if (!seen.insert(e.id).second) {
            throw std::invalid_argument("build_index: duplicate id \"" + e.id + "\"");
        }
    }

    const double inv_n = 1.0 / static_cast<double>(raw.size());
    std::vector<double> mean(dim, 0.0), var(dim, 0.0);
    for (const auto& e : raw) {
        for (std::size_t k = 0; k < dim; ++k) mean[k] += e.values[k];
    }
    for (std::size_t k = 0; k < dim; ++k) mean[k] *= inv_n;
    for (const auto& e : raw) {
        for (std::size_t k = 0; k < dim; ++k) {
            const double delta = e.values[k] - mean[k];
            var[k] += delta * delta;
        }
    }

    StandardizationStats stats;
    stats.mean.resize(dim);
    stats.stddev.resize(dim);
    for (std::size_t k = 0; k < dim; ++k) {
        stats.mean[k] = static_cast<float>(mean[k]);
        stats.stddev[k] = static_cast<float>(std::sqrt(var[k] * inv_n));  // population std
    }

    for (auto& e : raw) {
        e.values = standardize(e.values, stats);
    }
    return RetrievalIndex(dim, std::move(raw), std::move(stats));
}

}  // namespace

RetrievalIndex::RetrievalIndex(std::size_t dimension, std::vector<ClipEmbedding> standardized,
                               StandardizationStats stats)
    : dimension_(dimension), entries_(std::move(standardized)), stats_(std::move(stats)) {}

ClipEmbedding embed_clip(const FeatureSequence& seq) {
    std::vector<double> acc(seq.dim(), 0.0);
    for (std::size_t j = 0; j < seq.frames(); ++j) {
        const auto frame = seq.frame(j);
        for (std::size_t k = 0; k < seq.dim(); ++k) acc[k] += frame[k];
    }
    ClipEmbedding embedding;
    embedding.id = seq.id();
    embedding.values.resize(seq.dim());
    const double inv_t = 1.0 / static_cast<double>(seq.frames());
    for (std::size_t k = 0; k < seq.dim(); ++k) {
        embedding.values[k] = static_cast<float>(acc[k] * inv_t);
    }
    return embedding;
}

RetrievalIndex build_index(const DatasetManifest& manifest) {
    if (manifest.entries.empty()) {
        throw std::invalid_argument("build_index: empty manifest");
    }
    std::vector<ClipEmbedding> raw;
    raw.reserve(manifest.entries.size());
    for (const auto& entry : manifest.entries) {
        raw.push_back(embed_clip(load_sequence(entry.feature_path, entry.id)));
    }
    return build_from_embeddings(std::move(raw));
}

RetrievalIndex build_index(std::span<const FeatureSequence> sequences) {
    std::vector<ClipEmbedding> raw;
    raw.reserve(sequences.size());
    for (const auto& seq : sequences) {
        raw.push_back(embed_clip(seq));
    }
    return build_from_embeddings(std::move(raw));
}

std::vector<SearchHit> query_topk(const RetrievalIndex& index, const FeatureSequence& query,
                                  std::size_t k) {
    if (k < 1) {
        throw std::invalid_argument("query_topk: k must be >= 1");
    }
    if (query.dim() != index.dimension()) {
        throw std::invalid_argument("query_topk: dimension mismatch, query has " +
                                    std::to_string(query.dim()) + ", index has " +
                                    std::to_string(index.dimension()));
    }
    const std::vector<float> q = standardize(embed_clip(query).values, index.stats());

    std::vector<SearchHit> hits;
    hits.reserve(index.size());
    for (const auto& entry : index.entries()) {
        hits.push_back({entry.id, cosine_similarity(q, entry.values)});
    }
    std::sort(hits.begin(), hits.end(), [](const SearchHit& a, const SearchHit& b) {
        if (a.similarity != b.similarity) return a.similarity > b.similarity;
        return a.id < b.id;
    });
    hits.resize(std::min(k, hits.size()));
    return hits;
}

void save_index(const RetrievalIndex& index, const std::filesystem::path& path) {
    std::string bytes;
    bytes.append(kMagic, 4);
    append_u32(bytes, kVersion);
    append_u32(bytes, static_cast<std::uint32_t>(index.dimension()));
    append_u32(bytes, static_cast<std::uint32_t>(index.size()));
    for (float v : index.stats().mean) append_f32(bytes, v);
    for (float v : index.stats().stddev) append_f32(bytes, v);
    for (const auto& entry : index.entries()) {
        append_u32(bytes, static_cast<std::uint32_t>(entry.id.size()));
        bytes.append(entry.id);
        for (float v : entry.values) append_f32(bytes, v);
    }
    write_file(path, bytes);
}

RetrievalIndex load_index(const std::filesystem::path& path) {
    const std::string bytes = read_file(path);
    const std::string where = path.string();
    auto need = [&](std::size_t offset, std::size_t count) {
        if (offset + count > bytes.size()) {
            throw std::runtime_error(where + ": truncated index file at byte offset " +
                                     std::to_string(offset));
        }
    };

    need(0, 16);
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw std::runtime_error(where + ": bad magic, not an AVRI index");
    }
    if (const auto version = read_u32(bytes, 4); version != kVersion) {
        throw std::runtime_error(where + ": unsupported index version " +
                                 std::to_string(version) + " (reader supports " +
                                 std::to_string(kVersion) + ")");
    }
    const std::uint32_t dim = read_u32(bytes, 8);
    const std::uint32_t count = read_u32(bytes, 12);

    std::size_t offset = 16;
    StandardizationStats stats;
    stats.mean.resize(dim);
    stats.stddev.resize(dim);
    need(offset, std::size_t{8} * dim);
    for (std::uint32_t k = 0; k < dim; ++k, offset += 4) stats.mean[k] = read_f32(bytes, offset);
    for (std::uint32_t k = 0; k < dim; ++k, offset += 4) stats.stddev[k] = read_f32(bytes, offset);

    std::vector<ClipEmbedding> entries;
    entries.reserve(count);
    for (std::uint32_t e = 0; e < count; ++e) {
        need(offset, 4);
        const std::uint32_t id_len = read_u32(bytes, offset);
        offset += 4;
        need(offset, id_len);
        ClipEmbedding entry;
        entry.id = bytes.substr(offset, id_len);
        offset += id_len;
        need(offset, std::size_t{4} * dim);
        entry.values.resize(dim);
        for (std::uint32_t k = 0; k < dim; ++k, offset += 4) {
            entry.values[k] = read_f32(bytes, offset);
        }
        entries.push_back(std::move(entry));
    }
    if (offset != bytes.size()) {
        throw std::runtime_error(where + ": trailing bytes after entry " +
                                 std::to_string(count));
    }
    return RetrievalIndex(dim, std::move(entries), std::move(stats));
}

}  // namespace avr
