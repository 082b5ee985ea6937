#include "avr/featureio.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "binary_io.hpp"

namespace avr {

namespace {

using nlohmann::json;
using detail::append_u32;
using detail::read_file;
using detail::read_u32;
using detail::write_file;

constexpr char kMagic[4] = {'A', 'V', 'R', 'F'};
constexpr std::uint32_t kVersion = 1;
constexpr std::size_t kHeaderBytes = 16;

json parse_json_file(const std::filesystem::path& path) {
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
    return parsed;
}

}  // namespace

FeatureSequence::FeatureSequence(std::string id, std::size_t frames, std::size_t dim,
                                 std::vector<float> data)
    : id_(std::move(id)), frames_(frames), dim_(dim), data_(std::move(data)) {
    if (frames_ < 1 || dim_ < 1) {
        throw std::invalid_argument("feature sequence needs T >= 1 and d >= 1");
    }
    if (data_.size() != frames_ * dim_) {
        throw std::invalid_argument("feature sequence data size must be T*d");
    }
    for (float v : data_) {
        if (!std::isfinite(v)) {
            throw std::invalid_argument("feature sequence contains a non-finite value");
        }
    }
}

const ManifestEntry* DatasetManifest::find(const std::string& id) const {
    for (const auto& entry : entries) {
        if (entry.id == id) return &entry;
    }
    return nullptr;
}

FeatureSequence load_sequence(const std::filesystem::path& path) {
    return load_sequence(path, path.stem().string());
}

FeatureSequence load_sequence(const std::filesystem::path& path, std::string id) {
    const std::string bytes = read_file(path);
    const std::string where = path.string();
    if (bytes.size() < kHeaderBytes) {
        throw std::runtime_error(where + ": malformed header, file is only " +
                                 std::to_string(bytes.size()) + " bytes");
    }
    if (std::memcmp(bytes.data(), kMagic, 4) != 0) {
        throw std::runtime_error(where + ": malformed header, bad magic at byte offset 0");
    }
    if (const auto version = read_u32(bytes, 4); version != kVersion) {
        throw std::runtime_error(where + ": unsupported version " + std::to_string(version) +
                                 " at byte offset 4");
    }
    const std::uint32_t frames = read_u32(bytes, 8);
    const std::uint32_t dim = read_u32(bytes, 12);
    if (frames == 0) {
        throw std::runtime_error(where + ": malformed header, T=0 at byte offset 8");
    }
    if (dim == 0) {
        throw std::runtime_error(where + ": malformed header, d=0 at byte offset 12");
    }
    const std::size_t count = static_cast<std::size_t>(frames) * dim;
    const std::size_t expected = kHeaderBytes + 4 * count;
    if (bytes.size() != expected) {
        throw std::runtime_error(where + ": size mismatch, expected " + std::to_string(expected) +
                                 " bytes for T=" + std::to_string(frames) + " d=" +
                                 std::to_string(dim) + " but file has " +
                                 std::to_string(bytes.size()));
    }
    std::vector<float> values(count);
    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t offset = kHeaderBytes + 4 * k;
        const std::uint32_t raw = read_u32(bytes, offset);
        const float v = std::bit_cast<float>(raw);
        if (!std::isfinite(v)) {
            throw std::runtime_error(where + ": non-finite value at byte offset " +
                                     std::to_string(offset));
        }
        values[k] = v;
    }
    return FeatureSequence(std::move(id), frames, dim, std::move(values));
}

void save_sequence(const FeatureSequence& seq, const std::filesystem::path& path) {
    std::string bytes;
    bytes.reserve(kHeaderBytes + 4 * seq.data().size());
    bytes.append(kMagic, 4);
    append_u32(bytes, kVersion);
    append_u32(bytes, static_cast<std::uint32_t>(seq.frames()));
    append_u32(bytes, static_cast<std::uint32_t>(seq.dim()));
    for (float v : seq.data()) {
        append_u32(bytes, std::bit_cast<std::uint32_t>(v));
    }
    write_file(path, bytes);
}

SequenceLabels load_labels(const std::filesystem::path& path) {
    const json parsed = parse_json_file(path);
    SequenceLabels labels;
    labels.id = parsed.at("id").get<std::string>();
    if (parsed.contains("action") && !parsed["action"].is_null()) {
        labels.action = parsed["action"].get<std::string>();
    }
    if (parsed.contains("phases") && !parsed["phases"].is_null()) {
        labels.phases = parsed["phases"].get<std::vector<int>>();
        for (int p : *labels.phases) {
            if (p < 0) {
                throw std::runtime_error(path.string() + ": negative phase index " +
                                         std::to_string(p));
            }
        }
    }
    return labels;
}

void save_labels(const SequenceLabels& labels, const std::filesystem::path& path) {
    json out;
    out["id"] = labels.id;
    out["action"] = labels.action ? json(*labels.action) : json(nullptr);
    out["phases"] = labels.phases ? json(*labels.phases) : json(nullptr);
    write_file(path, out.dump(2) + "\n");
}

void validate_labels(const FeatureSequence& seq, const SequenceLabels& labels) {
    if (labels.phases && labels.phases->size() != seq.frames()) {
        throw std::runtime_error("labels for \"" + labels.id + "\" carry " +
                                 std::to_string(labels.phases->size()) +
                                 " phases but the sequence has " +
                                 std::to_string(seq.frames()) + " frames");
    }
}

DatasetManifest load_manifest(const std::filesystem::path& path) {
    const json parsed = parse_json_file(path);
    const auto base = path.has_parent_path() ? path.parent_path() : std::filesystem::path(".");
    auto resolve = [&](const std::string& p) {
        std::filesystem::path fp(p);
        return fp.is_absolute() ? fp : base / fp;
    };

    DatasetManifest manifest;
    std::set<std::string> seen;
    for (const auto& item : parsed.at("entries")) {
        ManifestEntry entry;
        entry.id = item.at("id").get<std::string>();
        if (!seen.insert(entry.id).second) {
            throw std::runtime_error(path.string() + ": duplicate id \"" + entry.id + "\"");
        }
        entry.feature_path = resolve(item.at("feature_path").get<std::string>());
        if (!std::filesystem::exists(entry.feature_path)) {
            throw std::runtime_error(path.string() + ": missing file " +
                                     entry.feature_path.string());
        }
        if (item.contains("label_path") && !item["label_path"].is_null()) {
            entry.label_path = resolve(item["label_path"].get<std::string>());
            if (!std::filesystem::exists(*entry.label_path)) {
                throw std::runtime_error(path.string() + ": missing file " +
                                         entry.label_path->string());
            }
        }
        manifest.entries.push_back(std::move(entry));
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    json entries = json::array();
    for (const auto& entry : manifest.entries) {
        json item;
        item["id"] = entry.id;
        item["feature_path"] = entry.feature_path.string();
        item["label_path"] = entry.label_path ? json(entry.label_path->string()) : json(nullptr);
        entries.push_back(std::move(item));
    }
    json out;
    out["entries"] = std::move(entries);
    write_file(path, out.dump(2) + "\n");
}

}  // namespace avr
