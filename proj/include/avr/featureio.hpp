#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace avr {

/// Per-frame feature sequence of shape T x d, row-major float32.
/// Frame indices are 1-based in documentation and math; the accessors
/// below are 0-based like any C++ container.
class FeatureSequence {
public:
    FeatureSequence() = default;
    FeatureSequence(std::string id, std::size_t frames, std::size_t dim,
                    std::vector<float> data);

    const std::string& id() const { return id_; }
    std::size_t frames() const { return frames_; }
    std::size_t dim() const { return dim_; }
    const std::vector<float>& data() const { return data_; }

    /// Row j (0-based), d contiguous values.
    std::span<const float> frame(std::size_t j) const {
        return {data_.data() + j * dim_, dim_};
    }
    float at(std::size_t j, std::size_t k) const { return data_[j * dim_ + k]; }

    bool operator==(const FeatureSequence&) const = default;

private:
    std::string id_;
    std::size_t frames_ = 0;
    std::size_t dim_ = 0;
    std::vector<float> data_;
};

struct SequenceLabels {
    std::string id;
    std::optional<std::string> action;
    std::optional<std::vector<int>> phases;  // one entry per frame, each >= 0

    bool operator==(const SequenceLabels&) const = default;
};

struct ManifestEntry {
    std::string id;
    std::filesystem::path feature_path;
    std::optional<std::filesystem::path> label_path;
};

struct DatasetManifest {
    std::vector<ManifestEntry> entries;

    const ManifestEntry* find(const std::string& id) const;
};

// AVRF binary format: magic "AVRF", version u32=1, T u32, d u32,
// then T*d little-endian IEEE-754 float32, row-major.
FeatureSequence load_sequence(const std::filesystem::path& path);
FeatureSequence load_sequence(const std::filesystem::path& path, std::string id);
void save_sequence(const FeatureSequence& seq, const std::filesystem::path& path);

// Label sidecar JSON: {"id": str, "action": str|null, "phases": [int]|null}.
SequenceLabels load_labels(const std::filesystem::path& path);
void save_labels(const SequenceLabels& labels, const std::filesystem::path& path);

/// Throws when labels carry phases whose length differs from seq's frame count.
void validate_labels(const FeatureSequence& seq, const SequenceLabels& labels);

// Manifest JSON: {"entries": [{"id", "feature_path", "label_path"?}]}.
// Relative paths resolve against the manifest's directory; every referenced
// file must exist at load time.
DatasetManifest load_manifest(const std::filesystem::path& path);
void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path);

}  // namespace avr
