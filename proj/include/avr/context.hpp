#pragma once

#include <span>
#include <string>
#include <vector>

#include "avr/featureio.hpp"

namespace avr {

/// Frame features prepared for alignment: optionally concatenated with the
/// length-normalized cumulative sum, always zero-centered per clip.
/// Width is 2*source_dim when the context term is enabled, source_dim when not.
class ContextualizedSequence {
public:
    ContextualizedSequence() = default;
    ContextualizedSequence(std::string id, std::size_t frames, std::size_t width,
                           std::size_t source_dim, bool with_context,
                           std::vector<float> data);

    const std::string& id() const { return id_; }
    std::size_t frames() const { return frames_; }
    std::size_t width() const { return width_; }
    std::size_t source_dim() const { return source_dim_; }
    bool with_context() const { return with_context_; }
    const std::vector<float>& data() const { return data_; }

    std::span<const float> frame(std::size_t j) const {
        return {data_.data() + j * width_, width_};
    }

private:
    std::string id_;
    std::size_t frames_ = 0;
    std::size_t width_ = 0;
    std::size_t source_dim_ = 0;
    bool with_context_ = true;
    std::vector<float> data_;
};

/// Row j becomes [f_j (+) (1/T) * sum_{t<=j} f_t], then the per-clip column
/// mean of those rows is subtracted. The cumulative term divides by the full
/// length T, not the prefix length. Accumulation runs in double and the
/// result is narrowed to float32.
ContextualizedSequence contextualize(const FeatureSequence& seq);

/// with_context=false keeps the raw T x d features but still zero-centers
/// them per clip, so ablations isolate the cumulative-context term.
ContextualizedSequence contextualize(const FeatureSequence& seq, bool with_context);

}  // namespace avr
