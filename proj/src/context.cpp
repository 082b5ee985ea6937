#include "avr/context.hpp"

#include <stdexcept>

namespace avr {

ContextualizedSequence::ContextualizedSequence(std::string id, std::size_t frames,
                                               std::size_t width, std::size_t source_dim,
                                               bool with_context, std::vector<float> data)
    : id_(std::move(id)),
      frames_(frames),
      width_(width),
      source_dim_(source_dim),
      with_context_(with_context),
      data_(std::move(data)) {
    if (data_.size() != frames_ * width_) {
        throw std::invalid_argument("contextualized data size must be T*width");
    }
}

ContextualizedSequence contextualize(const FeatureSequence& seq) {
    return contextualize(seq, true);
}

ContextualizedSequence contextualize(const FeatureSequence& seq, bool with_context) {
    const std::size_t frames = seq.frames();
    const std::size_t dim = seq.dim();
    const std::size_t width = with_context ? 2 * dim : dim;

    // Pre-centering rows in double: [f_j | (1/T) * prefix_sum_j] or plain f_j.
    std::vector<double> rows(frames * width);
    std::vector<double> prefix(dim, 0.0);
    const double inv_t = 1.0 / static_cast<double>(frames);
    for (std::size_t j = 0; j < frames; ++j) {
        const auto frame = seq.frame(j);
        double* row = rows.data() + j * width;
        for (std::size_t k = 0; k < dim; ++k) {
            prefix[k] += frame[k];
            row[k] = frame[k];
            if (with_context) {
                row[dim + k] = prefix[k] * inv_t;
            }
        }
    }

    std::vector<double> mean(width, 0.0);
    for (std::size_t j = 0; j < frames; ++j) {
        const double* row = rows.data() + j * width;
        for (std::size_t k = 0; k < width; ++k) {
            mean[k] += row[k];
        }
    }
    for (std::size_t k = 0; k < width; ++k) {
        mean[k] *= inv_t;
    }

    std::vector<float> centered(frames * width);
    for (std::size_t j = 0; j < frames; ++j) {
        const double* row = rows.data() + j * width;
        float* out = centered.data() + j * width;
        for (std::size_t k = 0; k < width; ++k) {
            out[k] = static_cast<float>(row[k] - mean[k]);
        }
    }
    return ContextualizedSequence(seq.id(), frames, width, dim, with_context,
                                  std::move(centered));
}

}  // namespace avr
