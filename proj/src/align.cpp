#include "avr/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace avr {

CostMatrix::CostMatrix(std::size_t n, std::size_t m, std::vector<double> v)
    : rows(n), cols(m), values(std::move(v)) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("cost matrix needs n >= 1 and m >= 1");
    }
    if (values.size() != rows * cols) {
        throw std::invalid_argument("cost matrix data size must be n*m");
    }
    for (double c : values) {
        if (!std::isfinite(c)) {
            throw std::invalid_argument("cost matrix contains a non-finite value");
        }
    }
}

CostMatrix::CostMatrix(std::size_t n, std::size_t m, double fill)
    : rows(n), cols(m), values(n * m, fill) {
    if (rows < 1 || cols < 1) {
        throw std::invalid_argument("cost matrix needs n >= 1 and m >= 1");
    }
}

bool is_valid_path(const AlignmentPath& path, std::size_t n, std::size_t m) {
    if (path.empty()) return false;
    if (path.front() != PathStep{1, 1}) return false;
    if (path.back() != PathStep{static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(m)}) {
        return false;
    }
    if (path.size() > n + m || path.size() < std::max(n, m)) return false;
    for (std::size_t k = 1; k < path.size(); ++k) {
        const std::uint32_t di = path[k].i - path[k - 1].i;
        const std::uint32_t dj = path[k].j - path[k - 1].j;
        if (path[k].i < path[k - 1].i || path[k].j < path[k - 1].j) return false;
        if (di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
    }
    return true;
}

namespace {

constexpr double kNormFloor = 1e-12;

double cosine_distance(std::span<const float> a, std::span<const float> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        dot += static_cast<double>(a[k]) * b[k];
        na += static_cast<double>(a[k]) * a[k];
        nb += static_cast<double>(b[k]) * b[k];
    }
    na = std::sqrt(na);
    nb = std::sqrt(nb);
    if (na < kNormFloor || nb < kNormFloor) {
        return 1.0;  // cosine undefined at zero norm; midpoint of the range
    }
    return std::clamp(1.0 - dot / (na * nb), 0.0, 2.0);
}

}  // namespace

CostMatrix cost_matrix(const ContextualizedSequence& a, const ContextualizedSequence& b) {
    if (a.width() != b.width()) {
        throw std::invalid_argument("cost_matrix: width mismatch, " +
                                    std::to_string(a.width()) + " vs " +
                                    std::to_string(b.width()));
    }
    CostMatrix c(a.frames(), b.frames());
    for (std::size_t i = 0; i < a.frames(); ++i) {
        const auto fa = a.frame(i);
        for (std::size_t j = 0; j < b.frames(); ++j) {
            c.at(i, j) = cosine_distance(fa, b.frame(j));
        }
    }
    return c;
}

DtwResult dtw(const CostMatrix& c) {
    const std::size_t n = c.rows;
    const std::size_t m = c.cols;
    std::vector<double> d(n * m);
    auto dval = [&](std::size_t i, std::size_t j) -> double& { return d[i * m + j]; };

    dval(0, 0) = c.at(0, 0);
    for (std::size_t j = 1; j < m; ++j) {
        dval(0, j) = dval(0, j - 1) + c.at(0, j);
    }
    for (std::size_t i = 1; i < n; ++i) {
        dval(i, 0) = dval(i - 1, 0) + c.at(i, 0);
        for (std::size_t j = 1; j < m; ++j) {
            const double best =
                std::min({dval(i - 1, j - 1), dval(i - 1, j), dval(i, j - 1)});
            dval(i, j) = best + c.at(i, j);
        }
    }

    // Backtrace; on exact ties prefer diagonal, then advancing i, then j.
    AlignmentPath path;
    std::size_t i = n - 1, j = m - 1;
    path.push_back({static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1)});
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            const double diag = dval(i - 1, j - 1);
            const double up = dval(i - 1, j);
            const double left = dval(i, j - 1);
            const double best = std::min({diag, up, left});
            if (diag == best) {
                --i;
                --j;
            } else if (up == best) {
                --i;
            } else {
                --j;
            }
        }
        path.push_back({static_cast<std::uint32_t>(i + 1), static_cast<std::uint32_t>(j + 1)});
    }
    std::reverse(path.begin(), path.end());
    return {std::move(path), d[n * m - 1]};
}

AlignmentPath skip_still_frames(const AlignmentPath& path, Side keep_unwarped) {
    AlignmentPath kept;
    kept.reserve(path.size());
    for (const PathStep& step : path) {
        const std::uint32_t key = keep_unwarped == Side::First ? step.i : step.j;
        if (!kept.empty()) {
            const std::uint32_t last = keep_unwarped == Side::First ? kept.back().i
                                                                    : kept.back().j;
            if (key == last) continue;  // first tuple per kept-side index wins
        }
        kept.push_back(step);
    }
    return kept;
}

template <typename Label>
std::vector<Label> warp_labels(const AlignmentPath& path,
                               std::span<const Label> source_labels, Side keep_unwarped) {
    if (path.empty()) {
        throw std::invalid_argument("warp_labels: empty path");
    }
    const std::size_t warped_len =
        keep_unwarped == Side::First ? path.back().j : path.back().i;
    if (source_labels.size() != warped_len) {
        throw std::invalid_argument("warp_labels: got " + std::to_string(source_labels.size()) +
                                    " labels for a warped side of length " +
                                    std::to_string(warped_len));
    }
    const AlignmentPath kept = skip_still_frames(path, keep_unwarped);
    std::vector<Label> out;
    out.reserve(kept.size());
    for (const PathStep& step : kept) {
        const std::uint32_t other = keep_unwarped == Side::First ? step.j : step.i;
        out.push_back(source_labels[other - 1]);
    }
    return out;
}

template std::vector<int> warp_labels<int>(const AlignmentPath&, std::span<const int>, Side);
template std::vector<double> warp_labels<double>(const AlignmentPath&,
                                                 std::span<const double>, Side);

}  // namespace avr
