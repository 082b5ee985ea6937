#include "avr/draq.hpp"

#include <algorithm>
#include <stdexcept>

#include "rng_util.hpp"

namespace avr {

namespace {

using detail::uniform01;

constexpr double kDegenerateFloor = 1e-12;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Draws a non-(0,0) move at (i,j), deltas clamped to 0 at the i=1 / j=1 walls.
std::pair<int, int> sample_move(std::size_t i, std::size_t j, std::mt19937_64& rng) {
    const double denom = static_cast<double>(i + j);
    for (;;) {
        int di = 0, dj = 0;
        if (i > 1 && uniform01(rng) < static_cast<double>(i) / denom) di = -1;
        if (j > 1 && uniform01(rng) < static_cast<double>(j) / denom) dj = -1;
        if (di != 0 || dj != 0) return {di, dj};
    }
}

}  // namespace

std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view pair_id) {
    std::uint64_t h = 1469598103934665603ULL ^ splitmix64(seed);
    for (unsigned char byte : pair_id) {
        h ^= byte;
        h *= 1099511628211ULL;  // FNV-1a prime
    }
    return splitmix64(h);
}

AlignmentPath sample_random_path(std::size_t n, std::size_t m, std::mt19937_64& rng,
                                 SamplerMode mode) {
    if (n < 1 || m < 1) {
        throw std::invalid_argument("sample_random_path: n and m must be >= 1");
    }
    std::size_t i = n, j = m;
    AlignmentPath path;
    path.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});

    if (mode == SamplerMode::PerStep) {
        while (i > 1 || j > 1) {
            const auto [di, dj] = sample_move(i, j, rng);
            i += di;
            j += dj;
            path.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
    } else {
        while (i > 1 || j > 1) {
            const auto [di, dj] = sample_move(i, j, rng);
            // Keep moving in the drawn direction until it hits a wall.
            do {
                i += di;
                j += dj;
                path.push_back({static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
            } while ((i > 1 || j > 1) && (di == 0 || i > 1) && (dj == 0 || j > 1));
        }
    }
    std::reverse(path.begin(), path.end());
    return path;
}

double random_path_cost(const CostMatrix& c, const RandomPathConfig& cfg) {
    if (cfg.num_paths < 1) {
        throw std::invalid_argument("random_path_cost: num_paths must be >= 1");
    }
    std::mt19937_64 rng(cfg.seed);
    double total = 0.0;
    for (int k = 0; k < cfg.num_paths; ++k) {
        const AlignmentPath path = sample_random_path(c.rows, c.cols, rng, cfg.mode);
        double sum = 0.0;
        for (const PathStep& step : path) {
            sum += c.at(step.i - 1, step.j - 1);
        }
        total += sum;
    }
    return total / static_cast<double>(cfg.num_paths);
}

AlignabilityScore draq(const CostMatrix& c, const RandomPathConfig& cfg) {
    return draq(c, cfg, dtw(c).cost);
}

AlignabilityScore draq(const CostMatrix& c, const RandomPathConfig& cfg, double optimal_cost) {
    const double random_cost = random_path_cost(c, cfg);
    if (random_cost < kDegenerateFloor) {
        return {1.0, Indicator::Draq, true};
    }
    return {optimal_cost / random_cost, Indicator::Draq, false};
}

AlignabilityScore dtw_cost_indicator(const CostMatrix& c) {
    return {dtw(c).cost, Indicator::DtwCost, false};
}

AlignabilityScore kendall_tau_indicator(const ContextualizedSequence& a,
                                        const ContextualizedSequence& b) {
    if (a.frames() < 2) {
        throw std::invalid_argument("kendall_tau_indicator: need at least 2 frames");
    }
    const CostMatrix c = cost_matrix(a, b);

    std::vector<std::size_t> matched(c.rows);
    for (std::size_t i = 0; i < c.rows; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < c.cols; ++j) {
            if (c.at(i, j) < c.at(i, best)) best = j;
        }
        matched[i] = best;
    }

    // tau-a: tied matched indices count as neither concordant nor discordant.
    long long concordant = 0, discordant = 0;
    const std::size_t n = matched.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = i + 1; k < n; ++k) {
            if (matched[i] < matched[k]) ++concordant;
            else if (matched[i] > matched[k]) ++discordant;
        }
    }
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double tau = static_cast<double>(concordant - discordant) / pairs;
    return {-tau, Indicator::NegKendallTau, false};
}

}  // namespace avr
