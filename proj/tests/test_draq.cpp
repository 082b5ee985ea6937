#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "avr/draq.hpp"
#include "oracles.hpp"

using namespace avr;

TEST_CASE("degenerate grids have unique paths") {
    std::mt19937_64 rng(1);
    CHECK(sample_random_path(1, 1, rng) == AlignmentPath{{1, 1}});
    for (int trial = 0; trial < 20; ++trial) {
        const AlignmentPath p = sample_random_path(1, 5, rng);
        CHECK(p == AlignmentPath{{1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}});
        const AlignmentPath q = sample_random_path(4, 1, rng);
        CHECK(q == AlignmentPath{{1, 1}, {2, 1}, {3, 1}, {4, 1}});
    }
}

TEST_CASE("2x2 sampling law: each of the three paths appears 1/3 of the time") {
    // At (2,2) the raw move law gives each of (-1,-1), (-1,0), (0,-1)
    // probability 1/4 and (0,0) probability 1/4; discarding (0,0) and
    // renormalizing leaves exactly 1/3 per move, and each move determines
    // the rest of the path (the remaining row/column is forced).
    const AlignmentPath diag{{1, 1}, {2, 2}};
    const AlignmentPath via_row{{1, 1}, {1, 2}, {2, 2}};
    const AlignmentPath via_col{{1, 1}, {2, 1}, {2, 2}};

    std::mt19937_64 rng(2024);
    std::map<AlignmentPath, int> counts;
    const int samples = 100000;
    for (int s = 0; s < samples; ++s) {
        ++counts[sample_random_path(2, 2, rng)];
    }
    REQUIRE(counts.size() == 3);
    CHECK(std::abs(counts[diag] / double(samples) - 1.0 / 3.0) < 0.01);
    CHECK(std::abs(counts[via_row] / double(samples) - 1.0 / 3.0) < 0.01);
    CHECK(std::abs(counts[via_col] / double(samples) - 1.0 / 3.0) < 0.01);
}

TEST_CASE("sampled paths are always valid alignment paths") {
    std::mt19937_64 rng(9);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 1 + rng() % 32;
        const std::size_t m = 1 + rng() % 32;
        for (SamplerMode mode : {SamplerMode::PerStep, SamplerMode::RepeatDirection}) {
            CHECK(is_valid_path(sample_random_path(n, m, rng, mode), n, m));
        }
    }
}

TEST_CASE("random path cost on a single row is the row sum") {
    const CostMatrix c(1, 3, {0.5, 1.0, 0.25});
    for (int k : {1, 7, 100}) {
        CHECK(random_path_cost(c, {k, 99}) == doctest::Approx(1.75));
    }
}

TEST_CASE("random path cost of the zero matrix is zero") {
    const CostMatrix c(4, 5, 0.0);
    CHECK(random_path_cost(c, {100, 3}) == 0.0);
}

TEST_CASE("random path cost matches an independently coded estimator") {
    const CostMatrix c(3, 3, {0.1, 0.7, 1.9, 0.4, 1.1, 0.2, 1.5, 0.8, 0.3});
    const double ours = random_path_cost(c, {10000, 7});
    const double reference = oracles::mc_random_cost_oracle(c, 10000, 1234);
    CHECK(std::abs(ours - reference) / reference < 0.005);
}

TEST_CASE("random path cost is deterministic per seed") {
    std::mt19937_64 rng(31);
    const CostMatrix c = oracles::random_cost_matrix(9, 7, rng);
    const double a = random_path_cost(c, {100, 5});
    const double b = random_path_cost(c, {100, 5});
    CHECK(a == b);
    CHECK(random_path_cost(c, {100, 6}) != a);
}

TEST_CASE("draq of identical distinct sequences is zero") {
    std::mt19937_64 rng(15);
    const FeatureSequence seq = oracles::random_sequence("s", 10, 4, rng);
    const ContextualizedSequence ctx = contextualize(seq);
    const CostMatrix c = cost_matrix(ctx, ctx);
    const AlignabilityScore score = draq(c, {100, 1});
    CHECK_FALSE(score.degenerate);
    CHECK(score.value == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("all-zero cost matrix is the degenerate 1.0 case") {
    const CostMatrix c(3, 3, 0.0);
    const AlignabilityScore score = draq(c, {100, 1});
    CHECK(score.degenerate);
    CHECK(score.value == 1.0);
}

TEST_CASE("draq on a random 5x4 matrix sits in its provable bounds") {
    std::mt19937_64 rng(99);
    const CostMatrix c = oracles::random_cost_matrix(5, 4, rng);
    const double optimal = dtw(c).cost;
    const AlignabilityScore score = draq(c, {200, 7}, optimal);
    CHECK(score.value <= 1.0 + 1e-9);
    // Every sampled path costs at most the exhaustive maximum.
    CHECK(score.value >= optimal / oracles::max_path_cost(c) - 1e-9);
}

TEST_CASE("draq is scale invariant while dtw cost scales") {
    std::mt19937_64 rng(123);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng() % 10;
        const std::size_t m = 2 + rng() % 10;
        const CostMatrix c = oracles::random_cost_matrix(n, m, rng);
        for (double alpha : {0.1, 10.0}) {
            CostMatrix scaled = c;
            for (double& v : scaled.values) v *= alpha;
            const RandomPathConfig cfg{100, 17};
            CHECK(draq(scaled, cfg).value ==
                  doctest::Approx(draq(c, cfg).value).epsilon(1e-9));
            CHECK(dtw_cost_indicator(scaled).value ==
                  doctest::Approx(alpha * dtw_cost_indicator(c).value).epsilon(1e-12));
        }
    }
}

TEST_CASE("dtw cost indicator delegates to dtw") {
    CHECK(dtw_cost_indicator(CostMatrix(1, 1, {0.75})).value == 0.75);

    std::mt19937_64 rng(55);
    const CostMatrix c = oracles::random_cost_matrix(6, 9, rng);
    CHECK(dtw_cost_indicator(c).value == dtw(c).cost);
    CHECK(dtw_cost_indicator(c).indicator == Indicator::DtwCost);

    const CostMatrix zero_diag(3, 3, {0, 1, 1, 1, 0, 1, 1, 1, 0});
    CHECK(dtw_cost_indicator(zero_diag).value == 0.0);
}

TEST_CASE("kendall tau indicator on monotone and anti-monotone matches") {
    std::mt19937_64 rng(87);
    const FeatureSequence seq = oracles::random_sequence("s", 6, 5, rng);
    const ContextualizedSequence ctx = contextualize(seq);

    SUBCASE("identical copy gives tau 1, score -1") {
        CHECK(kendall_tau_indicator(ctx, ctx).value == doctest::Approx(-1.0));
    }
    SUBCASE("time-reversed copy gives tau -1, score +1") {
        std::vector<float> rev(seq.data().size());
        for (std::size_t j = 0; j < seq.frames(); ++j) {
            const auto f = seq.frame(seq.frames() - 1 - j);
            std::copy(f.begin(), f.end(), rev.begin() + j * seq.dim());
        }
        const FeatureSequence reversed("r", seq.frames(), seq.dim(), std::move(rev));
        // Compare raw centered frames so the match structure is exactly mirrored.
        const auto a = contextualize(seq, false);
        const auto b = contextualize(reversed, false);
        CHECK(kendall_tau_indicator(a, b).value == doctest::Approx(1.0));
    }
}

TEST_CASE("kendall tau counts concordant minus discordant pairs") {
    // Frames of `a` match b-indices [2,1,3,4]: tau = (5-1)/6.
    // Build b so that a's frames are nearest to those positions.
    const std::vector<std::vector<float>> dirs{
        {1.0f, 0.0f}, {0.0f, 1.0f}, {-1.0f, 0.0f}, {0.0f, -1.0f}};
    std::vector<float> a_data, b_data;
    for (int i : {1, 0, 2, 3}) {
        a_data.push_back(dirs[i][0]);
        a_data.push_back(dirs[i][1]);
    }
    for (const auto& d : dirs) {
        b_data.push_back(d[0]);
        b_data.push_back(d[1]);
    }
    const ContextualizedSequence a("a", 4, 2, 2, false, std::move(a_data));
    const ContextualizedSequence b("b", 4, 2, 2, false, std::move(b_data));
    CHECK(kendall_tau_indicator(a, b).value == doctest::Approx(-4.0 / 6.0));
}

TEST_CASE("kendall tau needs two frames and matching widths") {
    const ContextualizedSequence one("a", 1, 2, 2, false, {1.0f, 0.0f});
    const ContextualizedSequence two("b", 2, 2, 2, false, {1.0f, 0.0f, 0.0f, 1.0f});
    CHECK_THROWS_AS(kendall_tau_indicator(one, two), std::invalid_argument);
}

TEST_CASE("all-tied matches define tau as zero") {
    // Every frame of `a` is nearest to b's single frame.
    const ContextualizedSequence a("a", 3, 2, 2, false,
                                   {1.0f, 0.1f, 1.0f, 0.2f, 1.0f, 0.3f});
    const ContextualizedSequence b("b", 1, 2, 2, false, {1.0f, 0.0f});
    CHECK(kendall_tau_indicator(a, b).value == 0.0);
}

TEST_CASE("derived stream seeds differ across pairs and match across runs") {
    CHECK(derive_stream_seed(1, "a|b") == derive_stream_seed(1, "a|b"));
    CHECK(derive_stream_seed(1, "a|b") != derive_stream_seed(1, "a|c"));
    CHECK(derive_stream_seed(1, "a|b") != derive_stream_seed(2, "a|b"));
}
