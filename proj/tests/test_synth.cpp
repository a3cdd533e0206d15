#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oracles.hpp"
#include "test_util.hpp"
#include "wavan/spectral.hpp"
#include "wavan/synth.hpp"

using namespace wavan;

TEST_CASE("xoshiro256** stream is reproducible") {
    Xoshiro256ss a(12345), b(12345);
    for (int i = 0; i < 100; ++i) REQUIRE(a.next() == b.next());
    Xoshiro256ss c(12346);
    bool all_equal = true;
    Xoshiro256ss d(12345);
    for (int i = 0; i < 10; ++i) all_equal = all_equal && (c.next() == d.next());
    REQUIRE_FALSE(all_equal);
}

TEST_CASE("rts with zero rates stays in the initial state") {
    TimeSeries x = gen_rts(100, 1.0, 0.0, 0.0, 3.0, 7);
    for (double v : x.values) REQUIRE(v == 0.0);
}

TEST_CASE("rts occupancy of symmetric rates is one half") {
    const std::size_t n = 1'000'000;
    TimeSeries x = gen_rts(n, 1.0, 0.01, 0.01, 1.0, 99);
    double occupancy = 0.0;
    for (double v : x.values) occupancy += v;
    occupancy /= static_cast<double>(n);
    REQUIRE(occupancy == Catch::Approx(0.5).margin(0.02));
}

TEST_CASE("rts switch count matches the analytic expectation") {
    const std::size_t n = 1'000'000;
    const double rate = 0.02, dt = 1.0;
    TimeSeries x = gen_rts(n, dt, rate, rate, 1.0, 123);
    std::size_t switches = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (x.values[i] != x.values[i - 1]) ++switches;
    double expected = static_cast<double>(n) * (1.0 - std::exp(-rate * dt));
    REQUIRE(std::abs(static_cast<double>(switches) - expected) <= 0.05 * expected);
}

TEST_CASE("rts rejects rates too high for the step") {
    CHECK_THROWS_MATCHES(gen_rts(100, 1.0, 1.5, 0.1, 1.0, 1), Error, has_code(errc::rate_too_high));
}

TEST_CASE("colored noise hits the requested spectral slope") {
    const std::size_t n = 1 << 16;
    for (double beta : {0.0, 1.0}) {
        double slope_sum = 0.0;
        const int seeds = 4;
        for (int seed = 0; seed < seeds; ++seed) {
            TimeSeries x = gen_colored(n, 1.0, beta, 1.0, 7000 + seed);
            Spectrum w = welch_psd(x);
            // fit away from the lowest bins where the estimator scatter dominates
            std::vector<double> f, p;
            for (std::size_t i = 4; i < w.frequencies.size(); ++i) {
                f.push_back(w.frequencies[i]);
                p.push_back(w.values[i]);
            }
            slope_sum += oracle::loglog_slope(f, p);
        }
        REQUIRE(slope_sum / seeds == Catch::Approx(-beta).margin(0.15));
    }
}

TEST_CASE("colored noise level scaling") {
    TimeSeries zero = gen_colored(512, 1.0, 1.0, 0.0, 5);
    for (double v : zero.values) REQUIRE(v == 0.0);
    TimeSeries one = gen_colored(512, 1.0, 1.0, 2.5, 5);
    REQUIRE(sample_std(one) == Catch::Approx(2.5).epsilon(1e-12));
}

TEST_CASE("compose of an empty recipe is the zero series") {
    NoiseRecipe recipe;
    recipe.n = 64;
    recipe.dt = 1.0;
    recipe.seed = 1;
    TimeSeries x = compose(recipe);
    for (double v : x.values) REQUIRE(v == 0.0);
}

TEST_CASE("compose is additive over components with explicit seeds") {
    RtsComponent rts{0.05, 0.05, 2.0, 77};
    ColoredComponent colored{1.0, 0.7, 78};
    NoiseRecipe both;
    both.n = 512;
    both.dt = 1.0;
    both.seed = 1;
    both.components = {rts, colored};
    NoiseRecipe only_rts = both;
    only_rts.components = {rts};
    NoiseRecipe only_colored = both;
    only_colored.components = {colored};
    TimeSeries sum = compose(both);
    TimeSeries a = compose(only_rts);
    TimeSeries b = compose(only_colored);
    for (std::size_t i = 0; i < sum.size(); ++i)
        REQUIRE(sum.values[i] == a.values[i] + b.values[i]);
}

TEST_CASE("compose is bit-reproducible for a fixed recipe") {
    NoiseRecipe recipe = preset_fluctuator_bump(2048, 0.5, 42);
    TimeSeries a = compose(recipe);
    TimeSeries b = compose(recipe);
    REQUIRE(a.values == b.values);
}

TEST_CASE("burst windows must stay inside the record") {
    NoiseRecipe recipe;
    recipe.n = 100;
    recipe.dt = 1.0;
    SinusoidComponent s;
    s.frequency = 0.1;
    s.burst = std::make_pair(50.0, 150.0);
    recipe.components = {s};
    CHECK_THROWS_MATCHES(compose(recipe), Error, has_code(errc::bad_recipe));
}

TEST_CASE("pairset sharing a sinusoid has high Fourier coherence at its bin") {
    const std::size_t n = 4096;
    Spectrum probe = welch_psd(oracle::gaussian_series(n, 1.0, 1));
    const double f0 = 48.0 / static_cast<double>(probe.meta.segment_length);
    int hits = 0;
    const int seeds = 20;
    for (int seed = 0; seed < seeds; ++seed) {
        PairSpec spec;
        spec.n = n;
        spec.dt = 1.0;
        spec.seed = 9000 + seed;
        spec.shared = {SinusoidComponent{f0, std::sqrt(2.0), 0.0, std::nullopt}};
        spec.only_a = {WhiteComponent{1.0, std::nullopt}};
        spec.only_b = {WhiteComponent{1.0, std::nullopt}};
        SeriesSet pair = gen_pairset(spec);
        CoherenceSpectrum c = fourier_coherence(pair.entries[0], pair.entries[1]);
        std::size_t bin = 0;
        double best = 1e300;
        for (std::size_t i = 0; i < c.frequencies.size(); ++i)
            if (std::abs(c.frequencies[i] - f0) < best) {
                best = std::abs(c.frequencies[i] - f0);
                bin = i;
            }
        if (c.values[bin] >= 0.8) ++hits;
    }
    REQUIRE(hits >= 18);
}

TEST_CASE("shared components repeat across a pairset, independent ones differ") {
    PairSpec spec;
    spec.n = 256;
    spec.dt = 1.0;
    spec.seed = 11;
    spec.shared = {RtsComponent{0.05, 0.05, 1.0, std::nullopt}};
    SeriesSet pair = gen_pairset(spec);
    REQUIRE(pair.entries[0].values == pair.entries[1].values);

    spec.only_a = {WhiteComponent{1.0, std::nullopt}};
    spec.only_b = {WhiteComponent{1.0, std::nullopt}};
    SeriesSet noisy = gen_pairset(spec);
    REQUIRE(noisy.entries[0].values != noisy.entries[1].values);
}
