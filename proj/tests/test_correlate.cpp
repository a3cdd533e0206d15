#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include "oracles.hpp"
#include "test_util.hpp"
#include "wavan/correlate.hpp"
#include "wavan/synth.hpp"
#include "wavan/vartransform.hpp"

using namespace wavan;

namespace {

WaveletBasis unit_haar() { return {BasisKind::haar, 5.0, Normalization::unit_norm}; }
WaveletBasis unit_morlet() { return {BasisKind::morlet, 5.0, Normalization::unit_norm}; }

}  // namespace

TEST_CASE("smoothing preserves constant matrices") {
    const std::size_t n = 200;
    ScaleGrid grid = log_scale_grid(n, 1.0, 8, 64);
    std::vector<cd> mat(n * grid.size(), cd{2.75, 0.0});
    std::vector<cd> smoothed = smooth_map(mat, n, grid);
    for (const cd& v : smoothed) {
        REQUIRE(std::abs(v.real() - 2.75) <= 1e-12);
        REQUIRE(std::abs(v.imag()) <= 1e-12);
    }
}

TEST_CASE("Gaussian time stage matches the direct convolution oracle") {
    const std::size_t n = 180;
    ScaleGrid grid;
    grid.dt = 1.0;
    grid.k_values = {2, 6, 14};
    Xoshiro256ss rng(5);
    std::vector<cd> mat(n * grid.size());
    for (cd& v : mat) v = cd{rng.gaussian(), rng.gaussian()};
    std::vector<double> re(mat.size()), im(mat.size());
    for (std::size_t i = 0; i < mat.size(); ++i) {
        re[i] = mat[i].real();
        im[i] = mat[i].imag();
    }
    detail::gaussian_time_stage({&re, &im}, n, grid, 1.0);
    std::vector<cd> direct = oracle::gaussian_smooth_direct(mat, n, grid, 1.0);
    for (std::size_t i = 0; i < mat.size(); ++i)
        REQUIRE(std::abs(cd{re[i], im[i]} - direct[i]) <= 1e-9);
}

TEST_CASE("an interior impulse spreads with unit total mass") {
    const std::size_t n = 300;
    ScaleGrid grid;
    grid.dt = 1.0;
    grid.k_values = {8};
    std::vector<double> work(n, 0.0);
    work[n / 2] = 1.0;
    detail::gaussian_time_stage({&work}, n, grid, 1.0);
    double total = 0.0;
    for (double v : work) total += v;
    REQUIRE(total == Catch::Approx(1.0).margin(1e-9));
    // Gaussian shape: monotone decay away from the center
    for (std::size_t step = 1; step < 20; ++step)
        REQUIRE(std::abs(work[n / 2 + step]) <= std::abs(work[n / 2 + step - 1]) + 1e-15);
}

TEST_CASE("smoothing never overshoots the input range") {
    const std::size_t n = 150;
    ScaleGrid grid = log_scale_grid(n, 1.0, 6, 32);
    Xoshiro256ss rng(6);
    std::vector<cd> mat(n * grid.size());
    double lo = 1e300, hi = -1e300;
    for (cd& v : mat) {
        v = cd{rng.uniform01(), 0.0};
        lo = std::min(lo, v.real());
        hi = std::max(hi, v.real());
    }
    std::vector<cd> smoothed = smooth_map(mat, n, grid);
    for (const cd& v : smoothed) {
        REQUIRE(v.real() >= lo - 1e-12);
        REQUIRE(v.real() <= hi + 1e-12);
    }
}

TEST_CASE("wavelet coherence of a series with itself is one inside the COI") {
    TimeSeries x = oracle::gaussian_series(512, 1.0, 90);
    ScaleGrid grid = log_scale_grid(512, 1.0, 10);
    CoherenceMap map = wavelet_coherence(x, x, grid, unit_morlet());
    for (std::size_t s = 0; s < map.grid.size(); ++s)
        for (std::size_t m = 0; m < map.n_samples; ++m) {
            if (!map.coi_ok(m, s)) continue;
            REQUIRE(map.at(m, s) == Catch::Approx(1.0).margin(1e-9));
        }
}

TEST_CASE("wavelet coherence requires the Morlet basis") {
    TimeSeries x = oracle::gaussian_series(128, 1.0, 91);
    ScaleGrid grid = log_scale_grid(128, 1.0, 6);
    CHECK_THROWS_MATCHES(wavelet_coherence(x, x, grid, unit_haar()), Error,
                         has_code(errc::unsupported_basis));
}

TEST_CASE("wavelet coherence is symmetric in its arguments") {
    TimeSeries x = oracle::gaussian_series(256, 1.0, 92);
    TimeSeries y = oracle::gaussian_series(256, 1.0, 93);
    ScaleGrid grid = log_scale_grid(256, 1.0, 8);
    CoherenceMap xy = wavelet_coherence(x, y, grid, unit_morlet());
    CoherenceMap yx = wavelet_coherence(y, x, grid, unit_morlet());
    for (std::size_t i = 0; i < xy.values.size(); ++i) REQUIRE(xy.values[i] == yx.values[i]);
}

TEST_CASE("wavelet coherence of independent noise is low inside the COI") {
    // dense grid so the 0.6 scale boxcar has neighbors to average over
    const std::size_t n = 4096;
    ScaleGrid grid = log_scale_grid(n, 1.0, 80, 1024);
    TimeSeries x = oracle::gaussian_series(n, 1.0, 94);
    TimeSeries y = oracle::gaussian_series(n, 1.0, 95);
    CoherenceMap map = wavelet_coherence(x, y, grid, unit_morlet());
    std::vector<double> inside;
    for (std::size_t s = 0; s < map.grid.size(); ++s)
        for (std::size_t m = 0; m < map.n_samples; ++m)
            if (map.coi_ok(m, s)) inside.push_back(map.at(m, s));
    REQUIRE(oracle::median(inside) <= 0.35);
}

TEST_CASE("coherence and r2 are invariant under affine rescaling") {
    const std::size_t n = 1024;
    ScaleGrid grid = log_scale_grid(n, 1.0, 10);
    TimeSeries x = oracle::gaussian_series(n, 1.0, 96);
    TimeSeries y = oracle::gaussian_series(n, 1.0, 97);
    for (std::size_t i = 0; i < n; ++i) y.values[i] += 0.5 * x.values[i];
    TimeSeries ax = x, by = y;
    for (double& v : ax.values) v = -2.0 * v + 3.0;
    for (double& v : by.values) v = 0.01 * v - 7.0;

    CoherenceMap c1 = wavelet_coherence(x, y, grid, unit_morlet());
    CoherenceMap c2 = wavelet_coherence(ax, by, grid, unit_morlet());
    for (std::size_t i = 0; i < c1.values.size(); ++i)
        REQUIRE(std::abs(c1.values[i] - c2.values[i]) <= 1e-9);

    // r^2 through the correlation-grid path (which demeans internally)
    for (const WaveletBasis& basis : {unit_haar(), unit_morlet()}) {
        SeriesSet raw, scaled;
        raw.entries = {x, y};
        raw.entries[0].label = "x";
        raw.entries[1].label = "y";
        scaled.entries = {ax, by};
        scaled.entries[0].label = "x";
        scaled.entries[1].label = "y";
        CorrelationGrid g1 = correlation_grid(raw, basis, grid);
        CorrelationGrid g2 = correlation_grid(scaled, basis, grid);
        const auto& e1 = g1.pairs[0].correlation.entries;
        const auto& e2 = g2.pairs[0].correlation.entries;
        REQUIRE(e1.size() == e2.size());
        for (std::size_t i = 0; i < e1.size(); ++i)
            REQUIRE(std::abs(e1[i].r2 - e2[i].r2) <= 1e-9);
    }
}

TEST_CASE("scalewise Pearson on identical and negated matrices") {
    TimeSeries x = oracle::gaussian_series(512, 1.0, 98);
    ScaleGrid grid = log_scale_grid(512, 1.0, 10);
    WaveletMatrix wx = cwt(x, unit_haar(), grid);
    ScaleCorrelation self = scalewise_pearson(wx, wx);
    REQUIRE_FALSE(self.entries.empty());
    for (const auto& e : self.entries) {
        REQUIRE(e.r == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(e.r2 == Catch::Approx(1.0).margin(1e-12));
    }
    WaveletMatrix neg = wx;
    for (cd& v : neg.coeff) v = -v;
    ScaleCorrelation anti = scalewise_pearson(wx, neg);
    for (const auto& e : anti.entries) {
        REQUIRE(e.r == Catch::Approx(-1.0).margin(1e-12));
        REQUIRE(e.r2 == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("scalewise Pearson of independent noise is small") {
    const std::size_t n = 4096;
    ScaleGrid grid = log_scale_grid(n, 1.0, 16);
    WaveletMatrix wx = cwt(oracle::gaussian_series(n, 1.0, 99), unit_haar(), grid);
    WaveletMatrix wy = cwt(oracle::gaussian_series(n, 1.0, 100), unit_haar(), grid);
    ScaleCorrelation corr = scalewise_pearson(wx, wy);
    double mean_r2 = 0.0;
    for (const auto& e : corr.entries) mean_r2 += e.r2;
    mean_r2 /= static_cast<double>(corr.entries.size());
    REQUIRE(mean_r2 <= 0.1);
}

TEST_CASE("scalewise Pearson rejects mismatched matrices and omits degenerate scales") {
    TimeSeries x = oracle::gaussian_series(256, 1.0, 101);
    ScaleGrid g1 = log_scale_grid(256, 1.0, 8);
    ScaleGrid g2 = log_scale_grid(256, 1.0, 12);
    CHECK_THROWS_MATCHES(scalewise_pearson(cwt(x, unit_haar(), g1), cwt(x, unit_haar(), g2)), Error,
                         has_code(errc::grid_mismatch));
    CHECK_THROWS_MATCHES(scalewise_pearson(cwt(x, unit_haar(), g1), cwt(x, unit_morlet(), g1)), Error,
                         has_code(errc::grid_mismatch));

    // zero-variance columns (demeaned constant -> the zero series -> Haar
    // coefficients exactly zero)
    TimeSeries c;
    c.dt = 1.0;
    c.values.assign(256, 5.0);
    WaveletMatrix wc = cwt(demean(c), unit_haar(), g1);
    WaveletMatrix wx = cwt(x, unit_haar(), g1);
    ScaleCorrelation corr = scalewise_pearson(wc, wx);
    REQUIRE(corr.entries.empty());
    REQUIRE(corr.omitted_scales.size() == g1.size());
}

TEST_CASE("correlation grid covers all unordered pairs") {
    SeriesSet set;
    TimeSeries x = oracle::gaussian_series(256, 1.0, 102);
    x.label = "x";
    SeriesSet tmp;
    set.entries = {x, x, x};
    set.entries[1].label = "y";
    set.entries[2].label = "z";
    ScaleGrid grid = log_scale_grid(256, 1.0, 6);
    CorrelationGrid grid_result = correlation_grid(set, unit_haar(), grid);
    REQUIRE(grid_result.pairs.size() == 3);
    for (const auto& pair : grid_result.pairs)
        for (const auto& e : pair.correlation.entries) REQUIRE(e.r2 == Catch::Approx(1.0).margin(1e-9));

    SeriesSet tiny;
    tiny.entries = {x};
    CHECK_THROWS_MATCHES(correlation_grid(tiny, unit_haar(), grid), Error,
                         has_code(errc::too_few_series));
}

TEST_CASE("three independent series stay uncorrelated in the grid") {
    const std::size_t n = 4096;
    SeriesSet set;
    for (int i = 0; i < 3; ++i) {
        TimeSeries s = oracle::gaussian_series(n, 1.0, 110 + i);
        s.label = "s" + std::to_string(i);
        set.entries.push_back(s);
    }
    ScaleGrid grid = log_scale_grid(n, 1.0, 12);
    CorrelationGrid grid_result = correlation_grid(set, unit_haar(), grid);
    for (const auto& pair : grid_result.pairs) {
        double mean_r2 = 0.0;
        for (const auto& e : pair.correlation.entries) mean_r2 += e.r2;
        mean_r2 /= static_cast<double>(pair.correlation.entries.size());
        REQUIRE(mean_r2 <= 0.1);
    }
}

TEST_CASE("a pair sharing an RTS stands out in the grid") {
    const std::size_t n = 4096;
    const double rate = 1.0 / 64.0;  // dwell 64 samples
    const std::uint64_t shared_seed = 777;
    SeriesSet set;
    for (int i = 0; i < 8; ++i) {
        NoiseRecipe recipe;
        recipe.n = n;
        recipe.dt = 1.0;
        recipe.seed = 120 + i;
        recipe.label = "ch" + std::to_string(i);
        recipe.components.push_back(WhiteComponent{1.0, std::nullopt});
        if (i == 2 || i == 5)
            recipe.components.push_back(RtsComponent{rate, rate, 2.0, shared_seed});
        set.entries.push_back(compose(recipe));
    }
    // 80% cutoff keeps the tiny-sample giant scales out of the comparison
    ScaleGrid grid = scale_cutoff(n, log_scale_grid(n, 1.0, 16), unit_haar());
    CorrelationGrid grid_result = correlation_grid(set, unit_haar(), grid);
    // the coupled pair's r^2 at the RTS scale dwarfs every unrelated pair's
    // r^2 at that same scale
    double coupled_peak = 0.0;
    int peak_k = 0;
    for (const auto& pair : grid_result.pairs) {
        if (!(pair.a == 2 && pair.b == 5)) continue;
        for (const auto& e : pair.correlation.entries)
            if (e.r2 > coupled_peak) {
                coupled_peak = e.r2;
                peak_k = e.k;
            }
    }
    double best_unrelated = 0.0;
    for (const auto& pair : grid_result.pairs) {
        if (pair.a == 2 && pair.b == 5) continue;
        for (const auto& e : pair.correlation.entries)
            if (e.k == peak_k) best_unrelated = std::max(best_unrelated, e.r2);
    }
    REQUIRE(coupled_peak >= 3.0 * best_unrelated);
}
