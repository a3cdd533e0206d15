#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <vector>

#include "oracles.hpp"
#include "wavan/fft.hpp"
#include "wavan/rng.hpp"

using wavan::fft::cd;

namespace {

std::vector<cd> random_complex(std::size_t n, std::uint64_t seed) {
    wavan::Xoshiro256ss rng(seed);
    std::vector<cd> v(n);
    for (auto& x : v) x = cd{rng.gaussian(), rng.gaussian()};
    return v;
}

double max_err(const std::vector<cd>& a, const std::vector<cd>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

TEST_CASE("power-of-two DFT matches the naive transform") {
    for (std::size_t n : {2u, 8u, 64u, 256u}) {
        std::vector<cd> x = random_complex(n, 100 + n);
        auto fast = wavan::fft::dft(x);
        auto slow = oracle::naive_dft(x);
        REQUIRE(max_err(fast, slow) < 1e-9 * oracle::max_abs(slow));
    }
}

TEST_CASE("arbitrary-length DFT (Bluestein) matches the naive transform") {
    for (std::size_t n : {3u, 5u, 7u, 12u, 31u, 97u, 100u, 144u}) {
        std::vector<cd> x = random_complex(n, 200 + n);
        auto fast = wavan::fft::dft(x);
        auto slow = oracle::naive_dft(x);
        REQUIRE(max_err(fast, slow) < 1e-9 * std::max(oracle::max_abs(slow), 1.0));
    }
}

TEST_CASE("inverse transform round-trips") {
    for (std::size_t n : {16u, 33u, 100u}) {
        std::vector<cd> x = random_complex(n, 300 + n);
        auto back = wavan::fft::dft(wavan::fft::dft(x), true);
        REQUIRE(max_err(back, x) < 1e-10);
    }
}

TEST_CASE("sliding correlation helper matches direct summation") {
    const std::size_t n = 70;
    const long lo = -9, hi = 12;
    std::vector<cd> x = random_complex(n, 7);
    std::vector<cd> kernel = random_complex(static_cast<std::size_t>(hi - lo + 1), 8);

    std::size_t m = wavan::fft::next_pow2(n + kernel.size());
    auto xspec = wavan::fft::padded_spectrum(x, m);
    auto fast = wavan::fft::correlate_with_spectrum(xspec, n, kernel, lo, hi);

    for (long t = 0; t < static_cast<long>(n); ++t) {
        cd direct{0.0, 0.0};
        for (long j = lo; j <= hi; ++j) {
            long idx = t + j;
            if (idx < 0 || idx >= static_cast<long>(n)) continue;
            direct += x[static_cast<std::size_t>(idx)] * kernel[static_cast<std::size_t>(j - lo)];
        }
        REQUIRE(std::abs(fast[static_cast<std::size_t>(t)] - direct) < 1e-10);
    }
}
