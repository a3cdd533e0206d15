#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wavan/common.hpp"
#include "wavan/fft.hpp"
#include "wavan/rng.hpp"
#include "wavan/timeseries.hpp"

namespace wavan {

// ---------------------------------------------------------------------------
// Generators

// Two-state {0, amplitude} Markov chain sampled at dt. Dwell times are
// exponential; the per-step switching probability is 1 - exp(-rate dt). The
// chain starts in the low state. One uniform draw is consumed per step, so
// the realization is a pure function of the seed.
inline TimeSeries gen_rts(std::size_t n, double dt, double rate_up, double rate_down,
                          double amplitude, std::uint64_t seed) {
    if (n < 2) fail(errc::invalid_series, "need at least 2 samples");
    if (!(dt > 0.0)) fail(errc::invalid_series, "dt must be positive");
    if (rate_up < 0.0 || rate_down < 0.0) fail(errc::bad_recipe, "switching rates must be >= 0");
    if (rate_up * dt >= 1.0 || rate_down * dt >= 1.0)
        fail(errc::rate_too_high, "rate*dt must be < 1 for a valid per-step switching probability");
    const double p_up = 1.0 - std::exp(-rate_up * dt);
    const double p_down = 1.0 - std::exp(-rate_down * dt);
    Xoshiro256ss rng(seed);
    TimeSeries out;
    out.label = "rts";
    out.dt = dt;
    out.values.resize(n);
    bool high = false;
    out.values[0] = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        double u = rng.uniform01();
        if (high) {
            if (u < p_down) high = false;
        } else {
            if (u < p_up) high = true;
        }
        out.values[i] = high ? amplitude : 0.0;
    }
    return out;
}

// 1/f^beta noise by spectral synthesis: unit Gaussian spectrum shaped by
// f^(-beta/2), zero-frequency bin zeroed, Hermitian-symmetrized, inverse
// transformed, then rescaled so the sample standard deviation equals `level`.
inline TimeSeries gen_colored(std::size_t n, double dt, double beta, double level,
                              std::uint64_t seed) {
    if (n < 2) fail(errc::invalid_series, "need at least 2 samples");
    if (!(dt > 0.0)) fail(errc::invalid_series, "dt must be positive");
    if (beta < 0.0 || beta > 2.0) fail(errc::bad_recipe, "beta must lie in [0, 2]");
    if (level < 0.0) fail(errc::bad_recipe, "level must be >= 0");
    Xoshiro256ss rng(seed);
    std::vector<std::complex<double>> spec(n, {0.0, 0.0});
    const std::size_t half = n / 2;
    for (std::size_t r = 1; r <= half; ++r) {
        double shape = std::pow(static_cast<double>(r), -0.5 * beta);
        bool nyquist = (n % 2 == 0) && (r == half);
        double re = rng.gaussian();
        double im = nyquist ? 0.0 : rng.gaussian();
        spec[r] = std::complex<double>(re, im) * shape;
        if (!nyquist) spec[n - r] = std::conj(spec[r]);
    }
    std::vector<std::complex<double>> samples = fft::dft(spec, true);
    TimeSeries out;
    out.label = "colored";
    out.dt = dt;
    out.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.values[i] = samples[i].real();
    double sd = sample_std(out.values);
    double scale = sd > 0.0 ? level / sd : 0.0;
    for (double& v : out.values) v *= scale;
    return out;
}

inline TimeSeries gen_white(std::size_t n, double dt, double sigma, std::uint64_t seed) {
    if (n < 2) fail(errc::invalid_series, "need at least 2 samples");
    if (sigma < 0.0) fail(errc::bad_recipe, "sigma must be >= 0");
    Xoshiro256ss rng(seed);
    TimeSeries out;
    out.label = "white";
    out.dt = dt;
    out.values.resize(n);
    for (double& v : out.values) v = sigma * rng.gaussian();
    return out;
}

// ---------------------------------------------------------------------------
// Recipes

struct RtsComponent {
    double rate_up = 0.0, rate_down = 0.0, amplitude = 1.0;
    std::optional<std::uint64_t> seed;
};

struct ColoredComponent {
    double beta = 1.0, level = 1.0;
    std::optional<std::uint64_t> seed;
};

struct SinusoidComponent {
    double frequency = 0.0, amplitude = 1.0, phase = 0.0;
    std::optional<std::pair<double, double>> burst;  // [start, end] seconds; zero outside
};

struct DriftComponent {
    double slope = 0.0;  // per second
};

struct WhiteComponent {
    double sigma = 1.0;
    std::optional<std::uint64_t> seed;
};

using NoiseComponent =
    std::variant<RtsComponent, ColoredComponent, SinusoidComponent, DriftComponent, WhiteComponent>;

// A seeded description of one synthetic series. Stochastic components draw
// from independent streams: an explicit per-component seed if given,
// otherwise one derived from the recipe seed and the component index (so a
// component moved to its own recipe with its derived seed reproduces its
// contribution exactly).
struct NoiseRecipe {
    std::vector<NoiseComponent> components;
    std::size_t n = 0;
    double dt = 1.0;
    std::uint64_t seed = 0;
    std::string label;
    std::string units;
};

namespace detail {

inline std::uint64_t component_seed(const NoiseRecipe& recipe, std::size_t index,
                                    const std::optional<std::uint64_t>& explicit_seed) {
    return explicit_seed ? *explicit_seed : mix_seed(recipe.seed, index);
}

}  // namespace detail

// Sum of the recipe's components on the shared (n, dt) grid.
inline TimeSeries compose(const NoiseRecipe& recipe) {
    if (recipe.n < 2) fail(errc::bad_recipe, "recipe needs n >= 2");
    if (!(recipe.dt > 0.0)) fail(errc::bad_recipe, "recipe needs dt > 0");
    TimeSeries out;
    out.label = recipe.label.empty() ? "synthetic" : recipe.label;
    out.units = recipe.units;
    out.dt = recipe.dt;
    out.values.assign(recipe.n, 0.0);
    const double record_end = static_cast<double>(recipe.n - 1) * recipe.dt;

    for (std::size_t idx = 0; idx < recipe.components.size(); ++idx) {
        const NoiseComponent& comp = recipe.components[idx];
        if (const auto* rts = std::get_if<RtsComponent>(&comp)) {
            TimeSeries part = gen_rts(recipe.n, recipe.dt, rts->rate_up, rts->rate_down,
                                      rts->amplitude, detail::component_seed(recipe, idx, rts->seed));
            for (std::size_t i = 0; i < recipe.n; ++i) out.values[i] += part.values[i];
        } else if (const auto* col = std::get_if<ColoredComponent>(&comp)) {
            TimeSeries part = gen_colored(recipe.n, recipe.dt, col->beta, col->level,
                                          detail::component_seed(recipe, idx, col->seed));
            for (std::size_t i = 0; i < recipe.n; ++i) out.values[i] += part.values[i];
        } else if (const auto* sin_c = std::get_if<SinusoidComponent>(&comp)) {
            double start = 0.0, end = record_end;
            if (sin_c->burst) {
                start = sin_c->burst->first;
                end = sin_c->burst->second;
                if (start < 0.0 || end > record_end || !(start < end))
                    fail(errc::bad_recipe, "burst window must lie inside the record");
            }
            for (std::size_t i = 0; i < recipe.n; ++i) {
                double t = static_cast<double>(i) * recipe.dt;
                if (t < start || t > end) continue;
                out.values[i] += sin_c->amplitude * std::sin(2.0 * pi * sin_c->frequency * t + sin_c->phase);
            }
        } else if (const auto* drift = std::get_if<DriftComponent>(&comp)) {
            for (std::size_t i = 0; i < recipe.n; ++i)
                out.values[i] += drift->slope * static_cast<double>(i) * recipe.dt;
        } else if (const auto* white = std::get_if<WhiteComponent>(&comp)) {
            TimeSeries part = gen_white(recipe.n, recipe.dt, white->sigma,
                                        detail::component_seed(recipe, idx, white->seed));
            for (std::size_t i = 0; i < recipe.n; ++i) out.values[i] += part.values[i];
        }
    }
    return out;
}

// Two series that share the realization of the `shared` components (same
// seeds in both) plus independent extra noise, giving a known
// cross-correlation at a known scale or time window.
struct PairSpec {
    std::vector<NoiseComponent> shared;
    std::vector<NoiseComponent> only_a;
    std::vector<NoiseComponent> only_b;
    std::size_t n = 0;
    double dt = 1.0;
    std::uint64_t seed = 0;
    std::string label_a = "a";
    std::string label_b = "b";
};

inline SeriesSet gen_pairset(const PairSpec& spec) {
    if (spec.n < 2) fail(errc::bad_recipe, "pairset needs n >= 2");
    if (!(spec.dt > 0.0)) fail(errc::bad_recipe, "pairset needs dt > 0");
    auto with_seed = [](NoiseComponent comp, std::uint64_t seed) {
        if (auto* rts = std::get_if<RtsComponent>(&comp)) rts->seed = seed;
        if (auto* col = std::get_if<ColoredComponent>(&comp)) col->seed = seed;
        if (auto* white = std::get_if<WhiteComponent>(&comp)) white->seed = seed;
        return comp;
    };
    NoiseRecipe a, b;
    a.n = b.n = spec.n;
    a.dt = b.dt = spec.dt;
    a.seed = mix_seed(spec.seed, 1);
    b.seed = mix_seed(spec.seed, 2);
    a.label = spec.label_a;
    b.label = spec.label_b;
    for (std::size_t i = 0; i < spec.shared.size(); ++i) {
        std::uint64_t s = mix_seed(spec.seed, 0x5000 + i);
        a.components.push_back(with_seed(spec.shared[i], s));
        b.components.push_back(with_seed(spec.shared[i], s));
    }
    for (std::size_t i = 0; i < spec.only_a.size(); ++i)
        a.components.push_back(with_seed(spec.only_a[i], mix_seed(spec.seed, 0xA000 + i)));
    for (std::size_t i = 0; i < spec.only_b.size(); ++i)
        b.components.push_back(with_seed(spec.only_b[i], mix_seed(spec.seed, 0xB000 + i)));
    SeriesSet out;
    out.entries.push_back(compose(a));
    out.entries.push_back(compose(b));
    return out;
}

// ---------------------------------------------------------------------------
// Presets

// 1/f background with one dominant fluctuator and a white floor; the
// wavelet spectrum of this mix shows a bump at the fluctuator scale over a
// power-law decline.
inline NoiseRecipe preset_fluctuator_bump(std::size_t n, double dt, std::uint64_t seed) {
    NoiseRecipe r;
    r.n = n;
    r.dt = dt;
    r.seed = seed;
    r.label = "fluctuator_bump";
    double rate = 0.01 / dt / 2.0;  // dominant fluctuator, dwell ~ 200 steps
    r.components.push_back(ColoredComponent{1.0, 1.0, std::nullopt});
    r.components.push_back(RtsComponent{rate, rate, 2.5, std::nullopt});
    r.components.push_back(WhiteComponent{0.3, std::nullopt});
    return r;
}

// Eight channels of mixed noise: every channel has a 1/f background and a
// white floor; channels 2 and 5 share a telegraph source, channels 1 and 6
// share a slow sinusoid.
inline std::vector<NoiseRecipe> preset_telemetry8(std::size_t n, double dt, std::uint64_t seed) {
    std::vector<NoiseRecipe> recipes(8);
    const double rts_rate = 1.0 / (64.0 * dt);  // mean dwell 64 steps
    const double sin_freq = 1.0 / (256.0 * dt);
    const std::uint64_t shared_rts_seed = mix_seed(seed, 0x515);
    for (std::size_t c = 0; c < 8; ++c) {
        NoiseRecipe& r = recipes[c];
        r.n = n;
        r.dt = dt;
        r.seed = mix_seed(seed, 0x100 + c);
        r.label = "ch" + std::to_string(c);
        r.components.push_back(ColoredComponent{1.0, 0.5, std::nullopt});
        r.components.push_back(WhiteComponent{0.5, std::nullopt});
        if (c == 2 || c == 5)
            r.components.push_back(RtsComponent{rts_rate, rts_rate, 2.0, shared_rts_seed});
        if (c == 1 || c == 6)
            r.components.push_back(SinusoidComponent{sin_freq, 1.5, 0.0, std::nullopt});
    }
    return recipes;
}

}  // namespace wavan
