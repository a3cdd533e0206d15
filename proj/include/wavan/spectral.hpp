#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include "wavan/common.hpp"
#include "wavan/fft.hpp"
#include "wavan/timeseries.hpp"

namespace wavan {

enum class WindowKind { hann, rect };

inline const char* window_name(WindowKind w) { return w == WindowKind::hann ? "hann" : "rect"; }

struct WelchParams {
    int segments = 8;
    double overlap = 0.5;  // fraction of segment length
    WindowKind window = WindowKind::hann;
};

struct SpectrumMeta {
    std::string estimator;  // "periodogram" or "welch"
    std::size_t segment_length = 0;
    int segments = 1;
    double overlap = 0.0;
    WindowKind window = WindowKind::rect;
    double dt = 1.0;
};

// One-sided spectral density over (0, 1/(2 dt)], units input^2/Hz. The
// integral of `values` over frequency equals the signal variance (exactly,
// for the rectangular-window periodogram).
struct Spectrum {
    std::vector<double> frequencies;
    std::vector<double> values;
    SpectrumMeta meta;
};

struct CrossSpectrum {
    std::vector<double> frequencies;
    std::vector<std::complex<double>> values;
    SpectrumMeta meta;
};

// Coherence in [0, 1] per frequency bin. Bins where either auto-spectrum is
// zero carry defined = false.
struct CoherenceSpectrum {
    std::vector<double> frequencies;
    std::vector<double> values;
    std::vector<bool> defined;
};

namespace detail {

struct Segmentation {
    std::size_t length = 0;
    std::vector<std::size_t> positions;
};

inline Segmentation plan_segments(std::size_t n, const WelchParams& p) {
    if (p.segments < 1) fail(errc::invalid_config, "segment count must be >= 1");
    if (p.overlap < 0.0 || p.overlap >= 1.0)
        fail(errc::invalid_config, "overlap fraction must lie in [0, 1)");
    double denom = 1.0 + (p.segments - 1) * (1.0 - p.overlap);
    std::size_t length = static_cast<std::size_t>(std::floor(static_cast<double>(n) / denom));
    Segmentation seg;
    seg.length = length;
    if (p.segments == 1 || length == 0) {
        seg.positions = {0};
        return seg;
    }
    double step = static_cast<double>(n - length) / static_cast<double>(p.segments - 1);
    for (int i = 0; i < p.segments; ++i) {
        auto pos = static_cast<std::size_t>(std::llround(step * i));
        seg.positions.push_back(std::min(pos, n - length));
    }
    return seg;
}

inline std::vector<double> make_window(WindowKind kind, std::size_t length) {
    std::vector<double> w(length, 1.0);
    if (kind == WindowKind::hann) {
        for (std::size_t i = 0; i < length; ++i)
            w[i] = 0.5 * (1.0 - std::cos(2.0 * pi * static_cast<double>(i) / static_cast<double>(length)));
    }
    return w;
}

struct WelchTriple {
    std::vector<double> frequencies;
    std::vector<std::complex<double>> cross;  // S_xy
    std::vector<double> auto_x;               // S_xx
    std::vector<double> auto_y;               // S_yy
    SpectrumMeta meta;
};

// Welch core: per segment, demean, window, DFT, accumulate X conj(Y) plus
// both auto products; density scaling dt / sum(w^2) with one-sided doubling
// (Nyquist bin not doubled). DC is excluded: segments are demeaned, so bin 0
// carries only rounding residue.
inline WelchTriple welch_triple_impl(const TimeSeries& x, const TimeSeries& y,
                                     const Segmentation& seg, WindowKind window,
                                     const WelchParams& params, const char* estimator) {
    const std::size_t length = seg.length;
    const double dt = x.dt;
    const std::vector<double> w = make_window(window, length);
    double w2_sum = 0.0;
    for (double v : w) w2_sum += v * v;

    const bool same_input = (&x == &y) || (x.values.data() == y.values.data());
    const std::size_t n_bins = length / 2;  // bins 1..floor(L/2)
    std::vector<std::complex<double>> accum_xy(n_bins, {0.0, 0.0});
    std::vector<double> accum_xx(n_bins, 0.0), accum_yy(n_bins, 0.0);
    std::vector<std::complex<double>> bx(length), by(length);
    for (std::size_t pos : seg.positions) {
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < length; ++i) {
            mx += x.values[pos + i];
            if (!same_input) my += y.values[pos + i];
        }
        mx /= static_cast<double>(length);
        my = same_input ? mx : my / static_cast<double>(length);
        for (std::size_t i = 0; i < length; ++i)
            bx[i] = {(x.values[pos + i] - mx) * w[i], 0.0};
        std::vector<std::complex<double>> fx = fft::dft(bx);
        std::vector<std::complex<double>> fy;
        if (!same_input) {
            for (std::size_t i = 0; i < length; ++i)
                by[i] = {(y.values[pos + i] - my) * w[i], 0.0};
            fy = fft::dft(by);
        }
        const std::vector<std::complex<double>>& fyr = same_input ? fx : fy;
        for (std::size_t r = 1; r <= n_bins; ++r) {
            accum_xy[r - 1] += fx[r] * std::conj(fyr[r]);
            accum_xx[r - 1] += std::norm(fx[r]);
            accum_yy[r - 1] += std::norm(fyr[r]);
        }
    }

    const double base_scale = dt / (w2_sum * static_cast<double>(seg.positions.size()));
    WelchTriple out;
    out.frequencies.resize(n_bins);
    out.cross.resize(n_bins);
    out.auto_x.resize(n_bins);
    out.auto_y.resize(n_bins);
    for (std::size_t r = 1; r <= n_bins; ++r) {
        out.frequencies[r - 1] = static_cast<double>(r) / (static_cast<double>(length) * dt);
        bool nyquist = (length % 2 == 0) && (r == n_bins);
        double scale = nyquist ? base_scale : 2.0 * base_scale;
        out.cross[r - 1] = accum_xy[r - 1] * scale;
        out.auto_x[r - 1] = accum_xx[r - 1] * scale;
        out.auto_y[r - 1] = accum_yy[r - 1] * scale;
    }
    out.meta.estimator = estimator;
    out.meta.segment_length = length;
    out.meta.segments = static_cast<int>(seg.positions.size());
    out.meta.overlap = params.overlap;
    out.meta.window = window;
    out.meta.dt = dt;
    return out;
}

inline void check_pair(const TimeSeries& x, const TimeSeries& y) {
    if (x.size() != y.size())
        fail(errc::length_mismatch, "series lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (!nearly_equal(x.dt, y.dt, 1e-12))
        fail(errc::dt_mismatch, "series time steps differ: " + format_g17(x.dt) + " vs " + format_g17(y.dt));
}

inline Segmentation checked_segments(std::size_t n, const WelchParams& params) {
    Segmentation seg = plan_segments(n, params);
    if (seg.length < 8)
        fail(errc::segment_too_short, "segments of " + std::to_string(seg.length) +
                                          " samples are too short; need at least 8");
    return seg;
}

}  // namespace detail

// Rectangular-window density periodogram of the demeaned series. Integrated
// power equals the variance exactly (Parseval).
inline Spectrum periodogram(const TimeSeries& x) {
    validate_series(x);
    detail::Segmentation seg{x.size(), {0}};
    WelchParams p;
    p.segments = 1;
    p.overlap = 0.0;
    p.window = WindowKind::rect;
    detail::WelchTriple t = detail::welch_triple_impl(x, x, seg, WindowKind::rect, p, "periodogram");
    Spectrum out;
    out.frequencies = std::move(t.frequencies);
    out.values = std::move(t.auto_x);
    out.meta = std::move(t.meta);
    return out;
}

// Welch cross-spectral density with identical segmentation for both inputs.
inline CrossSpectrum cross_psd(const TimeSeries& x, const TimeSeries& y, const WelchParams& params = {}) {
    validate_series(x);
    validate_series(y);
    detail::check_pair(x, y);
    detail::Segmentation seg = detail::checked_segments(x.size(), params);
    detail::WelchTriple t = detail::welch_triple_impl(x, y, seg, params.window, params, "welch");
    CrossSpectrum out;
    out.frequencies = std::move(t.frequencies);
    out.values = std::move(t.cross);
    out.meta = std::move(t.meta);
    return out;
}

// Welch-averaged PSD: mean of windowed, per-segment-demeaned, overlapping
// segment periodograms with window power compensation.
inline Spectrum welch_psd(const TimeSeries& x, const WelchParams& params = {}) {
    validate_series(x);
    detail::Segmentation seg = detail::checked_segments(x.size(), params);
    detail::WelchTriple t = detail::welch_triple_impl(x, x, seg, params.window, params, "welch");
    Spectrum out;
    out.frequencies = std::move(t.frequencies);
    out.values = std::move(t.auto_x);
    out.meta = std::move(t.meta);
    return out;
}

// |S_xy|^2 / (S_xx S_yy) per bin, clamped to [0, 1]. Requires at least two
// Welch segments; the single-segment estimator is identically 1.
inline CoherenceSpectrum fourier_coherence(const TimeSeries& x, const TimeSeries& y,
                                           const WelchParams& params = {}) {
    if (params.segments < 2)
        fail(errc::single_segment, "coherence needs >= 2 Welch segments (single-segment coherence is identically 1)");
    validate_series(x);
    validate_series(y);
    detail::check_pair(x, y);
    detail::Segmentation seg = detail::checked_segments(x.size(), params);
    detail::WelchTriple t = detail::welch_triple_impl(x, y, seg, params.window, params, "welch");

    CoherenceSpectrum out;
    out.frequencies = std::move(t.frequencies);
    out.values.resize(t.cross.size(), 0.0);
    out.defined.resize(t.cross.size(), true);
    for (std::size_t i = 0; i < t.cross.size(); ++i) {
        double denom = t.auto_x[i] * t.auto_y[i];
        if (!(denom > 0.0)) {
            out.defined[i] = false;
            continue;
        }
        out.values[i] = std::clamp(std::norm(t.cross[i]) / denom, 0.0, 1.0);
    }
    return out;
}

}  // namespace wavan
