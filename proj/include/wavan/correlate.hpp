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
#include "wavan/wavelet.hpp"

namespace wavan {

// Smoothing rule for wavelet coherence: a Gaussian along time whose width
// parameter tau equals tau_per_lambda * lambda at each scale, then a boxcar
// across scales spanning `scale_boxcar` in relative width (window
// [k/(1+w/2), k*(1+w/2)]).
struct SmoothingSpec {
    double tau_per_lambda = 1.0;
    double scale_boxcar = 0.6;
};

namespace detail {

// Gaussian stage, applied in place to several column-major real planes at
// once so the per-scale kernel spectra are built once. Kernels are
// renormalized over the in-range mass near the record edges, so constants
// pass through unchanged. Real planes keep exact sign symmetry: smoothing -v
// gives exactly -smooth(v), which makes coherence exactly symmetric in its
// arguments.
inline void gaussian_time_stage(std::vector<std::vector<double>*> planes, std::size_t n,
                                const ScaleGrid& grid, double tau_per_lambda) {
    parallel_for(grid.size(), [&](std::size_t s) {
        const double sigma = tau_per_lambda * static_cast<double>(grid.k_values[s]);
        const long h = static_cast<long>(std::ceil(4.0 * sigma));
        const std::size_t klen = static_cast<std::size_t>(2 * h + 1);
        std::vector<cd> weights(klen);
        double total = 0.0;
        for (long j = -h; j <= h; ++j) {
            double w = std::exp(-0.5 * static_cast<double>(j) * static_cast<double>(j) / (sigma * sigma));
            weights[static_cast<std::size_t>(j + h)] = cd{w, 0.0};
            total += w;
        }
        for (cd& w : weights) w /= total;
        // in-range kernel mass per output position, for edge renormalization
        std::vector<double> prefix(klen + 1, 0.0);
        for (std::size_t i = 0; i < klen; ++i) prefix[i + 1] = prefix[i] + weights[i].real();
        auto mass_at = [&](std::size_t t) {
            long jlo = std::max(-h, -static_cast<long>(t));
            long jhi = std::min(h, static_cast<long>(n - 1 - t));
            return prefix[static_cast<std::size_t>(jhi + h + 1)] - prefix[static_cast<std::size_t>(jlo + h)];
        };
        const std::size_t m = fft::next_pow2(n + klen);
        std::vector<cd> kspec = fft::kernel_spectrum(weights, -h, h, m);
        std::vector<cd> column(n);
        for (std::vector<double>* plane : planes) {
            double* col = plane->data() + s * n;
            for (std::size_t t = 0; t < n; ++t) column[t] = cd{col[t], 0.0};
            std::vector<cd> xspec = fft::padded_spectrum(column, m);
            std::vector<cd> smoothed = fft::correlate_spectra(xspec, kspec, n);
            for (std::size_t t = 0; t < n; ++t) col[t] = smoothed[t].real() / mass_at(t);
        }
    });
}

// Boxcar stage across scales: per translation, uniform average over the
// widths within [k/f, k*f], f = 1 + width/2, clipped to the grid.
inline std::vector<double> boxcar_scale_stage(const std::vector<double>& mat, std::size_t n,
                                              const ScaleGrid& grid, double width) {
    const double f = 1.0 + 0.5 * width;
    const std::size_t n_scales = grid.size();
    std::vector<double> out(mat.size());
    for (std::size_t s = 0; s < n_scales; ++s) {
        const double k = static_cast<double>(grid.k_values[s]);
        std::size_t s_lo = s, s_hi = s;
        while (s_lo > 0 && static_cast<double>(grid.k_values[s_lo - 1]) >= k / f) --s_lo;
        while (s_hi + 1 < n_scales && static_cast<double>(grid.k_values[s_hi + 1]) <= k * f) ++s_hi;
        const double inv_count = 1.0 / static_cast<double>(s_hi - s_lo + 1);
        double* dst = out.data() + s * n;
        for (std::size_t t = 0; t < n; ++t) {
            double sum = 0.0;
            for (std::size_t q = s_lo; q <= s_hi; ++q) sum += mat[q * n + t];
            dst[t] = sum * inv_count;
        }
    }
    return out;
}

inline void smooth_planes(std::vector<std::vector<double>*> planes, std::size_t n,
                          const ScaleGrid& grid, const SmoothingSpec& spec) {
    gaussian_time_stage(planes, n, grid, spec.tau_per_lambda);
    for (std::vector<double>* plane : planes)
        *plane = boxcar_scale_stage(*plane, n, grid, spec.scale_boxcar);
}

}  // namespace detail

// Smoothing operator s(.) of the wavelet-coherence estimator: Gaussian along
// time (tau = lambda) then boxcar across scales. `values` is column-major
// n x |grid|; real and imaginary parts are smoothed as separate planes.
inline std::vector<cd> smooth_map(const std::vector<cd>& values, std::size_t n,
                                  const ScaleGrid& grid, SmoothingSpec spec = {}) {
    if (values.size() != n * grid.size())
        fail(errc::grid_mismatch, "matrix dimensions do not match the scale grid");
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        re[i] = values[i].real();
        im[i] = values[i].imag();
    }
    detail::smooth_planes({&re, &im}, n, grid, spec);
    std::vector<cd> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = cd{re[i], im[i]};
    return out;
}

// Smoothed wavelet coherence map: values in [0, 1] over translations x
// scales, with the COI of both inputs (identical, since they share basis and
// grid).
struct CoherenceMap {
    std::size_t n_samples = 0;
    ScaleGrid grid;
    WaveletBasis basis;
    SmoothingSpec smoothing;
    std::string label_x, label_y;
    double dt = 1.0;
    std::vector<int> coi_radii;
    std::vector<double> values;  // column-major [s * n_samples + m]

    double at(std::size_t m, std::size_t s) const { return values[s * n_samples + m]; }
    bool coi_ok(std::size_t m, std::size_t s) const {
        std::size_t r = static_cast<std::size_t>(coi_radii[s]);
        return m >= r && m + r <= n_samples - 1;
    }
};

// |s(Wx conj(Wy))|^2 / (s(|Wx|^2) s(|Wy|^2)), the squared-magnitude
// convention: identical inputs give exactly 1. Morlet basis only; the Haar
// wavelet has no established smoothing rule. Inputs are demeaned before the
// transform so static offsets cannot leak in through the record boundaries.
inline CoherenceMap wavelet_coherence(const TimeSeries& x, const TimeSeries& y,
                                      const ScaleGrid& grid, const WaveletBasis& basis,
                                      SmoothingSpec spec = {}) {
    if (basis.kind != BasisKind::morlet)
        fail(errc::unsupported_basis, "wavelet coherence requires the Morlet basis");
    if (x.size() != y.size())
        fail(errc::length_mismatch, "series lengths differ: " + std::to_string(x.size()) + " vs " + std::to_string(y.size()));
    if (!nearly_equal(x.dt, y.dt, 1e-12))
        fail(errc::dt_mismatch, "series time steps differ");

    WaveletMatrix wx = cwt(demean(x), basis, grid);
    WaveletMatrix wy = cwt(demean(y), basis, grid);
    const std::size_t n = x.size();
    const std::size_t cells = n * grid.size();
    std::vector<double> cross_re(cells), cross_im(cells), auto_x(cells), auto_y(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        cd p = wx.coeff[i] * std::conj(wy.coeff[i]);
        cross_re[i] = p.real();
        cross_im[i] = p.imag();
        auto_x[i] = std::norm(wx.coeff[i]);
        auto_y[i] = std::norm(wy.coeff[i]);
    }
    detail::smooth_planes({&cross_re, &cross_im, &auto_x, &auto_y}, n, grid, spec);

    CoherenceMap map;
    map.n_samples = n;
    map.grid = grid;
    map.basis = basis;
    map.smoothing = spec;
    map.label_x = x.label;
    map.label_y = y.label;
    map.dt = x.dt;
    map.coi_radii = wx.coi_radii;
    map.values.resize(cells);
    for (std::size_t i = 0; i < cells; ++i) {
        double denom = auto_x[i] * auto_y[i];
        double num = cross_re[i] * cross_re[i] + cross_im[i] * cross_im[i];
        map.values[i] = denom > 0.0 ? std::clamp(num / denom, 0.0, 1.0) : 0.0;
    }
    return map;
}

// ---------------------------------------------------------------------------
// Scale-wise Pearson correlation

struct ScaleCorrelationEntry {
    int k = 0;
    double inv_lambda = 0.0;
    double r = 0.0;
    double r2 = 0.0;
    std::size_t n_used = 0;
    double coi_fraction = 0.0;
};

struct ScaleCorrelation {
    std::vector<ScaleCorrelationEntry> entries;
    std::vector<int> omitted_scales;  // too few COI-clean coefficients or zero variance
};

// How complex coefficients enter the Pearson correlation. real_part keeps
// phase co-variation (a persistent shared tone correlates); magnitude
// correlates envelopes only (the modulus of a steady tone is flat, so such a
// tone contributes nothing).
enum class CoeffProjection { real_part, magnitude };

inline CoeffProjection default_projection(BasisKind) { return CoeffProjection::real_part; }

// Pearson r per width over the translations inside both matrices' COI.
// Complex (Morlet) coefficients enter through the chosen projection, real
// parts by default; widths with fewer than 3 usable coefficients or zero
// variance are omitted.
inline ScaleCorrelation scalewise_pearson(const WaveletMatrix& wx, const WaveletMatrix& wy,
                                          CoeffProjection projection) {
    if (wx.n_samples != wy.n_samples)
        fail(errc::grid_mismatch, "wavelet matrices have different translation counts");
    if (wx.grid.k_values != wy.grid.k_values || !nearly_equal(wx.grid.dt, wy.grid.dt, 1e-12))
        fail(errc::grid_mismatch, "wavelet matrices use different scale grids");
    if (wx.basis.kind != wy.basis.kind || wx.basis.normalization != wy.basis.normalization)
        fail(errc::grid_mismatch, "wavelet matrices use different bases");

    const std::size_t n = wx.n_samples;
    ScaleCorrelation out;
    for (std::size_t s = 0; s < wx.n_scales(); ++s) {
        const std::size_t r_coi = static_cast<std::size_t>(std::max(wx.coi_radii[s], wy.coi_radii[s]));
        if (2 * r_coi + 3 > n) {
            out.omitted_scales.push_back(wx.grid.k_values[s]);
            continue;
        }
        const std::size_t lo = r_coi, hi = n - r_coi;  // [lo, hi)
        const std::size_t count = hi - lo;
        const cd* cx = wx.column(s);
        const cd* cy = wy.column(s);
        auto project = [&](cd v) {
            return projection == CoeffProjection::real_part ? v.real() : std::abs(v);
        };
        double mean_a = 0.0, mean_b = 0.0;
        for (std::size_t m = lo; m < hi; ++m) {
            mean_a += project(cx[m]);
            mean_b += project(cy[m]);
        }
        mean_a /= static_cast<double>(count);
        mean_b /= static_cast<double>(count);
        double cov = 0.0, var_a = 0.0, var_b = 0.0;
        for (std::size_t m = lo; m < hi; ++m) {
            double da = project(cx[m]) - mean_a;
            double db = project(cy[m]) - mean_b;
            cov += da * db;
            var_a += da * da;
            var_b += db * db;
        }
        if (!(var_a > 0.0) || !(var_b > 0.0)) {
            out.omitted_scales.push_back(wx.grid.k_values[s]);
            continue;
        }
        ScaleCorrelationEntry entry;
        entry.k = wx.grid.k_values[s];
        entry.inv_lambda = wx.grid.inv_lambda(s);
        entry.r = std::clamp(cov / std::sqrt(var_a * var_b), -1.0, 1.0);
        entry.r2 = entry.r * entry.r;
        entry.n_used = count;
        entry.coi_fraction = coi_fraction(n, entry.k, wx.basis);
        out.entries.push_back(entry);
    }
    return out;
}

// ---------------------------------------------------------------------------
// All-pairs correlation grid

struct PairCorrelation {
    std::size_t a = 0, b = 0;  // indices into labels
    ScaleCorrelation correlation;
};

struct CorrelationGrid {
    std::string basis_label;
    std::vector<std::string> labels;
    std::vector<PairCorrelation> pairs;  // unordered pairs a < b; diagonal absent
};

// Scale-wise r^2 for every unordered pair of series in the set. Series must
// already share dt and length (run align_to_coarsest first); each series is
// demeaned before its transform.
inline CorrelationGrid correlation_grid(const SeriesSet& set, const WaveletBasis& basis,
                                        const ScaleGrid& grid) {
    if (set.size() < 2) fail(errc::too_few_series, "correlation grid needs at least 2 series");
    for (const auto& s : set.entries) {
        if (s.size() != set.length() || !nearly_equal(s.dt, set.dt(), 1e-12))
            fail(errc::unaligned_inputs, "series set is not aligned; run align_to_coarsest");
    }
    CorrelationGrid out;
    out.basis_label = basis_name(basis.kind);
    std::vector<WaveletMatrix> transforms;
    transforms.reserve(set.size());
    for (const auto& s : set.entries) {
        out.labels.push_back(s.label);
        transforms.push_back(cwt(demean(s), basis, grid));
    }
    for (std::size_t a = 0; a < set.size(); ++a)
        for (std::size_t b = a + 1; b < set.size(); ++b)
            out.pairs.push_back({a, b, scalewise_pearson(transforms[a], transforms[b])});
    return out;
}

}  // namespace wavan
