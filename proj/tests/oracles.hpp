// Independent reference implementations used to check the fast paths: naive
// DFT, direct Eq.-style wavelet summation, direct smoothing convolution, and
// a least-squares log-log slope fit. Deliberately simple loops, no FFT.
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "wavan/rng.hpp"
#include "wavan/timeseries.hpp"
#include "wavan/wavelet.hpp"

namespace oracle {

using cd = std::complex<double>;

inline std::vector<cd> naive_dft(const std::vector<cd>& x, bool inverse = false) {
    const std::size_t n = x.size();
    std::vector<cd> out(n, cd{0.0, 0.0});
    const double sign = inverse ? 1.0 : -1.0;
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            double angle = sign * 2.0 * wavan::pi * static_cast<double>(k) * static_cast<double>(i) /
                           static_cast<double>(n);
            out[k] += x[i] * std::polar(1.0, angle);
        }
        if (inverse) out[k] /= static_cast<double>(n);
    }
    return out;
}

// Direct summation of W(m,k) = sum_n x_n conj(psi_n(m,k)) over the wavelet
// support; no convolution tricks. Haar entries go through the pointwise
// definition, Morlet through the discretized profile.
inline std::vector<cd> cwt_direct(const wavan::TimeSeries& x, const wavan::WaveletBasis& basis,
                                  const wavan::ScaleGrid& grid) {
    const long n = static_cast<long>(x.size());
    std::vector<cd> out(x.size() * grid.size(), cd{0.0, 0.0});
    for (std::size_t s = 0; s < grid.size(); ++s) {
        const int k = grid.k_values[s];
        std::vector<cd> profile = wavan::wavelet_profile(k, basis);
        const long lo = basis.kind == wavan::BasisKind::haar ? -(k / 2) : -4l * k;
        for (long m = 0; m < n; ++m) {
            cd accum{0.0, 0.0};
            for (std::size_t i = 0; i < profile.size(); ++i) {
                long idx = m + lo + static_cast<long>(i);
                if (idx < 0 || idx >= n) continue;
                accum += x.values[static_cast<std::size_t>(idx)] * std::conj(profile[i]);
            }
            out[s * x.size() + static_cast<std::size_t>(m)] = accum;
        }
    }
    return out;
}

inline double max_abs(const std::vector<cd>& v) {
    double m = 0.0;
    for (const cd& x : v) m = std::max(m, std::abs(x));
    return m;
}

// max |a - b| scaled by the largest magnitude in b
inline double matrix_rel_error(const std::vector<cd>& a, const std::vector<cd>& b) {
    double scale = std::max(max_abs(b), 1e-300);
    double worst = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, std::abs(a[i] - b[i]));
    return worst / scale;
}

// Direct Gaussian smoothing along translations: truncated at 4 sigma,
// renormalized over the in-range weights.
inline std::vector<cd> gaussian_smooth_direct(const std::vector<cd>& mat, std::size_t n,
                                              const wavan::ScaleGrid& grid, double tau_per_lambda) {
    std::vector<cd> out(mat.size());
    for (std::size_t s = 0; s < grid.size(); ++s) {
        double sigma = tau_per_lambda * static_cast<double>(grid.k_values[s]);
        long h = static_cast<long>(std::ceil(4.0 * sigma));
        for (long t = 0; t < static_cast<long>(n); ++t) {
            cd accum{0.0, 0.0};
            double mass = 0.0;
            for (long j = -h; j <= h; ++j) {
                long idx = t + j;
                if (idx < 0 || idx >= static_cast<long>(n)) continue;
                double w = std::exp(-0.5 * static_cast<double>(j) * static_cast<double>(j) / (sigma * sigma));
                accum += w * mat[s * n + static_cast<std::size_t>(idx)];
                mass += w;
            }
            out[s * n + static_cast<std::size_t>(t)] = accum / mass;
        }
    }
    return out;
}

// Least-squares slope of log(y) against log(x); entries with non-positive
// coordinates are skipped.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
        double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++count;
    }
    double denom = static_cast<double>(count) * sxx - sx * sx;
    return (static_cast<double>(count) * sxy - sx * sy) / denom;
}

inline wavan::TimeSeries gaussian_series(std::size_t n, double dt, std::uint64_t seed,
                                         double sigma = 1.0) {
    wavan::Xoshiro256ss rng(seed);
    wavan::TimeSeries out;
    out.label = "noise";
    out.dt = dt;
    out.values.resize(n);
    for (double& v : out.values) v = sigma * rng.gaussian();
    return out;
}

inline double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    std::size_t mid = v.size() / 2;
    return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

}  // namespace oracle
