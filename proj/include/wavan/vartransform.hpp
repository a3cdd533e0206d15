#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "wavan/common.hpp"
#include "wavan/correlate.hpp"
#include "wavan/timeseries.hpp"
#include "wavan/wavelet.hpp"

namespace wavan {

// Keeps the widths whose cone of influence leaves at least 80% of the data
// trustworthy: coi_radius(k) <= N/10 (integer-exact comparison).
inline ScaleGrid scale_cutoff(std::size_t n, const ScaleGrid& grid, const WaveletBasis& basis) {
    if (grid.k_values.empty()) fail(errc::empty_cutoff, "scale grid is empty");
    ScaleGrid out;
    out.dt = grid.dt;
    out.mode = grid.mode;
    for (int k : grid.k_values)
        if (static_cast<std::size_t>(10 * coi_radius(k, basis)) <= n) out.k_values.push_back(k);
    if (out.k_values.empty())
        fail(errc::empty_cutoff, "the 80% cone-of-influence rule removes every scale");
    return out;
}

// Covariance of the response against each width column of the predictor's
// wavelet matrix: C_k = sum_m (y_m - ybar) W(m,k) / (N-1), over all m.
struct CovarianceVector {
    std::vector<int> k_values;
    std::vector<double> inv_lambda;
    std::vector<cd> values;
};

inline CovarianceVector covariance_vector(const TimeSeries& y, const WaveletMatrix& wx) {
    if (y.size() != wx.n_samples)
        fail(errc::length_mismatch, "response length " + std::to_string(y.size()) +
                                        " does not match wavelet matrix rows " + std::to_string(wx.n_samples));
    const std::size_t n = wx.n_samples;
    const double ybar = mean(y);
    CovarianceVector out;
    out.k_values = wx.grid.k_values;
    out.inv_lambda.resize(wx.n_scales());
    out.values.resize(wx.n_scales());
    for (std::size_t s = 0; s < wx.n_scales(); ++s) {
        out.inv_lambda[s] = wx.grid.inv_lambda(s);
        cd accum{0.0, 0.0};
        const cd* col = wx.column(s);
        for (std::size_t m = 0; m < n; ++m) accum += (y.values[m] - ybar) * col[m];
        out.values[s] = accum / static_cast<double>(n - 1);
    }
    return out;
}

// x'_m = sigma_x * Re( sum_k W(m,k) C_k ); the real part carries the Morlet
// case, Haar terms are already real.
inline std::vector<double> apply_variance_transform(const WaveletMatrix& wx, double sigma_x,
                                                    const CovarianceVector& c) {
    if (c.values.size() != wx.n_scales())
        fail(errc::grid_mismatch, "covariance vector length does not match the scale grid");
    std::vector<double> out(wx.n_samples, 0.0);
    for (std::size_t s = 0; s < wx.n_scales(); ++s) {
        const cd ck = c.values[s];
        const cd* col = wx.column(s);
        for (std::size_t m = 0; m < wx.n_samples; ++m)
            out[m] += (col[m] * ck).real();
    }
    for (double& v : out) v *= sigma_x;
    return out;
}

struct VarianceTransformResult {
    TimeSeries x_prime;
    CovarianceVector covariances;
    WaveletSpectrum variance_spectrum_before;
    WaveletSpectrum variance_spectrum_after;
    std::vector<double> contributions;  // per retained scale: Var(W(.,k)) |C_k|^2
    int peak_k = 0;
    double peak_inv_lambda = 0.0;
    double r2_at_peak = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Sample variance of each column over all translations (complex convention).
inline std::vector<double> column_variances(const WaveletMatrix& w) {
    std::vector<double> out(w.n_scales());
    for (std::size_t s = 0; s < w.n_scales(); ++s) {
        const cd* col = w.column(s);
        cd mu{0.0, 0.0};
        for (std::size_t m = 0; m < w.n_samples; ++m) mu += col[m];
        mu /= static_cast<double>(w.n_samples);
        double accum = 0.0;
        for (std::size_t m = 0; m < w.n_samples; ++m) accum += std::norm(col[m] - mu);
        out[s] = accum / static_cast<double>(w.n_samples - 1);
    }
    return out;
}

inline std::size_t argmax(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

}  // namespace detail

// Reshapes the predictor's per-scale variances toward the response: C from
// the covariance of y with W_x, x' = W_x sigma_x C, both evaluated on the
// cutoff-filtered grid. The peak-variance scale is the argmax over k of
// Var(W(.,k)) |C_k|^2, the variance of x's k-th term in x'; r2_at_peak is
// the scale-wise Pearson r^2 of the pair at that width.
inline VarianceTransformResult variance_transform(const TimeSeries& x, const TimeSeries& y,
                                                  const WaveletBasis& basis, const ScaleGrid& grid) {
    if (x.size() != y.size() || !nearly_equal(x.dt, y.dt, 1e-12))
        fail(errc::unaligned_inputs, "predictor and response must be aligned (same dt and length); run align_to_coarsest");
    const ScaleGrid cut = scale_cutoff(x.size(), grid, basis);

    VarianceTransformResult result;
    WaveletMatrix wx = cwt(x, basis, cut);
    WaveletMatrix wy = cwt(y, basis, cut);
    result.covariances = covariance_vector(y, wx);
    const double sigma_x = sample_std(x);

    result.x_prime.label = x.label + "_vt";
    result.x_prime.units = "";
    result.x_prime.t0 = x.t0;
    result.x_prime.dt = x.dt;
    result.x_prime.values = apply_variance_transform(wx, sigma_x, result.covariances);

    result.variance_spectrum_before = wavelet_spectrum(wx, true);
    result.variance_spectrum_after = wavelet_spectrum(cwt(result.x_prime, basis, cut), true);

    std::vector<double> col_var = detail::column_variances(wx);
    result.contributions.resize(cut.size());
    for (std::size_t s = 0; s < cut.size(); ++s)
        result.contributions[s] = col_var[s] * std::norm(result.covariances.values[s]);
    std::size_t peak = detail::argmax(result.contributions);
    result.peak_k = cut.k_values[peak];
    result.peak_inv_lambda = cut.inv_lambda(peak);

    ScaleCorrelation corr = scalewise_pearson(wx, wy);
    for (const auto& entry : corr.entries)
        if (entry.k == result.peak_k) result.r2_at_peak = entry.r2;
    return result;
}

// One row per ordered (predictor, response) pair: the width of highest
// variance in the transform and the pair's r^2 at that width. High variance
// does not imply high correlation; the two columns are deliberately
// separate.
struct PeakVarianceRow {
    std::string predictor;
    std::string response;
    int peak_k = 0;
    double peak_inv_lambda = 0.0;
    double r2_at_peak = std::numeric_limits<double>::quiet_NaN();
};

inline std::vector<PeakVarianceRow> peak_variance_summary(const SeriesSet& set,
                                                          const WaveletBasis& basis,
                                                          const ScaleGrid& grid) {
    if (set.size() < 2) fail(errc::too_few_series, "peak-variance summary needs at least 2 series");
    for (const auto& s : set.entries) {
        if (s.size() != set.length() || !nearly_equal(s.dt, set.dt(), 1e-12))
            fail(errc::unaligned_inputs, "series set is not aligned; run align_to_coarsest");
    }
    const ScaleGrid cut = scale_cutoff(set.length(), grid, basis);
    const std::size_t count = set.size();

    std::vector<WaveletMatrix> transforms(count);
    std::vector<std::vector<double>> col_vars(count);
    for (std::size_t i = 0; i < count; ++i) {
        transforms[i] = cwt(set.entries[i], basis, cut);
        col_vars[i] = detail::column_variances(transforms[i]);
    }
    // r^2 is symmetric in the pair; compute each unordered pair once
    std::vector<std::vector<ScaleCorrelation>> pair_corr(count);
    for (std::size_t i = 0; i < count; ++i) pair_corr[i].resize(count);
    for (std::size_t i = 0; i < count; ++i)
        for (std::size_t j = i + 1; j < count; ++j)
            pair_corr[i][j] = scalewise_pearson(transforms[i], transforms[j]);

    std::vector<PeakVarianceRow> rows;
    for (std::size_t i = 0; i < count; ++i) {
        for (std::size_t j = 0; j < count; ++j) {
            if (i == j) continue;
            CovarianceVector c = covariance_vector(set.entries[j], transforms[i]);
            std::vector<double> contribution(cut.size());
            for (std::size_t s = 0; s < cut.size(); ++s)
                contribution[s] = col_vars[i][s] * std::norm(c.values[s]);
            std::size_t peak = detail::argmax(contribution);
            PeakVarianceRow row;
            row.predictor = set.entries[i].label;
            row.response = set.entries[j].label;
            row.peak_k = cut.k_values[peak];
            row.peak_inv_lambda = cut.inv_lambda(peak);
            const ScaleCorrelation& corr = i < j ? pair_corr[i][j] : pair_corr[j][i];
            for (const auto& entry : corr.entries)
                if (entry.k == row.peak_k) row.r2_at_peak = entry.r2;
            rows.push_back(row);
        }
    }
    return rows;
}

}  // namespace wavan
