#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "wavan/common.hpp"
#include "wavan/fft.hpp"
#include "wavan/timeseries.hpp"

namespace wavan {

using cd = std::complex<double>;

enum class BasisKind { haar, morlet };

// paper_exact reproduces the printed piecewise/analytic definitions verbatim;
// unit_norm adjusts the discretized vectors so that sum(psi) = 0 and
// sum(|psi|^2) = 1 hold exactly on the sampled, truncated support.
enum class Normalization { paper_exact, unit_norm };

struct WaveletBasis {
    BasisKind kind = BasisKind::haar;
    double epsilon = 5.0;  // Morlet Gaussian-window scale parameter
    Normalization normalization = Normalization::unit_norm;
};

inline const char* basis_name(BasisKind k) { return k == BasisKind::haar ? "haar" : "morlet"; }
inline const char* normalization_name(Normalization n) {
    return n == Normalization::paper_exact ? "paper" : "unit";
}

inline void validate_basis(const WaveletBasis& b) {
    if (b.kind == BasisKind::morlet && b.epsilon < 5.0)
        fail(errc::bad_epsilon,
             "Morlet epsilon must be >= 5 (got " + format_g17(b.epsilon) +
                 "); smaller values reduce the wavelet to a plain Gaussian");
}

// ---------------------------------------------------------------------------
// Scale grid

enum class ScaleGridMode { paper_full, log_spaced };

// Ordered even integer widths k; physical width lambda = k*dt, exported axis
// is 1/lambda.
struct ScaleGrid {
    std::vector<int> k_values;
    double dt = 1.0;
    ScaleGridMode mode = ScaleGridMode::log_spaced;

    std::size_t size() const { return k_values.size(); }
    double lambda(std::size_t i) const { return static_cast<double>(k_values[i]) * dt; }
    double inv_lambda(std::size_t i) const { return 1.0 / lambda(i); }
};

inline int max_even_scale(std::size_t n) {
    // largest even k with k <= n-1
    return 2 * static_cast<int>((n - 1) / 2);
}

// Every even k in [2, N-1]: the full over-complete grid. O(N) scales, so the
// transform cost grows quadratically with the record length.
inline ScaleGrid full_scale_grid(std::size_t n, double dt) {
    if (n < 3) fail(errc::grid_too_long, "need at least 3 samples for a scale grid");
    ScaleGrid g;
    g.dt = dt;
    g.mode = ScaleGridMode::paper_full;
    for (int k = 2; k <= max_even_scale(n); k += 2) g.k_values.push_back(k);
    return g;
}

// Log-spaced even widths from 2 up to max_k (default: the full range),
// rounded to even and deduplicated.
inline ScaleGrid log_scale_grid(std::size_t n, double dt, int count = 48, int max_k = 0) {
    if (n < 3) fail(errc::grid_too_long, "need at least 3 samples for a scale grid");
    if (count < 1) fail(errc::invalid_config, "scale count must be positive");
    int k_hi = max_even_scale(n);
    if (max_k > 0) {
        if (max_k % 2 != 0) fail(errc::invalid_config, "max scale k must be even");
        k_hi = std::min(k_hi, max_k);
    }
    if (k_hi < 2) fail(errc::grid_too_long, "scale range is empty");
    ScaleGrid g;
    g.dt = dt;
    g.mode = ScaleGridMode::log_spaced;
    std::set<int> ks;
    if (count == 1) {
        ks.insert(2);
    } else {
        double lo = std::log(2.0), hi = std::log(static_cast<double>(k_hi));
        for (int i = 0; i < count; ++i) {
            double k = std::exp(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
            int even = 2 * static_cast<int>(std::lround(k / 2.0));
            even = std::clamp(even, 2, k_hi);
            ks.insert(even);
        }
    }
    g.k_values.assign(ks.begin(), ks.end());
    return g;
}

// ---------------------------------------------------------------------------
// Mother wavelets, discretized

namespace detail {

struct Support {
    long lo, hi;  // offsets j = n - m
};

inline Support haar_support(int k, Normalization norm) {
    if (norm == Normalization::paper_exact) return {-(k / 2), k / 2};
    return {-(k / 2), k / 2 - 1};
}

inline Support morlet_support(int k) { return {-4l * k, 4l * k}; }

inline void check_haar_scale(int k) {
    if (k < 2 || k % 2 != 0)
        fail(errc::bad_scale, "Haar width k must be a positive even integer (got " + std::to_string(k) + ")");
}

inline void check_morlet_scale(int k) {
    if (k < 2) fail(errc::bad_scale, "Morlet width k must be >= 2 (got " + std::to_string(k) + ")");
}

}  // namespace detail

// Discrete Haar wavelet evaluated at offset j = n - m.
//
// paper_exact: amplitude 1/(2 sqrt k), positive on -k/2 <= j <= 0, negative
// on 0 < j <= k/2 (k+1 points; sum and energy conditions do not hold).
// unit_norm: amplitude 1/sqrt(k), positive on -k/2 <= j < 0, negative on
// 0 <= j < k/2 (k points; zero-sum and unit-energy hold exactly).
inline double haar_value(long n, long m, int k, Normalization norm) {
    detail::check_haar_scale(k);
    long j = n - m;
    long half = k / 2;
    if (norm == Normalization::paper_exact) {
        double amp = 1.0 / (2.0 * std::sqrt(static_cast<double>(k)));
        if (j >= -half && j <= 0) return amp;
        if (j > 0 && j <= half) return -amp;
        return 0.0;
    }
    double amp = 1.0 / std::sqrt(static_cast<double>(k));
    if (j >= -half && j < 0) return amp;
    if (j >= 0 && j < half) return -amp;
    return 0.0;
}

namespace detail {

// Discretized Morlet profile over j in [-4k, 4k]. paper_exact evaluates the
// analytic expression with the continuum zero-mean constant exp(-eps^2/2);
// unit_norm replaces it with the constant that zeroes the *discrete* sum over
// the truncated support (one refinement pass removes the rounding residue),
// then rescales to unit l2 norm. Truncation at 4k leaves Gaussian mass
// < 1e-6 outside.
inline std::vector<cd> morlet_profile(int k, double epsilon, Normalization norm) {
    check_morlet_scale(k);
    if (epsilon < 5.0)
        fail(errc::bad_epsilon, "Morlet epsilon must be >= 5 (got " + format_g17(epsilon) + ")");
    const Support sup = morlet_support(k);
    const std::size_t len = static_cast<std::size_t>(sup.hi - sup.lo + 1);
    const double kd = static_cast<double>(k);
    const double amp = 1.0 / std::sqrt(kd);

    std::vector<double> envelope(len);
    std::vector<cd> wave(len);
    for (std::size_t i = 0; i < len; ++i) {
        double u = static_cast<double>(sup.lo + static_cast<long>(i)) / kd;
        envelope[i] = std::exp(-0.5 * u * u);
        wave[i] = std::polar(1.0, -epsilon * u);
    }

    std::vector<cd> psi(len);
    if (norm == Normalization::paper_exact) {
        const double c = std::exp(-0.5 * epsilon * epsilon);
        for (std::size_t i = 0; i < len; ++i) psi[i] = amp * (wave[i] - c) * envelope[i];
        return psi;
    }

    double env_sum = 0.0;
    cd wave_sum{0.0, 0.0};
    for (std::size_t i = 0; i < len; ++i) {
        env_sum += envelope[i];
        wave_sum += wave[i] * envelope[i];
    }
    cd c = wave_sum / env_sum;
    for (std::size_t i = 0; i < len; ++i) psi[i] = (wave[i] - c) * envelope[i];
    // refinement pass: cancel the floating-point residue of the sum
    cd residue{0.0, 0.0};
    for (const cd& v : psi) residue += v;
    cd correction = residue / env_sum;
    for (std::size_t i = 0; i < len; ++i) psi[i] -= correction * envelope[i];

    double energy = 0.0;
    for (const cd& v : psi) energy += std::norm(v);
    double scale = 1.0 / std::sqrt(energy);
    for (cd& v : psi) v *= scale;
    return psi;
}

inline std::vector<cd> haar_profile(int k, Normalization norm) {
    check_haar_scale(k);
    const Support sup = haar_support(k, norm);
    std::vector<cd> psi(static_cast<std::size_t>(sup.hi - sup.lo + 1));
    for (long j = sup.lo; j <= sup.hi; ++j)
        psi[static_cast<std::size_t>(j - sup.lo)] = haar_value(j, 0, k, norm);
    return psi;
}

inline Support wavelet_support(int k, const WaveletBasis& basis) {
    return basis.kind == BasisKind::haar ? haar_support(k, basis.normalization)
                                         : morlet_support(k);
}

}  // namespace detail

// Discrete Morlet wavelet evaluated at offset j = n - m (zero for |j| > 4k).
inline cd morlet_value(long n, long m, int k, double epsilon, Normalization norm) {
    detail::check_morlet_scale(k);
    if (epsilon < 5.0)
        fail(errc::bad_epsilon, "Morlet epsilon must be >= 5 (got " + format_g17(epsilon) + ")");
    long j = n - m;
    if (j < -4l * k || j > 4l * k) return cd{0.0, 0.0};
    if (norm == Normalization::paper_exact) {
        double u = static_cast<double>(j) / static_cast<double>(k);
        double amp = 1.0 / std::sqrt(static_cast<double>(k));
        return amp * (std::polar(1.0, -epsilon * u) - std::exp(-0.5 * epsilon * epsilon)) *
               std::exp(-0.5 * u * u);
    }
    std::vector<cd> psi = detail::morlet_profile(k, epsilon, norm);
    return psi[static_cast<std::size_t>(j + 4l * k)];
}

inline std::vector<cd> wavelet_profile(int k, const WaveletBasis& basis) {
    return basis.kind == BasisKind::haar ? detail::haar_profile(k, basis.normalization)
                                         : detail::morlet_profile(k, basis.epsilon, basis.normalization);
}

// ---------------------------------------------------------------------------
// Cone of influence

// Effective half-width of the wavelet in samples: exact support for Haar,
// e-folding radius sqrt(2)*k for Morlet.
inline int coi_radius(int k, const WaveletBasis& basis) {
    if (k < 2) fail(errc::bad_scale, "width k must be >= 2");
    if (basis.kind == BasisKind::haar) return k / 2;
    return static_cast<int>(std::ceil(std::sqrt(2.0) * static_cast<double>(k)));
}

// Fraction of translations unaffected by the record boundaries at width k.
inline double coi_fraction(std::size_t n, int k, const WaveletBasis& basis) {
    double r = static_cast<double>(coi_radius(k, basis));
    double inside = std::max(0.0, static_cast<double>(n) - 2.0 * r);
    return inside / static_cast<double>(n);
}

// ---------------------------------------------------------------------------
// Wavelet matrix (discretized CWT)

struct WaveletMatrix {
    std::size_t n_samples = 0;
    ScaleGrid grid;
    WaveletBasis basis;
    std::string source_label;
    double dt = 1.0;
    std::vector<int> coi_radii;  // per scale
    // column-major: coeff[s * n_samples + m]
    std::vector<cd> coeff;

    std::size_t n_scales() const { return grid.size(); }
    cd at(std::size_t m, std::size_t s) const { return coeff[s * n_samples + m]; }
    const cd* column(std::size_t s) const { return coeff.data() + s * n_samples; }
    cd* column(std::size_t s) { return coeff.data() + s * n_samples; }

    // true iff the wavelet's effective support at (m, k_s) lies inside the
    // record: coi_radius <= m <= N-1-coi_radius.
    bool coi_ok(std::size_t m, std::size_t s) const {
        std::size_t r = static_cast<std::size_t>(coi_radii[s]);
        return m >= r && m + r <= n_samples - 1;
    }
};

// W(m,k) = sum_n x_n conj(psi_n(m,k)), every translation m in [0, N) and
// every width k in the grid. Columns are computed by FFT correlation; the
// result matches the direct summation to ~1e-12 relative. Haar columns are
// exactly real and stored with zero imaginary part.
inline WaveletMatrix cwt(const TimeSeries& x, const WaveletBasis& basis, const ScaleGrid& grid) {
    validate_basis(basis);
    validate_series(x);
    if (!nearly_equal(grid.dt, x.dt, 1e-12))
        fail(errc::dt_mismatch, "scale grid dt " + format_g17(grid.dt) + " does not match series dt " + format_g17(x.dt));
    if (grid.k_values.empty()) fail(errc::grid_too_long, "scale grid is empty");
    const std::size_t n = x.size();
    if (grid.k_values.back() > static_cast<int>(n) - 1)
        fail(errc::grid_too_long, "largest width k=" + std::to_string(grid.k_values.back()) +
                                      " exceeds N-1=" + std::to_string(n - 1));

    WaveletMatrix w;
    w.n_samples = n;
    w.grid = grid;
    w.basis = basis;
    w.source_label = x.label;
    w.dt = x.dt;
    w.coeff.assign(n * grid.size(), cd{0.0, 0.0});
    w.coi_radii.resize(grid.size());
    for (std::size_t s = 0; s < grid.size(); ++s)
        w.coi_radii[s] = coi_radius(grid.k_values[s], basis);

    // one padded signal spectrum per distinct FFT length
    std::map<std::size_t, std::vector<cd>> spectra;
    std::vector<std::size_t> pad_sizes(grid.size());
    std::vector<cd> x_complex(n);
    for (std::size_t i = 0; i < n; ++i) x_complex[i] = cd{x.values[i], 0.0};
    for (std::size_t s = 0; s < grid.size(); ++s) {
        detail::Support sup = detail::wavelet_support(grid.k_values[s], basis);
        std::size_t len = static_cast<std::size_t>(sup.hi - sup.lo + 1);
        std::size_t m = fft::next_pow2(n + len);
        pad_sizes[s] = m;
        if (!spectra.count(m)) spectra.emplace(m, fft::padded_spectrum(x_complex, m));
    }

    parallel_for(grid.size(), [&](std::size_t s) {
        const int k = grid.k_values[s];
        detail::Support sup = detail::wavelet_support(k, basis);
        std::vector<cd> kernel = wavelet_profile(k, basis);
        for (cd& v : kernel) v = std::conj(v);
        std::vector<cd> column = fft::correlate_with_spectrum(spectra.at(pad_sizes[s]), n,
                                                              kernel, sup.lo, sup.hi);
        cd* dst = w.column(s);
        if (basis.kind == BasisKind::haar) {
            for (std::size_t m = 0; m < n; ++m) dst[m] = cd{column[m].real(), 0.0};
        } else {
            for (std::size_t m = 0; m < n; ++m) dst[m] = column[m];
        }
    });
    return w;
}

// ---------------------------------------------------------------------------
// Wavelet spectrum

// Per-scale variance of the wavelet coefficients (sigma2) and its square
// (sigma4), indexed by 1/lambda.
struct WaveletSpectrum {
    std::vector<int> k_values;
    std::vector<double> inv_lambda;
    std::vector<double> sigma2;
    std::vector<double> sigma4;
    std::vector<std::size_t> n_used;
    std::vector<int> dropped_scales;  // k values dropped for lack of COI-clean coefficients
};

// sigma2 at each width = sample variance (N_used - 1 denominator) of the
// complex coefficients around their complex mean; coi_only restricts to
// translations whose wavelet support is boundary-free. Scales with fewer
// than 2 usable coefficients are dropped and reported.
inline WaveletSpectrum wavelet_spectrum(const WaveletMatrix& w, bool coi_only = true) {
    if (w.n_samples == 0 || w.n_scales() == 0) fail(errc::empty_matrix, "wavelet matrix is empty");
    WaveletSpectrum out;
    for (std::size_t s = 0; s < w.n_scales(); ++s) {
        std::size_t lo = 0, hi = w.n_samples;  // [lo, hi)
        if (coi_only) {
            std::size_t r = static_cast<std::size_t>(w.coi_radii[s]);
            if (2 * r + 2 > w.n_samples) {
                out.dropped_scales.push_back(w.grid.k_values[s]);
                continue;
            }
            lo = r;
            hi = w.n_samples - r;
        }
        const std::size_t count = hi - lo;
        const cd* col = w.column(s);
        cd mu{0.0, 0.0};
        for (std::size_t m = lo; m < hi; ++m) mu += col[m];
        mu /= static_cast<double>(count);
        double accum = 0.0;
        for (std::size_t m = lo; m < hi; ++m) accum += std::norm(col[m] - mu);
        double sigma2 = accum / static_cast<double>(count - 1);
        out.k_values.push_back(w.grid.k_values[s]);
        out.inv_lambda.push_back(w.grid.inv_lambda(s));
        out.sigma2.push_back(sigma2);
        out.sigma4.push_back(sigma2 * sigma2);
        out.n_used.push_back(count);
    }
    if (out.k_values.empty())
        fail(errc::empty_matrix, "every scale was dropped by the COI restriction");
    return out;
}

// Approximate frequency mapping for axis overlays. 1/lambda is not itself a
// frequency; for the Morlet basis the center frequency is eps/(2 pi k dt).
inline double morlet_center_frequency(int k, double epsilon, double dt) {
    return epsilon / (2.0 * pi * static_cast<double>(k) * dt);
}

}  // namespace wavan
