#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "wavan/common.hpp"

namespace wavan::fft {

using cd = std::complex<double>;

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

// Precomputed radix-2 plan: bit-reversal permutation plus a twiddle table for
// the largest stage. Execution only reads the plan, so one plan can serve
// many threads.
class Pow2Plan {
public:
    explicit Pow2Plan(std::size_t n) : n_(n) {
        if (!is_pow2(n)) fail(errc::invalid_config, "FFT plan size must be a power of two");
        bitrev_.resize(n);
        std::size_t log2n = 0;
        while ((std::size_t{1} << log2n) < n) ++log2n;
        for (std::size_t i = 0; i < n; ++i) {
            std::size_t r = 0;
            for (std::size_t b = 0; b < log2n; ++b)
                if (i & (std::size_t{1} << b)) r |= std::size_t{1} << (log2n - 1 - b);
            bitrev_[i] = r;
        }
        twiddle_.resize(n / 2);
        for (std::size_t j = 0; j < n / 2; ++j)
            twiddle_[j] = std::polar(1.0, -2.0 * pi * static_cast<double>(j) / static_cast<double>(n));
    }

    std::size_t size() const { return n_; }

    void forward(cd* a) const { run(a, false); }

    // Inverse includes the 1/n scaling.
    void inverse(cd* a) const {
        run(a, true);
        double inv = 1.0 / static_cast<double>(n_);
        for (std::size_t i = 0; i < n_; ++i) a[i] *= inv;
    }

private:
    void run(cd* a, bool conj_twiddle) const {
        const std::size_t n = n_;
        for (std::size_t i = 0; i < n; ++i)
            if (bitrev_[i] > i) std::swap(a[i], a[bitrev_[i]]);
        for (std::size_t len = 2; len <= n; len <<= 1) {
            std::size_t half = len >> 1;
            std::size_t step = n / len;
            for (std::size_t base = 0; base < n; base += len) {
                for (std::size_t j = 0; j < half; ++j) {
                    cd w = twiddle_[j * step];
                    if (conj_twiddle) w = std::conj(w);
                    cd u = a[base + j];
                    cd v = a[base + j + half] * w;
                    a[base + j] = u + v;
                    a[base + j + half] = u - v;
                }
            }
        }
    }

    std::size_t n_;
    std::vector<std::size_t> bitrev_;
    std::vector<cd> twiddle_;
};

// Process-wide plan cache. Map nodes are stable, so returned references stay
// valid; lookups are serialized, execution is lock-free.
inline const Pow2Plan& pow2_plan(std::size_t n) {
    static std::map<std::size_t, std::unique_ptr<Pow2Plan>> cache;
    static std::mutex mutex;
    std::lock_guard<std::mutex> lock(mutex);
    auto it = cache.find(n);
    if (it == cache.end())
        it = cache.emplace(n, std::make_unique<Pow2Plan>(n)).first;
    return *it->second;
}

namespace detail {

// Bluestein chirp-z: re-expresses an arbitrary-length DFT as one power-of-two
// circular convolution. Chirp exponents are reduced mod 2n in integer
// arithmetic to keep the angles small.
inline std::vector<cd> bluestein(const std::vector<cd>& x, bool inverse) {
    const std::size_t n = x.size();
    std::vector<cd> chirp(n);
    for (std::size_t j = 0; j < n; ++j) {
        unsigned long long jj = (static_cast<unsigned long long>(j) * j) % (2ull * n);
        double angle = pi * static_cast<double>(jj) / static_cast<double>(n);
        chirp[j] = std::polar(1.0, inverse ? angle : -angle);
    }
    const std::size_t m = next_pow2(2 * n - 1);
    const Pow2Plan& plan = pow2_plan(m);
    std::vector<cd> a(m, cd{0.0, 0.0}), b(m, cd{0.0, 0.0});
    for (std::size_t j = 0; j < n; ++j) a[j] = x[j] * chirp[j];
    b[0] = std::conj(chirp[0]);
    for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);
    plan.forward(a.data());
    plan.forward(b.data());
    for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
    plan.inverse(a.data());
    std::vector<cd> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * chirp[k];
    return out;
}

}  // namespace detail

// DFT of arbitrary length; inverse includes the 1/n scaling.
inline std::vector<cd> dft(const std::vector<cd>& x, bool inverse = false) {
    const std::size_t n = x.size();
    if (n == 0) return {};
    if (n == 1) return x;
    if (is_pow2(n)) {
        std::vector<cd> a = x;
        const Pow2Plan& plan = pow2_plan(n);
        if (inverse)
            plan.inverse(a.data());
        else
            plan.forward(a.data());
        return a;
    }
    std::vector<cd> out = detail::bluestein(x, inverse);
    if (inverse) {
        double scale = 1.0 / static_cast<double>(n);
        for (auto& v : out) v *= scale;
    }
    return out;
}

// Spectrum of a zero-padded signal, for reuse across correlations that share
// the same padded length.
inline std::vector<cd> padded_spectrum(const std::vector<cd>& x, std::size_t m) {
    std::vector<cd> a(m, cd{0.0, 0.0});
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = x[i];
    pow2_plan(m).forward(a.data());
    return a;
}

// Spectrum of a sliding-correlation kernel with support j in [lo, hi],
// arranged so that multiplying by a padded signal spectrum computes
// out[t] = sum_j x[t + j] * kernel[j - lo]. Pad length m must be a power of
// two with m >= n_out + (hi - lo + 1).
inline std::vector<cd> kernel_spectrum(const std::vector<cd>& kernel, long lo, long hi,
                                       std::size_t m) {
    std::vector<cd> e(m, cd{0.0, 0.0});
    for (long j = lo; j <= hi; ++j) {
        std::size_t idx = j >= 0 ? (m - static_cast<std::size_t>(j)) % m
                                 : static_cast<std::size_t>(-j);
        e[idx] += kernel[static_cast<std::size_t>(j - lo)];
    }
    pow2_plan(m).forward(e.data());
    return e;
}

// Completes the correlation given both spectra: pointwise product, inverse
// transform, first n_out entries.
inline std::vector<cd> correlate_spectra(const std::vector<cd>& x_spectrum,
                                         const std::vector<cd>& k_spectrum,
                                         std::size_t n_out) {
    const std::size_t m = x_spectrum.size();
    std::vector<cd> z(m);
    for (std::size_t i = 0; i < m; ++i) z[i] = x_spectrum[i] * k_spectrum[i];
    pow2_plan(m).inverse(z.data());
    z.resize(n_out);
    return z;
}

// Sliding correlation out[t] = sum_j x[t + j] * kernel[j - lo] for j in
// [lo, hi], evaluated for t in [0, n_out) with x treated as zero outside its
// range. `x_spectrum` must come from padded_spectrum(x, m) with
// m >= n_out + (hi - lo + 1), power of two.
inline std::vector<cd> correlate_with_spectrum(const std::vector<cd>& x_spectrum,
                                               std::size_t n_out,
                                               const std::vector<cd>& kernel,
                                               long lo, long hi) {
    const std::size_t m = x_spectrum.size();
    const std::size_t klen = static_cast<std::size_t>(hi - lo + 1);
    if (m < n_out + klen) fail(errc::invalid_config, "correlation pad length too small");
    return correlate_spectra(x_spectrum, kernel_spectrum(kernel, lo, hi, m), n_out);
}

}  // namespace wavan::fft
