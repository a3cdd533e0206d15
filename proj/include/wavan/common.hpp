#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wavan {

inline constexpr double pi = 3.14159265358979323846;

// Error codes cover every distinct failure mode of the toolkit; the CLI maps
// them onto exit-code families.
enum class errc {
    // ingestion
    missing_file,
    missing_column,
    non_monotone_time,
    too_few_rows,
    non_finite_value,
    non_uniform_sampling,
    parse_failure,
    // series algebra
    invalid_series,
    empty_overlap,
    too_few_series,
    unaligned_inputs,
    length_mismatch,
    // wavelets
    bad_scale,
    bad_epsilon,
    dt_mismatch,
    grid_too_long,
    grid_mismatch,
    empty_matrix,
    unsupported_basis,
    empty_cutoff,
    // spectral estimation
    segment_too_short,
    single_segment,
    // synthesis
    rate_too_high,
    bad_recipe,
    // front end
    invalid_config,
};

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

inline const char* errc_name(errc c) {
    switch (c) {
        case errc::missing_file: return "missing_file";
        case errc::missing_column: return "missing_column";
        case errc::non_monotone_time: return "non_monotone_time";
        case errc::too_few_rows: return "too_few_rows";
        case errc::non_finite_value: return "non_finite_value";
        case errc::non_uniform_sampling: return "non_uniform_sampling";
        case errc::parse_failure: return "parse_failure";
        case errc::invalid_series: return "invalid_series";
        case errc::empty_overlap: return "empty_overlap";
        case errc::too_few_series: return "too_few_series";
        case errc::unaligned_inputs: return "unaligned_inputs";
        case errc::length_mismatch: return "length_mismatch";
        case errc::bad_scale: return "bad_scale";
        case errc::bad_epsilon: return "bad_epsilon";
        case errc::dt_mismatch: return "dt_mismatch";
        case errc::grid_too_long: return "grid_too_long";
        case errc::grid_mismatch: return "grid_mismatch";
        case errc::empty_matrix: return "empty_matrix";
        case errc::unsupported_basis: return "unsupported_basis";
        case errc::empty_cutoff: return "empty_cutoff";
        case errc::segment_too_short: return "segment_too_short";
        case errc::single_segment: return "single_segment";
        case errc::rate_too_high: return "rate_too_high";
        case errc::bad_recipe: return "bad_recipe";
        case errc::invalid_config: return "invalid_config";
    }
    return "unknown";
}

// All numeric text output uses 17 significant digits so doubles round-trip.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline bool nearly_equal(double a, double b, double rel_tol) {
    double scale = std::max(std::abs(a), std::abs(b));
    return std::abs(a - b) <= rel_tol * std::max(scale, 1.0);
}

// Runs fn(i) for i in [0, count). Work is split into contiguous chunks, one
// per thread; every index writes only its own outputs, so results do not
// depend on the number of workers.
template <class F>
void parallel_for(std::size_t count, F&& fn, unsigned max_threads = 0) {
    if (count == 0) return;
    unsigned hw = std::thread::hardware_concurrency();
    unsigned nthreads = max_threads == 0 ? hw : std::min(hw, max_threads);
    if (nthreads <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    nthreads = static_cast<unsigned>(std::min<std::size_t>(nthreads, count));
    std::size_t chunk = (count + nthreads - 1) / nthreads;
    std::vector<std::thread> workers;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    for (unsigned t = 0; t < nthreads; ++t) {
        std::size_t begin = t * chunk;
        std::size_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        workers.emplace_back([&, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace wavan
