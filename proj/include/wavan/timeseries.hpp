#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wavan/common.hpp"

namespace wavan {

// Uniformly sampled signal. Timestamps are implicit: t_n = t0 + n*dt.
struct TimeSeries {
    std::string label;
    std::string units;
    double t0 = 0.0;
    double dt = 1.0;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }
    double time_at(std::size_t n) const { return t0 + static_cast<double>(n) * dt; }
    double end_time() const { return time_at(values.empty() ? 0 : values.size() - 1); }
};

inline void validate_series(const TimeSeries& x) {
    if (x.values.size() < 2) fail(errc::invalid_series, "series '" + x.label + "' has fewer than 2 samples");
    if (!(x.dt > 0.0)) fail(errc::invalid_series, "series '" + x.label + "' has non-positive dt");
    for (double v : x.values)
        if (!std::isfinite(v)) fail(errc::invalid_series, "series '" + x.label + "' contains non-finite values");
}

// Series sharing one dt and one length, as produced by align_to_coarsest.
struct SeriesSet {
    std::vector<TimeSeries> entries;

    std::size_t size() const { return entries.size(); }
    double dt() const { return entries.empty() ? 0.0 : entries.front().dt; }
    std::size_t length() const { return entries.empty() ? 0 : entries.front().size(); }
};

inline double mean(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x;
    return sum / static_cast<double>(v.size());
}

inline double mean(const TimeSeries& x) { return mean(x.values); }

// Sample convention (N-1), matching the covariance denominator used in the
// variance transformation.
inline double sample_std(const std::vector<double>& v) {
    if (v.size() < 2) fail(errc::invalid_series, "std requires at least 2 samples");
    double mu = mean(v);
    double accum = 0.0;
    for (double x : v) accum += (x - mu) * (x - mu);
    return std::sqrt(accum / static_cast<double>(v.size() - 1));
}

inline double sample_std(const TimeSeries& x) { return sample_std(x.values); }

inline TimeSeries demean(const TimeSeries& x) {
    TimeSeries out = x;
    double mu = mean(x);
    for (double& v : out.values) v -= mu;
    return out;
}

// ---------------------------------------------------------------------------
// CSV ingestion

struct CsvOptions {
    std::string time_column = "time";
    std::string value_column = "value";
    char delimiter = ',';
    // Maximum deviation of any interval from the median interval, as a
    // fraction of the median, before the series is rejected as non-uniform.
    double uniform_tolerance = 0.01;
};

namespace detail {

inline std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return std::string(s.substr(b, e - b));
}

inline std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
        if (i == line.size() || line[i] == delim) {
            fields.push_back(trim(std::string_view(line).substr(start, i - start)));
            start = i + 1;
        }
    }
    return fields;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
    double v = 0.0;
    const char* begin = s.data();
    const char* end = begin + s.size();
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc{} || ptr != end)
        fail(errc::parse_failure, "line " + std::to_string(line_no) + ": cannot parse number '" + s + "'");
    return v;
}

}  // namespace detail

// Reads one (time, value) column pair from a delimited text file. Header row
// required; '#'-prefixed lines are comments ('# label:' and '# units:' are
// picked up as metadata). Raw timestamps must be strictly increasing and
// uniform to within options.uniform_tolerance of the median interval;
// non-uniform input is rejected and must be decimated externally (see
// align_to_coarsest) rather than silently regridded.
inline TimeSeries load_csv(const std::string& path, const CsvOptions& options = {}) {
    std::ifstream in(path);
    if (!in) fail(errc::missing_file, "cannot open '" + path + "'");

    TimeSeries out;
    out.label = options.value_column;

    std::string line;
    bool have_header = false;
    std::size_t time_idx = 0, value_idx = 0, n_cols = 0;
    std::vector<double> times;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 && line.size() >= 3 &&
            static_cast<unsigned char>(line[0]) == 0xEF &&
            static_cast<unsigned char>(line[1]) == 0xBB &&
            static_cast<unsigned char>(line[2]) == 0xBF)
            line.erase(0, 3);  // UTF-8 BOM
        std::string trimmed = detail::trim(line);
        if (trimmed.empty()) continue;
        if (trimmed[0] == '#') {
            std::string body = detail::trim(std::string_view(trimmed).substr(1));
            if (body.rfind("label:", 0) == 0) out.label = detail::trim(std::string_view(body).substr(6));
            if (body.rfind("units:", 0) == 0) out.units = detail::trim(std::string_view(body).substr(6));
            continue;
        }
        std::vector<std::string> fields = detail::split_fields(trimmed, options.delimiter);
        if (!have_header) {
            auto find_col = [&](const std::string& name) -> std::size_t {
                for (std::size_t i = 0; i < fields.size(); ++i)
                    if (fields[i] == name) return i;
                fail(errc::missing_column, "column '" + name + "' not found in '" + path + "'");
                return 0;
            };
            time_idx = find_col(options.time_column);
            value_idx = find_col(options.value_column);
            n_cols = fields.size();
            have_header = true;
            continue;
        }
        if (fields.size() < n_cols)
            fail(errc::parse_failure, "line " + std::to_string(line_no) + ": expected " +
                                          std::to_string(n_cols) + " fields, got " + std::to_string(fields.size()));
        double t = detail::parse_double(fields[time_idx], line_no);
        double v = detail::parse_double(fields[value_idx], line_no);
        if (!std::isfinite(v) || !std::isfinite(t))
            fail(errc::non_finite_value, "line " + std::to_string(line_no) + ": non-finite sample");
        if (!times.empty() && !(t > times.back()))
            fail(errc::non_monotone_time, "line " + std::to_string(line_no) + ": timestamps not strictly increasing");
        times.push_back(t);
        out.values.push_back(v);
    }
    if (!have_header) fail(errc::missing_column, "no header row in '" + path + "'");
    if (times.size() < 2) fail(errc::too_few_rows, "'" + path + "' has fewer than 2 data rows");

    std::vector<double> intervals(times.size() - 1);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) intervals[i] = times[i + 1] - times[i];
    std::vector<double> sorted = intervals;
    std::sort(sorted.begin(), sorted.end());
    double median = sorted[(sorted.size() - 1) / 2];
    for (std::size_t i = 0; i < intervals.size(); ++i) {
        if (std::abs(intervals[i] - median) > options.uniform_tolerance * median)
            fail(errc::non_uniform_sampling,
                 "'" + path + "': interval at row " + std::to_string(i + 1) + " deviates from the median step by more than " +
                     format_g17(options.uniform_tolerance * 100.0) + "%; resample explicitly");
    }
    out.t0 = times.front();
    out.dt = median;
    return out;
}

inline void save_csv(const TimeSeries& x, const std::string& path, char delimiter = ',') {
    std::ofstream out(path);
    if (!out) fail(errc::missing_file, "cannot write '" + path + "'");
    if (!x.label.empty()) out << "# label: " << x.label << "\n";
    if (!x.units.empty()) out << "# units: " << x.units << "\n";
    out << "time" << delimiter << "value\n";
    for (std::size_t n = 0; n < x.values.size(); ++n)
        out << format_g17(x.time_at(n)) << delimiter << format_g17(x.values[n]) << "\n";
}

// ---------------------------------------------------------------------------
// Alignment

// Decimates every series onto the grid of the coarsest one, restricted to the
// common overlap window. Each output sample is the input sample nearest in
// time (ties to the earlier sample); values are selected, never interpolated.
inline SeriesSet align_to_coarsest(const std::vector<TimeSeries>& raw) {
    if (raw.empty()) fail(errc::too_few_series, "align_to_coarsest needs at least one series");
    for (const auto& s : raw) validate_series(s);

    std::size_t coarse = 0;
    for (std::size_t i = 1; i < raw.size(); ++i)
        if (raw[i].dt > raw[coarse].dt) coarse = i;
    const TimeSeries& ref = raw[coarse];

    double start = raw[0].t0, end = raw[0].end_time();
    for (const auto& s : raw) {
        start = std::max(start, s.t0);
        end = std::min(end, s.end_time());
    }
    if (!(start <= end)) fail(errc::empty_overlap, "series time ranges do not overlap");

    const double guard = 1e-9;  // grid-boundary slack in units of ref.dt
    long n_first = static_cast<long>(std::ceil((start - ref.t0) / ref.dt - guard));
    long n_last = static_cast<long>(std::floor((end - ref.t0) / ref.dt + guard));
    if (n_last - n_first + 1 < 2) fail(errc::empty_overlap, "overlap window holds fewer than 2 coarse-grid samples");

    SeriesSet out;
    out.entries.reserve(raw.size());
    for (const auto& s : raw) {
        TimeSeries aligned;
        aligned.label = s.label;
        aligned.units = s.units;
        aligned.dt = ref.dt;
        aligned.t0 = ref.t0 + static_cast<double>(n_first) * ref.dt;
        aligned.values.reserve(static_cast<std::size_t>(n_last - n_first + 1));
        for (long n = n_first; n <= n_last; ++n) {
            double target = ref.t0 + static_cast<double>(n) * ref.dt;
            double u = (target - s.t0) / s.dt;
            long i = static_cast<long>(std::ceil(u - 0.5));  // nearest, ties to earlier
            i = std::clamp<long>(i, 0, static_cast<long>(s.values.size()) - 1);
            aligned.values.push_back(s.values[static_cast<std::size_t>(i)]);
        }
        out.entries.push_back(std::move(aligned));
    }
    return out;
}

// Drops samples in the first `seconds` of the record (drift-settling cut).
inline TimeSeries trim_start(const TimeSeries& x, double seconds) {
    if (seconds <= 0.0) return x;
    std::size_t skip = static_cast<std::size_t>(std::ceil(seconds / x.dt - 1e-9));
    if (skip >= x.values.size())
        fail(errc::invalid_series, "trim window removes the whole series");
    TimeSeries out = x;
    out.t0 = x.time_at(skip);
    out.values.assign(x.values.begin() + static_cast<long>(skip), x.values.end());
    return out;
}

}  // namespace wavan
