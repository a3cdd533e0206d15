#pragma once

#include <complex>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavan/common.hpp"
#include "wavan/correlate.hpp"
#include "wavan/spectral.hpp"
#include "wavan/synth.hpp"
#include "wavan/timeseries.hpp"
#include "wavan/vartransform.hpp"
#include "wavan/wavelet.hpp"

namespace wavan {

using json = nlohmann::json;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) fail(errc::missing_file, "cannot write '" + path + "'");
    return out;
}

inline json basis_json(const WaveletBasis& basis) {
    json j;
    j["basis"] = basis_name(basis.kind);
    if (basis.kind == BasisKind::morlet) j["epsilon"] = basis.epsilon;
    j["normalization"] = normalization_name(basis.normalization);
    return j;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Wavelet matrix export: CSV matrix (rows = translations, columns = widths)
// with a '#' metadata header and a JSON sidecar. Morlet matrices are written
// as separate magnitude and phase files.

inline void write_matrix_csv(const std::string& path, const std::vector<double>& values,
                             std::size_t n, const ScaleGrid& grid, const json& meta) {
    std::ofstream out = detail::open_out(path);
    for (auto it = meta.begin(); it != meta.end(); ++it)
        out << "# " << it.key() << ": "
            << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump()) << "\n";
    out << "tau_s";
    for (std::size_t s = 0; s < grid.size(); ++s) out << ",k=" << grid.k_values[s];
    out << "\n";
    for (std::size_t m = 0; m < n; ++m) {
        out << format_g17(static_cast<double>(m) * grid.dt);
        for (std::size_t s = 0; s < grid.size(); ++s) out << "," << format_g17(values[s * n + m]);
        out << "\n";
    }
}

inline json wavelet_matrix_meta(const WaveletMatrix& w) {
    json meta = detail::basis_json(w.basis);
    meta["dt"] = w.dt;
    meta["source"] = w.source_label;
    meta["n_samples"] = w.n_samples;
    meta["k_values"] = w.grid.k_values;
    meta["coi_radii"] = w.coi_radii;
    return meta;
}

inline void write_wavelet_matrix(const WaveletMatrix& w, const std::string& base_path) {
    json meta = wavelet_matrix_meta(w);
    std::vector<double> plane(w.coeff.size());
    if (w.basis.kind == BasisKind::haar) {
        for (std::size_t i = 0; i < w.coeff.size(); ++i) plane[i] = w.coeff[i].real();
        json m = meta;
        m["content"] = "value";
        write_matrix_csv(base_path + ".csv", plane, w.n_samples, w.grid, m);
    } else {
        for (std::size_t i = 0; i < w.coeff.size(); ++i) plane[i] = std::abs(w.coeff[i]);
        json m = meta;
        m["content"] = "magnitude";
        write_matrix_csv(base_path + "_magnitude.csv", plane, w.n_samples, w.grid, m);
        for (std::size_t i = 0; i < w.coeff.size(); ++i) plane[i] = std::arg(w.coeff[i]);
        m["content"] = "phase";
        write_matrix_csv(base_path + "_phase.csv", plane, w.n_samples, w.grid, m);
    }
    detail::open_out(base_path + ".json") << meta.dump(2) << "\n";
}

// ---------------------------------------------------------------------------
// Spectra

inline void write_spectrum(const Spectrum& s, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "# estimator: " << s.meta.estimator << "\n";
    out << "# segment_length: " << s.meta.segment_length << "\n";
    out << "# segments: " << s.meta.segments << "\n";
    out << "# overlap: " << format_g17(s.meta.overlap) << "\n";
    out << "# window: " << window_name(s.meta.window) << "\n";
    out << "frequency_hz,value\n";
    for (std::size_t i = 0; i < s.frequencies.size(); ++i)
        out << format_g17(s.frequencies[i]) << "," << format_g17(s.values[i]) << "\n";
}

inline void write_cross_spectrum(const CrossSpectrum& s, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "# estimator: " << s.meta.estimator << "\n";
    out << "# segment_length: " << s.meta.segment_length << "\n";
    out << "# segments: " << s.meta.segments << "\n";
    out << "# overlap: " << format_g17(s.meta.overlap) << "\n";
    out << "# window: " << window_name(s.meta.window) << "\n";
    out << "frequency_hz,re,im,magnitude,phase\n";
    for (std::size_t i = 0; i < s.frequencies.size(); ++i) {
        const auto v = s.values[i];
        out << format_g17(s.frequencies[i]) << "," << format_g17(v.real()) << ","
            << format_g17(v.imag()) << "," << format_g17(std::abs(v)) << ","
            << format_g17(std::arg(v)) << "\n";
    }
}

inline void write_wavelet_spectrum(const WaveletSpectrum& s, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    if (!s.dropped_scales.empty()) {
        out << "# dropped_scales:";
        for (int k : s.dropped_scales) out << " " << k;
        out << "\n";
    }
    out << "inv_lambda_per_s,k,sigma2,sigma4,n_used\n";
    for (std::size_t i = 0; i < s.k_values.size(); ++i)
        out << format_g17(s.inv_lambda[i]) << "," << s.k_values[i] << ","
            << format_g17(s.sigma2[i]) << "," << format_g17(s.sigma4[i]) << ","
            << s.n_used[i] << "\n";
}

inline void write_coherence_spectrum(const CoherenceSpectrum& s, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "frequency_hz,coherence,defined\n";
    for (std::size_t i = 0; i < s.frequencies.size(); ++i)
        out << format_g17(s.frequencies[i]) << "," << format_g17(s.values[i]) << ","
            << (s.defined[i] ? 1 : 0) << "\n";
}

// ---------------------------------------------------------------------------
// Coherence map and correlation grid

inline void write_coherence_map(const CoherenceMap& map, const std::string& base_path) {
    json meta = detail::basis_json(map.basis);
    meta["dt"] = map.dt;
    meta["series_x"] = map.label_x;
    meta["series_y"] = map.label_y;
    meta["n_samples"] = map.n_samples;
    meta["k_values"] = map.grid.k_values;
    meta["coi_radii"] = map.coi_radii;
    meta["smoothing_tau_per_lambda"] = map.smoothing.tau_per_lambda;
    meta["smoothing_scale_boxcar"] = map.smoothing.scale_boxcar;
    meta["content"] = "coherence_squared";
    write_matrix_csv(base_path + ".csv", map.values, map.n_samples, map.grid, meta);
    detail::open_out(base_path + ".json") << meta.dump(2) << "\n";
}

inline void write_correlation_grid(const CorrelationGrid& grid, const std::string& path,
                                   bool append = false) {
    std::ofstream out(path, append ? std::ios::app : std::ios::out);
    if (!out) fail(errc::missing_file, "cannot write '" + path + "'");
    if (!append) out << "var_a,var_b,basis,inv_lambda_per_s,r,r2,n_used,coi_fraction\n";
    for (const auto& pair : grid.pairs) {
        for (const auto& e : pair.correlation.entries) {
            out << grid.labels[pair.a] << "," << grid.labels[pair.b] << "," << grid.basis_label
                << "," << format_g17(e.inv_lambda) << "," << format_g17(e.r) << ","
                << format_g17(e.r2) << "," << e.n_used << "," << format_g17(e.coi_fraction)
                << "\n";
        }
    }
}

// ---------------------------------------------------------------------------
// Variance transformation

inline void write_covariances(const CovarianceVector& c, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "inv_lambda_per_s,k,c_re,c_im\n";
    for (std::size_t i = 0; i < c.k_values.size(); ++i)
        out << format_g17(c.inv_lambda[i]) << "," << c.k_values[i] << ","
            << format_g17(c.values[i].real()) << "," << format_g17(c.values[i].imag()) << "\n";
}

inline void write_peak_summary(const std::vector<PeakVarianceRow>& rows, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "predictor,response,peak_inv_lambda_per_s,peak_k,r2_at_peak\n";
    for (const auto& row : rows)
        out << row.predictor << "," << row.response << "," << format_g17(row.peak_inv_lambda)
            << "," << row.peak_k << "," << format_g17(row.r2_at_peak) << "\n";
}

// ---------------------------------------------------------------------------
// Noise recipes

inline json recipe_to_json(const NoiseRecipe& recipe) {
    json j;
    j["n"] = recipe.n;
    j["dt"] = recipe.dt;
    j["seed"] = recipe.seed;
    j["label"] = recipe.label;
    j["units"] = recipe.units;
    j["components"] = json::array();
    for (const auto& comp : recipe.components) {
        json c;
        if (const auto* rts = std::get_if<RtsComponent>(&comp)) {
            c["type"] = "rts";
            c["rate_up"] = rts->rate_up;
            c["rate_down"] = rts->rate_down;
            c["amplitude"] = rts->amplitude;
            if (rts->seed) c["seed"] = *rts->seed;
        } else if (const auto* col = std::get_if<ColoredComponent>(&comp)) {
            c["type"] = "colored";
            c["beta"] = col->beta;
            c["level"] = col->level;
            if (col->seed) c["seed"] = *col->seed;
        } else if (const auto* s = std::get_if<SinusoidComponent>(&comp)) {
            c["type"] = "sinusoid";
            c["frequency"] = s->frequency;
            c["amplitude"] = s->amplitude;
            c["phase"] = s->phase;
            if (s->burst) c["burst"] = {s->burst->first, s->burst->second};
        } else if (const auto* d = std::get_if<DriftComponent>(&comp)) {
            c["type"] = "drift";
            c["slope"] = d->slope;
        } else if (const auto* w = std::get_if<WhiteComponent>(&comp)) {
            c["type"] = "white";
            c["sigma"] = w->sigma;
            if (w->seed) c["seed"] = *w->seed;
        }
        j["components"].push_back(c);
    }
    return j;
}

inline NoiseRecipe recipe_from_json(const json& j) {
    NoiseRecipe recipe;
    try {
        recipe.n = j.at("n").get<std::size_t>();
        recipe.dt = j.at("dt").get<double>();
        recipe.seed = j.value("seed", std::uint64_t{0});
        recipe.label = j.value("label", std::string{});
        recipe.units = j.value("units", std::string{});
        for (const auto& c : j.value("components", json::array())) {
            const std::string type = c.at("type").get<std::string>();
            if (type == "rts") {
                RtsComponent rts;
                rts.rate_up = c.at("rate_up").get<double>();
                rts.rate_down = c.at("rate_down").get<double>();
                rts.amplitude = c.value("amplitude", 1.0);
                if (c.contains("seed")) rts.seed = c["seed"].get<std::uint64_t>();
                recipe.components.push_back(rts);
            } else if (type == "colored") {
                ColoredComponent col;
                col.beta = c.at("beta").get<double>();
                col.level = c.value("level", 1.0);
                if (c.contains("seed")) col.seed = c["seed"].get<std::uint64_t>();
                recipe.components.push_back(col);
            } else if (type == "sinusoid") {
                SinusoidComponent s;
                s.frequency = c.at("frequency").get<double>();
                s.amplitude = c.value("amplitude", 1.0);
                s.phase = c.value("phase", 0.0);
                if (c.contains("burst")) {
                    auto b = c["burst"];
                    s.burst = std::make_pair(b.at(0).get<double>(), b.at(1).get<double>());
                }
                recipe.components.push_back(s);
            } else if (type == "drift") {
                recipe.components.push_back(DriftComponent{c.at("slope").get<double>()});
            } else if (type == "white") {
                WhiteComponent w;
                w.sigma = c.at("sigma").get<double>();
                if (c.contains("seed")) w.seed = c["seed"].get<std::uint64_t>();
                recipe.components.push_back(w);
            } else {
                fail(errc::bad_recipe, "unknown component type '" + type + "'");
            }
        }
    } catch (const json::exception& e) {
        fail(errc::bad_recipe, std::string("malformed recipe: ") + e.what());
    }
    return recipe;
}

inline NoiseRecipe load_recipe(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(errc::missing_file, "cannot open '" + path + "'");
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        fail(errc::bad_recipe, std::string("malformed recipe JSON: ") + e.what());
    }
    return recipe_from_json(j);
}

}  // namespace wavan
