// wavan - wavelet-based noise analysis for long time series.
//
// Subcommands: synth, cwt, spectrum, coherence, correlate, vartransform.
// Every run writes its resolved configuration next to the outputs; re-running
// with --config <resolved_config.json> reproduces the outputs bit-exactly.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wavan/common.hpp"
#include "wavan/correlate.hpp"
#include "wavan/io.hpp"
#include "wavan/spectral.hpp"
#include "wavan/svg.hpp"
#include "wavan/synth.hpp"
#include "wavan/timeseries.hpp"
#include "wavan/vartransform.hpp"
#include "wavan/wavelet.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace wavan;

namespace {

struct RunConfig {
    std::string command;
    std::vector<std::string> inputs;
    std::string out = "wavan_out";
    std::string basis = "haar";  // haar | morlet | both (correlate only)
    double epsilon = 5.0;
    std::string normalization = "unit";  // unit | paper
    std::string scales = "log:48";       // log:COUNT | full
    int max_k = 0;                       // 0 = no cap
    int welch_segments = 8;
    double welch_overlap = 0.5;
    std::string window = "hann";  // hann | rect
    bool coi_only = true;
    double trim_start = 0.0;
    bool svg = false;
    std::uint64_t seed = 42;
    std::string time_column = "time";
    std::string value_column = "value";
    std::string delimiter = ",";
    std::string recipe;  // synth: recipe file
    std::string preset;  // synth: preset name
    std::size_t synth_n = 8192;
    double synth_dt = 1.0;
    bool all_pairs = false;      // vartransform: summary over every ordered pair
    bool unit_variance = false;  // vartransform: rescale x' to unit variance
};

json config_to_json(const RunConfig& c) {
    json j;
    j["command"] = c.command;
    j["inputs"] = c.inputs;
    j["out"] = c.out;
    j["basis"] = c.basis;
    j["epsilon"] = c.epsilon;
    j["normalization"] = c.normalization;
    j["scales"] = c.scales;
    j["max_k"] = c.max_k;
    j["welch_segments"] = c.welch_segments;
    j["welch_overlap"] = c.welch_overlap;
    j["window"] = c.window;
    j["coi_only"] = c.coi_only;
    j["trim_start"] = c.trim_start;
    j["svg"] = c.svg;
    j["seed"] = c.seed;
    j["time_column"] = c.time_column;
    j["value_column"] = c.value_column;
    j["delimiter"] = c.delimiter;
    j["recipe"] = c.recipe;
    j["preset"] = c.preset;
    j["synth_n"] = c.synth_n;
    j["synth_dt"] = c.synth_dt;
    j["all_pairs"] = c.all_pairs;
    j["unit_variance"] = c.unit_variance;
    return j;
}

RunConfig config_from_json(const json& j) {
    RunConfig c;
    try {
        c.command = j.value("command", std::string{});
        c.inputs = j.value("inputs", std::vector<std::string>{});
        c.out = j.value("out", c.out);
        c.basis = j.value("basis", c.basis);
        c.epsilon = j.value("epsilon", c.epsilon);
        c.normalization = j.value("normalization", c.normalization);
        c.scales = j.value("scales", c.scales);
        c.max_k = j.value("max_k", c.max_k);
        c.welch_segments = j.value("welch_segments", c.welch_segments);
        c.welch_overlap = j.value("welch_overlap", c.welch_overlap);
        c.window = j.value("window", c.window);
        c.coi_only = j.value("coi_only", c.coi_only);
        c.trim_start = j.value("trim_start", c.trim_start);
        c.svg = j.value("svg", c.svg);
        c.seed = j.value("seed", c.seed);
        c.time_column = j.value("time_column", c.time_column);
        c.value_column = j.value("value_column", c.value_column);
        c.delimiter = j.value("delimiter", c.delimiter);
        c.recipe = j.value("recipe", c.recipe);
        c.preset = j.value("preset", c.preset);
        c.synth_n = j.value("synth_n", c.synth_n);
        c.synth_dt = j.value("synth_dt", c.synth_dt);
        c.all_pairs = j.value("all_pairs", c.all_pairs);
        c.unit_variance = j.value("unit_variance", c.unit_variance);
    } catch (const json::exception& e) {
        fail(errc::invalid_config, std::string("malformed config: ") + e.what());
    }
    return c;
}

int exit_code_for(errc code) {
    switch (code) {
        case errc::invalid_config:
            return 2;
        case errc::missing_file:
        case errc::parse_failure:
            return 3;
        case errc::missing_column:
        case errc::non_monotone_time:
        case errc::too_few_rows:
        case errc::non_finite_value:
        case errc::non_uniform_sampling:
        case errc::bad_recipe:
        case errc::invalid_series:
            return 4;
        case errc::empty_overlap:
        case errc::too_few_series:
        case errc::unaligned_inputs:
        case errc::length_mismatch:
        case errc::dt_mismatch:
        case errc::grid_mismatch:
        case errc::grid_too_long:
        case errc::segment_too_short:
        case errc::single_segment:
        case errc::empty_matrix:
            return 5;
        default:
            return 6;
    }
}

WaveletBasis basis_from_config(const RunConfig& c, bool allow_both = false) {
    WaveletBasis b;
    if (c.basis == "haar")
        b.kind = BasisKind::haar;
    else if (c.basis == "morlet")
        b.kind = BasisKind::morlet;
    else if (!(allow_both && c.basis == "both"))
        fail(errc::invalid_config, "basis must be 'haar' or 'morlet' (got '" + c.basis + "')");
    b.epsilon = c.epsilon;
    if (c.normalization == "unit")
        b.normalization = Normalization::unit_norm;
    else if (c.normalization == "paper")
        b.normalization = Normalization::paper_exact;
    else
        fail(errc::invalid_config, "normalization must be 'unit' or 'paper'");
    validate_basis(b);
    return b;
}

ScaleGrid grid_from_config(const RunConfig& c, std::size_t n, double dt) {
    if (c.max_k != 0 && c.max_k % 2 != 0)
        fail(errc::invalid_config, "--max-k must be even (got " + std::to_string(c.max_k) + ")");
    if (c.scales == "full") {
        ScaleGrid g = full_scale_grid(n, dt);
        if (c.max_k > 0) {
            ScaleGrid capped;
            capped.dt = g.dt;
            capped.mode = g.mode;
            for (int k : g.k_values)
                if (k <= c.max_k) capped.k_values.push_back(k);
            if (capped.k_values.empty()) fail(errc::invalid_config, "--max-k leaves no scales");
            return capped;
        }
        return g;
    }
    if (c.scales.rfind("log:", 0) == 0) {
        int count = 0;
        try {
            count = std::stoi(c.scales.substr(4));
        } catch (...) {
            fail(errc::invalid_config, "cannot parse scale count in '" + c.scales + "'");
        }
        return log_scale_grid(n, dt, count, c.max_k);
    }
    fail(errc::invalid_config, "--scales must be 'full' or 'log:COUNT' (got '" + c.scales + "')");
    return {};
}

WelchParams welch_from_config(const RunConfig& c) {
    WelchParams p;
    p.segments = c.welch_segments;
    p.overlap = c.welch_overlap;
    if (c.window == "hann")
        p.window = WindowKind::hann;
    else if (c.window == "rect")
        p.window = WindowKind::rect;
    else
        fail(errc::invalid_config, "window must be 'hann' or 'rect'");
    return p;
}

TimeSeries load_input(const RunConfig& c, const std::string& path) {
    CsvOptions options;
    options.time_column = c.time_column;
    options.value_column = c.value_column;
    if (c.delimiter.size() != 1) fail(errc::invalid_config, "delimiter must be a single character");
    options.delimiter = c.delimiter[0];
    TimeSeries x = load_csv(path, options);
    if (c.trim_start > 0.0) x = trim_start(x, c.trim_start);
    return x;
}

void prepare_out(const RunConfig& c) {
    std::error_code ec;
    fs::create_directories(c.out, ec);
    if (ec) fail(errc::missing_file, "cannot create output directory '" + c.out + "'");
    std::ofstream f(fs::path(c.out) / "resolved_config.json");
    if (!f) fail(errc::missing_file, "cannot write resolved config");
    f << config_to_json(c).dump(2) << "\n";
}

void write_text(const fs::path& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) fail(errc::missing_file, "cannot write '" + path.string() + "'");
    f << content;
}

// ---------------------------------------------------------------------------

SeriesSet load_aligned_set(const RunConfig& cfg) {
    if (cfg.inputs.size() < 2) fail(errc::too_few_series, "need at least 2 input series");
    std::vector<TimeSeries> raw;
    raw.reserve(cfg.inputs.size());
    for (const auto& path : cfg.inputs) raw.push_back(load_input(cfg, path));
    SeriesSet set = align_to_coarsest(raw);
    json report = json::array();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        json r;
        r["label"] = raw[i].label;
        r["input_samples"] = raw[i].size();
        r["aligned_samples"] = set.entries[i].size();
        r["dropped_samples"] = raw[i].size() - std::min(raw[i].size(), set.entries[i].size());
        report.push_back(r);
        std::printf("aligned %s: %zu -> %zu samples (dt %s -> %s)\n", raw[i].label.c_str(),
                    raw[i].size(), set.entries[i].size(), format_g17(raw[i].dt).c_str(),
                    format_g17(set.dt()).c_str());
    }
    write_text(fs::path(cfg.out) / "alignment_report.json", report.dump(2) + "\n");
    return set;
}

int cmd_synth(const RunConfig& cfg) {
    prepare_out(cfg);
    std::vector<NoiseRecipe> recipes;
    if (!cfg.recipe.empty()) {
        recipes.push_back(load_recipe(cfg.recipe));
    } else if (cfg.preset == "fluctuator_bump") {
        recipes.push_back(preset_fluctuator_bump(cfg.synth_n, cfg.synth_dt, cfg.seed));
    } else if (cfg.preset == "telemetry8") {
        recipes = preset_telemetry8(cfg.synth_n, cfg.synth_dt, cfg.seed);
    } else if (cfg.preset.empty()) {
        fail(errc::invalid_config, "synth needs --recipe FILE or --preset {fluctuator_bump,telemetry8}");
    } else {
        fail(errc::invalid_config, "unknown preset '" + cfg.preset + "'");
    }
    json resolved = json::array();
    for (const auto& recipe : recipes) {
        TimeSeries series = compose(recipe);
        save_csv(series, (fs::path(cfg.out) / (series.label + ".csv")).string());
        resolved.push_back(recipe_to_json(recipe));
        std::printf("wrote %s.csv (%zu samples)\n", series.label.c_str(), series.size());
    }
    write_text(fs::path(cfg.out) / "recipes.json", resolved.dump(2) + "\n");
    return 0;
}

int cmd_cwt(const RunConfig& cfg) {
    if (cfg.inputs.size() != 1) fail(errc::invalid_config, "cwt takes exactly one input series");
    prepare_out(cfg);
    TimeSeries x = load_input(cfg, cfg.inputs[0]);
    WaveletBasis basis = basis_from_config(cfg);
    ScaleGrid grid = grid_from_config(cfg, x.size(), x.dt);
    WaveletMatrix w = cwt(x, basis, grid);
    std::string base = (fs::path(cfg.out) / ("cwt_" + x.label)).string();
    write_wavelet_matrix(w, base);
    WaveletSpectrum spec = wavelet_spectrum(w, cfg.coi_only);
    write_wavelet_spectrum(spec, base + "_spectrum.csv");
    if (cfg.svg) {
        std::vector<double> magnitude(w.coeff.size());
        for (std::size_t i = 0; i < w.coeff.size(); ++i) magnitude[i] = std::abs(w.coeff[i]);
        HeatmapOptions opt;
        opt.title = "|W| " + x.label + " (" + std::string(basis_name(basis.kind)) + ")";
        write_text(base + ".svg", render_heatmap(magnitude, w.n_samples, grid, w.coi_radii, opt));
    }
    std::printf("cwt %s: %zu translations x %zu scales\n", x.label.c_str(), w.n_samples, w.n_scales());
    return 0;
}

int cmd_spectrum(const RunConfig& cfg) {
    if (cfg.inputs.size() != 1) fail(errc::invalid_config, "spectrum takes exactly one input series");
    prepare_out(cfg);
    TimeSeries x = load_input(cfg, cfg.inputs[0]);
    WaveletBasis basis = basis_from_config(cfg);
    ScaleGrid grid = grid_from_config(cfg, x.size(), x.dt);
    Spectrum psd = welch_psd(x, welch_from_config(cfg));
    WaveletSpectrum wspec = wavelet_spectrum(cwt(x, basis, grid), cfg.coi_only);
    fs::path out(cfg.out);
    write_spectrum(psd, (out / ("psd_" + x.label + ".csv")).string());
    write_wavelet_spectrum(wspec, (out / ("wavelet_spectrum_" + x.label + ".csv")).string());
    if (cfg.svg) {
        CurveData psd_curve{"Welch PSD", "steelblue", psd.frequencies, psd.values};
        CurveData wav_curve{"wavelet spectrum (sigma^4)", "crimson", wspec.inv_lambda, wspec.sigma4};
        write_text(out / ("spectrum_" + x.label + ".svg"),
                   render_loglog_curves({psd_curve, wav_curve}, "spectra: " + x.label,
                                        "frequency or 1/lambda (1/s)", "power"));
    }
    std::printf("spectrum %s: %zu PSD bins, %zu wavelet scales\n", x.label.c_str(),
                psd.frequencies.size(), wspec.k_values.size());
    return 0;
}

int cmd_coherence(const RunConfig& cfg) {
    if (cfg.inputs.size() != 2) fail(errc::invalid_config, "coherence takes exactly two input series");
    prepare_out(cfg);
    TimeSeries x = load_input(cfg, cfg.inputs[0]);
    TimeSeries y = load_input(cfg, cfg.inputs[1]);
    WelchParams welch = welch_from_config(cfg);
    fs::path out(cfg.out);

    CrossSpectrum cross = cross_psd(x, y, welch);
    write_cross_spectrum(cross, (out / "cross_psd.csv").string());
    CoherenceSpectrum fourier = fourier_coherence(x, y, welch);
    write_coherence_spectrum(fourier, (out / "fourier_coherence.csv").string());

    WaveletBasis basis = basis_from_config(cfg);
    basis.kind = BasisKind::morlet;  // coherence is Morlet-only
    validate_basis(basis);
    ScaleGrid grid = grid_from_config(cfg, x.size(), x.dt);
    CoherenceMap map = wavelet_coherence(x, y, grid, basis);
    write_coherence_map(map, (out / "wavelet_coherence").string());
    if (cfg.svg) {
        HeatmapOptions opt;
        opt.title = "coherence^2 " + x.label + " vs " + y.label;
        write_text(out / "wavelet_coherence.svg",
                   render_heatmap(map.values, map.n_samples, map.grid, map.coi_radii, opt));
    }
    std::printf("coherence %s vs %s: %zu bins, map %zu x %zu\n", x.label.c_str(), y.label.c_str(),
                fourier.frequencies.size(), map.n_samples, map.grid.size());
    return 0;
}

int cmd_correlate(const RunConfig& cfg) {
    prepare_out(cfg);
    SeriesSet set = load_aligned_set(cfg);
    ScaleGrid grid = grid_from_config(cfg, set.length(), set.dt());
    std::vector<std::string> bases;
    if (cfg.basis == "both") {
        bases = {"haar", "morlet"};
    } else {
        basis_from_config(cfg);
        bases = {cfg.basis};
    }
    fs::path out_path = fs::path(cfg.out) / "correlation_grid.csv";
    bool append = false;
    for (const auto& name : bases) {
        RunConfig sub = cfg;
        sub.basis = name;
        WaveletBasis basis = basis_from_config(sub);
        CorrelationGrid grid_result = correlation_grid(set, basis, grid);
        write_correlation_grid(grid_result, out_path.string(), append);
        append = true;
        std::printf("correlate (%s): %zu pairs x up to %zu scales\n", name.c_str(),
                    grid_result.pairs.size(), grid.size());
    }
    return 0;
}

int cmd_vartransform(const RunConfig& cfg) {
    prepare_out(cfg);
    fs::path out(cfg.out);
    WaveletBasis basis = basis_from_config(cfg);
    if (cfg.all_pairs) {
        SeriesSet set = load_aligned_set(cfg);
        ScaleGrid grid = grid_from_config(cfg, set.length(), set.dt());
        std::vector<PeakVarianceRow> rows = peak_variance_summary(set, basis, grid);
        write_peak_summary(rows, (out / "peak_variance_summary.csv").string());
        std::printf("vartransform summary: %zu ordered pairs\n", rows.size());
        return 0;
    }
    if (cfg.inputs.size() != 2)
        fail(errc::invalid_config, "vartransform takes predictor and response series (or --all with >= 2 inputs)");
    SeriesSet set = load_aligned_set(cfg);
    const TimeSeries& x = set.entries[0];
    const TimeSeries& y = set.entries[1];
    ScaleGrid grid = grid_from_config(cfg, set.length(), set.dt());
    VarianceTransformResult result = variance_transform(x, y, basis, grid);
    TimeSeries x_prime = result.x_prime;
    if (cfg.unit_variance) {
        double sd = sample_std(x_prime);
        if (sd > 0.0)
            for (double& v : x_prime.values) v /= sd;
    }
    std::string tag = x.label + "_to_" + y.label;
    save_csv(x_prime, (out / ("xprime_" + tag + ".csv")).string());
    write_covariances(result.covariances, (out / ("covariances_" + tag + ".csv")).string());
    write_wavelet_spectrum(result.variance_spectrum_before, (out / ("spectrum_before_" + tag + ".csv")).string());
    write_wavelet_spectrum(result.variance_spectrum_after, (out / ("spectrum_after_" + tag + ".csv")).string());
    json peak;
    peak["predictor"] = x.label;
    peak["response"] = y.label;
    peak["peak_k"] = result.peak_k;
    peak["peak_inv_lambda_per_s"] = result.peak_inv_lambda;
    peak["r2_at_peak"] = result.r2_at_peak;
    write_text(out / ("peak_" + tag + ".json"), peak.dump(2) + "\n");
    std::printf("vartransform %s: peak 1/lambda %s (k=%d), r2 %s\n", tag.c_str(),
                format_g17(result.peak_inv_lambda).c_str(), result.peak_k,
                format_g17(result.r2_at_peak).c_str());
    return 0;
}

void add_common_options(CLI::App* cmd, RunConfig& cfg, std::string& config_path) {
    cmd->add_option("--config", config_path, "resolved-config JSON; replaces every other flag");
    cmd->add_option("--out", cfg.out, "output directory");
    cmd->add_option("--basis", cfg.basis, "wavelet basis: haar | morlet");
    cmd->add_option("--epsilon", cfg.epsilon, "Morlet Gaussian-window parameter (>= 5)");
    cmd->add_option("--normalization", cfg.normalization, "wavelet normalization: unit | paper");
    cmd->add_option("--scales", cfg.scales, "scale grid: log:COUNT | full");
    cmd->add_option("--max-k", cfg.max_k, "cap on the largest even width k (0 = none)");
    cmd->add_option("--welch-segments", cfg.welch_segments, "Welch segment count");
    cmd->add_option("--welch-overlap", cfg.welch_overlap, "Welch overlap fraction [0,1)");
    cmd->add_option("--window", cfg.window, "Welch window: hann | rect");
    cmd->add_option("--coi-only", cfg.coi_only, "restrict spectra to the cone of influence");
    cmd->add_option("--trim-start", cfg.trim_start, "drop the first SECONDS of each input");
    cmd->add_flag("--svg", cfg.svg, "also render SVG figures");
    cmd->add_option("--seed", cfg.seed, "PRNG seed (synthesis)");
    cmd->add_option("--time-column", cfg.time_column, "CSV time column name");
    cmd->add_option("--value-column", cfg.value_column, "CSV value column name");
    cmd->add_option("--delimiter", cfg.delimiter, "CSV delimiter");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"wavelet-based noise analysis for long time series"};
    app.require_subcommand(1);

    struct CommandSpec {
        std::string name;
        std::string help;
        int (*run)(const RunConfig&);
        int min_inputs, max_inputs;
    };
    const std::vector<CommandSpec> commands = {
        {"synth", "generate synthetic datasets from a recipe or preset", cmd_synth, 0, 0},
        {"cwt", "wavelet matrix, COI and wavelet spectrum of one series", cmd_cwt, 1, 1},
        {"spectrum", "Welch PSD and wavelet spectrum side by side", cmd_spectrum, 1, 1},
        {"coherence", "Fourier coherence and Morlet wavelet coherence map", cmd_coherence, 2, 2},
        {"correlate", "all-pairs scale-wise r^2 grid", cmd_correlate, 2, -1},
        {"vartransform", "wavelet variance transformation and peak summary", cmd_vartransform, 2, -1},
    };

    RunConfig cfg;
    std::string config_path;
    int (*selected)(const RunConfig&) = nullptr;
    std::string selected_name;

    for (const auto& spec : commands) {
        CLI::App* cmd = app.add_subcommand(spec.name, spec.help);
        add_common_options(cmd, cfg, config_path);
        if (spec.max_inputs != 0) {
            auto* opt = cmd->add_option("inputs", cfg.inputs, "input CSV series");
            if (spec.max_inputs > 0) opt->expected(spec.min_inputs, spec.max_inputs);
        }
        if (spec.name == "synth") {
            cmd->add_option("--recipe", cfg.recipe, "recipe JSON file");
            cmd->add_option("--preset", cfg.preset, "preset name: fluctuator_bump | telemetry8");
            cmd->add_option("--n", cfg.synth_n, "samples per preset series");
            cmd->add_option("--dt", cfg.synth_dt, "time step for preset series (s)");
        }
        if (spec.name == "vartransform") {
            cmd->add_flag("--all", cfg.all_pairs, "peak-variance summary over every ordered pair");
            cmd->add_flag("--unit-variance", cfg.unit_variance, "rescale x' to unit variance");
        }
        cmd->callback([&, spec] {
            selected = spec.run;
            selected_name = spec.name;
        });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        cfg.command = selected_name;
        if (!config_path.empty()) {
            std::ifstream in(config_path);
            if (!in) fail(errc::missing_file, "cannot open config '" + config_path + "'");
            json j;
            try {
                in >> j;
            } catch (const json::exception& e) {
                fail(errc::invalid_config, std::string("malformed config JSON: ") + e.what());
            }
            cfg = config_from_json(j);
            if (cfg.command != selected_name)
                fail(errc::invalid_config, "config was written by '" + cfg.command +
                                               "', not '" + selected_name + "'");
        }
        return selected(cfg);
    } catch (const Error& e) {
        json err;
        err["error"]["code"] = errc_name(e.code());
        err["error"]["message"] = e.what();
        err["error"]["exit"] = exit_code_for(e.code());
        std::cerr << err.dump() << "\n";
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        json err;
        err["error"]["code"] = "internal";
        err["error"]["message"] = e.what();
        err["error"]["exit"] = 1;
        std::cerr << err.dump() << "\n";
        return 1;
    }
}
