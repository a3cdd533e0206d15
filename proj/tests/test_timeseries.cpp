#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "oracles.hpp"
#include "test_util.hpp"
#include "wavan/timeseries.hpp"

using namespace wavan;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

}  // namespace

TEST_CASE("load_csv reads a plain file") {
    auto path = write_temp("ts_plain.csv", "time,value\n0,5\n1,6\n2,7\n");
    TimeSeries x = load_csv(path);
    REQUIRE(x.t0 == 0.0);
    REQUIRE(x.dt == 1.0);
    REQUIRE(x.values == std::vector<double>{5, 6, 7});
}

TEST_CASE("load_csv honors comments, metadata and delimiters") {
    auto path = write_temp("ts_meta.csv",
                           "# label: q_phase\n# units: rad\ntime;value;extra\n0;1;9\n0.5;2;9\n1.0;3;9\n");
    CsvOptions opt;
    opt.delimiter = ';';
    TimeSeries x = load_csv(path, opt);
    REQUIRE(x.label == "q_phase");
    REQUIRE(x.units == "rad");
    REQUIRE(x.dt == 0.5);
    REQUIRE(x.values.size() == 3);
}

TEST_CASE("load_csv error paths are distinct") {
    CHECK_THROWS_MATCHES(load_csv("/nonexistent/file.csv"), Error,
                         has_code(errc::missing_file));
    auto no_col = write_temp("ts_nocol.csv", "t,v\n0,1\n1,2\n");
    CHECK_THROWS_MATCHES(load_csv(no_col), Error, has_code(errc::missing_column));
    auto non_mono = write_temp("ts_mono.csv", "time,value\n0,1\n1,2\n1,3\n");
    CHECK_THROWS_MATCHES(load_csv(non_mono), Error, has_code(errc::non_monotone_time));
    auto short_file = write_temp("ts_short.csv", "time,value\n0,1\n");
    CHECK_THROWS_MATCHES(load_csv(short_file), Error, has_code(errc::too_few_rows));
    auto non_finite = write_temp("ts_nan.csv", "time,value\n0,1\n1,nan\n2,3\n");
    CHECK_THROWS_MATCHES(load_csv(non_finite), Error, has_code(errc::non_finite_value));
}

TEST_CASE("load_csv rejects 2% jitter against the median interval") {
    auto path = write_temp("ts_jitter.csv", "time,value\n0,1\n1.0,2\n2.02,3\n");
    CHECK_THROWS_MATCHES(load_csv(path), Error, has_code(errc::non_uniform_sampling));
    // the same file passes with a wider tolerance
    CsvOptions opt;
    opt.uniform_tolerance = 0.05;
    TimeSeries x = load_csv(path, opt);
    REQUIRE(x.dt == 1.0);
}

TEST_CASE("save_csv round-trips") {
    TimeSeries x;
    x.label = "probe";
    x.units = "mV";
    x.t0 = 2.5;
    x.dt = 0.25;
    x.values = {1.5, -2.25, 3.125, 0.0625};
    auto path = (std::filesystem::temp_directory_path() / "ts_roundtrip.csv").string();
    save_csv(x, path);
    TimeSeries y = load_csv(path);
    REQUIRE(y.label == x.label);
    REQUIRE(y.units == x.units);
    REQUIRE(y.t0 == x.t0);
    REQUIRE(y.dt == x.dt);
    REQUIRE(y.values == x.values);
}

TEST_CASE("mean, std and demean") {
    TimeSeries x;
    x.dt = 1.0;
    x.values = {1, 2, 3};
    REQUIRE(mean(x) == 2.0);
    REQUIRE(sample_std(x) == 1.0);
    TimeSeries d = demean(x);
    REQUIRE(d.values == std::vector<double>{-1, 0, 1});

    TimeSeries c;
    c.values = {4.5, 4.5, 4.5, 4.5};
    REQUIRE(sample_std(c) == 0.0);
    for (double v : demean(c).values) REQUIRE(v == 0.0);

    TimeSeries two;
    two.values = {0, 2};
    REQUIRE(mean(two) == 1.0);
    REQUIRE(sample_std(two) == Catch::Approx(std::sqrt(2.0)).epsilon(1e-15));
}

TEST_CASE("demean is idempotent") {
    TimeSeries x = oracle::gaussian_series(257, 0.5, 11);
    TimeSeries once = demean(x);
    TimeSeries twice = demean(once);
    for (std::size_t i = 0; i < x.size(); ++i)
        REQUIRE(twice.values[i] == Catch::Approx(once.values[i]).margin(1e-12));
}

TEST_CASE("align_to_coarsest decimates onto the coarse grid") {
    TimeSeries fine;
    fine.label = "fine";
    fine.dt = 1.0;
    fine.values = {0, 1, 2, 3, 4, 5, 6, 7, 8, 9};
    TimeSeries coarse;
    coarse.label = "coarse";
    coarse.dt = 2.0;
    coarse.values = {10, 11, 12, 13, 14};
    SeriesSet set = align_to_coarsest({fine, coarse});
    REQUIRE(set.length() == 5);
    REQUIRE(set.dt() == 2.0);
    REQUIRE(set.entries[0].values == std::vector<double>{0, 2, 4, 6, 8});
    REQUIRE(set.entries[1].values == coarse.values);
}

TEST_CASE("align_to_coarsest leaves a single series unchanged") {
    TimeSeries x = oracle::gaussian_series(33, 0.5, 5);
    SeriesSet set = align_to_coarsest({x});
    REQUIRE(set.entries[0].values == x.values);
    REQUIRE(set.entries[0].dt == x.dt);
}

TEST_CASE("align_to_coarsest leaves identically gridded series unchanged") {
    TimeSeries a = oracle::gaussian_series(64, 2.0, 6);
    TimeSeries b = oracle::gaussian_series(64, 2.0, 7);
    SeriesSet set = align_to_coarsest({a, b});
    REQUIRE(set.entries[0].values == a.values);
    REQUIRE(set.entries[1].values == b.values);
}

TEST_CASE("align_to_coarsest is idempotent and selects input samples") {
    TimeSeries a = oracle::gaussian_series(100, 0.7, 21);
    TimeSeries b = oracle::gaussian_series(41, 1.9, 22);
    b.t0 = 3.1;
    TimeSeries c = oracle::gaussian_series(150, 0.5, 23);
    c.t0 = -2.0;
    SeriesSet once = align_to_coarsest({a, b, c});
    SeriesSet twice = align_to_coarsest(once.entries);
    REQUIRE(once.length() == twice.length());
    for (std::size_t i = 0; i < once.size(); ++i)
        REQUIRE(once.entries[i].values == twice.entries[i].values);

    const std::vector<const TimeSeries*> originals{&a, &b, &c};
    for (std::size_t i = 0; i < once.size(); ++i)
        for (double v : once.entries[i].values) {
            bool found = false;
            for (double orig : originals[i]->values)
                if (orig == v) found = true;
            REQUIRE(found);
        }
}

TEST_CASE("align_to_coarsest rejects disjoint ranges") {
    TimeSeries a = oracle::gaussian_series(10, 1.0, 1);
    TimeSeries b = oracle::gaussian_series(10, 1.0, 2);
    b.t0 = 100.0;
    CHECK_THROWS_MATCHES(align_to_coarsest({a, b}), Error,
                         has_code(errc::empty_overlap));
}

TEST_CASE("trim_start drops the leading window") {
    TimeSeries x = oracle::gaussian_series(100, 0.5, 3);
    TimeSeries t = trim_start(x, 10.0);
    REQUIRE(t.size() == 80);
    REQUIRE(t.t0 == Catch::Approx(10.0));
    REQUIRE(t.values.front() == x.values[20]);
}
