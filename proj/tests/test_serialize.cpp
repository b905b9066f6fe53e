#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "nsfilter/errors.hpp"
#include "nsfilter/serialize.hpp"

using namespace nsfilter;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("nsfilter_serialize_" + tag);
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

SpectralField sample_field(GridPtr grid, std::uint64_t seed) {
    GaussianRng rng(seed);
    return random_smooth_state(std::move(grid), rng, 1.3);
}

std::string first_data_line(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] != '#') return line;
    }
    return "";
}

std::vector<std::string> comment_lines(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line[0] == '#') lines.push_back(line);
    }
    return lines;
}

} // namespace

TEST_CASE("field files round trip bitwise and embed provenance comments") {
    TempDir dir("field");
    const ExperimentConfig config;
    GridPtr grid = make_grid(32, 2.0);
    const SpectralField f = sample_field(grid, 5);

    const std::string path = dir.file("state.csv");
    write_field_csv(path, f, config);

    const SpectralField back = read_field_csv(path, grid);
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(back[i] == f[i]);
    CHECK(back.kind() == FieldKind::generic);

    CHECK(first_data_line(path) == "k1,k2,re,im");
    const std::vector<std::string> comments = comment_lines(path);
    REQUIRE(!comments.empty());
    CHECK(comments.front() == std::string("# nsfilter ") + kVersion);
    bool has_kind = false, has_config = false;
    for (const std::string& c : comments) {
        if (c == "# file=field") has_kind = true;
        if (c == "# grid.n=32") has_config = true;
    }
    CHECK(has_kind);
    CHECK(has_config);
}

TEST_CASE("trajectory files round trip with contiguous steps") {
    TempDir dir("traj");
    const ExperimentConfig config;
    GridPtr grid = make_grid(32, 2.0);

    std::vector<TrajectoryEntry> entries;
    for (long j = 0; j <= 2; ++j)
        entries.push_back({j, 0.5 * j, sample_field(grid, 10 + j)});

    const std::string path = dir.file("truth.csv");
    write_trajectory_csv(path, entries, config);
    CHECK(first_data_line(path) == "step,time,k1,k2,re,im");

    const std::vector<TrajectoryEntry> back = read_trajectory_csv(path, grid);
    REQUIRE(back.size() == entries.size());
    for (std::size_t j = 0; j < back.size(); ++j) {
        CHECK(back[j].step == entries[j].step);
        CHECK(back[j].time == entries[j].time);
        for (std::size_t i = 0; i < back[j].state.size(); ++i)
            CHECK(back[j].state[i] == entries[j].state[i]);
    }
}

TEST_CASE("observation files keep both the draw and the realization") {
    TempDir dir("obs");
    const ExperimentConfig config;
    GridPtr grid = make_grid(32, 2.0);

    NoiseModel noise;
    noise.grid = grid;
    noise.cutoff = Cutoff::multiple_of_lambda1(4.0);
    GaussianRng rng(77);
    std::vector<Observation> observations;
    for (long j = 1; j <= 3; ++j)
        observations.push_back(observe(sample_field(grid, 20 + j), j, noise, rng));

    const std::string path = dir.file("observations.csv");
    write_observations_csv(path, observations, 0.5, config);
    CHECK(first_data_line(path) == "step,time,k1,k2,y_re,y_im,xi_re,xi_im");

    const std::vector<Observation> back = read_observations_csv(path, grid);
    REQUIRE(back.size() == observations.size());
    for (std::size_t j = 0; j < back.size(); ++j) {
        CHECK(back[j].step == observations[j].step);
        for (std::size_t i = 0; i < back[j].y.size(); ++i) {
            CHECK(back[j].y[i] == observations[j].y[i]);
            CHECK(back[j].xi[i] == observations[j].xi[i]);
        }
    }
}

TEST_CASE("diagnostics headers match the published schemas exactly") {
    TempDir dir("records");
    const ExperimentConfig config;

    StepRecord plain;
    plain.step = 0;
    plain.has_bounds = true;
    plain.lower_bound = 0.25;
    plain.upper_bound = 1.5;

    SUBCASE("discrete, no tracked modes") {
        const std::string path = dir.file("filter.csv");
        write_step_records_csv(path, {plain}, false, config);
        CHECK(first_data_line(path) ==
              "step,time,err_sq_H0,err_H1,lower_bound,upper_bound");
    }
    SUBCASE("continuous with one tracked mode") {
        StepRecord rec = plain;
        rec.has_bounds = false;
        rec.has_rel_err = true;
        rec.rel_err_l2 = 0.125;
        ModeSample mode;
        mode.k1 = 1;
        mode.k2 = 0;
        mode.truth = Complex{0.5, -0.25};
        mode.estimate = Complex{0.125, 0.0};
        rec.modes.push_back(mode);
        const std::string path = dir.file("filter.csv");
        write_step_records_csv(path, {rec}, true, config);
        CHECK(first_data_line(path) ==
              "step,time,err_sq_H0,err_H1,lower_bound,upper_bound,rel_err_l2,"
              "k1,k2,truth_re,truth_im,est_re,est_im,obs_re,obs_im");

        const CsvTable table = read_csv_table(path);
        REQUIRE(table.rows.size() == 1);
        const auto& row = table.rows[0];
        REQUIRE(row.size() == 15);
        CHECK(row[4] == "");     // lower bound not applicable
        CHECK(row[5] == "");     // upper bound not applicable
        CHECK(row[6] == "0.125");
        CHECK(row[9] == "0.5");
        CHECK(row[13] == "");    // no observation at this step
        CHECK(row[14] == "");
    }
}

TEST_CASE("the raw table reader splits cells and skips comments") {
    TempDir dir("table");
    const std::string path = dir.file("table.csv");
    {
        std::ofstream out(path);
        out << "# comment\n# another\ncol_a,col_b\n1,2\n,\n3,\n";
    }
    const CsvTable table = read_csv_table(path);
    CHECK(table.columns == std::vector<std::string>{"col_a", "col_b"});
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0] == std::vector<std::string>{"1", "2"});
    CHECK(table.rows[1] == std::vector<std::string>{"", ""});
    CHECK(table.rows[2] == std::vector<std::string>{"3", ""});

    CHECK_THROWS_AS(read_csv_table(dir.file("missing.csv")), IoError);

    const std::string empty = dir.file("empty.csv");
    { std::ofstream out(empty); out << "# only comments\n"; }
    CHECK_THROWS_AS(read_csv_table(empty), SchemaError);
}

TEST_CASE("structural defects raise schema errors that name the file") {
    TempDir dir("defects");
    const ExperimentConfig config;
    GridPtr big = make_grid(32, 2.0);
    GridPtr small = make_grid(16, 2.0);

    SUBCASE("mode outside the target grid") {
        SpectralField f(big, FieldKind::vorticity);
        f.at(10, 0) = Complex{1.0, 0.0};
        f.at(-10, 0) = Complex{1.0, 0.0};
        const std::string path = dir.file("wide.csv");
        write_field_csv(path, f, config);
        CHECK_THROWS_AS(read_field_csv(path, small), SchemaError);
    }
    SUBCASE("wrong header") {
        const std::string path = dir.file("odd.csv");
        { std::ofstream out(path); out << "a,b,c\n1,2,3\n"; }
        CHECK_THROWS_AS(read_field_csv(path, big), SchemaError);
    }
    SUBCASE("wrong cell count") {
        const std::string path = dir.file("short.csv");
        { std::ofstream out(path); out << "k1,k2,re,im\n1,0,0.5\n"; }
        CHECK_THROWS_AS(read_field_csv(path, big), SchemaError);
    }
    SUBCASE("malformed number") {
        const std::string path = dir.file("bad.csv");
        { std::ofstream out(path); out << "k1,k2,re,im\n1,0,zero,0\n"; }
        try {
            read_field_csv(path, big);
            FAIL("expected SchemaError");
        } catch (const SchemaError& e) {
            CHECK(std::string(e.what()).find(path) != std::string::npos);
            CHECK(std::string(e.what()).find("zero") != std::string::npos);
        }
    }
    SUBCASE("trailing garbage in a numeric cell") {
        const std::string path = dir.file("garbage.csv");
        { std::ofstream out(path); out << "k1,k2,re,im\n1,0,0.5x,0\n"; }
        CHECK_THROWS_AS(read_field_csv(path, big), SchemaError);
    }
    SUBCASE("steps out of order") {
        const std::string path = dir.file("skip.csv");
        {
            std::ofstream out(path);
            out << "step,time,k1,k2,re,im\n0,0,1,0,0.5,0\n2,1,1,0,0.5,0\n";
        }
        CHECK_THROWS_AS(read_trajectory_csv(path, big), SchemaError);
    }
}
