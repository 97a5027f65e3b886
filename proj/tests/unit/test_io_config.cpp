#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>

#include "bolab/config.hpp"
#include "bolab/io.hpp"
#include "bolab/random.hpp"
#include "bolab/spectral.hpp"

using namespace bolab;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("bolab-test-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::string& s) {
    std::ofstream out(p, std::ios::binary);
    out << s;
}

}  // namespace

TEST_CASE("binary field round trip") {
    const fs::path dir = scratch_dir("bin");
    const Grid g = Grid::make(12.5, 128);
    std::mt19937_64 rng(1);
    const RealField u = band_limited_noise(g, rng, 3.0);
    write_field_binary(dir / "u.bin", u);
    const RealField v = read_field_binary(dir / "u.bin");
    CHECK(v.grid().half_length() == 12.5);
    CHECK(v.values() == u.values());
    CHECK(fs::file_size(dir / "u.bin") == 32 + 8 * 128);
    CHECK(slurp(dir / "u.bin").substr(0, 8) == "BOLABFLD");

    const ComplexField z = project_plus(u);
    write_field_binary(dir / "z.bin", z);
    const ComplexField w = read_complex_field_binary(dir / "z.bin");
    CHECK(max_abs(w - z) == 0.0);
    CHECK_THROWS_AS(read_field_binary(dir / "z.bin"), IoError);

    std::string bytes = slurp(dir / "u.bin");
    spit(dir / "short.bin", bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_field_binary(dir / "short.bin"), IoError);
    bytes[0] = 'X';
    spit(dir / "magic.bin", bytes);
    CHECK_THROWS_AS(read_field_binary(dir / "magic.bin"), IoError);
    CHECK_THROWS_AS(read_field_binary(dir / "missing.bin"), IoError);
}

TEST_CASE("text field round trip") {
    const fs::path dir = scratch_dir("txt");
    const Grid g = Grid::make(3.0, 64);
    std::mt19937_64 rng(2);
    const RealField u = band_limited_noise(g, rng, 3.0);
    write_field_text(dir / "u.txt", u);
    const RealField v = read_field_text(dir / "u.txt");
    CHECK(max_abs(v - u) == 0.0);

    spit(dir / "bad.txt", "# bolab-field L=1 n=8\n0 1\n");
    CHECK_THROWS_AS(read_field_text(dir / "bad.txt"), IoError);
}

TEST_CASE("soliton parameter files") {
    const SolitonParams p = parse_soliton_params("# two\nspeeds = [1, 2]\nphases = [0.5, -1]\nt = 3\n");
    CHECK(p.speeds == std::vector<double>{1.0, 2.0});
    CHECK(p.phases == std::vector<double>{0.5, -1.0});
    CHECK(p.time == 3.0);
    CHECK(parse_soliton_params("speeds = [2]").phases == std::vector<double>{0.0});

    try {
        parse_soliton_params("speeds = [1]\nbogus = 2\n", "p.txt");
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(e.line() == 2);
        CHECK(std::string(e.what()).find("p.txt:2") != std::string::npos);
    }
    CHECK_THROWS_AS(parse_soliton_params("speeds = [1]\nspeeds = [2]\n"), IoError);
    CHECK_THROWS_AS(parse_soliton_params("phases = [1]\n"), IoError);
    CHECK_THROWS_AS(parse_soliton_params("speeds = [2, 1]\n"), std::exception);
}

TEST_CASE("real lists and grid specs") {
    CHECK(parse_real_list("1,2.5, 3") == std::vector<double>{1.0, 2.5, 3.0});
    CHECK_THROWS_AS(parse_real_list("1,,2"), std::invalid_argument);
    CHECK_THROWS_AS(parse_real_list("a"), std::invalid_argument);
    CHECK(parse_grid_spec("512:16384") == std::pair<double, std::size_t>{512.0, 16384});
    CHECK_THROWS(parse_grid_spec("512"));
    CHECK_THROWS(parse_grid_spec("512:-3"));
}

TEST_CASE("tolerances") {
    Tolerances t = Tolerances::defaults();
    CHECK(t.get("el_residual") == 1e-5);
    apply_tolerance_overrides(t, "# looser\nel_residual = 2e-5\n");
    CHECK(t.get("el_residual") == 2e-5);
    CHECK_THROWS(t.get("nonexistent"));
    try {
        apply_tolerance_overrides(t, "el_residual = 1\nnot_a_tolerance = 3\n", "tol.txt");
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS(apply_tolerance_overrides(t, "el_residual = abc\n"));
    CHECK(t.to_json().contains("el_residual"));
}

TEST_CASE("experiment configs") {
    const ExperimentConfig c = parse_config("subcommand = evolve\ngrid = 256:4096\nspeeds = 1,2\nT = 5\nseed = 9\n");
    CHECK(c.subcommand == "evolve");
    CHECK(*c.half_length == 256.0);
    CHECK(*c.points == 4096);
    CHECK(c.speeds == std::vector<double>{1.0, 2.0});
    CHECK(*c.final_time == 5.0);
    CHECK(c.seed == 9);

    const ExperimentConfig same = parse_config("seed = 9\nT = 5\nspeeds = 1,2\ngrid = 256:4096\nsubcommand = evolve\n");
    CHECK(c.hash() == same.hash());
    CHECK(c.hash().size() == 16);
    const ExperimentConfig other = parse_config("subcommand = evolve\ngrid = 256:4096\nspeeds = 1,2\nT = 6\nseed = 9\n");
    CHECK(c.hash() != other.hash());

    try {
        parse_config("subcommand = evolve\nspeed = 1\n", "run.cfg");
        FAIL("expected an error");
    } catch (const IoError& e) {
        CHECK(e.line() == 2);
    }
    CHECK_THROWS_AS(parse_config("grid = 1:2\ngrid = 1:4\n"), IoError);
}

TEST_CASE("hash and json output") {
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");

    const fs::path dir = scratch_dir("json");
    nlohmann::json a = {{"b", 1}, {"a", {1.5, 2.5}}};
    nlohmann::json b = {{"a", {1.5, 2.5}}, {"b", 1}};
    write_json(dir / "nested/a.json", a);
    write_json(dir / "b.json", b);
    CHECK(slurp(dir / "nested/a.json") == slurp(dir / "b.json"));
    CHECK(slurp(dir / "b.json").back() == '\n');
}

TEST_CASE("csv writers") {
    const fs::path dir = scratch_dir("csv");
    write_spectrum_csv(dir / "s.csv", {-1.5, 0.0, 2.0});
    const std::string s = slurp(dir / "s.csv");
    CHECK(s.rfind("index,eigenvalue\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 4);

    write_trace_csv(dir / "t.csv", {0.0, 1.0}, {{1, 2, 3, 4}, {1, 2, 3, 4}}, {});
    const std::string t = slurp(dir / "t.csv");
    CHECK(t.rfind("t,H0,H1,H2,H3,distance\n", 0) == 0);
}
