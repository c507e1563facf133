#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"

namespace fs = std::filesystem;
using fkg::cli::run_cli;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result call(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::path(FKG_TEST_TMP) / name;
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

int count_lines(const fs::path& p) {
    std::ifstream in(p);
    int n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
}

}  // namespace

TEST_CASE("run --preset 1 --M 200 writes the full file set") {
    const auto dir = scratch("run1");
    const auto r = call({"run", "--preset", "1", "--M", "200", "--out", dir.string()});
    CHECK(r.code == 0);
    for (const char* f : {"density_t2.500000.csv", "density_t5.000000.csv", "density_t7.500000.csv",
                          "density_t10.000000.csv", "total_population.csv", "summary.csv"})
        CHECK(fs::exists(dir / f));
    CHECK(count_lines(dir / "density_t5.000000.csv") == 1 + 240 * 41);
    CHECK(count_lines(dir / "total_population.csv") == 202);
    CHECK(slurp(dir / "summary.csv").rfind("example,M,N,dt,C,S_inv_frob,P_sum,dt_admissible,", 0) == 0);
}

TEST_CASE("run is deterministic") {
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    CHECK(call({"run", "--preset", "3", "--M", "100", "--times", "5", "--out", a.string()}).code == 0);
    CHECK(call({"run", "--preset", "3", "--M", "100", "--times", "5", "--out", b.string()}).code == 0);
    for (const char* f : {"density_t5.000000.csv", "total_population.csv", "summary.csv"})
        CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("run --preset 2 --M 800 reports dt=0.0125") {
    const auto dir = scratch("run2");
    CHECK(call({"run", "--preset", "2", "--M", "800", "--out", dir.string()}).code == 0);
    std::ifstream in(dir / "summary.csv");
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row.rfind("2,800,6,", 0) == 0);
    const double dt = std::stod(row.substr(8, row.find(',', 8) - 8));
    CHECK(dt == 10.0 / 800);
    CHECK(dt == doctest::Approx(0.0125).epsilon(1e-15));
}

TEST_CASE("invalid requests exit with status 1") {
    const auto dir = scratch("invalid");
    auto r = call({"run", "--preset", "1", "--M", "0", "--out", dir.string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("M must be at least 2") != std::string::npos);
    CHECK(call({"run", "--out", dir.string()}).code == 1);
    CHECK(call({"run", "--preset", "4"}).code == 1);
    CHECK(call({"truncation-study", "--preset", "7"}).code == 1);
    CHECK(call({"run", "--preset", "1", "--times", "2.51", "--out", dir.string()}).code == 1);
    CHECK(call({"run", "--preset", "1", "--set", "dx=0.3", "--out", dir.string()}).code == 1);
    CHECK(call({"bogus"}).code == 1);
}

TEST_CASE("i/o failures exit with status 2") {
    const auto dir = scratch("io");
    fs::create_directories(dir);
    std::ofstream(dir / "blocker") << "file";
    CHECK(call({"run", "--preset", "3", "--M", "20", "--out", (dir / "blocker" / "sub").string()}).code == 2);
    CHECK(call({"validate", "--config", (dir / "missing.json").string()}).code == 2);
}

TEST_CASE("blow-up exits with status 3 and still writes files") {
    const auto dir = scratch("blowup");
    const auto r = call({"run", "--preset", "1", "--M", "800", "--out", dir.string()});
    CHECK(r.code == 3);
    CHECK(r.err.find("blow-up") != std::string::npos);
    CHECK(fs::exists(dir / "summary.csv"));
    const auto summary = slurp(dir / "summary.csv");
    CHECK(summary.back() == '\n');
    CHECK(summary.find(':') != std::string::npos);
}

TEST_CASE("truncation-study") {
    const auto dir = scratch("trunc");
    auto r = call({"truncation-study", "--preset", "1", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(count_lines(dir / "truncation_study.csv") == 4);
    r = call({"truncation-study", "--preset", "1", "--N", "2,4,6,8", "--emax-grid", "dt", "--out", dir.string()});
    CHECK(r.code == 0);
    std::ifstream in(dir / "truncation_study.csv");
    std::string line;
    std::getline(in, line);
    CHECK(line == "example,N,E_max_percent");
    double prev = 1e9;
    int rows = 0;
    while (std::getline(in, line)) {
        const double e = std::stod(line.substr(line.rfind(',') + 1));
        CHECK(e < prev);
        prev = e;
        ++rows;
    }
    CHECK(rows == 4);
    CHECK(call({"truncation-study", "--preset", "1", "--N", "13", "--out", dir.string()}).code == 1);
}

TEST_CASE("validate") {
    auto r = call({"validate", "--preset", "1"});
    CHECK(r.code == 0);
    CHECK(r.out.find("dt_admissible = false") != std::string::npos);
    CHECK(r.out.find("margin") != std::string::npos);

    r = call({"validate", "--preset", "1", "--set", "dx=0.3"});
    CHECK(r.code == 1);
    CHECK(r.err.find("does not divide") != std::string::npos);

    const auto dir = scratch("validate");
    fs::create_directories(dir);
    std::ofstream(dir / "u0.csv") << "a,x,u\n0,-1,1\n0,1,1\n12,-1,0\n12,1,1\n";
    std::ofstream(dir / "ub.csv") << "t,x,u\n0,-1,1\n0,1,1\n10,-1,1\n10,1,1\n";
    std::ofstream(dir / "D.csv") << "t,a,D\n0,0,0\n0,12,0\n10,0,0\n10,12,0\n";
    std::ofstream(dir / "c.json") << R"({"rho":0.5,"K_gomp":1,"d_gomp":1,"ell":1,"a_max":12,"T":10,"M":200,"N":6,
        "dx":0.05,"u0":"u0.csv","u0_bar":"ub.csv","D":"D.csv"})";
    r = call({"validate", "--config", (dir / "c.json").string()});
    CHECK(r.code == 1);
    CHECK(r.err.find("(a=12, x=-1)") != std::string::npos);
}

TEST_CASE("stability-report") {
    const auto dir = scratch("stab");
    const auto r = call({"stability-report", "--preset", "3", "--M", "100", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("P_sum") != std::string::npos);
    CHECK(fs::exists(dir / "summary.csv"));
}

TEST_CASE("sweep writes one subdirectory per M") {
    const auto dir = scratch("sweep");
    const auto r = call({"run", "--preset", "3", "--sweep", "50,100", "--times", "10", "--out", dir.string()});
    CHECK(r.code == 0);
    CHECK(fs::exists(dir / "M50" / "total_population.csv"));
    CHECK(fs::exists(dir / "M100" / "density_t10.000000.csv"));
    CHECK(count_lines(dir / "summary.csv") == 3);
}
