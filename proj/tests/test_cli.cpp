#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

std::string binary() {
    const char* p = std::getenv("DDWALK_BIN");
    REQUIRE_MESSAGE(p != nullptr, "DDWALK_BIN must point at the CLI binary");
    return p;
}

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string out_path = "cli_out.tmp";
    const std::string cmd = binary() + " " + args + " > " + out_path + " 2>&1";
    const int raw = std::system(cmd.c_str());
    std::ifstream f(out_path);
    std::stringstream ss;
    ss << f.rdbuf();
    std::remove(out_path.c_str());
    return {WEXITSTATUS(raw), ss.str()};
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

void write_tridiagonal(const std::string& path) {
    std::ofstream f(path);
    f << "3 4\n0 3\n1 3\n2 3\n0 1 -1\n1 0 -1\n1 2 -1\n2 1 -1\n0 1\n1 0\n2 0\n";
}

double printed_estimate(const std::string& out) {
    const auto pos = out.find("estimate ");
    REQUIRE(pos != std::string::npos);
    return std::stod(out.substr(pos + 9));
}

}  // namespace

TEST_CASE("generation is deterministic in the seed") {
    auto a = run("gen regular --n 40 --d 4 --seed 7 --out cli_g1.txt");
    auto b = run("gen regular --n 40 --d 4 --seed 7 --out cli_g2.txt");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    const std::string g1 = slurp("cli_g1.txt");
    CHECK(g1 == slurp("cli_g2.txt"));
    CHECK(!g1.empty());
    // 40 * 4 / 2 edges, all degrees 4
    int lines = 0;
    for (char c : g1)
        if (c == '\n') ++lines;
    CHECK(lines == 80);
    std::remove("cli_g1.txt");
    std::remove("cli_g2.txt");
}

TEST_CASE("random opinion generation stays in the unit interval") {
    auto r = run("gen fj-random --n 50 --p 0.1 --seed 1 --out cli_fjr.txt");
    CHECK(r.exit_code == 0);
    std::ifstream f("cli_fjr.txt.opinions");
    double v;
    int count = 0;
    while (f >> v) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        ++count;
    }
    CHECK(count == 50);
    std::remove("cli_fjr.txt");
    std::remove("cli_fjr.txt.opinions");
}

TEST_CASE("single-entry solve lands near the exact solution") {
    write_tridiagonal("cli_tri.txt");
    auto r = run("solve cli_tri.txt --u 0 --eps 0.05 --seed 5");
    CHECK(r.exit_code == 0);
    CHECK(std::abs(printed_estimate(r.out) - 8.0 / 21.0) <= 0.05);
    CHECK(r.out.find("derived from full matrix scan") != std::string::npos);
    std::remove("cli_tri.txt");
}

TEST_CASE("a zero rhs file prints a zero estimate") {
    {
        std::ofstream f("cli_zero.txt");
        f << "2 2\n0 3\n1 3\n0 1 -1\n1 0 -1\n";
    }
    auto r = run("solve cli_zero.txt --u 0 --eps 0.1 --seed 1");
    CHECK(r.exit_code == 0);
    CHECK(printed_estimate(r.out) == 0.0);
    std::remove("cli_zero.txt");
}

TEST_CASE("a non-dominant matrix is a model violation") {
    {
        std::ofstream f("cli_bad.txt");
        f << "2 2\n0 1\n1 1\n0 1 -2\n1 0 -2\n";
    }
    auto r = run("solve cli_bad.txt --u 0 --eps 0.1");
    CHECK(r.exit_code == 3);
    std::remove("cli_bad.txt");
}

TEST_CASE("a singular system solves through the shift when kappa is given") {
    {
        std::ofstream f("cli_sing.txt");
        f << "2 2\n0 1\n1 1\n0 1 -1\n1 0 -1\n0 1\n1 -1\n";
    }
    auto r = run("solve cli_sing.txt --u 0 --eps 0.4 --kappa 1 --seed 2");
    CHECK(r.exit_code == 0);
    CHECK(std::abs(printed_estimate(r.out) - 0.5) <= 0.4 * 0.5 + 1e-9);
    std::remove("cli_sing.txt");
}

TEST_CASE("unparseable input exits with the parse code") {
    {
        std::ofstream f("cli_garbled.txt");
        f << "not a matrix\n";
    }
    auto r = run("solve cli_garbled.txt --u 0");
    CHECK(r.exit_code == 2);
    std::remove("cli_garbled.txt");
}

TEST_CASE("opinion estimation prints the degree bound and a sane value") {
    {
        std::ofstream e("cli_e.txt");
        e << "0 1 1\n";
        std::ofstream o("cli_o.txt");
        o << "1\n0\n";
    }
    auto r = run("fj cli_e.txt cli_o.txt --u 0 --eps 0.02 --seed 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("W 1") != std::string::npos);
    CHECK(std::abs(printed_estimate(r.out) - 2.0 / 3.0) <= 0.02);
    std::remove("cli_e.txt");
    std::remove("cli_o.txt");
}

TEST_CASE("missing opinions file is a parse error") {
    {
        std::ofstream e("cli_e2.txt");
        e << "0 1 1\n";
    }
    auto r = run("fj cli_e2.txt no_such_file --u 0");
    CHECK(r.exit_code == 2);
    std::remove("cli_e2.txt");
}

TEST_CASE("benchmark emits the exact CSV schema and is thread-invariant") {
    run("gen fj-random --n 80 --p 0.08 --seed 11 --out cli_b.txt");
    auto r1 = run(
        "bench cli_b.txt cli_b.txt.opinions --vertices 20 --budget 500 2000 "
        "--seed 9 --threads 1 --csv cli_b1.csv");
    auto r4 = run(
        "bench cli_b.txt cli_b.txt.opinions --vertices 20 --budget 500 2000 "
        "--seed 9 --threads 4 --csv cli_b4.csv");
    CHECK(r1.exit_code == 0);
    CHECK(r4.exit_code == 0);
    const std::string c1 = slurp("cli_b1.csv");
    CHECK(c1 == slurp("cli_b4.csv"));
    CHECK(c1.rfind("budget,abs_err_mean,abs_err_p90,trials,mean_queries,wall_ms\n",
                   0) == 0);
    int lines = 0;
    for (char c : c1)
        if (c == '\n') ++lines;
    CHECK(lines == 3);  // header + one row per budget
    std::remove("cli_b.txt");
    std::remove("cli_b.txt.opinions");
    std::remove("cli_b1.csv");
    std::remove("cli_b4.csv");
}

TEST_CASE("lower-bound experiment emits its CSV schema") {
    auto r = run("lb --n 60 --k 10 --d 4 --trials 6 --budget 10 400 --seed 2 "
                 "--csv cli_lb.csv");
    CHECK(r.exit_code == 0);
    const std::string csv = slurp("cli_lb.csv");
    CHECK(csv.rfind("budget,acc_family0,acc_family1,mean_queries\n", 0) == 0);
    int lines = 0;
    for (char c : csv)
        if (c == '\n') ++lines;
    CHECK(lines == 3);
    std::remove("cli_lb.csv");
}

TEST_CASE("self-check command passes and lists its suites") {
    auto r = run("verify --seed 0");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("pass") != std::string::npos);
    CHECK(r.out.find("FAIL") == std::string::npos);
    CHECK(r.out.find("shifted-oracle-equivalence") != std::string::npos);
}

TEST_CASE("solve output is reproducible for a fixed seed") {
    write_tridiagonal("cli_tri2.txt");
    auto a = run("solve cli_tri2.txt --u 1 --eps 0.05 --seed 77");
    auto b = run("solve cli_tri2.txt --u 1 --eps 0.05 --seed 77");
    CHECK(a.out == b.out);
    auto c = run("solve cli_tri2.txt --u 1 --eps 0.05 --seed 78");
    CHECK(a.out != c.out);
    std::remove("cli_tri2.txt");
}
