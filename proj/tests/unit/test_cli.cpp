#include <doctest.h>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace {

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    args.insert(args.begin(), "bufq");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = bufq::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
    std::vector<std::string> v;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) v.push_back(line);
    return v;
}

std::vector<std::string> fields(const std::string& line) {
    std::vector<std::string> v;
    std::istringstream in(line);
    for (std::string f; std::getline(in, f, ',');) v.push_back(f);
    return v;
}

const std::string fixture = std::string(BUFQ_FIXTURE_DIR) + "/hand_trace.json";

}  // namespace

TEST_CASE("simulate the hand-trace fixture") {
    const auto r = run({"simulate", "--fixture", fixture});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    REQUIRE(l.size() == 4);
    CHECK(l[0].rfind("# bufq simulate", 0) == 0);
    CHECK(l[1] == "i,k,service,idle_before,inter_departure,departure_epoch");
    CHECK(l[2] == "0,0,2.5,,2.5,2.5");
    CHECK(l[3] == "1,3,1,0.5,1.5,4");
}

TEST_CASE("bounds curve peaks at 0.3340") {
    const auto r = run({"bounds", "--mu", "1", "--rho", "0.01:10:200"});
    REQUIRE(r.code == 0);
    const auto l = lines(r.out);
    double best = 0;
    std::size_t rows = 0;
    bool header = false;
    for (const auto& line : l) {
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            CHECK(line == "rho,rate_R_norm,universal_norm,cas_norm");
            header = true;
            continue;
        }
        const auto f = fields(line);
        REQUIRE(f.size() == 4);
        const double rate = std::stod(f[1]);
        CHECK(rate <= std::stod(f[2]));
        best = std::max(best, rate);
        ++rows;
    }
    CHECK(rows == 200);
    CHECK(best == doctest::Approx(0.3340).epsilon(0.0005 / 0.3340));
    CHECK(r.out.find("1/e") != std::string::npos);
    CHECK(r.out.find("mu=1") != std::string::npos);
}

TEST_CASE("optimum") {
    const auto r = run({"optimum", "--mu", "1", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["value"].get<double>() == doctest::Approx(0.3340).epsilon(0.0005 / 0.3340));
    CHECK(j["config"]["command"] == "optimum");
    CHECK(j["config"]["mu"] == "1");
}

TEST_CASE("grid and service parsing") {
    const auto lin = bufq::cli::parse_grid("1:3:3");
    CHECK(lin == std::vector<double>{1, 2, 3});
    const auto lg = bufq::cli::parse_grid("0.01:100:5:log");
    REQUIRE(lg.size() == 5);
    CHECK(lg.front() == 0.01);
    CHECK(lg[2] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(lg.back() == 100);
    CHECK(bufq::cli::parse_grid("0.5:0.5:1") == std::vector<double>{0.5});
    CHECK_THROWS(bufq::cli::parse_grid("1:2"));
    CHECK_THROWS(bufq::cli::parse_grid("1:2:0"));
    CHECK_THROWS(bufq::cli::parse_grid("0:2:3:log"));
    CHECK_THROWS(bufq::cli::parse_grid("1:x:3"));

    CHECK(bufq::cli::parse_service("erlang:3", 2.0).mean() == doctest::Approx(0.5));
    CHECK(bufq::cli::parse_service("uniform", 2.0).mean() == doctest::Approx(0.5));
    CHECK(bufq::cli::parse_service("deterministic", 4.0).mean() == doctest::Approx(0.25));
    CHECK(bufq::cli::parse_service("uniform:1:3", 1.0).mean() == doctest::Approx(2.0));
    CHECK_THROWS(bufq::cli::parse_service("gamma", 1.0));
    CHECK_THROWS(bufq::cli::parse_service("erlang:1.5", 1.0));
}

TEST_CASE("validation errors exit 1 and name the field") {
    auto r = run({"bounds", "--mu", "-1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--mu") != std::string::npos);

    r = run({"infodensity", "--trials", "0", "--n", "10"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--trials") != std::string::npos);

    r = run({"decode", "--messages", "0"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--messages") != std::string::npos);

    r = run({"simulate", "--lambda", "1"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--n") != std::string::npos);

    r = run({"bounds", "--service", "cauchy"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--service") != std::string::npos);

    r = run({"bounds", "--format", "xml"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--format") != std::string::npos);

    r = run({"optimum", "--bracket", "0.01:0.2"});
    CHECK(r.code == 1);
    CHECK(r.err.find("--bracket") != std::string::npos);

    r = run({});
    CHECK(r.code == 1);
}

TEST_CASE("numerical non-convergence exits 2") {
    const auto r = run({"bounds", "--rho", "1e12:1e12:1"});
    CHECK(r.code == 2);
    CHECK(r.err.find("non-convergence") != std::string::npos);
}

TEST_CASE("identical configuration gives identical bytes") {
    const std::vector<std::string> info{"infodensity", "--n", "50,200", "--trials", "20", "--seed", "7"};
    const auto a = run(info);
    const auto b = run(info);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto threaded = info;
    threaded.insert(threaded.end(), {"--threads", "3"});
    CHECK(run(threaded).out == a.out);
    CHECK(a.out.find("seed=7") != std::string::npos);

    const std::vector<std::string> dec{"decode", "--messages", "4,8", "--n", "2,5", "--trials", "50",
                                       "--format", "json"};
    const auto c = run(dec);
    REQUIRE(c.code == 0);
    CHECK(c.out == run(dec).out);
    const auto j = nlohmann::json::parse(c.out);
    CHECK(j["config"]["seed"] == "20140601");
    CHECK(j["rows"].size() == 4);
    CHECK(j["rows"][0]["idle_mismatches"] == 0);

    const auto sim = run({"simulate", "--lambda", "0.5", "--n", "20", "--seed", "3"});
    CHECK(sim.out == run({"simulate", "--lambda", "0.5", "--n", "20", "--seed", "3"}).out);
    CHECK(sim.out != run({"simulate", "--lambda", "0.5", "--n", "20", "--seed", "4"}).out);
}

TEST_CASE("non-finite values survive JSON") {
    const auto r = run({"bounds", "--rho", "0.5:1:2", "--service", "deterministic", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["rows"][0]["cas_norm"] == "inf");
    CHECK(j["rows"][0]["rate_R_norm"].is_number());
}

TEST_CASE("output destinations") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "bufq_cli_test";
    fs::remove_all(dir);
    fs::create_directories(dir);

    const auto file = (dir / "trace.csv").string();
    auto r = run({"simulate", "--fixture", fixture, "--out", file});
    REQUIRE(r.code == 0);
    CHECK(r.out.empty());
    std::ifstream in(file);
    std::stringstream body;
    body << in.rdbuf();
    CHECK(body.str() == run({"simulate", "--fixture", fixture}).out);

    ::setenv(bufq::cli::output_dir_env, dir.c_str(), 1);
    r = run({"optimum", "--format", "json"});
    ::unsetenv(bufq::cli::output_dir_env);
    REQUIRE(r.code == 0);
    CHECK(fs::exists(dir / "optimum.json"));

    r = run({"optimum", "--out", (dir / "missing" / "x.csv").string()});
    CHECK(r.code == 1);
    fs::remove_all(dir);
}
