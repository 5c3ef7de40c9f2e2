#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "crw/config.hpp"

namespace {

struct Run {
    int code;
    std::string out;
};

Run run(const std::string& args) {
    const std::string cmd = std::string(CRW_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* p = popen(cmd.c_str(), "r");
    REQUIRE(p != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    std::size_t n;
    while ((n = fread(buf.data(), 1, buf.size(), p)) > 0) out.append(buf.data(), n);
    const int status = pclose(p);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string temp_file(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream(path) << content;
    return path.string();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream is(s);
    for (std::string l; std::getline(is, l);)
        if (!l.empty() && l[0] != '#') out.push_back(l);
    return out;
}

}  // namespace

TEST_CASE("compare reproduces the corner values") {
    auto r = run("compare --tandem 0.1,0.4,0.5 --n 60 --x 1,0");
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    REQUIRE(ls.size() == 2);
    CHECK(ls[0] == "x1,x2,exact,approx,rel_error,V_n,W_n,log10_exact,log10_approx");
    std::istringstream row(ls[1]);
    std::vector<double> v;
    for (std::string c; std::getline(row, c, ',');) v.push_back(std::stod(c));
    CHECK(v[2] == doctest::Approx(1.1285e-35).epsilon(5e-5));
    CHECK(v[3] == doctest::Approx(1.2037e-35).epsilon(5e-5));
}

TEST_CASE("tandem-exit slice with fractional rates") {
    auto r = run("tandem-exit --tandem 1/18,3/18,7/18,2/18,5/18 --x 0,0,i,j --n 60 --max 3");
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    CHECK(ls.size() == 17);
    CHECK(ls[0] == "x1,x2,x3,x4,f,log10_f");
}

TEST_CASE("config errors exit with code 2") {
    const auto bad = temp_file("crw_bad_model.json", R"({"d": 2, "p": [[0, 0.15, 0.1], [0.2, 0, 0.1], [0.24, 0.06, 0]]})");
    auto r = run("exact --model " + bad + " --n 5");
    CHECK(r.code == 2);
    CHECK(run("exact --n 5").code == 2);
    CHECK(run("nonsense").code == 2);
    CHECK(run("exact --tandem 0.1,abc --n 5").code == 2);
    CHECK(run("is --tandem 0.1,0.4,0.5 --n 10").code == 2);
}

TEST_CASE("dry run validates without computing") {
    CHECK(run("exact --tandem 0.1,0.4,0.5 --n 60 --dry-run").code == 0);
    CHECK(run("is --tandem 0.1,0.4,0.5 --n 10 --x 1,0 --dry-run").code == 0);
    CHECK(run("boundary-layer --tandem 0.1,0.4,0.5 --n 10 --dry-run").code == 2);
    CHECK(run("diffusion --dry-run").code == 0);
    CHECK(run("charsurf --tandem 0.1,0.4,0.5 --dry-run").out.empty());
}

TEST_CASE("json output is byte-identical across runs") {
    const std::string args = "is --tandem 0.1,0.4,0.5 --n 10 --x 1,0 --samples 3000 --seed 5 --threads 2";
    auto a = run(args), b = run(args);
    REQUIRE(a.code == 0);
    CHECK(a.out == b.out);
    auto j = nlohmann::json::parse(a.out);
    CHECK(j["estimate"]["samples"] == 3000);
    auto c = run("is --tandem 0.1,0.4,0.5 --n 10 --x 1,0 --samples 3000 --seed 5 --threads 1");
    CHECK(c.out == a.out);
}

TEST_CASE("csv floats carry 17 significant digits") {
    auto r = run("exact --tandem 0.1,0.4,0.5 --n 5 --x 1,0");
    REQUIRE(r.code == 0);
    auto ls = lines(r.out);
    std::istringstream row(ls[1]);
    std::vector<std::string> cells;
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    REQUIRE(cells.size() == 4);
    std::size_t digits = 0;
    for (char ch : cells[2].substr(0, cells[2].find('e')))
        if (std::isdigit(static_cast<unsigned char>(ch))) ++digits;
    CHECK(digits >= 16);
}

TEST_CASE("every subcommand runs") {
    CHECK(run("charsurf --tandem 0.1,0.4,0.5 --points 8").code == 0);
    CHECK(run("verify-system --tandem 0.1,0.3,0.2,0.4").code == 0);
    CHECK(run("balayage2d --model " +
              temp_file("crw_82.json", R"({"d": 2, "p": [[0, 0.15, 0.1], [0.35, 0, 0.1], [0.24, 0.06, 0]]})") +
              " --n 10 --format json")
              .code == 0);
    CHECK(run("mc --tandem 0.1,0.4,0.5 --process Z --x 1,0 --N 30 --samples 2000").code == 0);
    CHECK(run("mc --tandem 0.1,0.4,0.5 --process X --x 3,1 --n 8 --samples 2000 --paired").code == 0);
    CHECK(run("boundary-layer --tandem 0.2,0.4,0.4 --n 12").code == 0);
    CHECK(run("diffusion --a 0.7 --b 0.3 --points 5").code == 0);
}

TEST_CASE("config file round trip and override") {
    crw::ExperimentConfig c;
    c.command = "exact";
    c.tandem = {0.1, 0.4, 0.5};
    c.n = 6;
    c.x = {"2", "1"};
    const std::string text = crw::canonical_json(c);
    CHECK(crw::canonical_json(crw::config_from_json(nlohmann::json::parse(text))) == text);
    CHECK_THROWS_AS(crw::config_from_json(nlohmann::json::parse(R"({"bogus": 1})")), crw::Error);
    const auto path = temp_file("crw_cfg.json", text);
    auto a = run("exact --config " + path);
    auto b = run("exact --config " + path + " --n 7");
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    CHECK(a.out != b.out);
    auto p = run("exact --config " + path + " --print-config --dry-run");
    CHECK(nlohmann::json::parse(p.out) == nlohmann::json::parse(text));
}

TEST_CASE("number lists accept fractions") {
    auto v = crw::parse_number_list("1/18,0.5,3/4");
    CHECK(v[0] == doctest::Approx(1.0 / 18));
    CHECK(v[2] == doctest::Approx(0.75));
    CHECK_THROWS_AS(crw::parse_number_list("1/0"), crw::Error);
}
