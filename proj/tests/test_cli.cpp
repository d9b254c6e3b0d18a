#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/core.h>

#include "avgrank/families.hpp"
#include "doctest.h"
#include "json.hpp"

using namespace avgrank;
using nlohmann::json;

namespace {

const std::filesystem::path& workdir() {
    static const auto dir = [] {
        auto d = std::filesystem::temp_directory_path() / ("avgrank_cli_" + std::to_string(getpid()));
        std::filesystem::create_directories(d);
        return d;
    }();
    return dir;
}

std::string at(const std::string& name) { return (workdir() / name).string(); }

int run(const std::string& args) {
    const auto cmd = fmt::format("'{}' {} > '{}' 2> '{}'", AVGRANK_CLI, args, at("stdout.txt"), at("stderr.txt"));
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream ls(line);
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

json read_json(const std::string& path) { return json::parse(slurp(path)); }

}  // namespace

TEST_CASE("average-rank writes deterministic outputs") {
    REQUIRE(run("average-rank -T 1e4 --threads 1 --out " + at("ar1")) == 0);
    REQUIRE(run("average-rank -T 1e4 --threads 4 --out " + at("ar4")) == 0);
    CHECK(slurp(at("ar1.csv")) == slurp(at("ar4.csv")));
    // rows_csv names the file, so compare the JSON with that entry blanked
    auto j1 = read_json(at("ar1.json")), j4 = read_json(at("ar4.json"));
    CHECK(j1["rows_csv"] == "ar1.csv");
    j1.erase("rows_csv");
    j4.erase("rows_csv");
    CHECK(j1 == j4);

    const auto rows = read_csv(at("ar1.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == std::vector<std::string>{"r", "s", "logN_term", "U1_term", "U2_term", "bound"});
    const FamilyParams params{1e4};
    double w = 0.0, b = 0.0, u1 = 0.0, u2 = 0.0, ln = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const auto& r = rows[i];
        REQUIRE(r.size() == 6);
        const double wt = weight_wT(std::stoll(r[0]), std::stoll(r[1]), params);
        CHECK(wt > 0.0);
        w += wt;
        ln += wt * std::stod(r[2]);
        u1 += wt * std::stod(r[3]);
        u2 += wt * std::stod(r[4]);
        b += wt * std::stod(r[5]);
    }
    const auto& avg = j1["averages"];
    CHECK(j1["curves"].get<std::size_t>() == rows.size() - 1);
    CHECK(j1["S_T"].get<double>() == doctest::Approx(w).epsilon(1e-12));
    CHECK(avg["bound"].get<double>() == doctest::Approx(b / w).epsilon(1e-12));
    CHECK(avg["logN_term"].get<double>() == doctest::Approx(ln / w).epsilon(1e-12));
    CHECK(avg["U1_term"].get<double>() == doctest::Approx(u1 / w).epsilon(1e-10));
    CHECK(avg["U2_term"].get<double>() == doctest::Approx(u2 / w).epsilon(1e-12));
    CHECK(j1["X"].get<double>() == doctest::Approx(default_X(1e4)).epsilon(1e-15));
}

TEST_CASE("config file and flag precedence") {
    {
        std::ofstream cfg(at("cfg.json"));
        cfg << R"({"T": 2000, "X": 100, "C0": 1.5, "out": ")" << at("from_cfg") << "\"}";
    }
    REQUIRE(run("average-rank --config " + at("cfg.json")) == 0);
    const auto a = read_json(at("from_cfg.json"));
    CHECK(a["T"] == 2000.0);
    CHECK(a["X"] == 100.0);
    CHECK(a["C0"] == 1.5);

    REQUIRE(run("average-rank --config " + at("cfg.json") + " -X 200 --out " + at("flagged")) == 0);
    const auto b = read_json(at("flagged.json"));
    CHECK(b["T"] == 2000.0);
    CHECK(b["X"] == 200.0);
    CHECK(b["C0"] == 1.5);

    {
        std::ofstream cfg(at("bad.json"));
        cfg << R"({"T": 2000, "colour": "red"})";
    }
    CHECK(run("average-rank --config " + at("bad.json")) == 1);
    {
        std::ofstream cfg(at("broken.json"));
        cfg << "{\"T\": ";
    }
    CHECK(run("average-rank --config " + at("broken.json")) == 1);
    CHECK(run("average-rank --config " + at("missing.json")) == 1);
    CHECK(run("average-rank -T 1e4 -X 1e4 --out " + at("x")) == 1);
    CHECK(run("average-rank -T 1e4 --threads 0 --out " + at("x")) == 1);
    CHECK(run("average-rank -T 1e4 --weight triangle --out " + at("x")) == 1);
    CHECK(run("twists -T 1e3 --sign 2 --out " + at("x")) == 1);
    CHECK(run("no-such-command") == 1);
}

TEST_CASE("density outputs") {
    REQUIRE(run("density -T 1e4 --R-max 20 --out " + at("dens")) == 0);
    const auto rows = read_csv(at("dens.csv"));
    REQUIRE(rows.size() == 22);
    CHECK(rows[0] == std::vector<std::string>{"R", "census", "markov_bound", "reference_decay"});
    const auto j = read_json(at("dens.json"));
    const double threshold = j["threshold"].get<double>();
    long prev = std::stol(rows[1][1]);
    CHECK(prev == j["count_C"].get<long>());
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int R = std::stoi(rows[i][0]);
        CHECK(R == static_cast<int>(i) - 1);
        const long census = std::stol(rows[i][1]);
        CHECK(census <= prev);
        prev = census;
        CHECK(rows[i][2].empty() == (R < threshold));
        CHECK(j["rows"][i - 1]["markov_bound"].is_null() == (R < threshold));
    }
    REQUIRE(run("density -T 1e4 --R-max 20 --threads 3 --out " + at("dens3")) == 0);
    CHECK(slurp(at("dens.csv")) == slurp(at("dens3.csv")));
}

TEST_CASE("twists outputs") {
    REQUIRE(run("twists -T 400 --out " + at("tw")) == 0);
    const auto j = read_json(at("tw.json"));
    const auto rows = read_csv(at("tw.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[0].size() == 11);
    std::size_t plus = 0, minus = 0;
    double wp = 0.0, wm = 0.0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const int rn = std::stoi(rows[i][1]);
        (rn == 1 ? plus : minus)++;
        (rn == 1 ? wp : wm) += std::stod(rows[i][5]);
        CHECK(std::stoll(rows[i][0]) > 400);
    }
    CHECK(j["by_sign"][0]["members"].get<std::size_t>() == plus);
    CHECK(j["by_sign"][1]["members"].get<std::size_t>() == minus);
    CHECK(j["by_sign"][0]["sign"] == 1);
    const auto& part = j["partition_check"];
    CHECK(part["W_plus"].get<double>() == doctest::Approx(wp).epsilon(1e-12));
    CHECK(part["W_minus"].get<double>() == doctest::Approx(wm).epsilon(1e-12));
    CHECK(part["abs_difference"].get<double>() < 1e-9);

    REQUIRE(run("twists -T 400 --sign -1 --out " + at("tw_minus")) == 0);
    const auto minus_rows = read_csv(at("tw_minus.csv"));
    CHECK(minus_rows.size() == minus + 1);
    for (std::size_t i = 1; i < minus_rows.size(); ++i) CHECK(minus_rows[i][1] == "-1");

    REQUIRE(run("twists -T 400 --delta -1 --base 11a --out " + at("tw_neg")) == 0);
    for (const auto& r : read_csv(at("tw_neg.csv")))
        if (r[0] != "D") CHECK(std::stoll(r[0]) < 0);

    // D = 3 mod 4 is never fundamental, so this class is empty
    CHECK(run("twists -T 400 --class 3 1 0 --out " + at("tw_empty")) == 2);
    CHECK(run("twists -T 400 --class 3 -1 0 --out " + at("x")) == 1);
}

TEST_CASE("verify and cache commands") {
    CHECK(run("verify") == 0);
    CHECK(slurp(at("stdout.txt")).find("PASS arith") != std::string::npos);

    const auto cache = at("ap.bin");
    REQUIRE(run("cache build --cache " + cache + " -T 1e4 --prime-limit 300") == 0);
    CHECK(run("cache check --cache " + cache) == 0);
    CHECK(slurp(at("stdout.txt")).find("prime_range 5 293") != std::string::npos);
    REQUIRE(run("average-rank -T 1e4 --cache " + cache + " --out " + at("cached")) == 0);
    REQUIRE(run("average-rank -T 1e4 --out " + at("uncached")) == 0);
    CHECK(slurp(at("cached.csv")) == slurp(at("uncached.csv")));

    {
        std::ofstream bad(at("bad.bin"), std::ios::binary);
        bad << "not a cache file at all";
    }
    CHECK(run("cache check --cache " + at("bad.bin")) == 4);
    CHECK(run("cache check --cache " + at("nope.bin")) == 4);
    CHECK(run("cache check") == 1);
    CHECK(run("cache frobnicate --cache " + cache) == 1);
}
