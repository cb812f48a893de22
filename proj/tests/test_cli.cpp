#include <doctest.h>

#include "cli.hpp"
#include "dlimit/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using dlimit::Json;
using dlimit::cli_main;
using dlimit::kExitOk;
using dlimit::kExitNumeric;
using dlimit::kExitInput;

namespace {

std::string tmp_path(const std::string& name) { return std::string(DLIMIT_TEST_TMP) + "/cli_" + name; }

std::string write_file(const std::string& name, const std::string& text) {
    const auto path = tmp_path(name);
    std::ofstream(path) << text;
    return path;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "dlimit");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("solve writes the impulse of the Jordan pair") {
    const auto cfg = write_file("solve.json", R"({"N": [[0, 1], [0, 0]], "x0": [3, 5], "f": "[0, t]"})");
    const auto out = tmp_path("solve_out.json");
    const auto r = run({"solve", "--config", cfg, "--out", out});
    REQUIRE(r.code == kExitOk);
    const Json doc = Json::parse(read_file(out));
    CHECK(doc["q"] == 2);
    CHECK(doc["consistent"] == false);
    const auto& imps = doc["solution"]["impulses"];
    REQUIRE(imps.size() == 1);
    CHECK(imps[0]["order"] == 0);
    CHECK(imps[0]["coeff"][0].get<double>() == -5.0);
    CHECK(imps[0]["coeff"][1].get<double>() == 0.0);
    CHECK(r.out.find("impulse") != std::string::npos);
}

TEST_CASE("solve accepts a pencil") {
    const auto cfg = write_file(
        "pencil.json",
        R"({"E": [[1, 0, 0], [0, 0, 1], [0, 0, 0]], "A": [[-1, 0, 0], [0, 1, 0], [0, 0, 1]], "x0": [1, 1, 1]})");
    const auto r = run({"solve", "--config", cfg});
    REQUIRE(r.code == kExitOk);
    const Json doc = Json::parse(r.out);
    CHECK(doc["q"] == 2);
    CHECK(doc["reduced"]["slow"]["dimension"] == 1);
}

TEST_CASE("numeric failures exit with 1") {
    const auto cfg = write_file("bad_n.json", R"({"N": [[1, 0], [0, 1]], "x0": [1, 1]})");
    const auto r = run({"solve", "--config", cfg});
    CHECK(r.code == kExitNumeric);
    CHECK_FALSE(r.err.empty());
    const auto pencil = write_file("singular_pencil.json", R"({"E": [[0, 0], [0, 0]], "A": [[1, 0], [0, 0]]})");
    CHECK(run({"reduce", "--config", pencil}).code == kExitNumeric);
}

TEST_CASE("input errors exit with 2") {
    CHECK(run({"frobnicate"}).code == kExitInput);
    CHECK(run({"solve"}).code == kExitInput);
    CHECK(run({"solve", "--config", tmp_path("does_not_exist.json")}).code == kExitInput);
    const auto broken = write_file("broken.json", "{\"N\": [[0, 1], [0, 0]");
    CHECK(run({"solve", "--config", broken}).code == kExitInput);
    const auto dims = write_file("dims.json", R"({"N": [[0, 1], [0, 0]], "x0": [1, 2, 3]})");
    CHECK(run({"solve", "--config", dims}).code == kExitInput);
    const auto grammar = write_file("grammar.json", R"({"N": [[0]], "x0": [1], "f": "[t^]"})");
    const auto r = run({"solve", "--config", grammar});
    CHECK(r.code == kExitInput);
    CHECK(r.err.find("offset") != std::string::npos);
    CHECK(run({"converge", "--config", grammar, "--format", "xml"}).code == kExitInput);
}

TEST_CASE("help exits cleanly") { CHECK(run({"--help"}).code == kExitOk); }

TEST_CASE("converge writes the CSV report") {
    const auto cfg = write_file("converge.json", R"({
        "system": {"N": [[0]], "x0": [2], "f": "[1]"},
        "family": {"kind": "shift"},
        "indices": [16, 32, 64],
        "bank": [{"center": 0, "radius": 1, "direction": [1]}]
    })");
    const auto out = tmp_path("report.csv");
    const auto r = run({"converge", "--config", cfg, "--out", out});
    REQUIRE(r.code == kExitOk);
    std::istringstream lines(read_file(out));
    std::string line;
    std::getline(lines, line);
    CHECK(line == "i,testfn_id,pairing_perturbed,pairing_limit,abs_error,quad_err_estimate");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 5);
        CHECK(line.find(",tf0,") != std::string::npos);
    }
    CHECK(rows == 3);
    CHECK(r.out.find("not_converging") != std::string::npos);

    const auto json = run({"converge", "--config", cfg, "--format", "json"});
    REQUIRE(json.code == kExitOk);
    CHECK(Json::parse(json.out)["rows"].size() == 3);
}

TEST_CASE("perturb, pair and localize") {
    const auto pcfg = write_file("perturb.json", R"({
        "system": {"N": [[0]], "x0": [2], "f": "[1]"},
        "family": {"kind": "shift"}, "i": 10, "times": [0, 0.5]
    })");
    const auto p = run({"perturb", "--config", pcfg, "--format", "csv"});
    REQUIRE(p.code == kExitOk);
    CHECK(p.out.rfind("t,x1\n", 0) == 0);
    CHECK(p.out.find("0.5,-0.97978615900") != std::string::npos);

    const auto paircfg = write_file("pair.json", R"({
        "distribution": {"dimension": 1, "smooth": "[1]"},
        "test_function": {"center": 1, "radius": 1, "direction": [1]}
    })");
    const auto pr = run({"pair", "--config", paircfg});
    REQUIRE(pr.code == kExitOk);
    CHECK(std::abs(Json::parse(pr.out)["value"].get<double>() - 0.443993816168079437823) <= 1e-10);

    const auto lcfg = write_file("localize.json", R"({
        "system": {"N": [[0]], "x0": [1], "f": "[sin(t)]"},
        "family": {"kind": "shift"}, "i": 32, "b": 3,
        "test_function": {"center": 2, "radius": 1, "direction": [1]}
    })");
    const auto lr = run({"localize", "--config", lcfg});
    REQUIRE(lr.code == kExitOk);
    CHECK(Json::parse(lr.out)["within_bound"] == true);
}
