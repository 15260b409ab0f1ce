#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

using nlohmann::json;

namespace {

int run(const std::string& args) {
    std::string cmd = std::string(PPC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

json load_record(const std::string& path) {
    json j = json::parse(slurp(path));
    j.erase("wall_time_ms");  // the only non-deterministic field
    return j;
}

}  // namespace

TEST_CASE("run records reproduce exactly for a fixed config and seed") {
    write_file("/tmp/ppc_cli_nn.json",
               R"({"model":"normal-normal","n":10,"sigma":1.0,
                   "prior":{"theta0":0.0,"sigma0":1.0},"ybar_obs":1.3,"seed":11})");
    REQUIRE(run("cppp --config /tmp/ppc_cli_nn.json --out /tmp/ppc_cli_r1.json") == 0);
    REQUIRE(run("cppp --config /tmp/ppc_cli_nn.json --out /tmp/ppc_cli_r2.json") == 0);
    CHECK(load_record("/tmp/ppc_cli_r1.json") == load_record("/tmp/ppc_cli_r2.json"));

    // null-dist output carries no clock at all: byte-identical
    REQUIRE(run("null-dist --config /tmp/ppc_cli_nn.json --outer-b 50 --out /tmp/ppc_cli_n1.csv") ==
            0);
    REQUIRE(run("null-dist --config /tmp/ppc_cli_nn.json --outer-b 50 --out /tmp/ppc_cli_n2.csv") ==
            0);
    CHECK(slurp("/tmp/ppc_cli_n1.csv") == slurp("/tmp/ppc_cli_n2.csv"));
    CHECK(slurp("/tmp/ppc_cli_n1.csv").find("config_hash=") != std::string::npos);
}

TEST_CASE("worker count does not change the estimates") {
    REQUIRE(run("dipper --variant cc --inner-a 150 --outer-b 16 --seed 9 --workers 1 "
                "--out /tmp/ppc_cli_w1.json") == 0);
    REQUIRE(run("dipper --variant cc --inner-a 150 --outer-b 16 --seed 9 --workers 2 "
                "--out /tmp/ppc_cli_w2.json") == 0);
    json a = load_record("/tmp/ppc_cli_w1.json");
    json b = load_record("/tmp/ppc_cli_w2.json");
    CHECK(a["ppp"] == b["ppp"]);
    CHECK(a["cppp"]["value"] == b["cppp"]["value"]);
    CHECK(a["cppp"]["ppp_obs"] == b["cppp"]["ppp_obs"]);
}

TEST_CASE("exit codes distinguish config, data, and estimation failures") {
    CHECK(run("ppp --config /nonexistent/cfg.json") == 2);
    write_file("/tmp/ppc_cli_bad_model.json", R"({"model":"not-a-model","ybar_obs":0})");
    CHECK(run("ppp --config /tmp/ppc_cli_bad_model.json") == 2);

    write_file("/tmp/ppc_cli_missing_data.json",
               R"({"model":"gn-scalar","prior":{"a0":1,"b0":1,"mu0":0,"c0":1},
                   "data":"/nonexistent/data.csv"})");
    CHECK(run("ppp --config /tmp/ppc_cli_missing_data.json") == 3);

    write_file("/tmp/ppc_cli_obs.csv", "2.0\n1.4\n0.7\n1.1\n0.9\n1.8\n1.2\n0.6\n1.5\n1.0\n");
    write_file("/tmp/ppc_cli_vague.json",
               R"({"model":"gn-scalar","prior":{"a0":0,"b0":0,"mu0":0,"c0":0.0},
                   "data":"/tmp/ppc_cli_obs.csv","a":50,"b":50})");
    CHECK(run("cppp --config /tmp/ppc_cli_vague.json") == 4);  // improper prior refused
    CHECK(run("ppp --config /tmp/ppc_cli_vague.json --inner-a 200") == 0);  // ppp itself is fine
}

TEST_CASE("curves command emits the three-column grid") {
    write_file("/tmp/ppc_cli_curves.json",
               R"({"model":"normal-normal","n":10,"sigma":1.0,
                   "prior":{"theta0":0.0,"sigma0":1.0},"points":11})");
    REQUIRE(run("curves --config /tmp/ppc_cli_curves.json --out /tmp/ppc_cli_curves.csv") == 0);
    std::string text = slurp("/tmp/ppc_cli_curves.csv");
    CHECK(text.find("ybar,ppp,cppp,cppp_star") != std::string::npos);
    int lines = 0;
    for (char ch : text)
        if (ch == '\n') ++lines;
    CHECK(lines == 13);  // hash comment + header + 11 points
}
