#include <catch_amalgamated.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <string>

namespace {

struct CliResult {
    int exit_code = -1;
    std::string out;
};

CliResult run_cli(const std::string& args) {
    std::string cmd = std::string(QFREP_CLI_PATH) + " " + args + " 2>/dev/null";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof(buf), pipe)) > 0) r.out.append(buf, got);
    int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

std::string write_form(const std::string& name, const std::string& body) {
    std::string path = std::string("/tmp/qfrep_test_") + name + ".json";
    std::ofstream f(path);
    f << body;
    return path;
}

std::string identity_file(int n) {
    nlohmann::json j;
    j["dim"] = n;
    auto rows = nlohmann::json::array();
    for (int i = 0; i < n; ++i) {
        auto row = nlohmann::json::array();
        for (int k = 0; k < n; ++k) row.push_back(i == k ? 1 : 0);
        rows.push_back(row);
    }
    j["entries"] = rows;
    return write_form("I" + std::to_string(n), j.dump());
}

std::string scalar_file(long long v) {
    return write_form("s" + std::to_string(v),
                      "{\"dim\":1,\"entries\":[[" + std::to_string(v) + "]]}");
}

}  // namespace

TEST_CASE("count subcommand") {
    std::string i4 = identity_file(4), i2 = identity_file(2), i3 = identity_file(3);
    auto r1 = run_cli("count " + i4 + " " + scalar_file(4));
    CHECK(r1.exit_code == 0);
    auto j1 = nlohmann::json::parse(r1.out);
    CHECK(j1["count"] == 24);
    CHECK(j1.contains("nodes"));
    CHECK(j1.contains("ms"));

    auto r2 = run_cli("count " + i2 + " " + i2);
    CHECK(nlohmann::json::parse(r2.out)["count"] == 8);

    auto r3 = run_cli("count " + i3 + " " + scalar_file(7));
    CHECK(nlohmann::json::parse(r3.out)["count"] == 0);
}

TEST_CASE("exit codes") {
    std::string i2 = identity_file(2);
    SECTION("malformed json is a parse failure") {
        std::string bad = write_form("bad", "{\"dim\": 2, \"entries\": [[1,0],[0");
        CHECK(run_cli("count " + i2 + " " + bad).exit_code == 2);
    }
    SECTION("non-integral entries are rejected at parse") {
        std::string frac = write_form("frac", "{\"dim\":1,\"entries\":[[1.5]]}");
        CHECK(run_cli("count " + i2 + " " + frac).exit_code == 2);
    }
    SECTION("missing file") {
        CHECK(run_cli("count " + i2 + " /tmp/qfrep_no_such_file.json").exit_code == 2);
    }
    SECTION("asymmetric matrix fails validation") {
        std::string asym = write_form("asym", "{\"dim\":2,\"entries\":[[1,2],[3,1]]}");
        CHECK(run_cli("count " + i2 + " " + asym).exit_code == 3);
    }
    SECTION("indefinite matrix fails validation") {
        std::string indef = write_form("indef", "{\"dim\":2,\"entries\":[[1,2],[2,1]]}");
        CHECK(run_cli("count " + i2 + " " + indef).exit_code == 3);
    }
    SECTION("stabilization cap maps to exit 4") {
        CHECK(run_cli("alpha-p " + identity_file(4) + " " + scalar_file(1) + " 2 --t-cap 2")
                  .exit_code == 4);
    }
    SECTION("exponential sum cap maps to exit 5") {
        CHECK(run_cli("sseries " + identity_file(3) + " " + scalar_file(2) + " 8 --q-cap 10")
                  .exit_code == 5);
    }
    SECTION("unknown flags are a usage error") {
        CHECK(run_cli("count " + i2 + " " + i2 + " --no-such-flag").exit_code == 2);
    }
}

TEST_CASE("reduce and gamma subcommands") {
    std::string b = write_form("red", "{\"dim\":2,\"entries\":[[1,1],[1,2]]}");
    auto r = run_cli("reduce " + b);
    CHECK(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["reduced"]["entries"] == nlohmann::json::parse("[[1,0],[0,1]]"));
    CHECK(j["transform"] == nlohmann::json::parse("[[1,-1],[0,1]]"));

    std::string d416 = write_form("d416", "{\"dim\":2,\"entries\":[[4,0],[0,16]]}");
    auto g = nlohmann::json::parse(run_cli("gamma " + d416).out);
    CHECK(g["gamma_i"][0] == 1.0);
    CHECK(g["gamma_i"][1] == 0.5);
    CHECK(g["gamma"] == 3.0);
    CHECK(g["degenerate"] == false);

    std::string d17 = write_form("d17", "{\"dim\":2,\"entries\":[[1,0],[0,7]]}");
    auto gd = nlohmann::json::parse(run_cli("gamma " + d17).out);
    CHECK(gd["degenerate"] == true);
    CHECK(gd["gamma"] == "infinity");
}

TEST_CASE("alpha-p and alpha-inf subcommands") {
    auto ap = nlohmann::json::parse(
        run_cli("alpha-p " + identity_file(2) + " " + scalar_file(1) + " 3").out);
    CHECK(ap["p"] == 3);
    CHECK(ap["t_used"] == 1);
    CHECK(ap["value"]["num"] == 4);
    CHECK(ap["value"]["den"] == 3);

    auto ai = nlohmann::json::parse(
        run_cli("alpha-inf " + identity_file(3) + " " + scalar_file(1)).out);
    CHECK(ai["method"] == "closed_form");
    CHECK(std::fabs(ai["value"].get<double>() - 2 * std::acos(-1.0)) < 1e-9);

    auto sh = nlohmann::json::parse(run_cli("alpha-inf " + identity_file(3) + " " + scalar_file(1) +
                                            " --shell --samples 50000 --seed 7")
                                        .out);
    CHECK(sh["method"] == "shell_estimate");
    CHECK(sh["samples"] == 50000);
    CHECK(std::fabs(sh["value"].get<double>() - 2 * std::acos(-1.0)) < 1.0);
}

TEST_CASE("sseries subcommand") {
    auto s = nlohmann::json::parse(
        run_cli("sseries " + identity_file(5) + " " + scalar_file(4) + " 1").out);
    CHECK(s["partial_sum"] == 1.0);
    CHECK(s["euler_partial"] == 1.0);
    CHECK(s["terms"].size() == 1);
}

TEST_CASE("report pipeline") {
    std::string i5 = identity_file(5);
    auto r = run_cli("report " + i5 + " " + scalar_file(25) +
                     " --prime-cap 50 --samples 100000 --deterministic");
    REQUIRE(r.exit_code == 0);
    auto j = nlohmann::json::parse(r.out);
    CHECK(j["theorem"]["n_min"] == 5);
    CHECK(j["theorem"]["hypothesis_met"] == true);
    CHECK(j["local_obstructions"].empty());
    CHECK(j["verdict"] == "consistent");
    double rel = j["relative_error"].get<double>();
    CHECK(std::fabs(rel) < 0.2);
    // report consistency: exact_count equals the count subcommand
    auto c = nlohmann::json::parse(run_cli("count " + i5 + " " + scalar_file(25)).out);
    CHECK(j["exact_count"] == c["count"]);
    // main_term == alpha_inf * euler_partial at reporting precision
    double main = j["main_term"].get<double>();
    double prod = j["alpha_inf"].get<double>() * j["euler_partial"].get<double>();
    CHECK(std::fabs(main - prod) <= 1e-9 * std::fabs(main));

    SECTION("local obstruction reported consistently") {
        auto obs = nlohmann::json::parse(
            run_cli("report " + identity_file(3) + " " + scalar_file(7) +
                    " --prime-cap 10 --samples 50000 --deterministic")
                .out);
        bool has2 = false;
        for (const auto& p : obs["local_obstructions"])
            if (p == 2) has2 = true;
        CHECK(has2);
        CHECK(obs["exact_count"] == 0);
        CHECK(obs["main_term"] == 0.0);
        CHECK(!obs.contains("relative_error"));
        CHECK(obs["verdict"] == "consistent");
    }
    SECTION("hypothesis not met below the threshold") {
        auto j2 = nlohmann::json::parse(run_cli("report " + identity_file(4) + " " +
                                                identity_file(2) +
                                                " --prime-cap 10 --samples 50000 --deterministic")
                                            .out);
        CHECK(j2["theorem"]["n_min"] == 25);
        CHECK(j2["theorem"]["hypothesis_met"] == false);
        CHECK(j2.contains("relative_error"));
    }
}

TEST_CASE("report JSON is byte-identical for fixed inputs and seed") {
    std::string args = "report " + identity_file(4) + " " + scalar_file(5) +
                       " --prime-cap 20 --samples 200000 --seed 42 --deterministic";
    auto r1 = run_cli(args);
    auto r2 = run_cli(args);
    CHECK(r1.exit_code == 0);
    CHECK(r1.out == r2.out);
}

TEST_CASE("report round-trips through the form loader") {
    auto j = nlohmann::json::parse(run_cli("report " + identity_file(3) + " " + scalar_file(2) +
                                           " --prime-cap 10 --samples 50000 --deterministic")
                                       .out);
    std::string back = write_form("roundtrip", j["reduced_B"].dump());
    auto c = run_cli("reduce " + back);
    CHECK(c.exit_code == 0);
}
