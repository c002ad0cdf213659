// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "mcfar/cli/commands.hpp"
#include "mcfar/cli/io.hpp"
#include "mcfar/cli/sweep.hpp"

using namespace mcfar;
using namespace mcfar::cli;

namespace {

const std::string kData = MCFAR_DATA_DIR;

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

Result call(std::vector<std::string> args) {
    args.insert(args.begin(), "mcfar");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

// Runs the installed binary through the shell; returns the exit status.
int spawn(const std::string& args) {
    const std::string cmd = std::string(MCFAR_BINARY) + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::filesystem::path scratch(const std::string& name, const std::string& content) {
    const auto dir = std::filesystem::temp_directory_path() / "mcfar_cli_test";
    std::filesystem::create_directories(dir);
    const auto path = dir / name;
    std::ofstream(path) << content;
    return path;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::stringstream ls(line);
        std::string cell;
        while (std::getline(ls, cell, ',')) cells.push_back(cell);
        if (!line.empty() && line.back() == ',') cells.emplace_back();
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("exit codes of the binary") {
    CHECK(spawn("validate " + kData + "/three_far.json") == exit_ok);
    CHECK(spawn("validate " + kData + "/overlap.json") == exit_invariant);
    CHECK(spawn("validate " + scratch("bad.json", "{\"receivers\": [").string()) == exit_parse);
    CHECK(spawn("validate /nonexistent/geometry.json") == exit_parse);
    CHECK(spawn("hit " + kData + "/two.json --times 1 --max-terms 1") == exit_convergence);
    CHECK(spawn("compare " + kData + "/uca.json --times 0.5,1 --trials 500 --tol 1e-9") == exit_tolerance);
    CHECK(spawn("sim " + kData + "/uca.json --trials 0") == exit_invariant);
    CHECK(spawn("frobnicate") == exit_usage);
    CHECK(spawn("hit " + kData + "/three_far.json --model four --times 1") == exit_parse);
}

TEST_CASE("validate prints the report") {
    const auto r = call({"validate", kData + "/three_far.json"});
    CHECK(r.code == exit_ok);
    CHECK(r.out.find("proxy_r") != std::string::npos);
    CHECK(r.out.find("status valid-with-warnings") != std::string::npos);
    CHECK(r.err.find("warning:") != std::string::npos);
    const auto missing = call({"validate", scratch("nofield.json", "{\"receivers\": [[20,0,0]]}").string()});
    CHECK(missing.code == exit_parse);
}

TEST_CASE("hit CSV") {
    const auto r = call({"hit", kData + "/three_far.json", "--times", "0.01:1:50:log"});
    REQUIRE(r.code == exit_ok);
    const auto rows = parse_csv(r.out);
    REQUIRE(rows.size() == 1 + 50 * 3);
    CHECK(rows[0] == std::vector<std::string>{"time", "receiver", "prob", "model"});
    CHECK(rows[1][3] == "three");
    CHECK(rows.back()[0] == "1");
    CHECK(std::stod(rows.back()[2]) == doctest::Approx(0.0214079752).epsilon(1e-8));

    const auto uca = call({"hit", kData + "/uca.json", "--times", "1"});
    CHECK(parse_csv(uca.out)[1][3] == "symmetric");

    const auto target = call({"hit", kData + "/three_far.json", "--times", "0.5,1", "--target", "2"});
    const auto trows = parse_csv(target.out);
    REQUIRE(trows.size() == 3);
    CHECK(trows[1][1] == "2");
    CHECK(call({"hit", kData + "/three_far.json", "--times", "1", "--target", "4"}).code == exit_invariant);
    CHECK(call({"hit", kData + "/three_far.json", "--times", "1", "--model", "two"}).code == exit_invariant);
    CHECK(call({"hit", kData + "/three_far.json"}).code == exit_ok);  // times from the file
    CHECK(call({"hit", kData + "/overlap.json", "--times", "1"}).code == exit_invariant);
}

TEST_CASE("cross-model identity for one receiver") {
    const auto a = parse_csv(call({"hit", kData + "/single.json", "--model", "single"}).out);
    const auto b = parse_csv(call({"hit", kData + "/single.json", "--model", "n-general"}).out);
    REQUIRE(a.size() == b.size());
    REQUIRE(a.size() == 21);
    for (std::size_t k = 1; k < a.size(); ++k) CHECK(std::abs(std::stod(a[k][2]) - std::stod(b[k][2])) < 1e-6);
}

TEST_CASE("flags override file settings") {
    const auto geom = scratch("inv.json", R"({"receivers": [[25,0,0]], "radius_a": 5, "diffusion_d": 100,
        "inv_method": "gaver-stehfest", "inv_order": 7, "times": [1]})");
    CHECK(call({"hit", geom.string()}).code == exit_invariant);  // odd order in the file
    CHECK(call({"hit", geom.string(), "--inv-order", "12"}).code == exit_ok);
    CHECK(call({"hit", geom.string(), "--inv-method", "talbot", "--inv-order", "24"}).code == exit_ok);

    json doc = {{"dt", 1e-3}, {"trials", 10}, {"seed", 5}, {"t_max", 2.0}};
    NumericOptions flags;
    flags.trials = 20;
    const SimConfig cfg = resolve_sim_config(flags, doc, {});
    CHECK(cfg.trials == 20);
    CHECK(cfg.dt == 1e-3);
    CHECK(cfg.seed == 5);
    CHECK(cfg.record_times.size() == 10);
    CHECK(cfg.record_times.back() == 2.0);
    doc["trials"] = 2.5;
    CHECK_THROWS_AS(resolve_sim_config({}, doc, {}), Error);
}

TEST_CASE("sim output is byte-identical across runs and workers") {
    const auto base = std::vector<std::string>{"sim", kData + "/three_far.json", "--trials", "2000", "--record",
                                               "0.1,0.5,1", "--seed", "42"};
    auto one = base;
    one.insert(one.end(), {"--workers", "1"});
    auto four = base;
    four.insert(four.end(), {"--workers", "4"});
    const auto a = call(one);
    const auto b = call(four);
    const auto c = call(one);
    REQUIRE(a.code == exit_ok);
    CHECK(a.out == b.out);
    CHECK(a.out == c.out);
    const auto rows = parse_csv(a.out);
    CHECK(rows[0] == std::vector<std::string>{"time", "receiver", "prob_hat", "ci_halfwidth"});
    CHECK(rows.size() == 1 + 3 * 3);

    const auto trials = std::filesystem::temp_directory_path() / "mcfar_cli_test" / "trials.csv";
    auto with_records = one;
    with_records.insert(with_records.end(), {"--trials-csv", trials.string()});
    REQUIRE(call(with_records).code == exit_ok);
    std::ifstream in(trials);
    std::string header;
    std::getline(in, header);
    CHECK(header == "trial,receiver_index,absorption_time");
}

TEST_CASE("sweeps") {
    SUBCASE("diffusion") {
        const auto r = call({"sweep", kData + "/sweeps/diffusion_uca.json"});
        REQUIRE(r.code == exit_ok);
        const auto rows = parse_csv(r.out);
        CHECK(rows[0] == std::vector<std::string>{"axis_value", "series", "receiver", "model", "metric", "value"});
        CHECK(rows.size() == 1 + 3 * 50 * 3);
        // Receiver 1 rises with D for every radius.
        for (const std::string series : {"a=2", "a=4", "a=6"}) {
            double previous = -1;
            for (const auto& row : rows)
                if (row[1] == series && row[2] == "1") {
                    CHECK(std::stod(row[5]) > previous);
                    previous = std::stod(row[5]);
                }
        }
    }
    SUBCASE("angle") {
        const auto r = call({"sweep", kData + "/sweeps/angle.json"});
        REQUIRE(r.code == exit_ok);
        CHECK(r.err.find("excluded angle cell") != std::string::npos);
        double previous = 2;
        int q_rows = 0;
        for (const auto& row : parse_csv(r.out)) {
            if (row[4] != "q") continue;
            ++q_rows;
            CHECK(std::stod(row[5]) <= previous);
            previous = std::stod(row[5]);
        }
        CHECK(q_rows > 20);
    }
    SUBCASE("malicious count") {
        const auto r = call({"sweep", kData + "/sweeps/malicious_count.json"});
        REQUIRE(r.code == exit_ok);
        double m0 = 0, m2 = 0;
        for (const auto& row : parse_csv(r.out)) {
            if (row[0] != "1") continue;
            if (row[1] == "m=0") m0 = std::stod(row[5]);
            if (row[1] == "m=2") m2 = std::stod(row[5]);
        }
        CHECK(m0 > m2);
    }
    SUBCASE("spec errors") {
        const auto bad_axis = scratch("axis.json", R"({"axis": "angle", "range": {"start": 1, "stop": 2, "count": 3},
            "geometry": {"layout": "uca", "w": 10, "d": 20, "a": 5, "D": 100}})");
        CHECK(call({"sweep", bad_axis.string()}).code == exit_invariant);
        const auto bad_count = scratch("count.json", R"({"axis": "time", "range": {"start": 1, "stop": 2, "count": 1},
            "geometry": {"layout": "uca", "w": 10, "d": 20, "a": 5, "D": 100}})");
        CHECK(call({"sweep", bad_count.string()}).code == exit_invariant);
        const auto unknown = scratch("unknown.json", R"({"axis": "pressure", "range": {"start": 1, "stop": 2,
            "count": 3}, "geometry": {"layout": "uca", "w": 10, "d": 20, "a": 5, "D": 100}})");
        CHECK(call({"sweep", unknown.string()}).code == exit_parse);
    }
}

TEST_CASE("compare") {
    const auto warned = call({"compare", kData + "/three_far.json", "--times", "0.5,1", "--trials", "3000"});
    CHECK(warned.code == exit_ok);
    CHECK(warned.err.find("tolerance check skipped") != std::string::npos);
    const auto rows = parse_csv(warned.out);
    CHECK(rows[0] ==
          std::vector<std::string>{"time", "receiver", "model", "analytical", "simulated", "ci_halfwidth", "abs_error"});
    CHECK(rows.size() == 1 + 2 * 3);

    const auto strict =
        call({"compare", kData + "/three_far.json", "--times", "0.5,1", "--trials", "300", "--tol", "1e-9", "--strict"});
    CHECK(strict.code == exit_tolerance);

    const auto shadowed = call({"compare", kData + "/shadowed.json", "--trials", "2000"});
    CHECK(shadowed.code == exit_ok);
    CHECK(shadowed.err.find("shadows") != std::string::npos);

    const auto map_spec = scratch("map.json", R"({"axis": "grid-yz", "range": {"start": -20, "stop": 20, "count": 2},
        "geometry": {"layout": "grid-yz", "x": 10, "fixed": [[10, 14.14, 14.14], [10, 14.14, -14.14]], "a": 5,
        "D": 100}, "t": 0.5, "tol": 0.05, "sim": {"trials": 2000, "seed": 1}})");
    const auto map = call({"compare", map_spec.string()});
    CHECK(map.code == exit_ok);
    const auto map_rows = parse_csv(map.out);
    CHECK(map_rows[0] == std::vector<std::string>{"y", "z", "status", "receiver", "analytical", "simulated",
                                                  "ci_halfwidth", "abs_error"});
    CHECK(map_rows.size() == 1 + 2 * 3 + 2);  // two cells overlap a fixed receiver
}

TEST_CASE("number formatting keeps twelve significant digits") {
    CHECK(fmt(0.1234567890123456) == "0.123456789012");
    CHECK(fmt(1e-20) == "1e-20");
    CHECK(fmt(INFINITY) == "inf");
    const auto grid = parse_time_list("1:100:3:log");
    REQUIRE(grid.size() == 3);
    CHECK(grid[1] == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(grid[2] == 100.0);
    CHECK_THROWS_AS(parse_time_list("1:x:3"), Error);
}
