#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>

#include <json.hpp>

#include "fixtures.hpp"
#include "icesim/config.hpp"
#include "icesim/io.hpp"
#include "icesim/simulation.hpp"

using namespace icesim;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json small_freezing() {
    return json::parse(R"({
      "grid": {"dimension": 1, "cells": 40, "height": 1.0},
      "material": {"name": "reference"},
      "constants": {"g": 0.1, "theta_lower": 0.5, "theta_upper": 1.0},
      "elasticity": {"compliance": {"all": 1.0}},
      "time": {"tau": 0.001, "T": 0.05},
      "truncation": {"R": 4.0},
      "initial": {"theta": 1.0, "U": 0.0, "chi": 1.0},
      "boundary": {"h": 1.0, "theta_gamma": 0.5, "P0": 0.0},
      "output": {"snapshots": 5, "plots": false}
    })");
}

std::string rejection(const json& j) {
    try {
        validate_config(parse_config_json(j));
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

fs::path scratch(const std::string& name) {
    std::random_device rd;
    const auto dir = fs::temp_directory_path() / ("icesim_" + name + "_" + std::to_string(rd()));
    fs::remove_all(dir);
    return dir;
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(ICESIM_CLI) + " " + args + " > /dev/null 2>&1";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("shipped configurations validate") {
    for (const char* name : {"freezing.json", "freezing_const_kappa.json", "stationary.json"}) {
        CHECK_NOTHROW(validate_config(fixture::load(name)));
    }
}

TEST_CASE("phase fraction outside [0, 1] is rejected") {
    auto j = small_freezing();
    j["initial"]["chi"] = 1.5;
    const auto msg = rejection(j);
    CHECK(msg.find("0 ≤ χ⁰ ≤ 1") != std::string::npos);
    CHECK(msg.find("/initial/chi") != std::string::npos);
}

TEST_CASE("boundary temperature table must cover the horizon") {
    auto j = small_freezing();
    j["boundary"]["theta_gamma"] = json::array({json::array({0.0, 0.5}), json::array({0.025, 0.6})});
    CHECK(rejection(j).find("table must cover [0, T]") != std::string::npos);
    j["boundary"]["theta_gamma"] = json::array({json::array({0.0, 0.5}), json::array({0.05, 0.6})});
    CHECK(rejection(j).empty());
}

TEST_CASE("other data constraints") {
    auto j = small_freezing();
    j["time"]["tau"] = 0.003;
    CHECK_FALSE(rejection(j).empty());  // T not a multiple of tau
    j = small_freezing();
    j["initial"]["theta"] = 0.2;
    CHECK_FALSE(rejection(j).empty());
    j = small_freezing();
    j["boundary"]["h"] = -1.0;
    CHECK_FALSE(rejection(j).empty());
    j = small_freezing();
    j["truncation"]["R"] = 0.5;
    CHECK_FALSE(rejection(j).empty());
    j = small_freezing();
    j["constants"]["latent_heat"] = 3.0;
    CHECK_FALSE(rejection(j).empty());
    j = small_freezing();
    j["grid"]["colour"] = "blue";
    CHECK_THROWS_AS(parse_config_json(j), ConfigError);
}

TEST_CASE("configuration round trip") {
    for (const json& j : {small_freezing(), json::parse(std::ifstream(fs::path(ICESIM_CONFIG_DIR) / "stationary.json"))}) {
        const SimConfig a = parse_config_json(j);
        const json once = to_json(a);
        const json twice = to_json(parse_config_json(once));
        CHECK(once == twice);
        CHECK(parse_config_json(once).steps() == a.steps());
    }
}

TEST_CASE("simulate then verify, and detect tampering") {
    const auto dir = scratch("run");
    const SimConfig cfg = parse_config_json(small_freezing());
    const auto res = simulate_to_directory(cfg, dir);
    REQUIRE(res.status == RunStatus::Ok);
    CHECK(fs::exists(dir / "config.json"));
    CHECK(fs::exists(dir / "energy_ledger.csv"));
    CHECK(fs::exists(dir / "entropy_ledger.csv"));
    CHECK(fs::exists(dir / "summary.json"));

    const auto ok = verify_directory(dir);
    CHECK(ok.status == RunStatus::Ok);
    CHECK(ok.snapshots_checked >= 5);
    CHECK(ok.ledger_rows == cfg.steps() + 1);

    const fs::path snap = dir / "snapshots" / "step_0000020.csv";
    REQUIRE(fs::exists(snap));
    auto s = read_snapshot(snap);
    for (auto& th : s.theta) th *= 1.1;
    SimState st;
    st.k = s.header.k;
    st.t = s.header.t;
    st.theta = s.theta;
    st.U = s.U;
    st.chi = s.chi;
    st.U_Omega = s.header.U_Omega;
    st.p = s.header.p;
    const Grid grid = build_grid(cfg);
    write_snapshot(snap, s.header, grid, st);
    const auto tampered = verify_directory(dir);
    CHECK(tampered.status == RunStatus::InvariantViolation);
    CHECK_FALSE(tampered.failures.empty());

    auto h = s.header;
    h.tau = 2e-3;
    for (auto& th : st.theta) th /= 1.1;
    write_snapshot(snap, h, grid, st);
    const auto mismatch = verify_directory(dir);
    CHECK(mismatch.status == RunStatus::InvariantViolation);
    bool named = false;
    for (const auto& f : mismatch.failures) named = named || f.find("tau") != std::string::npos;
    CHECK(named);
    fs::remove_all(dir);
}

TEST_CASE("command line exit codes") {
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    auto j = small_freezing();
    std::ofstream(dir / "good.json") << j.dump();
    j["initial"]["chi"] = 1.5;
    std::ofstream(dir / "bad.json") << j.dump();

    CHECK(run_cli("simulate " + (dir / "good.json").string() + " -o " + (dir / "run").string()) == 0);
    CHECK(run_cli("verify " + (dir / "run").string()) == 0);
    CHECK(run_cli("simulate " + (dir / "bad.json").string() + " -o " + (dir / "bad").string()) == 2);
    CHECK(run_cli("simulate " + (dir / "missing.json").string()) == 2);
    CHECK(run_cli("material-check " + (dir / "good.json").string()) == 0);

    std::ofstream(dir / "run" / "energy_ledger.csv", std::ios::app) << "garbage\n";
    CHECK(run_cli("verify " + (dir / "run").string()) != 0);
    fs::remove_all(dir);
}

}
