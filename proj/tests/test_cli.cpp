#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "relhom/serialize.hpp"

using namespace relhom;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
};

RunResult run_cli(const std::string& args) {
    std::string tmp = std::string("/tmp/relhom_cli_out_") + std::to_string(rand()) + ".txt";
    std::string cmd = std::string(RELHOM_BIN) + " " + args + " > " + tmp + " 2>&1";
    int rc = std::system(cmd.c_str());
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    std::remove(tmp.c_str());
    return {WEXITSTATUS(rc), ss.str()};
}

std::string data(const std::string& name) { return std::string(RELHOM_DATA_DIR) + "/" + name; }

std::string write_temp_json(const json& j, const std::string& tag) {
    std::string path = "/tmp/relhom_test_" + tag + ".json";
    std::ofstream out(path);
    out << j.dump(2);
    return path;
}

}  // namespace

TEST_CASE("resolve: S(0) over A2 has effective length 1") {
    auto r = run_cli("resolve --algebra " + data("a2_gf2.json") + " --module @simple:0 --length 2");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("effective length: 1") != std::string::npos);
}

TEST_CASE("resolve: the zero module reports length 0") {
    auto r = run_cli("resolve --algebra " + data("a2_gf2.json") + " --module @zero --length 1");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("effective length: 0") != std::string::npos);
}

TEST_CASE("malformed input exits 2") {
    std::string bad = "/tmp/relhom_bad.json";
    std::ofstream(bad) << "{ not json";
    auto r = run_cli("resolve --algebra " + bad + " --module @zero");
    CHECK(r.exit_code == 2);
    auto missing = run_cli("resolve --algebra /tmp/no_such_file_relhom.json --module @zero");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("--field consistency check") {
    auto ok = run_cli("ext --algebra " + data("kx2_gf2.json") +
                      " --source @simple:0 --target @simple:0 --degree 1 --field 2");
    CHECK(ok.exit_code == 0);
    auto bad = run_cli("ext --algebra " + data("kx2_gf2.json") +
                       " --source @simple:0 --target @simple:0 --field 3");
    CHECK(bad.exit_code == 2);
}

TEST_CASE("ext dimensions through the CLI") {
    auto r = run_cli("ext --algebra " + data("kx2_gf2.json") +
                     " --source @simple:0 --target @simple:0 --degree 3");
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("dimension 1") != std::string::npos);
}

TEST_CASE("stable-check: identity yes (exit 0), collapse-to-zero no (exit 1)") {
    AlgebraPtr a = algebra_from_json(json::parse(std::ifstream(data("kx2_gf2.json"))));
    Module k = simple_module(a, 0);
    std::string yes = write_temp_json(morphism_to_json(identity_morphism(k), "kx2_gf2"), "id");
    auto r1 = run_cli("stable-check --algebra " + data("kx2_gf2.json") + " --morphism " + yes);
    CHECK(r1.exit_code == 0);
    CHECK(r1.out.find("stable equivalence: yes") != std::string::npos);

    std::string no = write_temp_json(
        morphism_to_json(zero_morphism(k, Module::zero(a)), "kx2_gf2"), "zero");
    auto r2 = run_cli("stable-check --algebra " + data("kx2_gf2.json") + " --morphism " + no);
    CHECK(r2.exit_code == 1);
    CHECK(r2.out.find("stable equivalence: no") != std::string::npos);
}

TEST_CASE("counterexample: A2 found with the expected verdict text, QF none") {
    auto r = run_cli("counterexample --algebra " + data("a2_gf2.json"));
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("NOT stable equivalence") != std::string::npos);
    auto none = run_cli("counterexample --algebra " + data("kx2_gf2.json"));
    CHECK(none.exit_code == 0);
    CHECK(none.out.find("no module of finite positive") != std::string::npos);
}

TEST_CASE("audit: clean run exits 0, injected A2 run exits 1, json round-trips") {
    auto clean = run_cli("audit --algebra " + data("f2c2.json") + " --trials 10 --seed 4");
    CHECK(clean.exit_code == 0);
    CHECK(clean.out.find("no violations") != std::string::npos);

    std::string outp = "/tmp/relhom_audit_out.json";
    auto dirty = run_cli("audit --algebra " + data("a2_gf2.json") +
                         " --trials 3 --seed 4 --inject --out " + outp);
    CHECK(dirty.exit_code == 1);
    std::ifstream in(outp);
    REQUIRE(in.good());
    json j;
    in >> j;
    CHECK(j.at("schema") == "audit.v1");
    CHECK(j.at("violations").size() >= 1);
    CHECK(reverify_weq2_witness(j.at("violations").at(0)));
}

TEST_CASE("pushout through the CLI") {
    AlgebraPtr a = algebra_from_json(json::parse(std::ifstream(data("a2_gf2.json"))));
    auto projs = indecomposable_projectives(a);
    auto homs = hom_space(projs[1].module, projs[0].module);
    REQUIRE(!homs.empty());
    std::string mor = write_temp_json(morphism_to_json(homs[0], "a2_gf2"), "incl");
    auto r = run_cli("pushout --algebra " + data("a2_gf2.json") + " --cof " + mor + " --other " +
                     mor + " --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("object_dim") == 3);
    CHECK(j.at("opposite_leg_is_cofibration") == true);
}

TEST_CASE("factorize and realize through the CLI") {
    AlgebraPtr a = algebra_from_json(json::parse(std::ifstream(data("kx2_gf2.json"))));
    Module k = simple_module(a, 0);
    std::string mor = write_temp_json(
        morphism_to_json(zero_morphism(k, Module::zero(a)), "kx2_gf2"), "tozero");
    auto r = run_cli("factorize --algebra " + data("kx2_gf2.json") + " --morphism " + mor);
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("cone of dimension 2") != std::string::npos);

    Module reg = regular_module(a);
    SimplicialModule f;
    f.algebra = a;
    f.truncation = 1;
    f.levels = {reg, reg};
    f.faces = {{}, {identity_morphism(reg), zero_morphism(reg, reg)}};
    std::string simp = write_temp_json(simplicial_to_json(f, "kx2_gf2"), "simp");
    auto rr = run_cli("realize --algebra " + data("kx2_gf2.json") + " --simplicial " + simp +
                      " --json");
    CHECK(rr.exit_code == 0);
    json j = json::parse(rr.out);
    CHECK(j.at("schema") == "realization.v1");
    CHECK(j.at("stage_dims").size() == 3);
}

TEST_CASE("probe subcommand exit codes reflect failures") {
    auto bad = run_cli("probe --algebra " + data("a2_gf2.json") + " --shape pushout --instances 3");
    CHECK(bad.exit_code == 1);
    auto good = run_cli("probe --algebra " + data("kx2_gf2.json") +
                        " --shape tower --instances 3");
    CHECK(good.exit_code == 0);
}

TEST_CASE("json mode output parses for resolve") {
    auto r = run_cli("resolve --algebra " + data("kx3_gf2.json") +
                     " --module @simple:0 --length 3 --json");
    CHECK(r.exit_code == 0);
    json j = json::parse(r.out);
    CHECK(j.at("schema") == "resolution.v1");
    CHECK(j.at("stage_dims").size() == 4);
}
