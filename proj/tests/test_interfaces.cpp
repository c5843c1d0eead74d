#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "relhom/serialize.hpp"

using namespace relhom;

namespace {

json load(const std::string& name) {
    std::ifstream in(std::string(RELHOM_DATA_DIR) + "/" + name);
    REQUIRE(in.good());
    json j;
    in >> j;
    return j;
}

}  // namespace

TEST_CASE("bundled algebra specs load and validate") {
    for (const char* name : {"a2_gf2.json", "kx2_gf2.json", "kx3_gf2.json", "kx2_gf3.json",
                             "kx3_gf3.json", "f2c2.json"}) {
        AlgebraPtr a = algebra_from_json(load(name));
        CHECK(check_algebra(*a).ok);
    }
    CHECK(algebra_from_json(load("a2_gf2.json"))->dim() == 3);
    CHECK(algebra_from_json(load("kx3_gf2.json"))->dim() == 3);
    CHECK(algebra_from_json(load("f2c2.json"))->dim() == 2);
    CHECK(algebra_from_json(load("kx2_gf3.json"))->field().p() == 3);
}

TEST_CASE("matrix serialization round-trips and rejects bad shapes") {
    Field f(5);
    Matrix m = Matrix::from_rows(f, {{1, 2, 3}, {4, 0, 1}}, 3);
    json j = matrix_to_json(m);
    CHECK(matrix_from_json(f, j, 2, 3) == m);
    CHECK_THROWS_AS(matrix_from_json(f, j, 3, 2), SchemaError);
    // negative entries reduce into the field
    json neg = json::array({json::array({-1})});
    CHECK(matrix_from_json(f, neg, 1, 1).at(0, 0) == 4);
}

TEST_CASE("algebra round-trip preserves structure and provenance") {
    AlgebraPtr a = algebra_from_json(load("a2_gf2.json"));
    json j = algebra_to_json(*a);
    AlgebraPtr b = algebra_from_json(j);
    CHECK(a->structurally_equal(*b));
    REQUIRE(b->provenance().has_value());
    CHECK(b->provenance()->vertex_idempotents == a->provenance()->vertex_idempotents);
    // simple modules still constructible after the round trip
    CHECK(simple_module(b, 0).dim() == 1);
}

TEST_CASE("module and morphism round-trips") {
    AlgebraPtr a = algebra_from_json(load("a2_gf2.json"));
    Module p0 = indecomposable_projectives(a)[0].module;
    json mj = module_to_json(p0, "a2_gf2");
    Module back = module_from_json(a, mj);
    CHECK(back.dim() == p0.dim());
    for (size_t b = 0; b < a->dim(); ++b) CHECK(back.action(b) == p0.action(b));

    auto homs = hom_space(indecomposable_projectives(a)[1].module, p0);
    REQUIRE(!homs.empty());
    json fj = morphism_to_json(homs[0], "a2_gf2");
    Morphism f = morphism_from_json(a, fj);
    CHECK(f.matrix() == homs[0].matrix());
}

TEST_CASE("module specs resolve by name") {
    AlgebraPtr a = algebra_from_json(load("a2_gf2.json"));
    CHECK(resolve_module_spec(a, json("@zero")).dim() == 0);
    CHECK(resolve_module_spec(a, json("@regular")).dim() == 3);
    CHECK(resolve_module_spec(a, json("@simple:0")).dim() == 1);
    CHECK(resolve_module_spec(a, json("@proj:0")).dim() == 2);
    CHECK(resolve_module_spec(a, json("@proj:1")).dim() == 1);
    CHECK_THROWS_AS(resolve_module_spec(a, json("@nonsense")), SchemaError);
    CHECK_THROWS_AS(resolve_module_spec(a, json("@proj:7")), SchemaError);
}

TEST_CASE("class serialization round-trips for all kinds") {
    AlgebraPtr a = algebra_from_json(load("kx3_gf2.json"));
    AllowableClass abs = AllowableClass::absolute(a);
    CHECK(class_from_json(a, class_to_json(abs)).kind() == AllowableClass::Kind::Absolute);

    AllowableClass spl = AllowableClass::split(a);
    CHECK(class_from_json(a, class_to_json(spl)).kind() == AllowableClass::Kind::Split);

    Subalgebra s{a, Matrix::from_rows(a->field(), {{1, 0, 0}, {0, 0, 1}}, 3)};
    AllowableClass rel = AllowableClass::relative_to(a, s);
    AllowableClass rel2 = class_from_json(a, class_to_json(rel));
    CHECK(rel2.kind() == AllowableClass::Kind::Relative);
    CHECK(rel2.subalgebra()->basis == s.basis);

    AllowableClass hel = AllowableClass::heller(a, {regular_module(a)});
    AllowableClass hel2 = class_from_json(a, class_to_json(hel));
    CHECK(hel2.kind() == AllowableClass::Kind::Heller);
    CHECK(hel2.heller_generators().size() == 1);
}

TEST_CASE("simplicial and tower schemas round-trip") {
    AlgebraPtr a = algebra_from_json(load("f2c2.json"));
    Module reg = regular_module(a);
    SimplicialModule f;
    f.algebra = a;
    f.truncation = 1;
    f.levels = {reg, reg};
    f.faces = {{}, {identity_morphism(reg), zero_morphism(reg, reg)}};
    f.validate();
    json j = simplicial_to_json(f, "f2c2");
    SimplicialModule g = simplicial_from_json(a, j);
    CHECK(g.truncation == 1);
    CHECK(g.faces[1][0].matrix() == f.faces[1][0].matrix());

    Tower t{{reg, reg}, {identity_morphism(reg)}, true};
    json tj = tower_to_json(t, "f2c2");
    Tower t2 = tower_from_json(a, tj);
    CHECK(t2.objects.size() == 2);
    CHECK(t2.maps[0].matrix().is_identity());
}

TEST_CASE("hilton-rees certificates serialize with full matrices") {
    AlgebraPtr a = algebra_from_json(load("kx2_gf2.json"));
    AllowableClass abs = AllowableClass::absolute(a);
    ModuleGenerator gen(a, 3);
    Module x = gen.random_module(2);
    Morphism f = gen.random_weak_equivalence(abs, x, 1);
    auto cert = hilton_rees_certificate(abs, f);
    REQUIRE(cert.has_value());
    json j = certificate_to_json(*cert, "kx2_gf2");
    // external re-verification: rebuild the pieces and check the identity
    Module p = module_from_json(a, j.at("p"));
    Module q = module_from_json(a, j.at("q"));
    Morphism orig = morphism_from_json(a, j.at("original"));
    DirectSum xp = direct_sum(a, {orig.source(), p});
    DirectSum yq = direct_sum(a, {orig.target(), q});
    Matrix iso = matrix_from_json(a->field(), j.at("iso"), yq.module.dim(), xp.module.dim());
    Matrix incl = matrix_from_json(a->field(), j.at("incl_x"), xp.module.dim(),
                                   orig.source().dim());
    Matrix proj = matrix_from_json(a->field(), j.at("proj_y"), orig.target().dim(),
                                   yq.module.dim());
    CHECK(mul(proj, mul(iso, incl)) == orig.matrix());
    CHECK(rank(iso) == xp.module.dim());
}

TEST_CASE("schema validation errors carry the SchemaError type") {
    CHECK_THROWS_AS(algebra_from_json(json{{"schema", "algebra.v1"}}), json::exception);
    json bad = load("kx2_gf2.json");
    bad["relations"] = json::array({json::array({json::array({1, json::array({"y"})})})});
    CHECK_THROWS_AS(algebra_from_json(bad), SchemaError);
    json badfield = load("kx2_gf2.json");
    badfield["field"]["p"] = 6;
    CHECK_THROWS_AS(algebra_from_json(badfield), SchemaError);
}

TEST_CASE("audit report schema fields") {
    AlgebraPtr a = algebra_from_json(load("a2_gf2.json"));
    AllowableClass abs = AllowableClass::absolute(a);
    AuditReport rep = weq2_audit(abs, 2, 9, true);
    json j = audit_report_to_json(rep, abs);
    CHECK(j.at("schema") == "audit.v1");
    CHECK(j.at("seed") == 9);
    CHECK(j.at("trials") == 2);
    CHECK(j.contains("violations"));
    // counterexample bundle serialization
    auto bundle = canonical_counterexample(abs);
    REQUIRE(bundle.has_value());
    json cj = counterexample_to_json(*bundle, abs);
    CHECK(cj.at("schema") == "counterexample.v1");
    CHECK(cj.at("x_dimension") == "1");
}
