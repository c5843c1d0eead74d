#include "relhom/serialize.hpp"

#include <algorithm>

namespace relhom {

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (size_t r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (size_t c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Field& f, const json& j, size_t rows, size_t cols) {
    if (!j.is_array()) throw SchemaError("matrix must be an array of arrays");
    if (j.size() != rows && !(j.empty() && rows == 0))
        throw SchemaError("matrix row count mismatch");
    Matrix m(f, rows, cols);
    for (size_t r = 0; r < rows; ++r) {
        const json& row = j.at(r);
        if (!row.is_array() || row.size() != cols) throw SchemaError("matrix column mismatch");
        for (size_t c = 0; c < cols; ++c) {
            int64_t v = row.at(c).get<int64_t>();
            m.at(r, c) = f.reduce(v);
        }
    }
    return m;
}

json field_to_json(const Field& f) { return json{{"p", f.p()}}; }

Field field_from_json(const json& j) {
    if (!j.contains("p")) throw SchemaError("field needs a modulus p");
    return Field(j.at("p").get<uint32_t>());
}

json algebra_to_json(const Algebra& a) {
    json j;
    j["schema"] = "algebra.v1";
    j["name"] = a.name();
    j["field"] = field_to_json(a.field());
    j["dim"] = a.dim();
    j["labels"] = a.basis_labels();
    json unit = json::array();
    for (uint32_t u : a.unit()) unit.push_back(u);
    j["unit"] = unit;
    json st = json::array();
    for (size_t i = 0; i < a.dim(); ++i) {
        json row = json::array();
        for (size_t k = 0; k < a.dim(); ++k) {
            json v = json::array();
            for (uint32_t x : a.structure()[i][k]) v.push_back(x);
            row.push_back(std::move(v));
        }
        st.push_back(std::move(row));
    }
    j["structure"] = st;
    if (a.provenance()) {
        const auto& prov = *a.provenance();
        json q;
        q["vertices"] = prov.quiver.vertices;
        json arrows = json::array();
        for (const auto& ar : prov.quiver.arrows)
            arrows.push_back(json::array({ar.source, ar.target, ar.label}));
        q["arrows"] = arrows;
        json p;
        p["quiver"] = q;
        p["vertex_idempotents"] = prov.vertex_idempotents;
        p["radical_basis"] = prov.radical_basis;
        p["arrow_basis"] = prov.arrow_basis;
        p["basis_paths"] = prov.basis_paths;
        p["basis_source"] = prov.basis_source;
        p["basis_target"] = prov.basis_target;
        j["provenance"] = p;
    }
    return j;
}

namespace {

AlgebraPtr algebra_from_quiver_json(const json& j) {
    Field f = field_from_json(j.at("field"));
    const json& q = j.at("quiver");
    Quiver quiver;
    quiver.vertices = q.at("vertices").get<size_t>();
    for (const auto& ar : q.at("arrows")) {
        if (!ar.is_array() || ar.size() != 3) throw SchemaError("arrow must be [s, t, label]");
        quiver.arrows.push_back(
            {ar.at(0).get<size_t>(), ar.at(1).get<size_t>(), ar.at(2).get<std::string>()});
    }
    quiver.validate();
    std::vector<Relation> relations;
    if (j.contains("relations")) {
        for (const auto& rel : j.at("relations")) {
            Relation r;
            for (const auto& term : rel) {
                if (!term.is_array() || term.size() != 2)
                    throw SchemaError("relation term must be [coef, [labels]]");
                PathTerm t;
                t.coef = f.reduce(term.at(0).get<int64_t>());
                for (const auto& lbl : term.at(1))
                    t.arrows.push_back(quiver.arrow_index(lbl.get<std::string>()));
                r.push_back(std::move(t));
            }
            relations.push_back(std::move(r));
        }
    }
    size_t bound = j.at("nilpotency_bound").get<size_t>();
    std::string name = j.value("name", "boundquiver");
    return from_bound_quiver(f, quiver, relations, bound, name);
}

AlgebraPtr algebra_from_raw_json(const json& j) {
    Field f = field_from_json(j.at("field"));
    size_t dim = j.at("dim").get<size_t>();
    std::vector<uint32_t> unit;
    for (const auto& v : j.at("unit")) unit.push_back(f.reduce(v.get<int64_t>()));
    if (unit.size() != dim) throw SchemaError("unit length mismatch");
    const json& st = j.at("structure");
    if (st.size() != dim) throw SchemaError("structure rows mismatch");
    std::vector<std::vector<std::vector<uint32_t>>> sc(dim,
                                                       std::vector<std::vector<uint32_t>>(dim));
    for (size_t i = 0; i < dim; ++i) {
        if (st.at(i).size() != dim) throw SchemaError("structure cols mismatch");
        for (size_t k = 0; k < dim; ++k) {
            std::vector<uint32_t> v;
            for (const auto& x : st.at(i).at(k)) v.push_back(f.reduce(x.get<int64_t>()));
            if (v.size() != dim) throw SchemaError("structure vector length mismatch");
            sc[i][k] = std::move(v);
        }
    }
    std::vector<std::string> labels;
    if (j.contains("labels")) {
        for (const auto& l : j.at("labels")) labels.push_back(l.get<std::string>());
        if (labels.size() != dim) throw SchemaError("label count mismatch");
    } else {
        for (size_t i = 0; i < dim; ++i) labels.push_back("b" + std::to_string(i));
    }
    std::string name = j.value("name", "algebra");
    std::optional<QuiverProvenance> prov;
    if (j.contains("provenance")) {
        const json& p = j.at("provenance");
        QuiverProvenance q;
        q.quiver.vertices = p.at("quiver").at("vertices").get<size_t>();
        for (const auto& ar : p.at("quiver").at("arrows"))
            q.quiver.arrows.push_back(
                {ar.at(0).get<size_t>(), ar.at(1).get<size_t>(), ar.at(2).get<std::string>()});
        q.vertex_idempotents = p.at("vertex_idempotents").get<std::vector<size_t>>();
        q.radical_basis = p.at("radical_basis").get<std::vector<size_t>>();
        q.arrow_basis = p.at("arrow_basis").get<std::vector<size_t>>();
        q.basis_paths = p.at("basis_paths").get<std::vector<std::vector<size_t>>>();
        q.basis_source = p.at("basis_source").get<std::vector<size_t>>();
        q.basis_target = p.at("basis_target").get<std::vector<size_t>>();
        prov = std::move(q);
    }
    auto a = make_algebra(f, std::move(labels), std::move(sc), std::move(unit), std::move(prov),
                          name);
    auto rep = check_algebra(*a);
    if (!rep.ok) throw SchemaError("algebra check failed: " + rep.failures.front());
    return a;
}

}  // namespace

AlgebraPtr algebra_from_json(const json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != "algebra.v1")
        throw SchemaError("expected schema algebra.v1");
    if (j.contains("quiver")) return algebra_from_quiver_json(j);
    return algebra_from_raw_json(j);
}

json subalgebra_to_json(const Subalgebra& s) {
    return json{{"basis", matrix_to_json(s.basis)}};
}

Subalgebra subalgebra_from_json(const AlgebraPtr& parent, const json& j) {
    const json& rows = j.at("basis");
    Subalgebra s{parent, matrix_from_json(parent->field(), rows, rows.size(), parent->dim())};
    s.validate();
    return s;
}

json module_to_json(const Module& m, const std::string& algebra_ref) {
    json j;
    j["schema"] = "module.v1";
    j["algebra_ref"] = algebra_ref;
    j["dim"] = m.dim();
    json action = json::array();
    for (size_t b = 0; b < m.algebra()->dim(); ++b) action.push_back(matrix_to_json(m.action(b)));
    j["action"] = action;
    return j;
}

Module module_from_json(const AlgebraPtr& algebra, const json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != "module.v1")
        throw SchemaError("expected schema module.v1");
    size_t dim = j.at("dim").get<size_t>();
    const json& action = j.at("action");
    if (action.size() != algebra->dim())
        throw SchemaError("module action count does not match the algebra");
    std::vector<Matrix> mats;
    for (size_t b = 0; b < algebra->dim(); ++b)
        mats.push_back(matrix_from_json(algebra->field(), action.at(b), dim, dim));
    return Module(algebra, std::move(mats));
}

Module resolve_module_spec(const AlgebraPtr& algebra, const json& spec) {
    if (spec.is_object()) return module_from_json(algebra, spec);
    if (!spec.is_string()) throw SchemaError("module spec must be JSON or a @name");
    std::string s = spec.get<std::string>();
    if (s == "@zero") return Module::zero(algebra);
    if (s == "@regular") return regular_module(algebra);
    if (s.rfind("@simple:", 0) == 0) return simple_module(algebra, std::stoul(s.substr(8)));
    if (s.rfind("@proj:", 0) == 0) {
        size_t v = std::stoul(s.substr(6));
        auto projs = indecomposable_projectives(algebra);
        if (v >= projs.size()) throw SchemaError("projective index out of range");
        return projs[v].module;
    }
    if (s.rfind("@dual:", 0) == 0) {
        json inner = s.substr(6);
        return dual(resolve_module_spec(opposite_algebra(algebra), inner));
    }
    throw SchemaError("unknown module spec: " + s);
}

json morphism_to_json(const Morphism& f, const std::string& algebra_ref) {
    json j;
    j["schema"] = "morphism.v1";
    j["source"] = module_to_json(f.source(), algebra_ref);
    j["target"] = module_to_json(f.target(), algebra_ref);
    j["matrix"] = matrix_to_json(f.matrix());
    return j;
}

Morphism morphism_from_json(const AlgebraPtr& algebra, const json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != "morphism.v1")
        throw SchemaError("expected schema morphism.v1");
    Module src = resolve_module_spec(algebra, j.at("source"));
    Module tgt = resolve_module_spec(algebra, j.at("target"));
    Matrix m = matrix_from_json(algebra->field(), j.at("matrix"), tgt.dim(), src.dim());
    return Morphism(src, tgt, m);
}

json class_to_json(const AllowableClass& e) {
    json j;
    j["schema"] = "class.v1";
    j["kind"] = e.kind_name();
    if (e.kind() == AllowableClass::Kind::Relative)
        j["subalgebra"] = subalgebra_to_json(*e.subalgebra());
    if (e.kind() == AllowableClass::Kind::Heller) {
        json gens = json::array();
        for (const auto& g : e.heller_generators()) gens.push_back(module_to_json(g, "algebra"));
        j["generators"] = gens;
    }
    return j;
}

AllowableClass class_from_json(const AlgebraPtr& algebra, const json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != "class.v1")
        throw SchemaError("expected schema class.v1");
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "absolute") return AllowableClass::absolute(algebra);
    if (kind == "split") return AllowableClass::split(algebra);
    if (kind == "relative")
        return AllowableClass::relative_to(algebra,
                                           subalgebra_from_json(algebra, j.at("subalgebra")));
    if (kind == "heller") {
        std::vector<Module> gens;
        for (const auto& g : j.at("generators")) gens.push_back(resolve_module_spec(algebra, g));
        return AllowableClass::heller(algebra, std::move(gens));
    }
    throw SchemaError("unknown class kind: " + kind);
}

json simplicial_to_json(const SimplicialModule& f, const std::string& algebra_ref) {
    json j;
    j["schema"] = "simplicial.v1";
    j["truncation"] = f.truncation;
    json mods = json::array();
    for (const auto& m : f.levels) mods.push_back(module_to_json(m, algebra_ref));
    j["modules"] = mods;
    json faces = json::array();
    for (size_t n = 0; n < f.faces.size(); ++n) {
        json lvl = json::array();
        for (const auto& d : f.faces[n]) lvl.push_back(matrix_to_json(d.matrix()));
        faces.push_back(std::move(lvl));
    }
    j["faces"] = faces;
    return j;
}

SimplicialModule simplicial_from_json(const AlgebraPtr& algebra, const json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != "simplicial.v1")
        throw SchemaError("expected schema simplicial.v1");
    SimplicialModule f;
    f.algebra = algebra;
    f.truncation = j.at("truncation").get<size_t>();
    for (const auto& m : j.at("modules")) f.levels.push_back(resolve_module_spec(algebra, m));
    const json& faces = j.at("faces");
    if (faces.size() != f.truncation + 1) throw SchemaError("face level count mismatch");
    for (size_t n = 0; n <= f.truncation; ++n) {
        std::vector<Morphism> lvl;
        if (n > 0) {
            if (faces.at(n).size() != n + 1) throw SchemaError("face count mismatch");
            for (size_t i = 0; i <= n; ++i)
                lvl.push_back(Morphism(f.levels[n], f.levels[n - 1],
                                       matrix_from_json(algebra->field(), faces.at(n).at(i),
                                                        f.levels[n - 1].dim(),
                                                        f.levels[n].dim())));
        }
        f.faces.push_back(std::move(lvl));
    }
    f.validate();
    return f;
}

json tower_to_json(const Tower& t, const std::string& algebra_ref) {
    json j;
    j["schema"] = "tower.v1";
    j["eventually_identity"] = t.eventually_identity;
    json mods = json::array();
    for (const auto& m : t.objects) mods.push_back(module_to_json(m, algebra_ref));
    j["modules"] = mods;
    json maps = json::array();
    for (const auto& m : t.maps) maps.push_back(matrix_to_json(m.matrix()));
    j["maps"] = maps;
    return j;
}

Tower tower_from_json(const AlgebraPtr& algebra, const json& j) {
    if (j.contains("schema") && j.at("schema").get<std::string>() != "tower.v1")
        throw SchemaError("expected schema tower.v1");
    Tower t;
    t.eventually_identity = j.value("eventually_identity", true);
    for (const auto& m : j.at("modules")) t.objects.push_back(resolve_module_spec(algebra, m));
    const json& maps = j.at("maps");
    if (maps.size() + 1 != t.objects.size()) throw SchemaError("tower map count mismatch");
    for (size_t i = 0; i < maps.size(); ++i)
        t.maps.push_back(Morphism(t.objects[i], t.objects[i + 1],
                                  matrix_from_json(algebra->field(), maps.at(i),
                                                   t.objects[i + 1].dim(), t.objects[i].dim())));
    return t;
}

json resolution_to_json(const Resolution& r) {
    json j;
    j["schema"] = "resolution.v1";
    j["target_dim"] = r.target.dim();
    json dims = json::array();
    for (const auto& s : r.stages) dims.push_back(s.dim());
    j["stage_dims"] = dims;
    json diffs = json::array();
    for (const auto& d : r.differentials) diffs.push_back(matrix_to_json(d.matrix()));
    j["differentials"] = diffs;
    j["augmentation"] = matrix_to_json(r.augmentation.matrix());
    json kdims = json::array();
    for (const auto& k : r.kernels) kdims.push_back(k.module.dim());
    j["kernel_dims"] = kdims;
    return j;
}

json ext_to_json(const ExtGroup& g) {
    json j;
    j["schema"] = "ext.v1";
    j["degree"] = g.degree;
    j["dimension"] = g.dimension;
    json reps = json::array();
    for (const auto& c : g.cocycle_basis) reps.push_back(matrix_to_json(c.matrix()));
    j["cocycle_basis"] = reps;
    return j;
}

json certificate_to_json(const StabilizedIso& c, const std::string& algebra_ref) {
    json j;
    j["schema"] = "hilton_rees.v1";
    j["p"] = module_to_json(c.p, algebra_ref);
    j["q"] = module_to_json(c.q, algebra_ref);
    j["iso"] = matrix_to_json(c.iso.matrix());
    j["incl_x"] = matrix_to_json(c.incl_x.matrix());
    j["proj_y"] = matrix_to_json(c.proj_y.matrix());
    j["original"] = morphism_to_json(c.original, algebra_ref);
    return j;
}

json oort_to_json(const OortPresentation& p, const std::string& algebra_ref) {
    json j;
    j["schema"] = "oort.v1";
    j["degree"] = p.degree;
    j["p"] = module_to_json(p.p, algebra_ref);
    j["q"] = module_to_json(p.q, algebra_ref);
    j["mono"] = matrix_to_json(p.mono.matrix());
    j["epi"] = matrix_to_json(p.epi.matrix());
    j["q_dimension"] = p.q_dimension.to_string();
    j["q_witness"] = resolution_to_json(p.q_witness);
    return j;
}

json weq2_check_to_json(const Weq2Check& c, const AllowableClass& e) {
    const std::string ref = e.algebra()->name();
    json j;
    j["schema"] = "weq2_check.v1";
    json d;
    d["top_cof"] = morphism_to_json(c.diagram.top_cof, ref);
    d["top_other"] = morphism_to_json(c.diagram.top_other, ref);
    d["bot_cof"] = morphism_to_json(c.diagram.bot_cof, ref);
    d["bot_other"] = morphism_to_json(c.diagram.bot_other, ref);
    d["vert_x"] = morphism_to_json(c.diagram.vert_x, ref);
    d["vert_y"] = morphism_to_json(c.diagram.vert_y, ref);
    d["vert_z"] = morphism_to_json(c.diagram.vert_z, ref);
    j["diagram"] = d;
    j["top_pushout_dim"] = c.top_pushout.dim();
    j["bottom_pushout_dim"] = c.bottom_pushout.dim();
    j["induced"] = matrix_to_json(c.induced.matrix());
    j["induced_is_weak_equivalence"] = c.induced_is_weak_equivalence;
    return j;
}

json audit_report_to_json(const AuditReport& r, const AllowableClass& e) {
    json j;
    j["schema"] = "audit.v1";
    j["scenario"] = r.scenario;
    j["seed"] = r.seed;
    j["trials"] = r.trials;
    j["verdict"] = r.verdict;
    j["algebra"] = algebra_to_json(*e.algebra());
    j["class"] = class_to_json(e);
    json viols = json::array();
    for (const auto& v : r.violations) {
        json w;
        w["trial"] = v.trial;
        w["detail"] = v.detail;
        w["algebra"] = algebra_to_json(*e.algebra());
        w["class"] = class_to_json(e);
        w["check"] = weq2_check_to_json(v.check, e);
        viols.push_back(std::move(w));
    }
    j["violations"] = viols;
    return j;
}

json counterexample_to_json(const CounterexampleBundle& b, const AllowableClass& e) {
    const std::string ref = e.algebra()->name();
    json j;
    j["schema"] = "counterexample.v1";
    j["algebra"] = algebra_to_json(*e.algebra());
    j["class"] = class_to_json(e);
    j["x"] = module_to_json(b.x, ref);
    j["x_dimension"] = b.x_dimension.to_string();
    j["res_mono"] = morphism_to_json(b.res_mono, ref);
    j["res_epi"] = morphism_to_json(b.res_epi, ref);
    j["check"] = weq2_check_to_json(b.check, e);
    if (b.obstruction_target) {
        j["obstruction_target"] = *b.obstruction_target;
        j["obstruction_ext_dim"] = b.obstruction_ext_dim;
    }
    return j;
}

json realization_to_json(const RealizationTower& t) {
    json j;
    j["schema"] = "realization.v1";
    j["truncation"] = t.input.truncation;
    json dims = json::array();
    for (const auto& o : t.tower.objects) dims.push_back(o.dim());
    j["stage_dims"] = dims;
    j["colimit_dim"] = t.colimit.dim();
    return j;
}

bool reverify_weq2_witness(const json& witness) {
    AlgebraPtr a = algebra_from_json(witness.at("algebra"));
    AllowableClass e = class_from_json(a, witness.at("class"));
    const json& d = witness.at("check").at("diagram");
    Weq2Diagram diagram{
        morphism_from_json(a, d.at("top_cof")),  morphism_from_json(a, d.at("top_other")),
        morphism_from_json(a, d.at("bot_cof")),  morphism_from_json(a, d.at("bot_other")),
        morphism_from_json(a, d.at("vert_x")),   morphism_from_json(a, d.at("vert_y")),
        morphism_from_json(a, d.at("vert_z"))};
    Weq2Check check = check_weq2_diagram(e, diagram);
    return !check.induced_is_weak_equivalence;
}

}  // namespace relhom
