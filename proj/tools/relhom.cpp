// relhom: relative homological algebra workbench over finite-dimensional
// algebras. Subcommands wrap the library operations; all file formats are
// the JSON schemas described in the README.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "relhom/serialize.hpp"

using namespace relhom;

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open file: " + path);
    json j;
    try {
        in >> j;
    } catch (const std::exception& ex) {
        throw SchemaError("malformed JSON in " + path + ": " + ex.what());
    }
    return j;
}

struct Common {
    std::string algebra_path;
    std::string class_spec = "absolute";
    std::optional<uint32_t> field_check;
    bool emit_json = false;
    std::string out_path;

    AlgebraPtr algebra;

    void load() {
        algebra = algebra_from_json(read_json_file(algebra_path));
        if (field_check && *field_check != algebra->field().p())
            throw SchemaError("--field does not match the algebra's field");
    }

    AllowableClass load_class() const {
        if (class_spec == "absolute") return AllowableClass::absolute(algebra);
        if (class_spec == "split") return AllowableClass::split(algebra);
        return class_from_json(algebra, read_json_file(class_spec));
    }

    Module load_module(const std::string& spec) const {
        if (!spec.empty() && spec[0] == '@') return resolve_module_spec(algebra, json(spec));
        return resolve_module_spec(algebra, read_json_file(spec));
    }

    Morphism load_morphism(const std::string& path) const {
        return morphism_from_json(algebra, read_json_file(path));
    }

    void emit(const json& report, const std::string& text) const {
        if (emit_json)
            std::cout << report.dump(2) << "\n";
        else
            std::cout << text;
        if (!out_path.empty()) {
            std::ofstream out(out_path);
            if (!out) throw SchemaError("cannot write " + out_path);
            out << report.dump(2) << "\n";
        }
    }
};

void add_common(CLI::App* cmd, Common& c) {
    cmd->add_option("--algebra", c.algebra_path, "algebra spec (JSON)")->required();
    cmd->add_option("--class", c.class_spec, "allowable class: absolute, split, or a JSON file");
    cmd->add_option("--field", c.field_check, "expected field modulus (consistency check)");
    cmd->add_flag("--json", c.emit_json, "emit the JSON report on stdout");
    cmd->add_option("--out", c.out_path, "write the JSON report to a file");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relhom: relative homological algebra workbench"};
    app.require_subcommand(1);

    Common c;
    std::string module_spec, source_spec, target_spec, morphism_path, cof_path, other_path,
        simplicial_path, shape = "pushout";
    size_t length = 4, degree = 1, trials = 100, bound = 8, instances = 10;
    uint64_t seed = 1;
    bool inject = false, certify = false;

    auto* cmd_resolve = app.add_subcommand("resolve", "E-projective resolution of a module");
    add_common(cmd_resolve, c);
    cmd_resolve->add_option("--module", module_spec, "module spec or @name")->required();
    cmd_resolve->add_option("--length", length, "resolution length");

    auto* cmd_ext = app.add_subcommand("ext", "relative Ext group");
    add_common(cmd_ext, c);
    cmd_ext->add_option("--source", source_spec)->required();
    cmd_ext->add_option("--target", target_spec)->required();
    cmd_ext->add_option("--degree", degree);

    auto* cmd_stable = app.add_subcommand("stable-check", "is a map an E-stable equivalence?");
    add_common(cmd_stable, c);
    cmd_stable->add_option("--morphism", morphism_path, "morphism.v1 JSON file")->required();

    auto* cmd_pushout = app.add_subcommand("pushout", "homotopy pushout of a span");
    add_common(cmd_pushout, c);
    cmd_pushout->add_option("--cof", cof_path, "cofibration leg (morphism.v1)")->required();
    cmd_pushout->add_option("--other", other_path, "other leg (morphism.v1)")->required();
    cmd_pushout->add_flag("--certify", certify, "certify left properness of the opposite leg");

    auto* cmd_fact = app.add_subcommand("factorize", "cofibration/weak-equivalence factorization");
    add_common(cmd_fact, c);
    cmd_fact->add_option("--morphism", morphism_path)->required();

    auto* cmd_realize = app.add_subcommand("realize", "geometric realization tower");
    add_common(cmd_realize, c);
    cmd_realize->add_option("--simplicial", simplicial_path, "simplicial.v1 JSON file")
        ->required();

    auto* cmd_audit = app.add_subcommand("audit", "randomized Weq 2 audit");
    add_common(cmd_audit, c);
    cmd_audit->add_option("--trials", trials);
    cmd_audit->add_option("--seed", seed);
    cmd_audit->add_flag("--inject", inject, "inject the canonical counterexample as trial 0");

    auto* cmd_cex = app.add_subcommand("counterexample", "canonical homotopy-cofiber failure");
    add_common(cmd_cex, c);
    cmd_cex->add_option("--bound", bound, "projective dimension search bound");

    auto* cmd_probe = app.add_subcommand("probe", "colimit projectivity probe");
    add_common(cmd_probe, c);
    cmd_probe->add_option("--shape", shape, "pushout or tower");
    cmd_probe->add_option("--instances", instances);
    cmd_probe->add_option("--seed", seed);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp")
            return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        c.load();
        if (cmd_resolve->parsed()) {
            AllowableClass e = c.load_class();
            Module m = c.load_module(module_spec);
            Resolution res = resolution(e, m, length, true);
            json rep = resolution_to_json(res);
            std::string text = "resolution of a dim-" + std::to_string(m.dim()) + " module:\n";
            size_t effective = res.stages.size();
            while (effective > 0 && res.stages[effective - 1].dim() == 0) --effective;
            for (size_t i = 0; i < res.stages.size(); ++i)
                text += "  P_" + std::to_string(i) + ": dim " +
                        std::to_string(res.stages[i].dim()) + "\n";
            text += "effective length: " + std::to_string(effective == 0 ? 0 : effective - 1) +
                    "\n";
            rep["effective_length"] = effective == 0 ? 0 : effective - 1;
            c.emit(rep, text);
        } else if (cmd_ext->parsed()) {
            AllowableClass e = c.load_class();
            Module x = c.load_module(source_spec);
            Module m = c.load_module(target_spec);
            ExtGroup g = ext(e, x, m, degree);
            json rep = ext_to_json(g);
            c.emit(rep, "Ext^" + std::to_string(degree) + " has dimension " +
                            std::to_string(g.dimension) + "\n");
        } else if (cmd_stable->parsed()) {
            AllowableClass e = c.load_class();
            Morphism f = c.load_morphism(morphism_path);
            auto h = is_stable_equivalence(e, f);
            json rep;
            rep["schema"] = "stable_check.v1";
            rep["stable_equivalence"] = h.has_value();
            if (h) rep["inverse"] = matrix_to_json(h->matrix());
            c.emit(rep, std::string("stable equivalence: ") + (h ? "yes" : "no") + "\n");
            return h ? 0 : 1;
        } else if (cmd_pushout->parsed()) {
            AllowableClass e = c.load_class();
            Morphism f = c.load_morphism(cof_path);
            Morphism g = c.load_morphism(other_path);
            PushoutSquare sq = homotopy_pushout(e, f, g, certify);
            json rep;
            rep["schema"] = "pushout.v1";
            rep["object_dim"] = sq.po.object.dim();
            rep["opposite_leg_is_cofibration"] = sq.opposite_leg_is_cofibration;
            rep["leg_from_cof_target"] = matrix_to_json(sq.po.from_first.matrix());
            rep["leg_from_other_target"] = matrix_to_json(sq.po.from_second.matrix());
            if (certify)
                rep["opposite_leg_weak_equivalence"] = sq.properness_certificate.has_value();
            std::string text = "pushout has dimension " + std::to_string(sq.po.object.dim()) +
                               "\nopposite leg cofibration: " +
                               (sq.opposite_leg_is_cofibration ? "yes" : "no") + "\n";
            if (certify)
                text += std::string("properness certificate: ") +
                        (sq.properness_certificate ? "yes" : "no") + "\n";
            c.emit(rep, text);
        } else if (cmd_fact->parsed()) {
            AllowableClass e = c.load_class();
            Morphism f = c.load_morphism(morphism_path);
            FullHomCone cone;
            Factorization fac = factorize(e, cone, f);
            json rep;
            rep["schema"] = "factorization.v1";
            rep["cone_dim"] = fac.cone.dim();
            rep["cofibration"] = matrix_to_json(fac.cofibration.matrix());
            rep["weak_equivalence"] = matrix_to_json(fac.weak_equivalence.matrix());
            c.emit(rep, "factored through a cone of dimension " +
                            std::to_string(fac.cone.dim()) + "\n");
        } else if (cmd_realize->parsed()) {
            AllowableClass e = c.load_class();
            SimplicialModule f = simplicial_from_json(c.algebra, read_json_file(simplicial_path));
            FullHomCone cone;
            RealizationTower t = realization_tower(e, cone, f);
            json rep = realization_to_json(t);
            std::string text = "realization tower stages:";
            for (const auto& o : t.tower.objects) text += " " + std::to_string(o.dim());
            text += "\nrealization dimension: " + std::to_string(t.colimit.dim()) + "\n";
            c.emit(rep, text);
        } else if (cmd_audit->parsed()) {
            AllowableClass e = c.load_class();
            AuditReport rep = weq2_audit(e, trials, seed, inject);
            json j = audit_report_to_json(rep, e);
            c.emit(j, rep.verdict + " (" + std::to_string(rep.trials) + " trials, " +
                          std::to_string(rep.violations.size()) + " violations)\n");
            return rep.violations.empty() ? 0 : 1;
        } else if (cmd_cex->parsed()) {
            AllowableClass e = c.load_class();
            auto bundle = canonical_counterexample(e, bound);
            if (!bundle) {
                json rep;
                rep["schema"] = "counterexample.v1";
                rep["found"] = false;
                c.emit(rep,
                       "no module of finite positive E-projective dimension found; homotopy "
                       "pushouts may be well-defined here\n");
                return 0;
            }
            json rep = counterexample_to_json(*bundle, e);
            rep["found"] = true;
            std::string text =
                "counterexample found: module of E-projective dimension " +
                bundle->x_dimension.to_string() + " (dim " + std::to_string(bundle->x.dim()) +
                ")\n" + "pushout comparison verdict: NOT stable equivalence\n";
            if (bundle->obstruction_target)
                text += "Ext^1 obstruction target: " + *bundle->obstruction_target + " (dim " +
                        std::to_string(bundle->obstruction_ext_dim) + ")\n";
            c.emit(rep, text);
        } else if (cmd_probe->parsed()) {
            AllowableClass e = c.load_class();
            ProbeReport rep = colimit_projectivity_probe(e, shape, instances, seed);
            json j;
            j["schema"] = "probe.v1";
            j["shape"] = rep.shape;
            j["failures"] = rep.failures;
            json insts = json::array();
            for (const auto& i : rep.instances)
                insts.push_back(json{{"description", i.description},
                                     {"colimit_projective", i.colimit_projective}});
            j["instances"] = insts;
            c.emit(j, "probe (" + rep.shape + "): " + std::to_string(rep.failures) +
                          " non-projective colimits out of " +
                          std::to_string(rep.instances.size()) + "\n");
            return rep.failures == 0 ? 0 : 1;
        }
        return 0;
    } catch (const SchemaError& ex) {
        std::cerr << "input error: " << ex.what() << "\n";
        return 2;
    } catch (const ComputeError& ex) {
        std::cerr << "computation error: " << ex.what() << "\n";
        return 3;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    }
}
