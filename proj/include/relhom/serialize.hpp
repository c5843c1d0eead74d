#pragma once

#include <json.hpp>

#include "relhom/audit.hpp"

namespace relhom {

using json = nlohmann::json;

// matrices are arrays of arrays of integers; the empty matrix needs its
// shape from context
json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Field& f, const json& j, size_t rows, size_t cols);

json field_to_json(const Field& f);
Field field_from_json(const json& j);

// schema "algebra.v1": either a bound-quiver presentation or raw structure
// constants; emitted algebras always carry the raw form plus the quiver when
// provenance exists
json algebra_to_json(const Algebra& a);
AlgebraPtr algebra_from_json(const json& j);

json subalgebra_to_json(const Subalgebra& s);
Subalgebra subalgebra_from_json(const AlgebraPtr& parent, const json& j);

// schema "module.v1"
json module_to_json(const Module& m, const std::string& algebra_ref);
Module module_from_json(const AlgebraPtr& algebra, const json& j);

// module specs: either inline module.v1 JSON or a name: "@zero", "@regular",
// "@simple:<v>", "@proj:<v>", "@dual:<spec>"
Module resolve_module_spec(const AlgebraPtr& algebra, const json& spec);

// schema "morphism.v1"
json morphism_to_json(const Morphism& f, const std::string& algebra_ref);
Morphism morphism_from_json(const AlgebraPtr& algebra, const json& j);

// schema "class.v1"
json class_to_json(const AllowableClass& e);
AllowableClass class_from_json(const AlgebraPtr& algebra, const json& j);

// schema "simplicial.v1"
json simplicial_to_json(const SimplicialModule& f, const std::string& algebra_ref);
SimplicialModule simplicial_from_json(const AlgebraPtr& algebra, const json& j);

// schema "tower.v1"
json tower_to_json(const Tower& t, const std::string& algebra_ref);
Tower tower_from_json(const AlgebraPtr& algebra, const json& j);

// reports
json resolution_to_json(const Resolution& r);
json ext_to_json(const ExtGroup& g);
json certificate_to_json(const StabilizedIso& c, const std::string& algebra_ref);
json oort_to_json(const OortPresentation& p, const std::string& algebra_ref);
json weq2_check_to_json(const Weq2Check& c, const AllowableClass& e);
json audit_report_to_json(const AuditReport& r, const AllowableClass& e);
json counterexample_to_json(const CounterexampleBundle& b, const AllowableClass& e);
json realization_to_json(const RealizationTower& t);

// re-runs all checks of a serialized Weq 2 violation witness; returns true
// when the violation reproduces (the induced map again fails to be a weak
// equivalence)
bool reverify_weq2_witness(const json& witness);

}  // namespace relhom
