#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "relhom/hocolim.hpp"

namespace relhom {

// Seeded generators. Outputs always satisfy their type invariants; failure
// to produce one within the retry budget raises ComputeError.
class ModuleGenerator {
  public:
    ModuleGenerator(AlgebraPtr algebra, uint64_t seed);

    // random quotient of a free module with dimension <= target_dim (+slack)
    Module random_module(size_t target_dim);
    // random E-mono out of `source` (split paddings sheared by a random
    // automorphism, so non-split-looking cofibrations also occur)
    Morphism random_cofibration(const AllowableClass& e, const Module& source,
                                size_t padding_dim);
    // random weak equivalence out of `source`: a stabilized isomorphism
    // X -> (X + P) composed with an automorphism; padding 0 gives an
    // automorphism of X itself
    Morphism random_weak_equivalence(const AllowableClass& e, const Module& source,
                                     size_t padding_copies);
    // arbitrary morphism out of `source` into a random module
    Morphism random_morphism(const Module& source, size_t target_dim);

    uint64_t raw() { return rng_(); }
    uint32_t field_element();

  private:
    AlgebraPtr algebra_;
    std::mt19937_64 rng_;
};

// The Weq 2 test diagram: rows are spans with the left legs cofibrations,
// the vertical maps are weak equivalences.
struct Weq2Diagram {
    // top row: X' <- Y' -> Z'; bottom row: X <- Y -> Z
    Morphism top_cof, top_other;
    Morphism bot_cof, bot_other;
    Morphism vert_x, vert_y, vert_z;

    void validate_shape() const;  // commutativity of both squares
};

struct Weq2Check {
    Weq2Diagram diagram;
    Module top_pushout, bottom_pushout;
    Morphism induced;
    bool induced_is_weak_equivalence;
};

Weq2Check check_weq2_diagram(const AllowableClass& e, const Weq2Diagram& d);

struct Violation {
    size_t trial;
    std::string detail;
    Weq2Check check;
};

struct AuditReport {
    std::string scenario;
    uint64_t seed = 0;
    size_t trials = 0;
    std::vector<Violation> violations;
    std::string verdict;
};

// Random Weq 2 diagrams; with `inject_counterexample`, trial 0 is the
// canonical counterexample diagram when one exists.
AuditReport weq2_audit(const AllowableClass& e, size_t trials, uint64_t seed,
                       bool inject_counterexample = false);

struct CounterexampleBundle {
    Module x;                        // E-projective dimension exactly 1
    ProjectiveDimension x_dimension;
    Morphism res_mono;               // P_1 -> P_0
    Morphism res_epi;                // P_0 -> x
    Weq2Diagram diagram;
    Weq2Check check;                 // induced map fails to be a weak equivalence
    std::optional<std::string> obstruction_target;  // family member with Ext^1(x, -) != 0
    size_t obstruction_ext_dim = 0;
};

// Searches the standard family for a module of E-projective dimension
// exactly 1 (descending through syzygies from any finite dimension >= 2) and
// assembles the failing pushout comparison.
std::optional<CounterexampleBundle> canonical_counterexample(const AllowableClass& e,
                                                             size_t bound = 8);

struct ProbeInstance {
    std::string description;
    bool colimit_projective;
};

struct ProbeReport {
    std::string shape;  // "pushout" or "tower"
    std::vector<ProbeInstance> instances;
    size_t failures = 0;
};

ProbeReport colimit_projectivity_probe(const AllowableClass& e, const std::string& shape,
                                       size_t instances, uint64_t seed);

}  // namespace relhom
