#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "relhom/module.hpp"

namespace relhom {

// An allowable class of short exact sequences, determined by its kind:
//   Absolute  - all short exact sequences
//   Split     - the split ones
//   Relative  - the ones split after restriction to a subalgebra
//   Heller    - the ones whose epi stays surjective under hom(P, -) for a
//               user-supplied family of generators P (asserted E-projective)
class AllowableClass {
  public:
    enum class Kind { Absolute, Split, Relative, Heller };

    static AllowableClass absolute(AlgebraPtr a);
    static AllowableClass split(AlgebraPtr a);
    static AllowableClass relative_to(AlgebraPtr a, Subalgebra sub);
    static AllowableClass heller(AlgebraPtr a, std::vector<Module> generators);

    Kind kind() const { return kind_; }
    const AlgebraPtr& algebra() const { return algebra_; }
    const std::optional<Subalgebra>& subalgebra() const { return sub_; }
    const AlgebraPtr& sub_algebra() const { return sub_alg_; }
    const std::vector<Module>& heller_generators() const { return gens_; }
    std::string kind_name() const;

  private:
    AllowableClass(Kind k, AlgebraPtr a);
    Kind kind_;
    AlgebraPtr algebra_;
    std::optional<Subalgebra> sub_;
    AlgebraPtr sub_alg_;          // sub as standalone algebra (Relative)
    std::vector<Module> gens_;    // Heller

    friend struct ClassCaches;
    std::shared_ptr<struct ClassCaches> caches_;

  public:
    const std::shared_ptr<struct ClassCaches>& caches() const { return caches_; }
};

bool is_e_epi(const AllowableClass& e, const Morphism& f);
bool is_e_mono(const AllowableClass& e, const Morphism& f);

struct SplitWitness {
    bool holds = false;
    std::optional<Morphism> splitting;  // section of the cover / retraction of the envelope
};

SplitWitness is_e_projective_with_witness(const AllowableClass& e, const Module& m);
SplitWitness is_e_injective_with_witness(const AllowableClass& e, const Module& m);
bool is_e_projective(const AllowableClass& e, const Module& m);
bool is_e_injective(const AllowableClass& e, const Module& m);

// E-epi from an E-projective onto m, with its direct-sum decomposition into
// summands (used to present maps factoring through the cover cheaply).
struct Cover {
    Morphism map;  // source -> m
    std::vector<Module> summands;
    std::vector<Morphism> injections;      // summand -> source
    std::vector<Morphism> component_maps;  // summand -> m
};

Cover canonical_cover(const AllowableClass& e, const Module& m);

struct Envelope {
    Morphism map;  // m -> target, an E-mono into an E-injective
};

Envelope canonical_envelope(const AllowableClass& e, const Module& m);

// Induction and coinduction along the subalgebra of a Relative class.
struct InducedModule {
    Module module;
    Morphism counit;  // module -> m, the canonical E-epi cover
};
InducedModule induced_module(const AllowableClass& e, const Module& m);

struct CoinducedModule {
    Module module;
    Morphism unit;  // m -> module, the canonical E-mono envelope
};
CoinducedModule coinduced_module(const AllowableClass& e, const Module& m);

// E-projective resolution P_len -> ... -> P_0 -> x built by iterating
// canonical covers on kernels. With `minimize`, covers are projective covers
// (quiver provenance) or free covers of stripped kernels, so projective
// inputs get length-0 resolutions.
struct Resolution {
    Module target;
    std::vector<Module> stages;          // P_0 .. P_len
    std::vector<Morphism> differentials; // d_i : P_i -> P_{i-1}, i >= 1
    Morphism augmentation;               // P_0 -> target
    std::vector<Submodule> kernels;      // K_{i+1} inside P_i
    std::vector<Morphism> covers;        // P_i ->> K_i (K_0 = target)

    void validate(const AllowableClass& e) const;
};

Resolution resolution(const AllowableClass& e, const Module& x, size_t length,
                      bool minimize = false);

struct ExtGroup {
    size_t degree;
    Module source, target;
    size_t dimension;
    std::vector<Morphism> cocycle_basis;  // maps P_degree -> target representing classes
};

ExtGroup ext(const AllowableClass& e, const Module& x, const Module& m, size_t degree);

// Functorial map Ext^n(y, m) -> Ext^n(x, m) induced by f: x -> y, as a
// matrix in the two quotient bases; `iso` when bijective.
struct ExtMap {
    size_t degree;
    size_t dim_source_ext;  // dim Ext^n(y, m)
    size_t dim_target_ext;  // dim Ext^n(x, m)
    Matrix matrix;
    bool iso;
};

ExtMap ext_map(const AllowableClass& e, const Morphism& f, const Module& m, size_t degree);

struct ProjectiveDimension {
    bool finite;       // false means "> bound"
    size_t value;      // valid when finite; otherwise bound + 1 as a sentinel
    size_t bound;

    std::string to_string() const;
};

ProjectiveDimension projective_dimension(const AllowableClass& e, const Module& x, size_t bound);

// Split off copies of the class's known E-projectives (indecomposable
// projectives under quiver provenance, else the regular module).
// `iso`: core + stripped -> m.
struct StrippedModule {
    Module core;
    std::vector<Module> stripped;
    Morphism incl_core;   // core -> m, split mono
    Morphism proj_core;   // m -> core, with proj . incl = id
};

StrippedModule strip_projective_summands(const AllowableClass& e, const Module& m);

// Canonical E-projective generator candidates of the class, used by the
// summand stripper and the audit generators.
std::vector<Module> projective_candidates(const AllowableClass& e);

// Lifts g through an E-epi: returns l with epi . l = g. The solve is exact;
// it succeeds whenever g's source is E-projective.
std::optional<Morphism> lift_through_epi(const Morphism& epi, const Morphism& g);

// Extends g along an E-mono: returns l with l . mono = g. Succeeds whenever
// g's target is E-injective.
std::optional<Morphism> extend_along_mono(const Morphism& mono, const Morphism& g);

// Affine solve for a morphism h: src -> tgt with constraints
// left_i . h . right_i = rhs_i; all shapes must be compatible.
struct MorphismConstraint {
    std::optional<Matrix> left;   // post-compose, defaults to identity
    std::optional<Matrix> right;  // pre-compose, defaults to identity
    Matrix rhs;
};
std::optional<Morphism> solve_morphism(const Module& src, const Module& tgt,
                                       const std::vector<MorphismConstraint>& constraints);

// the full affine solution space of the same system
struct MorphismSolutionSpace {
    Morphism particular;
    std::vector<Morphism> homogeneous;
};
std::optional<MorphismSolutionSpace> solve_morphism_space(
    const Module& src, const Module& tgt, const std::vector<MorphismConstraint>& constraints);

}  // namespace relhom
