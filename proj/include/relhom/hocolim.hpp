#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relhom/stable.hpp"

namespace relhom {

// Shear map s: X + Z -> Y + Z of two E-monos e: X -> Y, f: Z -> Y, with
// blocks (per source summand) [e, 0; f, id]. coker(s) is isomorphic to
// coker(e), and s is an E-mono for classes with retractile monics.
struct ShearResult {
    Morphism shear;  // X + Z -> Y + Z
    DirectSum source_sum, target_sum;
};

ShearResult shear_mono(const AllowableClass& e, const Morphism& e_map, const Morphism& f_map);

struct PushoutSquare {
    Morphism cofibration;  // f: X -> Y, an E-mono
    Morphism other;        // g: X -> Z
    PushoutResult po;
    bool opposite_leg_is_cofibration;                 // pushout closure, checked
    std::optional<Morphism> properness_certificate;  // stable inverse of the opposite leg
};

// Builds the square and checks pushout closure. With certify_properness, and
// g a weak equivalence, also certifies the opposite leg Y -> Y +_X Z.
PushoutSquare homotopy_pushout(const AllowableClass& e, const Morphism& f, const Morphism& g,
                               bool certify_properness = false);

// Functorial E-mono embedding into an E-projective. Object values are cached
// by module identity; the three cone conditions are verified per call.
class ConeProvider {
  public:
    virtual ~ConeProvider() = default;

    struct ConeObject {
        Module cone;    // P_X, E-projective
        Morphism unit;  // i_X : X -> P_X, an E-mono
        // maps X -> A indexing the cone copies (empty for custom cones)
        std::vector<Morphism> family;
        // sums of regular modules skip the projectivity re-check
        bool free_by_construction = false;
    };

    const ConeObject& object(const AllowableClass& e, const Module& x);

    // J(f): P_X -> P_Y with J(f) . i_X = i_Y . f; E-monos map to E-monos
    // (verified). Extra affine constraints may pin the choice.
    virtual Morphism map(const AllowableClass& e, const Morphism& f,
                         const std::vector<MorphismConstraint>& extra = {});

  protected:
    virtual ConeObject build(const AllowableClass& e, const Module& x) = 0;

  private:
    std::map<const void*, ConeObject> cache_;
};

// Minimal injecting family into the regular module. The naturality maps are
// found by affine solves; fine for factorizations and one-off suspensions.
class FreeCone : public ConeProvider {
  protected:
    ConeObject build(const AllowableClass& e, const Module& x) override;
};

// The full hom(X, A) family with the canonical reindexing on morphisms
// (J(f) phi at index g is phi at g.f). This is an honest functor, so
// naturality and functoriality hold exactly; over a self-injective algebra
// the regular module cogenerates and suspensions of cofibrations stay
// cofibrations. The default cone for realization towers.
class FullHomCone : public ConeProvider {
  public:
    Morphism map(const AllowableClass& e, const Morphism& f,
                 const std::vector<MorphismConstraint>& extra = {}) override;

  protected:
    ConeObject build(const AllowableClass& e, const Module& x) override;
    // number of extra zero-indexed padding copies of A per cone
    virtual size_t padding() const { return 0; }
};

// FullHomCone padded with an extra copy of the regular module; a second
// valid cone functor, used to exercise cone-independence.
class PaddedHomCone : public FullHomCone {
  protected:
    size_t padding() const override { return 1; }
};

// Factorization f = f1 . f0 with f0 = [i_X, f]: X -> P_X + Y a cofibration
// and f1 the projection, a weak equivalence with explicit stable inverse.
struct Factorization {
    Morphism cofibration;      // X -> P_X + Y
    Morphism weak_equivalence; // P_X + Y -> Y
    Morphism stable_inverse;   // Y -> P_X + Y
    Module cone;               // P_X
};

Factorization factorize(const AllowableClass& e, ConeProvider& cone, const Morphism& f);

// Suspension: pushout of i_X along itself, with the data needed to induce
// maps out of it.
struct Suspension {
    Module object;
    Morphism leg1, leg2;  // P_X -> object
    Morphism unit_used;   // i_X
    PushoutResult po;
};

Suspension suspend(const AllowableClass& e, ConeProvider& cone, const Module& x);

// Map out of a suspension from two maps a1, a2: P_X -> T agreeing on X.
Morphism suspension_induced(const Suspension& s, const Morphism& a1, const Morphism& a2);

// Sigma(f) for f: X -> Y, induced by J(f) on both cone copies.
Morphism suspend_map(const AllowableClass& e, ConeProvider& cone, const Morphism& f,
                     const Suspension& sx, const Suspension& sy);

struct Tower {
    std::vector<Module> objects;
    std::vector<Morphism> maps;  // objects[i] -> objects[i+1]
    bool eventually_identity = true;

    void validate(const AllowableClass& e) const;
};

Module tower_colimit(const Tower& t);

struct TowerComparison {
    bool commutes = false;
    std::vector<bool> level_weak_equivalence;
    std::optional<Morphism> colimit_map;
    bool colimit_weak_equivalence = false;
};

TowerComparison compare_towers(const AllowableClass& e, const Tower& f, const Tower& g,
                               const std::vector<Morphism>& phi);

struct SimplicialModule {
    AlgebraPtr algebra;
    size_t truncation = 0;
    std::vector<Module> levels;            // F_0 .. F_truncation
    std::vector<std::vector<Morphism>> faces;  // faces[n] = {d_0..d_n}: F_n -> F_{n-1}

    void validate() const;  // truncated simplicial identities d_i d_j = d_{j-1} d_i, i < j
};

struct RealizationStage {
    Module attached_from;   // Sigma^{n-1}(W_n)
    Module attached_cone;   // Sigma^{n-1}(coprod_{i>=n} P_{F_i})
    Morphism attach;        // f_n into the previous stage
    Morphism cone_leg;      // left vertical, a cofibration
    Morphism bottom;        // attached_cone -> stage object
    Morphism step;          // previous stage -> stage object, a cofibration
    Module object;
};

struct RealizationTower {
    SimplicialModule input;
    Module stage0;
    std::vector<RealizationStage> stages;  // stages 1..N+1
    Tower tower;
    Module colimit;
};

RealizationTower realization_tower(const AllowableClass& e, ConeProvider& cone,
                                   const SimplicialModule& f);

Module realize(const AllowableClass& e, ConeProvider& cone, const SimplicialModule& f);

// Levelwise map of truncated simplicial modules; checks commutation with the
// face maps.
struct SimplicialMap {
    std::vector<Morphism> levels;
};

struct RealizationComparison {
    RealizationTower source, target;
    std::vector<Morphism> stage_maps;  // GR_phi(n), n = 0..
    std::vector<bool> stage_weak_equivalence;
    std::optional<Morphism> colimit_map;
    bool realizations_stably_equivalent = false;
};

RealizationComparison compare_realizations(const AllowableClass& e, ConeProvider& cone,
                                           const SimplicialModule& f, const SimplicialModule& g,
                                           const SimplicialMap& phi);

}  // namespace relhom
