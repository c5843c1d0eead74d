#pragma once

#include <optional>
#include <string>
#include <vector>

#include "relhom/allowable.hpp"

namespace relhom {

// hom(x, y) together with the subspace of maps factoring through an
// E-projective, decided through the canonical cover of y.
struct StableHom {
    Module source, target;
    std::vector<Morphism> hom_basis;
    RowSpace trivial;  // vec'd subspace of stably trivial maps
    size_t quotient_dim;
};

StableHom stable_hom(const AllowableClass& e, const Module& x, const Module& y);

// The vec'd subspace of hom(x, y) of maps factoring through the canonical
// cover of y (equivalently through any E-projective).
RowSpace stably_trivial_subspace(const AllowableClass& e, const Module& x, const Module& y);

bool is_stably_trivial(const AllowableClass& e, const Morphism& f);

// Returns a stable inverse h (h.f ~ id, f.h ~ id) when f is an E-stable
// equivalence; nullopt otherwise. The condition is affine-linear in h, so
// the answer is exact.
std::optional<Morphism> is_stable_equivalence(const AllowableClass& e, const Morphism& f);

// Certificate that f becomes an isomorphism after summing E-projectives:
// g: X + P -> Y + Q invertible with proj_Y . g . incl_X = f.
struct StabilizedIso {
    Module p, q;
    Morphism iso;        // X + P -> Y + Q
    Morphism incl_x;     // X -> X + P
    Morphism proj_y;     // Y + Q -> Y
    Morphism original;   // f

    void verify(const AllowableClass& e) const;
};

std::optional<StabilizedIso> hilton_rees_certificate(const AllowableClass& e, const Morphism& f);

// Kernel of the canonical cover; with `minimized`, projective summands are
// stripped from the result first.
Module syzygy(const AllowableClass& e, const Module& x, bool minimized = true);

struct ChainLift {
    Resolution source_res, target_res;
    std::vector<Morphism> theta;        // P^X_i -> P^Y_i
    std::vector<Morphism> syzygy_maps;  // K^X_i -> K^Y_i; index 0 is f itself
};

ChainLift chain_lift(const AllowableClass& e, const Morphism& f, size_t depth);

// Presentation 0 -> Q -> P + X -> Y -> 0 in E with P E-projective and Q of
// E-projective dimension <= degree - 1, extending f.
struct OortPresentation {
    size_t degree;
    Module p, q;
    Morphism mono;  // Q -> P + X
    Morphism epi;   // P + X -> Y
    Morphism incl_x;
    ProjectiveDimension q_dimension;
    Resolution q_witness;  // resolution certifying the dimension bound

    void verify(const AllowableClass& e) const;
};

struct OortOutcome {
    std::optional<OortPresentation> presentation;
    std::string failure_reason;
    size_t failing_stage = 0;
};

OortOutcome oort_presentation(const AllowableClass& e, const Morphism& f, size_t degree);

}  // namespace relhom
