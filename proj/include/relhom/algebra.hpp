#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "relhom/matrix.hpp"

namespace relhom {

struct Arrow {
    size_t source;
    size_t target;
    std::string label;
};

struct Quiver {
    size_t vertices = 0;
    std::vector<Arrow> arrows;

    void validate() const;
    size_t arrow_index(const std::string& label) const;
};

// One relation of a bound quiver presentation: a linear combination of
// parallel paths, each path given by its arrow indices in composition order
// (left to right: the path "a then b" is {a, b}).
struct PathTerm {
    uint32_t coef;
    std::vector<size_t> arrows;
};
using Relation = std::vector<PathTerm>;

struct QuiverProvenance {
    Quiver quiver;
    std::vector<size_t> vertex_idempotents;        // basis index of e_v per vertex
    std::vector<size_t> radical_basis;             // basis indices spanning rad A
    std::vector<size_t> arrow_basis;               // basis index per arrow
    std::vector<std::vector<size_t>> basis_paths;  // arrow sequence per basis element
    std::vector<size_t> basis_source;              // vertex per basis element
    std::vector<size_t> basis_target;
};

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

// Finite-dimensional associative unital algebra over GF(p), given by
// structure constants. Immutable after construction; share via AlgebraPtr.
class Algebra {
  public:
    // structure[i][j] = coordinate vector of basis_i * basis_j
    Algebra(Field field, std::vector<std::string> basis_labels,
            std::vector<std::vector<std::vector<uint32_t>>> structure, std::vector<uint32_t> unit,
            std::optional<QuiverProvenance> provenance, std::string name);

    const Field& field() const { return field_; }
    size_t dim() const { return dim_; }
    const std::string& name() const { return name_; }
    const std::vector<std::string>& basis_labels() const { return labels_; }
    const std::vector<uint32_t>& unit() const { return unit_; }
    const std::vector<std::vector<std::vector<uint32_t>>>& structure() const { return sc_; }
    const std::optional<QuiverProvenance>& provenance() const { return prov_; }
    const std::vector<size_t>& generators() const { return generators_; }

    std::vector<uint32_t> mul(const std::vector<uint32_t>& x,
                              const std::vector<uint32_t>& y) const;

    // matrix of x -> x . b_j (columns indexed by basis)
    Matrix right_mul_matrix(size_t j) const;
    // matrix of x -> b_j . x
    Matrix left_mul_matrix(size_t j) const;
    Matrix right_mul_matrix_of(const std::vector<uint32_t>& coords) const;
    Matrix left_mul_matrix_of(const std::vector<uint32_t>& coords) const;

    bool structurally_equal(const Algebra& o) const;

  private:
    Field field_;
    size_t dim_;
    std::string name_;
    std::vector<std::string> labels_;
    std::vector<std::vector<std::vector<uint32_t>>> sc_;
    std::vector<uint32_t> unit_;
    std::optional<QuiverProvenance> prov_;
    std::vector<size_t> generators_;

    friend AlgebraPtr opposite_algebra(const AlgebraPtr& a);
    mutable std::mutex op_mutex_;
    mutable std::weak_ptr<const Algebra> opposite_;
};

AlgebraPtr make_algebra(Field field, std::vector<std::string> labels,
                        std::vector<std::vector<std::vector<uint32_t>>> structure,
                        std::vector<uint32_t> unit, std::optional<QuiverProvenance> prov,
                        std::string name);

// Path algebra of q modulo the given admissible relations. `nilpotency_bound`
// B asserts that paths of length >= B vanish in the quotient; the builder
// verifies this and fails otherwise. Basis elements are the surviving paths
// of length < B in (length, discovery) order.
AlgebraPtr from_bound_quiver(Field field, const Quiver& q, const std::vector<Relation>& relations,
                             size_t nilpotency_bound, std::string name = "");

// Double-opposite returns the original pointer.
AlgebraPtr opposite_algebra(const AlgebraPtr& a);

struct AlgebraCheckReport {
    bool ok = true;
    std::vector<std::string> failures;
    // first failing basis triple of the associativity check, if any
    std::optional<std::array<size_t, 3>> witness_triple;
};

AlgebraCheckReport check_algebra(const Algebra& a);

struct Subalgebra {
    AlgebraPtr parent;
    Matrix basis;  // rows = basis vectors in parent coordinates

    // validates unit membership and closure under multiplication
    void validate() const;
    // the subalgebra as a standalone algebra (no provenance), plus the
    // embedding of its basis into the parent (the rows of `basis`)
    AlgebraPtr as_algebra() const;
};

}  // namespace relhom
