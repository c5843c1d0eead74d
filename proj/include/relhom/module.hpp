#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "relhom/algebra.hpp"
#include "relhom/matrix.hpp"

namespace relhom {

// Finite-dimensional right module over an Algebra. Vectors are columns; the
// action matrix of b sends v to v.b, so rho(b_i b_j) = rho(b_j) rho(b_i).
// Copies share the underlying data, which also serves as cache identity.
class Module {
  public:
    Module(AlgebraPtr algebra, std::vector<Matrix> action);
    static Module zero(AlgebraPtr algebra);

    const AlgebraPtr& algebra() const { return d_->algebra; }
    size_t dim() const { return d_->dim; }
    const Matrix& action(size_t basis_index) const { return d_->action[basis_index]; }
    const std::vector<Matrix>& actions() const { return d_->action; }
    Matrix action_of(const std::vector<uint32_t>& coords) const;
    const Field& field() const { return d_->algebra->field(); }

    bool same_as(const Module& o) const { return d_ == o.d_; }
    const void* key() const { return d_.get(); }

  private:
    struct Data {
        AlgebraPtr algebra;
        size_t dim;
        std::vector<Matrix> action;
    };
    std::shared_ptr<const Data> d_;
};

class Morphism {
  public:
    Morphism(Module source, Module target, Matrix mat);

    const Module& source() const { return source_; }
    const Module& target() const { return target_; }
    const Matrix& matrix() const { return mat_; }

    bool is_zero() const { return mat_.is_zero(); }
    bool is_injective() const;
    bool is_surjective() const;
    std::optional<Morphism> inverse() const;

  private:
    Module source_, target_;
    Matrix mat_;
};

Morphism identity_morphism(const Module& m);
Morphism zero_morphism(const Module& src, const Module& tgt);
Morphism compose(const Morphism& g, const Morphism& f);  // g after f
Morphism madd(const Morphism& a, const Morphism& b);
Morphism msub(const Morphism& a, const Morphism& b);
Morphism mneg(const Morphism& a);
Morphism msmul(uint32_t c, const Morphism& a);

// Basis of hom_A(m, n), deterministic order (kernel basis of the intertwiner
// system over the algebra's generating set).
std::vector<Morphism> hom_space(const Module& m, const Module& n);

struct Submodule {
    Module module;
    Morphism inclusion;  // module -> ambient
};

struct Quotient {
    Module module;
    Morphism projection;  // ambient -> module
    Matrix section;       // module -> ambient splitting of the underlying spaces
};

struct ImageData {
    Module module;
    Morphism inclusion;       // module -> target of f
    Morphism corestriction;   // source of f -> module
};

Submodule kernel(const Morphism& f);
Quotient cokernel(const Morphism& f);
ImageData image(const Morphism& f);

// Submodule spanned by the given row vectors (closed under the action before
// materializing).
Submodule submodule_from_vectors(const Module& ambient, const Matrix& rows);

struct DirectSum {
    Module module;
    std::vector<Morphism> injections;
    std::vector<Morphism> projections;
};

DirectSum direct_sum(const std::vector<Module>& parts);
DirectSum direct_sum(const AlgebraPtr& algebra, const std::vector<Module>& parts);

// Block matrix of maps, blocks[i][j] : sources[j] -> targets[i]; a null
// optional stands for the zero map.
Morphism matrix_morphism(const std::vector<Module>& targets, const std::vector<Module>& sources,
                         const std::vector<std::vector<std::optional<Morphism>>>& blocks);

struct PushoutResult {
    Module object;
    Morphism from_first;   // Y -> object, for the span f: X->Y
    Morphism from_second;  // Z -> object, for g: X->Z
    Quotient quot;         // coker presentation of the object
    DirectSum sum;         // Y + Z with its structure maps
    Morphism span_f, span_g;
};

// Pushout of f: X->Y along g: X->Z, computed as coker of (f, -g): X -> Y + Z.
PushoutResult pushout(const Morphism& f, const Morphism& g);

// Map out of pushout(f, g) induced by a: Y->T, b: Z->T with a.f = b.g.
Morphism pushout_induced(const PushoutResult& po, const Morphism& a, const Morphism& b);

struct PullbackResult {
    Module object;
    Morphism to_first;   // object -> Y, for the cospan f: Y->X
    Morphism to_second;  // object -> Z, for g: Z->X
};

PullbackResult pullback(const Morphism& f, const Morphism& g);

enum class IsoSearchStatus { Found, Impossible, NotFoundProbabilistic };

struct IsoSearchResult {
    IsoSearchStatus status;
    std::optional<Morphism> iso;
    std::string note;
};

// Searches hom(m, n) for an invertible element: exhaustive for small
// coefficient spaces, else seeded random combinations (256 trials).
IsoSearchResult find_isomorphism(const Module& m, const Module& n);

// k-linear dual as a right module over the opposite algebra; dual(dual(m))
// is bound to the original algebra pointer.
Module dual(const Module& m);
Morphism dual(const Morphism& f);

// Restriction along a subalgebra: the same space as a module over
// sub.as_algebra().
Module restrict_to(const Module& m, const Subalgebra& sub, const AlgebraPtr& sub_algebra);

// Short exact sequence witness 0 -> A -> B -> C -> 0; validates exactness.
struct ShortExactSequence {
    Morphism mono;
    Morphism epi;

    ShortExactSequence(Morphism mono_, Morphism epi_);
};

// Vectorization glue for hom computations: row-major vec of the matrix.
std::vector<uint32_t> vec_of(const Morphism& f);
Morphism morphism_from_vec(const Module& src, const Module& tgt, const std::vector<uint32_t>& v);

// Deterministic standard family of test modules: zero, simples and
// indecomposable projectives (with quiver provenance), and the regular
// module.
struct NamedModule {
    std::string name;
    Module module;
};

Module regular_module(const AlgebraPtr& a);
std::vector<Submodule> indecomposable_projectives(const AlgebraPtr& a);
Module simple_module(const AlgebraPtr& a, size_t vertex);
std::vector<NamedModule> standard_family(const AlgebraPtr& a);

}  // namespace relhom
