#include "relhom/module.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace relhom {

Module::Module(AlgebraPtr algebra, std::vector<Matrix> action) {
    if (!algebra) throw ComputeError("module without algebra");
    if (action.size() != algebra->dim()) throw ComputeError("module action count mismatch");
    size_t dim = action.empty() ? 0 : action[0].rows();
    for (const auto& m : action) {
        if (m.rows() != dim || m.cols() != dim) throw ComputeError("module action not square");
        if (!(m.field() == algebra->field())) throw ComputeError("module action field mismatch");
    }
    auto data = std::make_shared<Data>(Data{std::move(algebra), dim, std::move(action)});
    d_ = std::move(data);

    const Algebra& a = *d_->algebra;
    // unit acts as the identity
    Matrix u(a.field(), dim, dim);
    for (size_t j = 0; j < a.dim(); ++j)
        if (a.unit()[j] != 0) u = add(u, smul(a.unit()[j], d_->action[j]));
    if (!u.is_identity()) throw ComputeError("module action: unit does not act as identity");
    // anti-homomorphism on (basis, generator) pairs pins down the whole
    // multiplication table
    for (size_t g : a.generators()) {
        const Matrix& rg = d_->action[g];
        for (size_t i = 0; i < a.dim(); ++i) {
            Matrix lhs(a.field(), dim, dim);
            const auto& prod = a.structure()[i][g];
            for (size_t k = 0; k < a.dim(); ++k)
                if (prod[k] != 0) lhs = add(lhs, smul(prod[k], d_->action[k]));
            if (!(lhs == mul(rg, d_->action[i])))
                throw ComputeError("module action violates the multiplication table");
        }
    }
}

Module Module::zero(AlgebraPtr algebra) {
    std::vector<Matrix> action(algebra->dim(), Matrix(algebra->field(), 0, 0));
    return Module(std::move(algebra), std::move(action));
}

Matrix Module::action_of(const std::vector<uint32_t>& coords) const {
    if (coords.size() != d_->algebra->dim()) throw ComputeError("action coords size mismatch");
    Matrix m(field(), dim(), dim());
    for (size_t j = 0; j < coords.size(); ++j)
        if (coords[j] != 0) m = add(m, smul(coords[j], d_->action[j]));
    return m;
}

Morphism::Morphism(Module source, Module target, Matrix mat)
    : source_(std::move(source)), target_(std::move(target)), mat_(std::move(mat)) {
    if (source_.algebra().get() != target_.algebra().get())
        throw ComputeError("morphism across different algebras");
    if (mat_.rows() != target_.dim() || mat_.cols() != source_.dim())
        throw ComputeError("morphism matrix shape mismatch");
    const Algebra& a = *source_.algebra();
    for (size_t g : a.generators())
        if (!(mul(mat_, source_.action(g)) == mul(target_.action(g), mat_)))
            throw ComputeError("morphism does not intertwine the actions");
}

bool Morphism::is_injective() const { return rank(mat_) == source_.dim(); }
bool Morphism::is_surjective() const { return rank(mat_) == target_.dim(); }

std::optional<Morphism> Morphism::inverse() const {
    if (source_.dim() != target_.dim()) return std::nullopt;
    auto inv = relhom::inverse(mat_);
    if (!inv) return std::nullopt;
    return Morphism(target_, source_, *inv);
}

Morphism identity_morphism(const Module& m) {
    return Morphism(m, m, Matrix::identity(m.field(), m.dim()));
}

Morphism zero_morphism(const Module& src, const Module& tgt) {
    return Morphism(src, tgt, Matrix(src.field(), tgt.dim(), src.dim()));
}

Morphism compose(const Morphism& g, const Morphism& f) {
    if (!f.target().same_as(g.source())) {
        // tolerate structurally equal reconstructions of the same module
        if (f.target().dim() != g.source().dim() ||
            f.target().algebra().get() != g.source().algebra().get() ||
            f.target().actions() != g.source().actions())
            throw ComputeError("composition mismatch");
    }
    return Morphism(f.source(), g.target(), mul(g.matrix(), f.matrix()));
}

Morphism madd(const Morphism& a, const Morphism& b) {
    return Morphism(a.source(), a.target(), add(a.matrix(), b.matrix()));
}
Morphism msub(const Morphism& a, const Morphism& b) {
    return Morphism(a.source(), a.target(), sub(a.matrix(), b.matrix()));
}
Morphism mneg(const Morphism& a) { return Morphism(a.source(), a.target(), neg(a.matrix())); }
Morphism msmul(uint32_t c, const Morphism& a) {
    return Morphism(a.source(), a.target(), smul(c, a.matrix()));
}

std::vector<uint32_t> vec_of(const Morphism& f) { return f.matrix().entries(); }

Morphism morphism_from_vec(const Module& src, const Module& tgt, const std::vector<uint32_t>& v) {
    return Morphism(src, tgt, Matrix::from_flat(src.field(), tgt.dim(), src.dim(), v));
}

std::vector<Morphism> hom_space(const Module& m, const Module& n) {
    if (m.algebra().get() != n.algebra().get()) throw ComputeError("hom across different algebras");
    const Field& f = m.field();
    const size_t ns = m.dim(), nt = n.dim();
    const size_t nvars = ns * nt;
    if (nvars == 0) return {};
    const auto& gens = m.algebra()->generators();
    Matrix system(f, 0, nvars);
    for (size_t g : gens) {
        Matrix eq = sub(right_mul_operator(m.action(g), nt), left_mul_operator(n.action(g), ns));
        system = vstack(system, eq);
    }
    Matrix basis = kernel_basis(system);
    std::vector<Morphism> out;
    out.reserve(basis.rows());
    for (size_t i = 0; i < basis.rows(); ++i) out.push_back(morphism_from_vec(m, n, basis.row(i)));
    return out;
}

static Module induced_on_subspace(const Module& ambient, const Matrix& inclusion) {
    // inclusion: ambient.dim x k with independent columns
    const size_t k = inclusion.cols();
    Solver solver(inclusion);
    std::vector<Matrix> action;
    action.reserve(ambient.algebra()->dim());
    for (size_t j = 0; j < ambient.algebra()->dim(); ++j) {
        auto x = solver.solve(mul(ambient.action(j), inclusion));
        if (!x) throw ComputeError("subspace is not invariant under the action");
        action.push_back(*x);
    }
    (void)k;
    return Module(ambient.algebra(), std::move(action));
}

Submodule kernel(const Morphism& f) {
    Matrix basis = kernel_basis(f.matrix());  // rows span ker
    Matrix incl = transpose(basis);
    Module k = induced_on_subspace(f.source(), incl);
    return Submodule{k, Morphism(k, f.source(), incl)};
}

Quotient cokernel(const Morphism& f) {
    const Module& n = f.target();
    const Field& fl = n.field();
    Matrix img = image_basis(f.matrix());  // rows span im f inside k^{nt}
    RowSpace u(fl, n.dim());
    u.add_rows(img);
    SubspaceQuotient q(u, n.dim());
    const size_t qd = q.quotient_dim();
    Matrix proj(fl, qd, n.dim());
    for (size_t j = 0; j < n.dim(); ++j) {
        std::vector<uint32_t> e(n.dim(), 0);
        e[j] = 1;
        auto c = q.coords(e);
        for (size_t i = 0; i < qd; ++i) proj.at(i, j) = c[i];
    }
    // standard vectors at the free columns split the quotient map
    Matrix section(fl, n.dim(), qd);
    for (size_t i = 0; i < qd; ++i) section.at(q.free_columns()[i], i) = 1;
    std::vector<Matrix> action;
    for (size_t j = 0; j < n.algebra()->dim(); ++j)
        action.push_back(mul(proj, mul(n.action(j), section)));
    Module qm(n.algebra(), std::move(action));
    return Quotient{qm, Morphism(n, qm, proj), section};
}

ImageData image(const Morphism& f) {
    Matrix img = image_basis(f.matrix());
    Matrix incl = transpose(img);
    Module im = induced_on_subspace(f.target(), incl);
    auto core = Solver(incl).solve(f.matrix());
    if (!core) throw ComputeError("image corestriction solve failed");
    return ImageData{im, Morphism(im, f.target(), incl), Morphism(f.source(), im, *core)};
}

Submodule submodule_from_vectors(const Module& ambient, const Matrix& rows) {
    RowSpace span(ambient.field(), ambient.dim());
    span.add_rows(rows);
    bool grew = true;
    while (grew) {
        grew = false;
        Matrix basis = span.basis();
        for (size_t i = 0; i < basis.rows(); ++i)
            for (size_t g : ambient.algebra()->generators()) {
                auto v = apply_vec(ambient.action(g), basis.row(i));
                if (!span.contains(v)) {
                    span.add_row(v);
                    grew = true;
                }
            }
    }
    Matrix incl = transpose(span.basis());
    Module sm = induced_on_subspace(ambient, incl);
    return Submodule{sm, Morphism(sm, ambient, incl)};
}

DirectSum direct_sum(const AlgebraPtr& algebra, const std::vector<Module>& parts) {
    const Field& f = algebra->field();
    size_t total = 0;
    for (const auto& p : parts) {
        if (p.algebra().get() != algebra.get()) throw ComputeError("direct sum algebra mismatch");
        total += p.dim();
    }
    std::vector<Matrix> action;
    for (size_t j = 0; j < algebra->dim(); ++j) {
        Matrix blockm(f, total, total);
        size_t off = 0;
        for (const auto& p : parts) {
            for (size_t r = 0; r < p.dim(); ++r)
                for (size_t c = 0; c < p.dim(); ++c) blockm.at(off + r, off + c) = p.action(j).at(r, c);
            off += p.dim();
        }
        action.push_back(std::move(blockm));
    }
    Module sum(algebra, std::move(action));
    DirectSum out{sum, {}, {}};
    size_t off = 0;
    for (const auto& p : parts) {
        Matrix inj(f, total, p.dim());
        Matrix proj(f, p.dim(), total);
        for (size_t i = 0; i < p.dim(); ++i) {
            inj.at(off + i, i) = 1;
            proj.at(i, off + i) = 1;
        }
        out.injections.push_back(Morphism(p, sum, inj));
        out.projections.push_back(Morphism(sum, p, proj));
        off += p.dim();
    }
    return out;
}

DirectSum direct_sum(const std::vector<Module>& parts) {
    if (parts.empty()) throw ComputeError("direct sum of empty list needs an algebra");
    return direct_sum(parts[0].algebra(), parts);
}

Morphism matrix_morphism(const std::vector<Module>& targets, const std::vector<Module>& sources,
                         const std::vector<std::vector<std::optional<Morphism>>>& blocks) {
    if (targets.empty() || sources.empty()) throw ComputeError("matrix morphism needs blocks");
    const AlgebraPtr& alg = targets[0].algebra();
    DirectSum tg = direct_sum(alg, targets);
    DirectSum sc = direct_sum(alg, sources);
    if (blocks.size() != targets.size()) throw ComputeError("block row count mismatch");
    Matrix mat(alg->field(), tg.module.dim(), sc.module.dim());
    size_t roff = 0;
    for (size_t i = 0; i < targets.size(); ++i) {
        if (blocks[i].size() != sources.size()) throw ComputeError("block col count mismatch");
        size_t coff = 0;
        for (size_t j = 0; j < sources.size(); ++j) {
            if (blocks[i][j]) {
                const Morphism& b = *blocks[i][j];
                if (b.matrix().rows() != targets[i].dim() || b.matrix().cols() != sources[j].dim())
                    throw ComputeError("block shape incompatible");
                for (size_t r = 0; r < targets[i].dim(); ++r)
                    for (size_t c = 0; c < sources[j].dim(); ++c)
                        mat.at(roff + r, coff + c) = b.matrix().at(r, c);
            }
            coff += sources[j].dim();
        }
        roff += targets[i].dim();
    }
    return Morphism(sc.module, tg.module, std::move(mat));
}

PushoutResult pushout(const Morphism& f, const Morphism& g) {
    if (!f.source().same_as(g.source())) {
        if (f.source().dim() != g.source().dim() ||
            f.source().algebra().get() != g.source().algebra().get() ||
            f.source().actions() != g.source().actions())
            throw ComputeError("pushout legs must share a source");
    }
    DirectSum yz = direct_sum(f.source().algebra(), {f.target(), g.target()});
    Matrix combined = vstack(f.matrix(), neg(g.matrix()));
    Morphism h(f.source(), yz.module, combined);
    Quotient q = cokernel(h);
    Morphism leg1 = compose(q.projection, yz.injections[0]);
    Morphism leg2 = compose(q.projection, yz.injections[1]);
    if (!(compose(leg1, f).matrix() == compose(leg2, g).matrix()))
        throw ComputeError("pushout legs fail to agree on the source");
    return PushoutResult{q.module, leg1, leg2, q, yz, f, g};
}

Morphism pushout_induced(const PushoutResult& po, const Morphism& a, const Morphism& b) {
    if (!(compose(a, po.span_f).matrix() == compose(b, po.span_g).matrix()))
        throw ComputeError("induced map data does not commute");
    Matrix combined = hstack(a.matrix(), b.matrix());
    Matrix mat = mul(combined, po.quot.section);
    Morphism out(po.object, a.target(), mat);
    if (!(compose(out, po.from_first).matrix() == a.matrix()) ||
        !(compose(out, po.from_second).matrix() == b.matrix()))
        throw ComputeError("induced map fails the universal property");
    return out;
}

PullbackResult pullback(const Morphism& f, const Morphism& g) {
    if (!f.target().same_as(g.target())) {
        if (f.target().dim() != g.target().dim() ||
            f.target().algebra().get() != g.target().algebra().get() ||
            f.target().actions() != g.target().actions())
            throw ComputeError("pullback legs must share a target");
    }
    DirectSum yz = direct_sum(f.source().algebra(), {f.source(), g.source()});
    Matrix combined = hstack(f.matrix(), neg(g.matrix()));
    Morphism h(yz.module, f.target(), combined);
    Submodule k = kernel(h);
    Morphism leg1 = compose(yz.projections[0], k.inclusion);
    Morphism leg2 = compose(yz.projections[1], k.inclusion);
    if (!(compose(f, leg1).matrix() == compose(g, leg2).matrix()))
        throw ComputeError("pullback legs fail to agree");
    return PullbackResult{k.module, leg1, leg2};
}

IsoSearchResult find_isomorphism(const Module& m, const Module& n) {
    if (m.algebra().get() != n.algebra().get())
        return {IsoSearchStatus::Impossible, std::nullopt, "different algebras"};
    if (m.dim() != n.dim())
        return {IsoSearchStatus::Impossible, std::nullopt, "dimension mismatch"};
    if (m.dim() == 0)
        return {IsoSearchStatus::Found, Morphism(m, n, Matrix(m.field(), 0, 0)), ""};
    auto basis = hom_space(m, n);
    if (basis.empty()) return {IsoSearchStatus::Impossible, std::nullopt, "hom space is zero"};
    const size_t h = basis.size();
    const uint64_t p = m.field().p();

    auto assemble = [&](const std::vector<uint32_t>& coef) {
        Matrix mat(m.field(), n.dim(), m.dim());
        for (size_t i = 0; i < h; ++i)
            if (coef[i] != 0) mat = add(mat, smul(coef[i], basis[i].matrix()));
        return mat;
    };

    double logsize = static_cast<double>(h) * std::log2(static_cast<double>(p));
    if (logsize <= 12.0) {  // p^h <= 4096: exhaustive, certified
        std::vector<uint32_t> coef(h, 0);
        while (true) {
            size_t i = 0;
            while (i < h && coef[i] + 1 == p) coef[i++] = 0;
            if (i == h) break;
            ++coef[i];
            Matrix mat = assemble(coef);
            if (rank(mat) == m.dim())
                return {IsoSearchStatus::Found, Morphism(m, n, mat), "exhaustive"};
        }
        return {IsoSearchStatus::Impossible, std::nullopt,
                "exhausted coefficient space, no invertible combination"};
    }

    std::mt19937_64 rng(0x52454C484F4Dull ^ (m.dim() * 1315423911ull) ^ h);
    std::uniform_int_distribution<uint64_t> dist(0, p - 1);
    for (int trial = 0; trial < 256; ++trial) {
        std::vector<uint32_t> coef(h);
        for (auto& c : coef) c = static_cast<uint32_t>(dist(rng));
        Matrix mat = assemble(coef);
        if (rank(mat) == m.dim())
            return {IsoSearchStatus::Found, Morphism(m, n, mat), "randomized"};
    }
    return {IsoSearchStatus::NotFoundProbabilistic, std::nullopt,
            "not found (probabilistic), 256 seeded trials"};
}

Module dual(const Module& m) {
    AlgebraPtr op = opposite_algebra(m.algebra());
    std::vector<Matrix> action;
    action.reserve(op->dim());
    for (size_t j = 0; j < op->dim(); ++j) action.push_back(transpose(m.action(j)));
    return Module(op, std::move(action));
}

Morphism dual(const Morphism& f) {
    return Morphism(dual(f.target()), dual(f.source()), transpose(f.matrix()));
}

Module restrict_to(const Module& m, const Subalgebra& sub, const AlgebraPtr& sub_algebra) {
    std::vector<Matrix> action;
    for (size_t i = 0; i < sub.basis.rows(); ++i) action.push_back(m.action_of(sub.basis.row(i)));
    return Module(sub_algebra, std::move(action));
}

ShortExactSequence::ShortExactSequence(Morphism mono_, Morphism epi_)
    : mono(std::move(mono_)), epi(std::move(epi_)) {
    if (!mono.target().same_as(epi.source()))
        throw ComputeError("short exact sequence: middle objects differ");
    if (!mono.is_injective()) throw ComputeError("short exact sequence: mono not injective");
    if (!epi.is_surjective()) throw ComputeError("short exact sequence: epi not surjective");
    if (!compose(epi, mono).is_zero())
        throw ComputeError("short exact sequence: composite not zero");
    if (mono.source().dim() + epi.target().dim() != mono.target().dim())
        throw ComputeError("short exact sequence: dimension count fails");
}

Module regular_module(const AlgebraPtr& a) {
    std::vector<Matrix> action;
    action.reserve(a->dim());
    for (size_t j = 0; j < a->dim(); ++j) action.push_back(a->right_mul_matrix(j));
    return Module(a, std::move(action));
}

std::vector<Submodule> indecomposable_projectives(const AlgebraPtr& a) {
    if (!a->provenance())
        throw ComputeError("indecomposable projectives need quiver provenance");
    Module reg = regular_module(a);
    std::vector<Submodule> out;
    for (size_t v = 0; v < a->provenance()->quiver.vertices; ++v) {
        size_t ev = a->provenance()->vertex_idempotents[v];
        std::vector<std::vector<uint32_t>> rows;
        std::vector<uint32_t> e(a->dim(), 0);
        e[ev] = 1;
        for (size_t j = 0; j < a->dim(); ++j) {
            std::vector<uint32_t> bj(a->dim(), 0);
            bj[j] = 1;
            rows.push_back(a->mul(e, bj));
        }
        out.push_back(submodule_from_vectors(reg, Matrix::from_rows(a->field(), rows, a->dim())));
    }
    return out;
}

Module simple_module(const AlgebraPtr& a, size_t vertex) {
    if (!a->provenance()) throw ComputeError("simple modules need quiver provenance");
    const auto& prov = *a->provenance();
    if (vertex >= prov.quiver.vertices) throw ComputeError("vertex out of range");
    std::vector<Matrix> action;
    for (size_t j = 0; j < a->dim(); ++j) {
        Matrix m(a->field(), 1, 1);
        if (j == prov.vertex_idempotents[vertex]) m.at(0, 0) = 1;
        action.push_back(m);
    }
    return Module(a, std::move(action));
}

std::vector<NamedModule> standard_family(const AlgebraPtr& a) {
    std::vector<NamedModule> fam;
    fam.push_back({"zero", Module::zero(a)});
    if (a->provenance()) {
        for (size_t v = 0; v < a->provenance()->quiver.vertices; ++v)
            fam.push_back({"S(" + std::to_string(v) + ")", simple_module(a, v)});
        auto projs = indecomposable_projectives(a);
        for (size_t v = 0; v < projs.size(); ++v)
            fam.push_back({"P(" + std::to_string(v) + ")", projs[v].module});
    }
    Module reg = regular_module(a);
    fam.push_back({"regular", reg});
    // cokernels of left multiplications (always right-linear); these supply
    // non-projective members for algebras given by raw structure constants
    auto add_coker = [&](const std::vector<uint32_t>& coords, const std::string& name) {
        if (fam.size() >= 16) return;
        Morphism l(reg, reg, a->left_mul_matrix_of(coords));
        Quotient q = cokernel(l);
        if (q.module.dim() == 0 || q.module.dim() == a->dim()) return;
        for (const auto& nm : fam)
            if (nm.module.dim() == q.module.dim() &&
                find_isomorphism(nm.module, q.module).status == IsoSearchStatus::Found)
                return;
        fam.push_back({name, q.module});
    };
    for (size_t i = 0; i < a->dim(); ++i) {
        std::vector<uint32_t> e(a->dim(), 0);
        e[i] = 1;
        add_coker(e, "coker(L_" + a->basis_labels()[i] + ")");
        for (size_t j = i + 1; j < a->dim(); ++j) {
            std::vector<uint32_t> e2 = e;
            e2[j] = 1;
            add_coker(e2, "coker(L_" + a->basis_labels()[i] + "+" + a->basis_labels()[j] + ")");
        }
    }
    return fam;
}

}  // namespace relhom
