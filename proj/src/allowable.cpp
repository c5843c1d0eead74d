#include "relhom/allowable.hpp"

#include <algorithm>
#include <random>

namespace relhom {

struct ClassCaches {
    std::mutex mutex;
    // longest resolution built so far, keyed by module identity and
    // minimization flag; caching must not change observable results
    std::map<std::pair<const void*, bool>, Resolution> resolutions;
};

AllowableClass::AllowableClass(Kind k, AlgebraPtr a)
    : kind_(k), algebra_(std::move(a)), caches_(std::make_shared<ClassCaches>()) {
    if (!algebra_) throw SchemaError("allowable class without algebra");
}

AllowableClass AllowableClass::absolute(AlgebraPtr a) {
    return AllowableClass(Kind::Absolute, std::move(a));
}

AllowableClass AllowableClass::split(AlgebraPtr a) {
    return AllowableClass(Kind::Split, std::move(a));
}

AllowableClass AllowableClass::relative_to(AlgebraPtr a, Subalgebra sub) {
    if (sub.parent.get() != a.get()) throw SchemaError("subalgebra parent mismatch");
    AllowableClass e(Kind::Relative, std::move(a));
    sub.validate();
    e.sub_alg_ = sub.as_algebra();
    e.sub_ = std::move(sub);
    return e;
}

AllowableClass AllowableClass::heller(AlgebraPtr a, std::vector<Module> generators) {
    AllowableClass e(Kind::Heller, std::move(a));
    for (const auto& g : generators)
        if (g.algebra().get() != e.algebra_.get())
            throw SchemaError("Heller generator over a different algebra");
    e.gens_ = std::move(generators);
    return e;
}

std::string AllowableClass::kind_name() const {
    switch (kind_) {
        case Kind::Absolute: return "absolute";
        case Kind::Split: return "split";
        case Kind::Relative: return "relative";
        case Kind::Heller: return "heller";
    }
    return "?";
}

namespace {

// Affine solve for a matrix H (tgt_dim x src_dim) commuting with the given
// action pairs and satisfying left_i . H . right_i = rhs_i.
struct GenPair {
    Matrix src_action;
    Matrix tgt_action;
};

std::optional<Matrix> solve_matrix_with_gens(const Field& f, size_t src_dim, size_t tgt_dim,
                                             const std::vector<GenPair>& gens,
                                             const std::vector<MorphismConstraint>& constraints) {
    const size_t nvars = src_dim * tgt_dim;
    LinearSystem sys(f, nvars);
    for (const auto& g : gens) {
        Matrix eq = sub(right_mul_operator(g.src_action, tgt_dim),
                        left_mul_operator(g.tgt_action, src_dim));
        sys.add_rows(eq, std::vector<uint32_t>(eq.rows(), 0));
    }
    for (const auto& c : constraints) {
        Matrix l = c.left ? *c.left : Matrix::identity(f, tgt_dim);
        Matrix r = c.right ? *c.right : Matrix::identity(f, src_dim);
        if (l.cols() != tgt_dim || r.rows() != src_dim)
            throw ComputeError("morphism constraint shape mismatch");
        Matrix eq = kron(l, transpose(r));
        if (c.rhs.rows() != l.rows() || c.rhs.cols() != r.cols())
            throw ComputeError("morphism constraint rhs shape mismatch");
        sys.add_rows(eq, c.rhs.entries());
    }
    auto x = sys.solve();
    if (!x) return std::nullopt;
    return Matrix::from_flat(f, tgt_dim, src_dim, *x);
}

std::vector<GenPair> algebra_gen_pairs(const Module& src, const Module& tgt) {
    std::vector<GenPair> out;
    for (size_t g : src.algebra()->generators()) out.push_back({src.action(g), tgt.action(g)});
    return out;
}

std::vector<GenPair> subalgebra_gen_pairs(const AllowableClass& e, const Module& src,
                                          const Module& tgt) {
    std::vector<GenPair> out;
    const Subalgebra& sub = *e.subalgebra();
    for (size_t g : e.sub_algebra()->generators()) {
        auto row = sub.basis.row(g);
        out.push_back({src.action_of(row), tgt.action_of(row)});
    }
    return out;
}

void require_class_algebra(const AllowableClass& e, const Module& m) {
    if (m.algebra().get() != e.algebra().get())
        throw ComputeError("module over a different algebra than the allowable class");
}

}  // namespace

std::optional<Morphism> solve_morphism(const Module& src, const Module& tgt,
                                       const std::vector<MorphismConstraint>& constraints) {
    auto mat = solve_matrix_with_gens(src.field(), src.dim(), tgt.dim(),
                                      algebra_gen_pairs(src, tgt), constraints);
    if (!mat) return std::nullopt;
    return Morphism(src, tgt, *mat);
}

std::optional<MorphismSolutionSpace> solve_morphism_space(
    const Module& src, const Module& tgt, const std::vector<MorphismConstraint>& constraints) {
    const Field& f = src.field();
    const size_t nvars = src.dim() * tgt.dim();
    LinearSystem sys(f, nvars);
    for (const auto& g : algebra_gen_pairs(src, tgt)) {
        Matrix eq = sub(right_mul_operator(g.src_action, tgt.dim()),
                        left_mul_operator(g.tgt_action, src.dim()));
        sys.add_rows(eq, std::vector<uint32_t>(eq.rows(), 0));
    }
    for (const auto& c : constraints) {
        Matrix l = c.left ? *c.left : Matrix::identity(f, tgt.dim());
        Matrix r = c.right ? *c.right : Matrix::identity(f, src.dim());
        Matrix eq = kron(l, transpose(r));
        sys.add_rows(eq, c.rhs.entries());
    }
    auto space = sys.solve_space();
    if (!space) return std::nullopt;
    MorphismSolutionSpace out{morphism_from_vec(src, tgt, space->first), {}};
    for (size_t i = 0; i < space->second.rows(); ++i)
        out.homogeneous.push_back(morphism_from_vec(src, tgt, space->second.row(i)));
    return out;
}

bool is_e_epi(const AllowableClass& e, const Morphism& f) {
    require_class_algebra(e, f.source());
    if (!f.is_surjective()) return false;
    switch (e.kind()) {
        case AllowableClass::Kind::Absolute:
            return true;
        case AllowableClass::Kind::Split: {
            auto s = solve_morphism(
                f.target(), f.source(),
                {{f.matrix(), std::nullopt, Matrix::identity(f.matrix().field(), f.target().dim())}});
            return s.has_value();
        }
        case AllowableClass::Kind::Relative: {
            auto mat = solve_matrix_with_gens(
                f.matrix().field(), f.target().dim(), f.source().dim(),
                subalgebra_gen_pairs(e, f.target(), f.source()),
                {{f.matrix(), std::nullopt, Matrix::identity(f.matrix().field(), f.target().dim())}});
            return mat.has_value();
        }
        case AllowableClass::Kind::Heller: {
            for (const auto& p : e.heller_generators()) {
                auto hm = hom_space(p, f.source());
                auto hn = hom_space(p, f.target());
                if (hn.empty()) continue;
                Matrix cols(f.matrix().field(), f.target().dim() * p.dim(), hm.size());
                for (size_t i = 0; i < hm.size(); ++i) {
                    auto v = vec_of(compose(f, hm[i]));
                    for (size_t r = 0; r < v.size(); ++r) cols.at(r, i) = v[r];
                }
                // the composites must span hom(p, target)
                RowSpace span(transpose(cols));
                bool all = true;
                for (const auto& h : hn)
                    if (!span.contains(vec_of(h))) {
                        all = false;
                        break;
                    }
                if (!all) return false;
            }
            return true;
        }
    }
    return false;
}

bool is_e_mono(const AllowableClass& e, const Morphism& f) {
    require_class_algebra(e, f.source());
    if (!f.is_injective()) return false;
    switch (e.kind()) {
        case AllowableClass::Kind::Absolute:
            return true;
        case AllowableClass::Kind::Split: {
            auto r = solve_morphism(
                f.target(), f.source(),
                {{std::nullopt, f.matrix(), Matrix::identity(f.matrix().field(), f.source().dim())}});
            return r.has_value();
        }
        case AllowableClass::Kind::Relative: {
            auto mat = solve_matrix_with_gens(
                f.matrix().field(), f.target().dim(), f.source().dim(),
                subalgebra_gen_pairs(e, f.target(), f.source()),
                {{std::nullopt, f.matrix(), Matrix::identity(f.matrix().field(), f.source().dim())}});
            return mat.has_value();
        }
        case AllowableClass::Kind::Heller: {
            Quotient q = cokernel(f);
            return is_e_epi(e, q.projection);
        }
    }
    return false;
}

Cover canonical_cover(const AllowableClass& e, const Module& m) {
    require_class_algebra(e, m);
    const Field& f = m.field();
    const AlgebraPtr& a = e.algebra();
    if (m.dim() == 0) {
        Module z = Module::zero(a);
        return Cover{Morphism(z, m, Matrix(f, 0, 0)), {}, {}, {}};
    }
    switch (e.kind()) {
        case AllowableClass::Kind::Split: {
            Morphism id = identity_morphism(m);
            return Cover{id, {m}, {id}, {id}};
        }
        case AllowableClass::Kind::Absolute: {
            Module reg = regular_module(a);
            std::vector<Module> parts(m.dim(), reg);
            DirectSum ds = direct_sum(a, parts);
            std::vector<Morphism> comps;
            Matrix mat(f, m.dim(), m.dim() * a->dim());
            for (size_t j = 0; j < m.dim(); ++j) {
                Matrix cj(f, m.dim(), a->dim());
                for (size_t i = 0; i < a->dim(); ++i)
                    for (size_t r = 0; r < m.dim(); ++r) cj.at(r, i) = m.action(i).at(r, j);
                comps.push_back(Morphism(reg, m, cj));
                for (size_t r = 0; r < m.dim(); ++r)
                    for (size_t c = 0; c < a->dim(); ++c) mat.at(r, j * a->dim() + c) = cj.at(r, c);
            }
            return Cover{Morphism(ds.module, m, mat), parts, ds.injections, comps};
        }
        case AllowableClass::Kind::Relative: {
            InducedModule ind = induced_module(e, m);
            return Cover{ind.counit, {ind.module}, {identity_morphism(ind.module)}, {ind.counit}};
        }
        case AllowableClass::Kind::Heller: {
            std::vector<Module> parts;
            std::vector<Morphism> comps;
            for (const auto& p : e.heller_generators()) {
                if (p.dim() == 0) continue;
                for (const auto& h : hom_space(p, m)) {
                    parts.push_back(p);
                    comps.push_back(h);
                }
            }
            if (parts.empty())
                throw ComputeError("Heller class: no generator maps into the module");
            DirectSum ds = direct_sum(a, parts);
            Matrix mat(f, m.dim(), ds.module.dim());
            size_t off = 0;
            for (size_t i = 0; i < parts.size(); ++i) {
                for (size_t r = 0; r < m.dim(); ++r)
                    for (size_t c = 0; c < parts[i].dim(); ++c)
                        mat.at(r, off + c) = comps[i].matrix().at(r, c);
                off += parts[i].dim();
            }
            Cover cov{Morphism(ds.module, m, mat), parts, ds.injections, comps};
            if (!is_e_epi(e, cov.map))
                throw ComputeError(
                    "Heller class: generator family does not cover the module (not enough "
                    "E-projectives)");
            return cov;
        }
    }
    throw ComputeError("unreachable cover kind");
}

InducedModule induced_module(const AllowableClass& e, const Module& m) {
    if (e.kind() != AllowableClass::Kind::Relative)
        throw ComputeError("induced module requires a relative class");
    require_class_algebra(e, m);
    const AlgebraPtr& a = e.algebra();
    const Field& f = m.field();
    const Subalgebra& sub = *e.subalgebra();
    const size_t dm = m.dim(), da = a->dim();

    // m (x)_k A with the right action on the A factor
    std::vector<Matrix> taction;
    for (size_t j = 0; j < da; ++j)
        taction.push_back(kron(Matrix::identity(f, dm), a->right_mul_matrix(j)));
    Module t(a, std::move(taction));

    // balancing relations (x.beta (x) a) - (x (x) beta.a) over the subalgebra
    std::vector<std::vector<uint32_t>> rel_rows;
    for (size_t bi = 0; bi < sub.basis.rows(); ++bi) {
        auto beta = sub.basis.row(bi);
        Matrix act = m.action_of(beta);
        for (size_t x = 0; x < dm; ++x) {
            for (size_t ai = 0; ai < da; ++ai) {
                std::vector<uint32_t> row(dm * da, 0);
                for (size_t k = 0; k < dm; ++k) row[k * da + ai] = act.at(k, x);
                std::vector<uint32_t> ea(da, 0);
                ea[ai] = 1;
                auto ba = a->mul(beta, ea);
                for (size_t c = 0; c < da; ++c)
                    row[x * da + c] = f.sub(row[x * da + c], ba[c]);
                rel_rows.push_back(std::move(row));
            }
        }
    }
    Submodule rel = submodule_from_vectors(
        t, rel_rows.empty() ? Matrix(f, 0, dm * da)
                            : Matrix::from_rows(f, rel_rows, dm * da));
    Quotient q = cokernel(rel.inclusion);

    // counit x (x) a -> x.a descends through the quotient
    Matrix counit_big(f, dm, dm * da);
    for (size_t x = 0; x < dm; ++x)
        for (size_t ai = 0; ai < da; ++ai)
            for (size_t r = 0; r < dm; ++r) counit_big.at(r, x * da + ai) = m.action(ai).at(r, x);
    if (!mul(counit_big, rel.inclusion.matrix()).is_zero())
        throw ComputeError("induced module: counit does not kill the balancing relations");
    Morphism counit(q.module, m, mul(counit_big, q.section));
    return InducedModule{q.module, counit};
}

CoinducedModule coinduced_module(const AllowableClass& e, const Module& m) {
    if (e.kind() != AllowableClass::Kind::Relative)
        throw ComputeError("coinduced module requires a relative class");
    require_class_algebra(e, m);
    const AlgebraPtr& a = e.algebra();
    const Field& f = m.field();
    const Subalgebra& sub = *e.subalgebra();
    const size_t dm = m.dim(), da = a->dim();

    Module res_a = restrict_to(regular_module(a), sub, e.sub_algebra());
    Module res_m = restrict_to(m, sub, e.sub_algebra());
    auto basis = hom_space(res_a, res_m);  // B-linear maps A -> m
    const size_t h = basis.size();

    Matrix stacked(f, dm * da, h);
    for (size_t tcol = 0; tcol < h; ++tcol) {
        auto v = vec_of(basis[tcol]);
        for (size_t r = 0; r < v.size(); ++r) stacked.at(r, tcol) = v[r];
    }
    Solver coords(stacked);
    auto to_coords = [&](const Matrix& mat) {
        Matrix col(f, dm * da, 1);
        auto v = mat.entries();
        for (size_t r = 0; r < v.size(); ++r) col.at(r, 0) = v[r];
        auto x = coords.solve(col);
        if (!x) throw ComputeError("coinduced module: coordinate solve failed");
        return x->col(0);
    };

    // right A-action (phi.a)(x) = phi(a x)
    std::vector<Matrix> action;
    for (size_t j = 0; j < da; ++j) {
        Matrix lm = a->left_mul_matrix(j);
        Matrix act(f, h, h);
        for (size_t tcol = 0; tcol < h; ++tcol) {
            auto c = to_coords(mul(basis[tcol].matrix(), lm));
            for (size_t r = 0; r < h; ++r) act.at(r, tcol) = c[r];
        }
        action.push_back(std::move(act));
    }
    Module coind(a, std::move(action));

    // unit v -> (a -> v.a)
    Matrix unit(f, h, dm);
    for (size_t x = 0; x < dm; ++x) {
        Matrix ev(f, dm, da);
        for (size_t ai = 0; ai < da; ++ai)
            for (size_t r = 0; r < dm; ++r) ev.at(r, ai) = m.action(ai).at(r, x);
        auto c = to_coords(ev);
        for (size_t r = 0; r < h; ++r) unit.at(r, x) = c[r];
    }
    return CoinducedModule{coind, Morphism(m, coind, unit)};
}

Envelope canonical_envelope(const AllowableClass& e, const Module& m) {
    require_class_algebra(e, m);
    switch (e.kind()) {
        case AllowableClass::Kind::Split:
            return Envelope{identity_morphism(m)};
        case AllowableClass::Kind::Absolute: {
            // dual of the free cover of the dual over the opposite algebra
            Module dm = dual(m);
            AllowableClass op = AllowableClass::absolute(dm.algebra());
            Cover c = canonical_cover(op, dm);
            Morphism env = dual(c.map);  // m = dual(dual m) -> dual(cover source)
            // rebind the source to m itself (equal actions by construction)
            return Envelope{Morphism(m, env.target(), env.matrix())};
        }
        case AllowableClass::Kind::Relative: {
            CoinducedModule c = coinduced_module(e, m);
            return Envelope{c.unit};
        }
        case AllowableClass::Kind::Heller:
            throw ComputeError("canonical envelope unsupported for Heller classes");
    }
    throw ComputeError("unreachable envelope kind");
}

SplitWitness is_e_projective_with_witness(const AllowableClass& e, const Module& m) {
    require_class_algebra(e, m);
    if (m.dim() == 0) return {true, std::nullopt};
    if (e.kind() == AllowableClass::Kind::Split) return {true, identity_morphism(m)};
    Cover c = canonical_cover(e, m);
    auto s = solve_morphism(m, c.map.source(),
                            {{c.map.matrix(), std::nullopt,
                              Matrix::identity(m.field(), m.dim())}});
    if (s) return {true, s};
    return {false, std::nullopt};
}

bool is_e_projective(const AllowableClass& e, const Module& m) {
    return is_e_projective_with_witness(e, m).holds;
}

SplitWitness is_e_injective_with_witness(const AllowableClass& e, const Module& m) {
    require_class_algebra(e, m);
    if (m.dim() == 0) return {true, std::nullopt};
    switch (e.kind()) {
        case AllowableClass::Kind::Split:
            return {true, identity_morphism(m)};
        case AllowableClass::Kind::Absolute: {
            // injective over A iff the dual is projective over A^op
            Module dm = dual(m);
            AllowableClass op = AllowableClass::absolute(dm.algebra());
            auto w = is_e_projective_with_witness(op, dm);
            return {w.holds, std::nullopt};
        }
        case AllowableClass::Kind::Relative: {
            Envelope env = canonical_envelope(e, m);
            auto r = solve_morphism(env.map.target(), m,
                                    {{std::nullopt, env.map.matrix(),
                                      Matrix::identity(m.field(), m.dim())}});
            if (r) return {true, r};
            return {false, std::nullopt};
        }
        case AllowableClass::Kind::Heller:
            throw ComputeError("E-injectivity unsupported for Heller classes");
    }
    return {false, std::nullopt};
}

bool is_e_injective(const AllowableClass& e, const Module& m) {
    return is_e_injective_with_witness(e, m).holds;
}

std::vector<Module> projective_candidates(const AllowableClass& e) {
    switch (e.kind()) {
        case AllowableClass::Kind::Absolute: {
            std::vector<Module> out;
            if (e.algebra()->provenance()) {
                for (auto& p : indecomposable_projectives(e.algebra())) out.push_back(p.module);
            } else {
                out.push_back(regular_module(e.algebra()));
            }
            return out;
        }
        case AllowableClass::Kind::Heller:
            return e.heller_generators();
        case AllowableClass::Kind::Split:
        case AllowableClass::Kind::Relative:
            return {};
    }
    return {};
}

StrippedModule strip_projective_summands(const AllowableClass& e, const Module& m) {
    require_class_algebra(e, m);
    StrippedModule out{m, {}, identity_morphism(m), identity_morphism(m)};
    auto candidates = projective_candidates(e);
    std::mt19937_64 rng(0x5354524950ull);
    bool progress = true;
    while (progress) {
        progress = false;
        for (const auto& p : candidates) {
            if (p.dim() == 0 || p.dim() > out.core.dim()) continue;
            auto homs = hom_space(p, out.core);
            if (homs.empty()) continue;
            std::vector<std::vector<uint32_t>> tries;
            for (size_t i = 0; i < homs.size(); ++i) {
                std::vector<uint32_t> c(homs.size(), 0);
                c[i] = 1;
                tries.push_back(std::move(c));
            }
            std::uniform_int_distribution<uint64_t> dist(0, m.field().p() - 1);
            for (int t = 0; t < 24; ++t) {
                std::vector<uint32_t> c(homs.size());
                for (auto& x : c) x = static_cast<uint32_t>(dist(rng));
                tries.push_back(std::move(c));
            }
            bool split_found = false;
            for (const auto& cf : tries) {
                Matrix smat(m.field(), out.core.dim(), p.dim());
                for (size_t i = 0; i < homs.size(); ++i)
                    if (cf[i] != 0) smat = add(smat, smul(cf[i], homs[i].matrix()));
                if (rank(smat) != p.dim()) continue;
                Morphism s(p, out.core, smat);
                auto r = solve_morphism(out.core, p,
                                        {{std::nullopt, smat,
                                          Matrix::identity(m.field(), p.dim())}});
                if (!r) continue;
                // core = p + ker r
                Submodule k = kernel(*r);
                Matrix pi = sub(Matrix::identity(m.field(), out.core.dim()),
                                mul(smat, r->matrix()));
                auto proj_k = Solver(k.inclusion.matrix()).solve(pi);
                if (!proj_k) throw ComputeError("summand stripping: projection solve failed");
                Morphism projk(out.core, k.module, *proj_k);
                out.stripped.push_back(p);
                Morphism incl_new = compose(out.incl_core, k.inclusion);
                Morphism proj_new = compose(projk, out.proj_core);
                out.core = k.module;
                out.incl_core = incl_new;
                out.proj_core = proj_new;
                split_found = true;
                break;
            }
            if (split_found) {
                progress = true;
                break;
            }
        }
    }
    if (!mul(out.proj_core.matrix(), out.incl_core.matrix()).is_identity())
        throw ComputeError("summand stripping: split data inconsistent");
    return out;
}

namespace {

// projective cover from the quiver provenance: lift a basis of top(m)
Cover minimal_cover_with_provenance(const AllowableClass& e, const Module& m) {
    const AlgebraPtr& a = e.algebra();
    const Field& f = m.field();
    const auto& prov = *a->provenance();
    // m . rad
    std::vector<std::vector<uint32_t>> rad_rows;
    for (size_t r : prov.radical_basis)
        for (size_t x = 0; x < m.dim(); ++x) rad_rows.push_back(m.action(r).col(x));
    RowSpace mrad(f, m.dim());
    if (!rad_rows.empty()) mrad.add_rows(Matrix::from_rows(f, rad_rows, m.dim()));
    SubspaceQuotient topq(mrad, m.dim());

    auto projs = indecomposable_projectives(a);
    std::vector<Module> parts;
    std::vector<Morphism> comps;
    // for each vertex, lift a basis of top(m).e_v
    RowSpace covered(mrad.basis());
    for (size_t v = 0; v < prov.quiver.vertices; ++v) {
        size_t ev = prov.vertex_idempotents[v];
        const Matrix& act = m.action(ev);
        for (size_t x = 0; x < m.dim(); ++x) {
            auto u = act.col(x);  // e_x . e_v, lies in m.e_v
            if (covered.contains(u)) continue;
            covered.add_row(u);
            // map P(v) -> m, basis path w of P(v) goes to u.w
            const Matrix& incl = projs[v].inclusion.matrix();
            Matrix cmat(f, m.dim(), incl.cols());
            for (size_t t = 0; t < incl.cols(); ++t) {
                auto w = incl.col(t);
                auto img = apply_vec(m.action_of(w), u);
                for (size_t r = 0; r < m.dim(); ++r) cmat.at(r, t) = img[r];
            }
            parts.push_back(projs[v].module);
            comps.push_back(Morphism(projs[v].module, m, cmat));
        }
    }
    if (parts.empty()) {
        Module z = Module::zero(a);
        Cover c{Morphism(z, m, Matrix(f, m.dim(), 0)), {}, {}, {}};
        if (m.dim() != 0) throw ComputeError("projective cover construction failed");
        return c;
    }
    DirectSum ds = direct_sum(a, parts);
    Matrix mat(f, m.dim(), ds.module.dim());
    size_t off = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
        for (size_t r = 0; r < m.dim(); ++r)
            for (size_t c = 0; c < parts[i].dim(); ++c)
                mat.at(r, off + c) = comps[i].matrix().at(r, c);
        off += parts[i].dim();
    }
    Morphism cover(ds.module, m, mat);
    if (!cover.is_surjective()) throw ComputeError("projective cover is not surjective");
    (void)topq;
    return Cover{cover, parts, ds.injections, comps};
}

// cover of the stripped core plus the identity on the stripped summands
Cover minimized_cover(const AllowableClass& e, const Module& m) {
    if (m.dim() == 0) return canonical_cover(e, m);
    if (e.kind() == AllowableClass::Kind::Split) return canonical_cover(e, m);
    if (e.kind() == AllowableClass::Kind::Absolute && e.algebra()->provenance())
        return minimal_cover_with_provenance(e, m);
    StrippedModule st = strip_projective_summands(e, m);
    if (st.stripped.empty() && st.core.same_as(m)) return canonical_cover(e, m);
    Cover inner = canonical_cover(e, st.core);
    std::vector<Module> parts = inner.summands;
    std::vector<Morphism> comps;
    for (auto& cm : inner.component_maps) comps.push_back(compose(st.incl_core, cm));
    // the stripped complement is the image of the idempotent id - incl.proj,
    // a direct sum of E-projectives included as-is
    Matrix comp = sub(Matrix::identity(m.field(), m.dim()),
                      mul(st.incl_core.matrix(), st.proj_core.matrix()));
    ImageData compim = image(Morphism(m, m, comp));
    if (compim.module.dim() > 0) {
        parts.push_back(compim.module);
        comps.push_back(compim.inclusion);
    }
    DirectSum ds = direct_sum(e.algebra(), parts);
    Matrix mat(m.field(), m.dim(), ds.module.dim());
    size_t off = 0;
    for (size_t i = 0; i < parts.size(); ++i) {
        for (size_t r = 0; r < m.dim(); ++r)
            for (size_t c = 0; c < parts[i].dim(); ++c)
                mat.at(r, off + c) = comps[i].matrix().at(r, c);
        off += parts[i].dim();
    }
    Morphism cover(ds.module, m, mat);
    return Cover{cover, parts, ds.injections, comps};
}

Cover cover_for(const AllowableClass& e, const Module& m, bool minimize) {
    return minimize ? minimized_cover(e, m) : canonical_cover(e, m);
}

Resolution build_resolution(const AllowableClass& e, const Module& x, size_t length,
                            bool minimize) {
    Resolution res{x, {}, {}, identity_morphism(x), {}, {}};
    Module current = x;
    for (size_t i = 0; i <= length; ++i) {
        Cover c = cover_for(e, current, minimize);
        res.stages.push_back(c.map.source());
        res.covers.push_back(c.map);
        if (i == 0)
            res.augmentation = c.map;
        else
            res.differentials.push_back(compose(res.kernels.back().inclusion, c.map));
        Submodule k = kernel(c.map);
        res.kernels.push_back(k);
        current = k.module;
    }
    return res;
}

void extend_resolution(const AllowableClass& e, Resolution& res, size_t length, bool minimize) {
    while (res.stages.size() <= length) {
        Module current = res.kernels.back().module;
        Cover c = cover_for(e, current, minimize);
        res.stages.push_back(c.map.source());
        res.covers.push_back(c.map);
        res.differentials.push_back(compose(res.kernels.back().inclusion, c.map));
        res.kernels.push_back(kernel(c.map));
    }
}

}  // namespace

Resolution resolution(const AllowableClass& e, const Module& x, size_t length, bool minimize) {
    require_class_algebra(e, x);
    auto caches = e.caches();
    std::lock_guard<std::mutex> lock(caches->mutex);
    auto key = std::make_pair(x.key(), minimize);
    auto it = caches->resolutions.find(key);
    if (it == caches->resolutions.end()) {
        Resolution res = build_resolution(e, x, length, minimize);
        it = caches->resolutions.emplace(key, std::move(res)).first;
    } else if (it->second.stages.size() <= length) {
        extend_resolution(e, it->second, length, minimize);
    }
    // return a truncated copy
    const Resolution& full = it->second;
    Resolution out{full.target, {}, {}, full.augmentation, {}, {}};
    for (size_t i = 0; i <= length; ++i) {
        out.stages.push_back(full.stages[i]);
        out.covers.push_back(full.covers[i]);
        out.kernels.push_back(full.kernels[i]);
        if (i > 0) out.differentials.push_back(full.differentials[i - 1]);
    }
    return out;
}

void Resolution::validate(const AllowableClass& e) const {
    if (!is_e_epi(e, augmentation)) throw ComputeError("resolution: augmentation not an E-epi");
    for (size_t i = 0; i < covers.size(); ++i) {
        if (!is_e_epi(e, covers[i])) throw ComputeError("resolution: stage cover not an E-epi");
        if (!is_e_projective(e, stages[i]))
            throw ComputeError("resolution: stage not E-projective");
    }
    for (size_t i = 0; i + 1 < stages.size(); ++i) {
        const Morphism& d_next = differentials[i];
        const Morphism& d_prev = i == 0 ? augmentation : differentials[i - 1];
        if (!compose(d_prev, d_next).is_zero())
            throw ComputeError("resolution: differentials do not compose to zero");
        if (rank(d_prev.matrix()) + rank(d_next.matrix()) != stages[i].dim())
            throw ComputeError("resolution: not exact at a stage");
    }
}

namespace {

// coordinates on a hom space via its stacked basis
struct HomCoords {
    std::vector<Morphism> basis;
    std::optional<Solver> solver;
    Field field;
    size_t veclen;

    HomCoords(const Module& src, const Module& tgt)
        : basis(hom_space(src, tgt)), field(src.field()), veclen(src.dim() * tgt.dim()) {
        if (!basis.empty()) {
            Matrix stacked(field, veclen, basis.size());
            for (size_t t = 0; t < basis.size(); ++t) {
                auto v = vec_of(basis[t]);
                for (size_t r = 0; r < veclen; ++r) stacked.at(r, t) = v[r];
            }
            solver.emplace(stacked);
        }
    }

    std::vector<uint32_t> coords(const Morphism& f) const {
        if (basis.empty()) return {};
        Matrix col(field, veclen, 1);
        auto v = vec_of(f);
        for (size_t r = 0; r < veclen; ++r) col.at(r, 0) = v[r];
        auto x = solver->solve(col);
        if (!x) throw ComputeError("hom coordinate solve failed");
        return x->col(0);
    }
};

struct ExtData {
    HomCoords hc;                      // hom(P_n, m)
    Matrix cocycles;                   // rows: coords of a basis of ker(d^*)
    RowSpace coboundaries;             // rows: coords of im(d^*)
    std::vector<size_t> rep_indices;   // rows of `cocycles` giving quotient reps
    SubspaceQuotient quot;
    std::optional<Solver> rep_solver;  // expresses a class in the rep basis

    ExtData(HomCoords hc_, Matrix cocycles_, RowSpace cobound_)
        : hc(std::move(hc_)),
          cocycles(std::move(cocycles_)),
          coboundaries(std::move(cobound_)),
          quot(coboundaries, hc.basis.size()) {
        RowSpace seen = coboundaries;
        for (size_t i = 0; i < cocycles.rows(); ++i) {
            if (!seen.contains(cocycles.row(i))) {
                seen.add_row(cocycles.row(i));
                rep_indices.push_back(i);
            }
        }
        if (!rep_indices.empty()) {
            Matrix enc(hc.field, quot.quotient_dim(), rep_indices.size());
            for (size_t j = 0; j < rep_indices.size(); ++j) {
                auto qc = quot.coords(cocycles.row(rep_indices[j]));
                for (size_t r = 0; r < qc.size(); ++r) enc.at(r, j) = qc[r];
            }
            rep_solver.emplace(enc);
        }
    }

    size_t dimension() const { return rep_indices.size(); }

    // coordinates of a cocycle's class in the representative basis
    std::vector<uint32_t> ext_coords(const Morphism& f) const {
        if (rep_indices.empty()) return {};
        auto qc = quot.coords(hc.coords(f));
        Matrix col(hc.field, qc.size(), 1);
        for (size_t r = 0; r < qc.size(); ++r) col.at(r, 0) = qc[r];
        auto x = rep_solver->solve(col);
        if (!x) throw ComputeError("ext class outside the representative span");
        return x->col(0);
    }
};

ExtData ext_data(const AllowableClass& e, const Module& x, const Module& m, size_t degree) {
    Resolution res = resolution(e, x, degree + 1);
    HomCoords hn(res.stages[degree], m);
    // d^*: hom(P_{degree}, m) -> hom(P_{degree+1}, m)
    HomCoords hnext(res.stages[degree + 1], m);
    Matrix dnext(m.field(), hnext.basis.size(), hn.basis.size());
    for (size_t t = 0; t < hn.basis.size(); ++t) {
        auto c = hnext.coords(compose(hn.basis[t], res.differentials[degree]));
        for (size_t r = 0; r < c.size(); ++r) dnext.at(r, t) = c[r];
    }
    Matrix cocycles = kernel_basis(dnext);
    RowSpace cobound(m.field(), hn.basis.size());
    if (degree > 0) {
        HomCoords hprev(res.stages[degree - 1], m);
        for (size_t t = 0; t < hprev.basis.size(); ++t)
            cobound.add_row(hn.coords(compose(hprev.basis[t], res.differentials[degree - 1])));
    }
    return ExtData(std::move(hn), std::move(cocycles), std::move(cobound));
}

}  // namespace

ExtGroup ext(const AllowableClass& e, const Module& x, const Module& m, size_t degree) {
    require_class_algebra(e, x);
    require_class_algebra(e, m);
    ExtData data = ext_data(e, x, m, degree);
    ExtGroup out{degree, x, m, data.dimension(), {}};
    for (size_t i : data.rep_indices) {
        auto c = data.cocycles.row(i);
        Morphism rep = zero_morphism(data.hc.basis.empty() ? x : data.hc.basis[0].source(), m);
        if (!data.hc.basis.empty()) {
            Matrix mat(m.field(), m.dim(), data.hc.basis[0].source().dim());
            for (size_t t = 0; t < data.hc.basis.size(); ++t)
                if (c[t] != 0) mat = add(mat, smul(c[t], data.hc.basis[t].matrix()));
            rep = Morphism(data.hc.basis[0].source(), m, mat);
        }
        out.cocycle_basis.push_back(rep);
    }
    return out;
}

std::optional<Morphism> lift_through_epi(const Morphism& epi, const Morphism& g) {
    return solve_morphism(g.source(), epi.source(), {{epi.matrix(), std::nullopt, g.matrix()}});
}

std::optional<Morphism> extend_along_mono(const Morphism& mono, const Morphism& g) {
    return solve_morphism(mono.target(), g.target(), {{std::nullopt, mono.matrix(), g.matrix()}});
}

ExtMap ext_map(const AllowableClass& e, const Morphism& f, const Module& m, size_t degree) {
    const Module& x = f.source();
    const Module& y = f.target();
    Resolution rx = resolution(e, x, degree + 1);
    Resolution ry = resolution(e, y, degree + 1);
    // chain comparison theta_i lifting f
    std::vector<Morphism> theta;
    Morphism g = f;  // syzygy comparison
    for (size_t i = 0; i <= degree; ++i) {
        auto th = lift_through_epi(ry.covers[i], compose(g, rx.covers[i]));
        if (!th) throw ComputeError("chain lift failed (is the stage E-projective?)");
        theta.push_back(*th);
        // restrict to the kernels
        auto next = Solver(ry.kernels[i].inclusion.matrix())
                        .solve(mul(th->matrix(), rx.kernels[i].inclusion.matrix()));
        if (!next) throw ComputeError("chain lift does not preserve kernels");
        g = Morphism(rx.kernels[i].module, ry.kernels[i].module, *next);
    }
    ExtData dx = ext_data(e, x, m, degree);
    ExtData dy = ext_data(e, y, m, degree);
    Matrix mat(m.field(), dx.dimension(), dy.dimension());
    for (size_t j = 0; j < dy.rep_indices.size(); ++j) {
        auto cy = dy.cocycles.row(dy.rep_indices[j]);
        Matrix rep(m.field(), m.dim(), ry.stages[degree].dim());
        for (size_t t = 0; t < dy.hc.basis.size(); ++t)
            if (cy[t] != 0) rep = add(rep, smul(cy[t], dy.hc.basis[t].matrix()));
        Morphism pulled(rx.stages[degree], m, mul(rep, theta[degree].matrix()));
        auto qc = dx.ext_coords(pulled);
        for (size_t r = 0; r < qc.size(); ++r) mat.at(r, j) = qc[r];
    }
    bool iso = dx.dimension() == dy.dimension() && rank(mat) == dx.dimension();
    return ExtMap{degree, dy.dimension(), dx.dimension(), mat, iso};
}

std::string ProjectiveDimension::to_string() const {
    if (finite) return std::to_string(value);
    return ">=" + std::to_string(bound + 1);
}

ProjectiveDimension projective_dimension(const AllowableClass& e, const Module& x, size_t bound) {
    require_class_algebra(e, x);
    Module k = x;
    for (size_t n = 0; n <= bound; ++n) {
        StrippedModule st = strip_projective_summands(e, k);
        if (is_e_projective(e, st.core)) return {true, n, bound};
        Cover c = cover_for(e, st.core, true);
        k = kernel(c.map).module;
    }
    return {false, bound + 1, bound};
}

}  // namespace relhom
