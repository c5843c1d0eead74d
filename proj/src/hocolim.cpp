#include "relhom/hocolim.hpp"

#include <algorithm>
#include <random>

namespace relhom {

namespace {

Matrix block_matrix(const Field& f, const std::vector<size_t>& target_dims,
                    const std::vector<size_t>& source_dims,
                    const std::vector<std::vector<std::optional<Matrix>>>& blocks) {
    size_t rows = 0, cols = 0;
    for (size_t d : target_dims) rows += d;
    for (size_t d : source_dims) cols += d;
    Matrix m(f, rows, cols);
    size_t roff = 0;
    for (size_t i = 0; i < target_dims.size(); ++i) {
        size_t coff = 0;
        for (size_t j = 0; j < source_dims.size(); ++j) {
            if (blocks[i][j]) {
                const Matrix& b = *blocks[i][j];
                if (b.rows() != target_dims[i] || b.cols() != source_dims[j])
                    throw ComputeError("block matrix shape mismatch");
                for (size_t r = 0; r < b.rows(); ++r)
                    for (size_t c = 0; c < b.cols(); ++c) m.at(roff + r, coff + c) = b.at(r, c);
            }
            coff += source_dims[j];
        }
        roff += target_dims[i];
    }
    return m;
}

}  // namespace

ShearResult shear_mono(const AllowableClass& e, const Morphism& e_map, const Morphism& f_map) {
    if (!e_map.target().same_as(f_map.target()))
        throw ComputeError("shear: the two monos must share a target");
    if (!is_e_mono(e, e_map)) throw ComputeError("shear: first map is not an E-mono");
    if (!is_e_mono(e, f_map)) throw ComputeError("shear: second map is not an E-mono");
    const Module& x = e_map.source();
    const Module& y = e_map.target();
    const Module& z = f_map.source();
    DirectSum src = direct_sum(x.algebra(), {x, z});
    DirectSum tgt = direct_sum(x.algebra(), {y, z});
    Matrix mat = block_matrix(
        x.field(), {y.dim(), z.dim()}, {x.dim(), z.dim()},
        {{e_map.matrix(), f_map.matrix()},
         {std::nullopt, Matrix::identity(x.field(), z.dim())}});
    Morphism s(src.module, tgt.module, mat);
    if (!is_e_mono(e, s)) throw ComputeError("shear: result failed the E-mono check");
    // coker(s) and coker(e) must have the same dimension
    size_t cs = tgt.module.dim() - rank(s.matrix());
    size_t ce = y.dim() - rank(e_map.matrix());
    if (cs != ce) throw ComputeError("shear: cokernel dimension mismatch");
    return ShearResult{s, src, tgt};
}

PushoutSquare homotopy_pushout(const AllowableClass& e, const Morphism& f, const Morphism& g,
                               bool certify_properness) {
    if (!is_e_mono(e, f)) throw ComputeError("homotopy pushout: f is not a cofibration");
    PushoutResult po = pushout(f, g);
    bool closure = is_e_mono(e, po.from_second);
    std::optional<Morphism> cert;
    if (certify_properness) cert = is_stable_equivalence(e, po.from_first);
    return PushoutSquare{f, g, po, closure, cert};
}

const ConeProvider::ConeObject& ConeProvider::object(const AllowableClass& e, const Module& x) {
    auto it = cache_.find(x.key());
    if (it != cache_.end()) return it->second;
    ConeObject obj = build(e, x);
    if (x.dim() > 0 && !obj.free_by_construction && !is_e_projective(e, obj.cone))
        throw ComputeError("cone functor: value is not E-projective");
    if (!is_e_mono(e, obj.unit))
        throw ComputeError("cone functor: unit is not an E-mono");
    return cache_.emplace(x.key(), std::move(obj)).first->second;
}

Morphism ConeProvider::map(const AllowableClass& e, const Morphism& f,
                           const std::vector<MorphismConstraint>& extra) {
    ConeObject ox = object(e, f.source());
    ConeObject oy = object(e, f.target());
    std::vector<MorphismConstraint> cons;
    cons.push_back({std::nullopt, ox.unit.matrix(), compose(oy.unit, f).matrix()});
    for (const auto& c : extra) cons.push_back(c);
    auto space = solve_morphism_space(ox.cone, oy.cone, cons);
    if (!space && !extra.empty()) {
        // constrained naturality can be infeasible; the caller handles the
        // unconstrained retry
        throw ComputeError("cone functor: constrained naturality solve failed");
    }
    if (!space)
        throw ComputeError(
            "cone functor: naturality solve failed (cone value not E-injective enough)");
    if (!is_e_mono(e, f) || is_e_mono(e, space->particular)) return space->particular;
    // an E-mono must map to an E-mono; the particular solution may be
    // degenerate, so sample the affine solution space
    std::mt19937_64 rng(0x434f4e45ull ^ (ox.cone.dim() * 2654435761ull));
    std::uniform_int_distribution<uint64_t> dist(0, e.algebra()->field().p() - 1);
    for (int t = 0; t < 60; ++t) {
        Matrix cand = space->particular.matrix();
        for (const auto& h : space->homogeneous) {
            uint32_t cf = static_cast<uint32_t>(dist(rng));
            if (cf != 0) cand = add(cand, smul(cf, h.matrix()));
        }
        Morphism jc(ox.cone, oy.cone, cand);
        if (is_e_mono(e, jc)) return jc;
    }
    throw ComputeError("cone functor: E-mono not preserved by any naturality solution");
}

static ConeProvider::ConeObject injecting_family_cone(const AllowableClass& e, const Module& x,
                                                      bool minimal, size_t padding) {
    const AlgebraPtr& a = e.algebra();
    if (x.dim() == 0) {
        Module z = Module::zero(a);
        return {z, Morphism(x, z, Matrix(x.field(), 0, 0)), {}, true};
    }
    Module reg = regular_module(a);
    auto homs = hom_space(x, reg);
    std::vector<Morphism> family;
    Matrix combined(x.field(), 0, x.dim());
    size_t current_rank = 0;
    for (const auto& h : homs) {
        if (minimal && current_rank == x.dim()) break;
        Matrix next = vstack(combined, h.matrix());
        size_t r = rank(next);
        if (!minimal || r > current_rank) {
            family.push_back(h);
            combined = std::move(next);
            current_rank = r;
        }
    }
    if (current_rank != x.dim())
        throw ComputeError(
            "cone functor: module does not embed into a projective (cone-Frobenius hypothesis "
            "fails)");
    for (size_t i = 0; i < padding; ++i) family.push_back(zero_morphism(x, reg));
    std::vector<Module> parts(family.size(), reg);
    DirectSum ds = direct_sum(a, parts);
    Matrix unit(x.field(), 0, x.dim());
    for (const auto& h : family) unit = vstack(unit, h.matrix());
    return {ds.module, Morphism(x, ds.module, unit), family, true};
}

ConeProvider::ConeObject FreeCone::build(const AllowableClass& e, const Module& x) {
    return injecting_family_cone(e, x, true, 0);
}

ConeProvider::ConeObject FullHomCone::build(const AllowableClass& e, const Module& x) {
    return injecting_family_cone(e, x, false, padding());
}

Morphism FullHomCone::map(const AllowableClass& e, const Morphism& f,
                          const std::vector<MorphismConstraint>& extra) {
    const ConeObject& ox = object(e, f.source());
    const ConeObject& oy = object(e, f.target());
    const Field& fl = f.matrix().field();
    const size_t hx = ox.family.size(), hy = oy.family.size();
    // expand each g . f in the source family: J = C (x) id_A reindexes the
    // copies, which is natural and functorial on the nose
    Matrix coeff(fl, hy, hx);
    if (hx > 0 && hy > 0) {
        const size_t veclen = e.algebra()->dim() * f.source().dim();
        Matrix stacked(fl, veclen, hx);
        for (size_t i = 0; i < hx; ++i) {
            auto v = vec_of(ox.family[i]);
            for (size_t r = 0; r < veclen; ++r) stacked.at(r, i) = v[r];
        }
        Solver coords(stacked);
        for (size_t j = 0; j < hy; ++j) {
            auto v = vec_of(compose(oy.family[j], f));
            Matrix col(fl, veclen, 1);
            for (size_t r = 0; r < veclen; ++r) col.at(r, 0) = v[r];
            auto c = coords.solve(col);
            if (!c)
                throw ComputeError(
                    "cone functor: a composite does not factor through the family (regular "
                    "module is not injective enough)");
            for (size_t i = 0; i < hx; ++i) coeff.at(j, i) = c->at(i, 0);
        }
    }
    Matrix jm = kron(coeff, Matrix::identity(fl, e.algebra()->dim()));
    Morphism j(ox.cone, oy.cone, jm);
    if (!(mul(jm, ox.unit.matrix()) == mul(oy.unit.matrix(), f.matrix())))
        throw ComputeError("cone functor: canonical map fails naturality");
    for (const auto& c : extra) {
        Matrix l = c.left ? *c.left : Matrix::identity(fl, oy.cone.dim());
        Matrix r = c.right ? *c.right : Matrix::identity(fl, ox.cone.dim());
        if (!(mul(l, mul(jm, r)) == c.rhs))
            throw ComputeError("cone functor: canonical map violates a naturality constraint");
    }
    if (is_e_mono(e, f) && !is_e_mono(e, j))
        throw ComputeError("cone functor: E-mono not preserved");
    return j;
}

Factorization factorize(const AllowableClass& e, ConeProvider& cone, const Morphism& f) {
    const Module& x = f.source();
    const Module& y = f.target();
    auto co = cone.object(e, x);
    DirectSum ds = direct_sum(x.algebra(), {co.cone, y});
    Morphism f0(x, ds.module, vstack(co.unit.matrix(), f.matrix()));
    if (!is_e_mono(e, f0)) throw ComputeError("factorization: cofibration check failed");
    Morphism f1 = ds.projections[1];
    Morphism h = ds.injections[1];
    if (!(compose(f1, f0).matrix() == f.matrix()))
        throw ComputeError("factorization: composite differs from f");
    // f1 . h = id exactly; h . f1 - id factors through the E-projective cone
    return Factorization{f0, f1, h, co.cone};
}

Suspension suspend(const AllowableClass& e, ConeProvider& cone, const Module& x) {
    auto co = cone.object(e, x);
    PushoutResult po = pushout(co.unit, co.unit);
    return Suspension{po.object, po.from_first, po.from_second, co.unit, po};
}

Morphism suspension_induced(const Suspension& s, const Morphism& a1, const Morphism& a2) {
    return pushout_induced(s.po, a1, a2);
}

struct SuspendedMap {
    Morphism map;
    Morphism j;
};

static SuspendedMap suspend_map_full(const AllowableClass& e, ConeProvider& cone,
                                     const Morphism& f, const Suspension& sx, const Suspension& sy,
                                     const std::vector<MorphismConstraint>& extra = {}) {
    Morphism j = cone.map(e, f, extra);
    Morphism out =
        pushout_induced(sx.po, compose(sy.leg1, j), compose(sy.leg2, j));
    return SuspendedMap{out, j};
}

// suspension of an E-mono: the naturality solve has slack, and not every
// solution keeps the suspended map monic. Sample the solution space until
// both J and the suspended map pass the E-mono check.
static SuspendedMap suspend_mono_map(const AllowableClass& e, ConeProvider& cone,
                                     const Morphism& f, const Suspension& sx, const Suspension& sy,
                                     const std::vector<MorphismConstraint>& extra = {}) {
    auto ox = cone.object(e, f.source());
    auto oy = cone.object(e, f.target());
    try {
        Morphism j = cone.map(e, f, extra);
        Morphism out = pushout_induced(sx.po, compose(sy.leg1, j), compose(sy.leg2, j));
        if (is_e_mono(e, out)) return SuspendedMap{out, j};
    } catch (const ComputeError&) {
        // fall through to sampling
    }
    std::vector<MorphismConstraint> cons;
    cons.push_back({std::nullopt, ox.unit.matrix(), compose(oy.unit, f).matrix()});
    for (const auto& c : extra) cons.push_back(c);
    auto space = solve_morphism_space(ox.cone, oy.cone, cons);
    if (!space)
        throw ComputeError(extra.empty()
                               ? "cone functor: naturality solve failed"
                               : "cone functor: constrained naturality solve failed");
    std::mt19937_64 rng(0x53555350ull ^ (ox.cone.dim() * 40503ull) ^ oy.cone.dim());
    std::uniform_int_distribution<uint64_t> dist(0, e.algebra()->field().p() - 1);
    for (int t = 0; t < 80; ++t) {
        Matrix cand = space->particular.matrix();
        if (t > 0) {
            for (const auto& h : space->homogeneous) {
                uint32_t cf = static_cast<uint32_t>(dist(rng));
                if (cf != 0) cand = add(cand, smul(cf, h.matrix()));
            }
        }
        Morphism j(ox.cone, oy.cone, cand);
        if (!is_e_mono(e, j)) continue;
        Morphism out = pushout_induced(sx.po, compose(sy.leg1, j), compose(sy.leg2, j));
        if (is_e_mono(e, out)) return SuspendedMap{out, j};
    }
    throw ComputeError("suspension of a cofibration: no monic naturality solution found");
}

Morphism suspend_map(const AllowableClass& e, ConeProvider& cone, const Morphism& f,
                     const Suspension& sx, const Suspension& sy) {
    return suspend_map_full(e, cone, f, sx, sy).map;
}

// Solve for phi: A^h -> T subject to phi . M_i = G_i. A morphism out of a
// sum of regulars is determined by the images of the copy units, so the
// unknowns are h vectors in T rather than a full matrix of intertwiners.
static std::optional<Morphism> solve_from_free_cone(
    const ConeProvider::ConeObject& src, const Module& target,
    const std::vector<std::pair<Matrix, Matrix>>& constraints) {
    const AlgebraPtr& a = target.algebra();
    const Field& f = target.field();
    const size_t da = a->dim();
    const size_t h = src.family.size();
    if (src.cone.dim() != h * da) throw ComputeError("free-cone solve: source is not a free sum");
    LinearSystem sys(f, h * target.dim());
    for (const auto& [m, g] : constraints) {
        if (m.rows() != src.cone.dim() || g.rows() != target.dim() || m.cols() != g.cols())
            throw ComputeError("free-cone solve: constraint shape mismatch");
        for (size_t x = 0; x < m.cols(); ++x) {
            // phi(M e_x) = sum_j rho_T(a_j) t_j with a_j the j-th A-block
            Matrix rows(f, target.dim(), h * target.dim());
            for (size_t j = 0; j < h; ++j) {
                std::vector<uint32_t> aj(da);
                for (size_t c = 0; c < da; ++c) aj[c] = m.at(j * da + c, x);
                Matrix act = target.action_of(aj);
                for (size_t r = 0; r < target.dim(); ++r)
                    for (size_t c = 0; c < target.dim(); ++c)
                        rows.at(r, j * target.dim() + c) = act.at(r, c);
            }
            sys.add_rows(rows, g.col(x));
        }
    }
    auto sol = sys.solve();
    if (!sol) return std::nullopt;
    // assemble the matrix of phi: block j sends a to t_j . a
    Matrix mat(f, target.dim(), h * da);
    for (size_t j = 0; j < h; ++j) {
        std::vector<uint32_t> tj(sol->begin() + j * target.dim(),
                                 sol->begin() + (j + 1) * target.dim());
        for (size_t c = 0; c < da; ++c) {
            Matrix act = target.action(c);
            auto col = apply_vec(act, tj);
            for (size_t r = 0; r < target.dim(); ++r) mat.at(r, j * da + c) = col[r];
        }
    }
    return Morphism(src.cone, target, mat);
}

void Tower::validate(const AllowableClass& e) const {
    if (objects.empty()) throw ComputeError("tower with no objects");
    if (maps.size() + 1 != objects.size()) throw ComputeError("tower map count mismatch");
    for (size_t i = 0; i < maps.size(); ++i) {
        if (!maps[i].source().same_as(objects[i]) || !maps[i].target().same_as(objects[i + 1]))
            if (maps[i].source().dim() != objects[i].dim() ||
                maps[i].target().dim() != objects[i + 1].dim())
                throw ComputeError("tower maps do not line up");
        if (!is_e_mono(e, maps[i])) throw ComputeError("tower map is not a cofibration");
    }
}

Module tower_colimit(const Tower& t) {
    if (!t.eventually_identity)
        throw ComputeError("tower colimit requires the eventually-identity flag");
    if (t.objects.empty()) throw ComputeError("tower with no objects");
    return t.objects.back();
}

TowerComparison compare_towers(const AllowableClass& e, const Tower& f, const Tower& g,
                               const std::vector<Morphism>& phi) {
    TowerComparison out;
    if (f.objects.size() != g.objects.size() || phi.size() != f.objects.size())
        throw ComputeError("tower comparison shape mismatch");
    for (size_t i = 0; i + 1 < phi.size(); ++i) {
        if (!(compose(phi[i + 1], f.maps[i]).matrix() == compose(g.maps[i], phi[i]).matrix()))
            return out;  // commutes stays false
    }
    out.commutes = true;
    bool all = true;
    for (const auto& p : phi) {
        bool we = is_stable_equivalence(e, p).has_value();
        out.level_weak_equivalence.push_back(we);
        all = all && we;
    }
    out.colimit_map = phi.back();
    if (all) out.colimit_weak_equivalence = is_stable_equivalence(e, phi.back()).has_value();
    return out;
}

void SimplicialModule::validate() const {
    if (levels.size() != truncation + 1) throw SchemaError("simplicial level count mismatch");
    if (faces.size() != truncation + 1) throw SchemaError("simplicial face count mismatch");
    if (!faces.empty() && !faces[0].empty()) throw SchemaError("level 0 has no faces");
    for (size_t n = 1; n <= truncation; ++n) {
        if (faces[n].size() != n + 1)
            throw SchemaError("level " + std::to_string(n) + " needs " + std::to_string(n + 1) +
                              " faces");
        for (const auto& d : faces[n]) {
            bool src_ok = d.source().same_as(levels[n]) ||
                          (d.source().dim() == levels[n].dim() &&
                           d.source().actions() == levels[n].actions());
            bool tgt_ok = d.target().same_as(levels[n - 1]) ||
                          (d.target().dim() == levels[n - 1].dim() &&
                           d.target().actions() == levels[n - 1].actions());
            if (!src_ok || !tgt_ok) throw SchemaError("face map endpoints wrong");
        }
    }
    // truncated simplicial identities d_i d_j = d_{j-1} d_i for i < j
    for (size_t n = 2; n <= truncation; ++n)
        for (size_t j = 1; j <= n; ++j)
            for (size_t i = 0; i < j; ++i)
                if (!(compose(faces[n - 1][i], faces[n][j]).matrix() ==
                      compose(faces[n - 1][j - 1], faces[n][i]).matrix()))
                    throw SchemaError("simplicial identities fail at level " + std::to_string(n));
}

namespace {

// alternating face sum d_0 - d_1 + ... +- d_{n-1} (the last face is omitted;
// it is absorbed by the cone attachment)
Morphism truncated_boundary(const SimplicialModule& f, size_t n) {
    const auto& faces = f.faces[n];
    Morphism out = faces[0];
    const Field& fl = out.matrix().field();
    for (size_t j = 1; j + 1 <= n; ++j) {
        uint32_t sign = (j % 2 == 0) ? 1 : fl.p() - 1;
        out = madd(out, msmul(sign, faces[j]));
    }
    return out;
}

struct RealStage {
    // W_n and Pi_n with their suspension ladders
    std::optional<Module> w, pi;
    std::vector<size_t> wparts, piparts;  // summand dims, ascending degree
    std::vector<Module> wlvl, pilvl;
    std::vector<Suspension> wsus, pisus;
    std::vector<Morphism> left;    // Sigma^k(left_n)
    std::vector<Morphism> left_j;  // J used to suspend left at level k
    std::vector<Morphism> dmap;    // Sigma^k(d_n): wlvl[k] -> prev wlvl[k]
    std::vector<Morphism> dmap_j;  // J(dmap[k]); last entry feeds the attachment
    std::optional<Morphism> u;     // nulhomotopy extension at this stage
    std::optional<Morphism> f_n;
    std::optional<PushoutResult> po;
    std::optional<Morphism> bottom, step, chi, psi;
    std::optional<Module> gr;
};

struct RealState {
    const SimplicialModule* input = nullptr;
    std::vector<ConeProvider::ConeObject> level_cones;  // P_{F_i}, i = 0..N
    std::vector<RealStage> stage;                       // index n = 0..N+1
    std::optional<Module> gr0;
};

// naturality coupling from a finished base tower to the one being built
struct Coupling {
    const RealState* base = nullptr;
    const std::vector<Morphism>* phi = nullptr;
    std::vector<Morphism> jphi;                    // J(phi_i)
    std::vector<std::vector<Morphism>> sigw;       // sigw[n][k]
    std::vector<std::vector<Morphism>> sigw_j;     // J(sigw[n][k])
    std::vector<std::vector<Morphism>> sigpi;      // sigpi[n][k]
    std::vector<std::vector<Morphism>> sigpi_j;    // J(sigpi[n][k])
    std::vector<Morphism> stage_maps;              // h_n : GR_base(n) -> GR_this(n)
    bool exact = true;
    std::string note;
};

Morphism opt_get(const std::optional<Morphism>& m, const char* what) {
    if (!m) throw ComputeError(std::string("realization: missing ") + what);
    return *m;
}

void build_realization_state(const AllowableClass& e, ConeProvider& cone,
                             const SimplicialModule& f, RealState& st, Coupling* cp) {
    f.validate();
    const size_t n_trunc = f.truncation;
    const AlgebraPtr& alg = f.algebra;
    const Field& fl = alg->field();
    st.input = &f;

    for (size_t i = 0; i <= n_trunc; ++i) st.level_cones.push_back(cone.object(e, f.levels[i]));
    if (cp) {
        for (size_t i = 0; i <= n_trunc; ++i) cp->jphi.push_back(cone.map(e, (*cp->phi)[i]));
        cp->sigw.resize(n_trunc + 2);
        cp->sigw_j.resize(n_trunc + 2);
        cp->sigpi.resize(n_trunc + 2);
        cp->sigpi_j.resize(n_trunc + 2);
    }

    // W_n, Pi_n, left_n, d_n at suspension level 0
    st.stage.resize(n_trunc + 2);
    for (size_t n = 0; n <= n_trunc + 1; ++n) {
        RealStage& s = st.stage[n];
        std::vector<Module> wparts, piparts;
        if (n <= n_trunc) wparts.push_back(f.levels[n]);
        for (size_t i = n + 1; i <= n_trunc; ++i) wparts.push_back(st.level_cones[i].cone);
        for (size_t i = n; i <= n_trunc && n >= 1; ++i) piparts.push_back(st.level_cones[i].cone);
        DirectSum wsum = direct_sum(alg, wparts);
        s.w = wsum.module;
        for (const auto& p : wparts) s.wparts.push_back(p.dim());
        s.wlvl.push_back(*s.w);
        if (n >= 1) {
            DirectSum pisum = direct_sum(alg, piparts);
            s.pi = pisum.module;
            for (const auto& p : piparts) s.piparts.push_back(p.dim());
            s.pilvl.push_back(*s.pi);
            // left_n = i_{F_n} + id on the cone summands
            std::vector<std::vector<std::optional<Matrix>>> blocks(
                s.piparts.size(), std::vector<std::optional<Matrix>>(s.wparts.size()));
            size_t wcol = 0;
            if (n <= n_trunc) {
                blocks[0][0] = st.level_cones[n].unit.matrix();
                wcol = 1;
            }
            for (size_t i = n + 1; i <= n_trunc; ++i) {
                size_t pirow = i - n;
                blocks[pirow][wcol] = Matrix::identity(fl, st.level_cones[i].cone.dim());
                ++wcol;
            }
            s.left.push_back(Morphism(*s.w, *s.pi, block_matrix(fl, s.piparts, s.wparts, blocks)));
            // d_n : W_n -> W_{n-1}
            RealStage& prev = st.stage[n - 1];
            std::vector<std::vector<std::optional<Matrix>>> dbl(
                prev.wparts.size(), std::vector<std::optional<Matrix>>(s.wparts.size()));
            wcol = 0;
            if (n <= n_trunc) {
                dbl[0][0] = truncated_boundary(f, n).matrix();
                dbl[1][0] = st.level_cones[n].unit.matrix();
                wcol = 1;
            }
            for (size_t i = n + 1; i <= n_trunc; ++i) {
                dbl[1 + (i - n)][wcol] = Matrix::identity(fl, st.level_cones[i].cone.dim());
                ++wcol;
            }
            s.dmap.push_back(
                Morphism(*s.w, *prev.w, block_matrix(fl, prev.wparts, s.wparts, dbl)));
        }
        // levelwise comparison data at suspension level 0
        if (cp) {
            const RealStage& bs = cp->base->stage[n];
            std::vector<std::vector<std::optional<Matrix>>> sb(
                s.wparts.size(), std::vector<std::optional<Matrix>>(bs.wparts.size()));
            size_t idx = 0;
            if (n <= n_trunc) {
                sb[0][0] = (*cp->phi)[n].matrix();
                idx = 1;
            }
            for (size_t i = n + 1; i <= n_trunc; ++i) {
                sb[idx][idx] = cp->jphi[i].matrix();
                ++idx;
            }
            cp->sigw[n].push_back(
                Morphism(*bs.w, *s.w, block_matrix(fl, s.wparts, bs.wparts, sb)));
            if (n >= 1) {
                std::vector<std::vector<std::optional<Matrix>>> pb(
                    s.piparts.size(), std::vector<std::optional<Matrix>>(bs.piparts.size()));
                for (size_t i = n; i <= n_trunc; ++i) pb[i - n][i - n] = cp->jphi[i].matrix();
                cp->sigpi[n].push_back(
                    Morphism(*bs.pi, *s.pi, block_matrix(fl, s.piparts, bs.piparts, pb)));
            }
        }
    }

    st.gr0 = st.stage[0].w;
    st.stage[0].gr = st.gr0;
    if (cp) cp->stage_maps.push_back(cp->sigw[0][0]);

    // helper for constrained extensions of g along the cone unit of `base`,
    // with unconstrained fallback; exploits the free cone structure
    auto extend_with = [&](const Module& base, const Morphism& g,
                           std::optional<std::pair<Matrix, Matrix>> extra, const char* what) {
        const auto& co = cone.object(e, base);
        if (co.family.empty() && base.dim() > 0) {
            auto r = extend_along_mono(co.unit, g);
            if (!r)
                throw ComputeError(std::string("realization: extension solve failed at ") + what);
            return *r;
        }
        std::vector<std::pair<Matrix, Matrix>> cons{{co.unit.matrix(), g.matrix()}};
        if (extra) {
            cons.push_back(*extra);
            auto r = solve_from_free_cone(co, g.target(), cons);
            if (r) return *r;
            if (cp) {
                cp->exact = false;
                cp->note = std::string("constrained extension failed at ") + what;
            }
            cons.pop_back();
        }
        auto r = solve_from_free_cone(co, g.target(), cons);
        if (!r)
            throw ComputeError(std::string("realization: extension solve failed at ") + what +
                               " (is every E-projective E-injective here?)");
        return *r;
    };
    auto cone_map_with = [&](const Morphism& m, std::optional<MorphismConstraint> extra,
                             const char* what) {
        if (extra) {
            try {
                return cone.map(e, m, {*extra});
            } catch (const ComputeError&) {
                if (cp) {
                    cp->exact = false;
                    cp->note = std::string("constrained cone map failed at ") + what;
                }
            }
        }
        return cone.map(e, m);
    };

    for (size_t n = 1; n <= n_trunc + 1; ++n) {
        RealStage& s = st.stage[n];
        RealStage& prev = st.stage[n - 1];

        // raise the ladders to suspension level n-1 (W, Pi, left) and n-2 (d)
        for (size_t k = 0; k + 1 <= n - 1; ++k) {
            s.wsus.push_back(suspend(e, cone, s.wlvl[k]));
            s.wlvl.push_back(s.wsus[k].object);
            s.pisus.push_back(suspend(e, cone, s.pilvl[k]));
            s.pilvl.push_back(s.pisus[k].object);
            if (cp) {
                // suspend the comparison maps alongside (free cone choices)
                const RealStage& b = cp->base->stage[n];
                SuspendedMap sw = suspend_map_full(e, cone, cp->sigw[n][k], b.wsus[k], s.wsus[k]);
                cp->sigw[n].push_back(sw.map);
                cp->sigw_j[n].push_back(sw.j);
                SuspendedMap sp =
                    suspend_map_full(e, cone, cp->sigpi[n][k], b.pisus[k], s.pisus[k]);
                cp->sigpi[n].push_back(sp.map);
                cp->sigpi_j[n].push_back(sp.j);
            }
            {
                std::vector<MorphismConstraint> extra;
                if (cp) {
                    // J(left^G) . J(sig_w) = J(sig_pi) . J(left^F)
                    extra.push_back(MorphismConstraint{
                        std::nullopt, cp->sigw_j[n][k].matrix(),
                        mul(cp->sigpi_j[n][k].matrix(), cp->base->stage[n].left_j[k].matrix())});
                }
                SuspendedMap sl = [&]() {
                    if (!extra.empty()) {
                        try {
                            return suspend_mono_map(e, cone, s.left[k], s.wsus[k], s.pisus[k],
                                                    extra);
                        } catch (const ComputeError&) {
                            cp->exact = false;
                            cp->note = "constrained left suspension failed";
                        }
                    }
                    return suspend_mono_map(e, cone, s.left[k], s.wsus[k], s.pisus[k]);
                }();
                s.left_j.push_back(sl.j);
                s.left.push_back(sl.map);
            }
            if (k + 1 <= n - 2) {
                std::optional<MorphismConstraint> extra;
                if (cp) {
                    // J(d^G) . J(sig_w[n]) = J(sig_w[n-1]) . J(d^F)
                    extra = MorphismConstraint{
                        std::nullopt, cp->sigw_j[n][k].matrix(),
                        mul(cp->sigw_j[n - 1][k].matrix(),
                            cp->base->stage[n].dmap_j[k].matrix())};
                }
                Morphism jd = cone_map_with(s.dmap[k], extra, "boundary suspension");
                s.dmap_j.push_back(jd);
                s.dmap.push_back(pushout_induced(s.wsus[k].po, compose(prev.wsus[k].leg1, jd),
                                                 compose(prev.wsus[k].leg2, jd)));
            }
        }
        // top-level J of the comparison map (used by the chi constraint now
        // and by the next stage's boundary constraint)
        if (cp) {
            while (cp->sigw_j[n].size() < cp->sigw[n].size())
                cp->sigw_j[n].push_back(cone.map(e, cp->sigw[n][cp->sigw_j[n].size()]));
            while (cp->sigpi_j[n].size() < cp->sigpi[n].size())
                cp->sigpi_j[n].push_back(cone.map(e, cp->sigpi[n][cp->sigpi_j[n].size()]));
        }

        const Module& s_top = s.wlvl[n - 1];       // Sigma^{n-1} W_n
        const Module& t_top = s.pilvl[n - 1];      // Sigma^{n-1} Pi_n
        const Morphism& left_top = s.left[n - 1];  // the square's left leg

        // attaching map f_n
        if (n == 1) {
            s.f_n = s.dmap[0];
        } else {
            const Module& s_mid = s.wlvl[n - 2];  // Sigma^{n-2} W_n
            // J of the top suspended boundary feeds the second nulhomotopy
            std::optional<MorphismConstraint> extra;
            if (cp) {
                extra = MorphismConstraint{
                    std::nullopt, cp->sigw_j[n][n - 2].matrix(),
                    mul(cp->sigw_j[n - 1][n - 2].matrix(),
                        cp->base->stage[n].dmap_j[n - 2].matrix())};
            }
            Morphism jd_top = cone_map_with(s.dmap[n - 2], extra, "attachment boundary");
            s.dmap_j.push_back(jd_top);

            Morphism carrier = compose(prev.left[n - 2], s.dmap[n - 2]);
            std::optional<std::pair<Matrix, Matrix>> uextra;
            if (cp) {
                uextra = std::make_pair(
                    cp->sigw_j[n][n - 2].matrix(),
                    mul(cp->sigpi[n - 1][n - 2].matrix(),
                        opt_get(cp->base->stage[n].u, "base u").matrix()));
            }
            Morphism u = extend_with(s_mid, carrier, uextra, "nulhomotopy");
            s.u = u;
            Morphism a1 = compose(opt_get(prev.bottom, "bottom"), u);
            Morphism a2 = compose(opt_get(prev.psi, "psi"), jd_top);
            s.f_n = suspension_induced(s.wsus[n - 2], a1, a2);
        }

        if (!is_e_mono(e, left_top))
            throw ComputeError("realization: square's left leg is not a cofibration");
        PushoutResult po = pushout(left_top, *s.f_n);
        s.po = po;
        s.gr = po.object;
        s.bottom = po.from_first;
        s.step = po.from_second;
        if (!is_e_mono(e, *s.step))
            throw ComputeError("realization: stage map is not a cofibration");

        // projective corridor for the next stage's second nulhomotopy
        {
            std::optional<std::pair<Matrix, Matrix>> cextra;
            if (cp) {
                cextra = std::make_pair(
                    cp->sigw_j[n][n - 1].matrix(),
                    mul(cp->sigpi[n][n - 1].matrix(),
                        opt_get(cp->base->stage[n].chi, "base chi").matrix()));
            }
            Morphism chi = extend_with(s_top, left_top, cextra, "corridor");
            s.chi = chi;
            s.psi = compose(*s.bottom, chi);
        }
        (void)t_top;

        if (cp) {
            const RealStage& b = cp->base->stage[n];
            Morphism a = compose(*s.bottom, cp->sigpi[n][n - 1]);
            Morphism bmap = compose(*s.step, cp->stage_maps.back());
            Morphism h = pushout_induced(*b.po, a, bmap);
            cp->stage_maps.push_back(h);
        }
    }
}

RealizationTower state_to_tower(const AllowableClass& e, RealState& st) {
    RealizationTower out{*st.input, *st.gr0, {}, {}, *st.gr0};
    out.tower.objects.push_back(*st.gr0);
    for (size_t n = 1; n < st.stage.size(); ++n) {
        RealStage& s = st.stage[n];
        out.stages.push_back(RealizationStage{s.wlvl[n - 1], s.pilvl[n - 1],
                                              opt_get(s.f_n, "f_n"), s.left[n - 1],
                                              opt_get(s.bottom, "bottom"),
                                              opt_get(s.step, "step"), *s.gr});
        out.tower.objects.push_back(*s.gr);
        out.tower.maps.push_back(*s.step);
    }
    out.tower.eventually_identity = true;
    out.colimit = tower_colimit(out.tower);
    (void)e;
    return out;
}

}  // namespace

RealizationTower realization_tower(const AllowableClass& e, ConeProvider& cone,
                                   const SimplicialModule& f) {
    RealState st;
    build_realization_state(e, cone, f, st, nullptr);
    return state_to_tower(e, st);
}

Module realize(const AllowableClass& e, ConeProvider& cone, const SimplicialModule& f) {
    return realization_tower(e, cone, f).colimit;
}

RealizationComparison compare_realizations(const AllowableClass& e, ConeProvider& cone,
                                           const SimplicialModule& f, const SimplicialModule& g,
                                           const SimplicialMap& phi) {
    if (f.truncation != g.truncation) throw ComputeError("comparison: truncation mismatch");
    if (phi.levels.size() != f.truncation + 1)
        throw ComputeError("comparison: level map count mismatch");
    for (size_t n = 1; n <= f.truncation; ++n)
        for (size_t i = 0; i <= n; ++i)
            if (!(compose(phi.levels[n - 1], f.faces[n][i]).matrix() ==
                  compose(g.faces[n][i], phi.levels[n]).matrix()))
                throw ComputeError("comparison: levelwise map does not commute with faces");

    RealState base;
    build_realization_state(e, cone, f, base, nullptr);
    Coupling cp;
    cp.base = &base;
    cp.phi = &phi.levels;
    RealState st;
    build_realization_state(e, cone, g, st, &cp);

    RealizationComparison out{state_to_tower(e, base), state_to_tower(e, st),
                              cp.stage_maps,           {},
                              std::nullopt,            false};
    for (const auto& h : cp.stage_maps)
        out.stage_weak_equivalence.push_back(is_stable_equivalence(e, h).has_value());
    out.colimit_map = cp.stage_maps.back();
    out.realizations_stably_equivalent =
        is_stable_equivalence(e, cp.stage_maps.back()).has_value();
    return out;
}

}  // namespace relhom
