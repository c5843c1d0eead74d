#include "relhom/algebra.hpp"

#include <algorithm>
#include <array>
#include <map>
#include <set>

namespace relhom {

void Quiver::validate() const {
    std::set<std::string> labels;
    for (const auto& a : arrows) {
        if (a.source >= vertices || a.target >= vertices)
            throw SchemaError("arrow endpoint out of range: " + a.label);
        if (!labels.insert(a.label).second) throw SchemaError("duplicate arrow label: " + a.label);
        if (a.label.empty()) throw SchemaError("empty arrow label");
    }
}

size_t Quiver::arrow_index(const std::string& label) const {
    for (size_t i = 0; i < arrows.size(); ++i)
        if (arrows[i].label == label) return i;
    throw SchemaError("unknown arrow label: " + label);
}

Algebra::Algebra(Field field, std::vector<std::string> labels,
                 std::vector<std::vector<std::vector<uint32_t>>> structure,
                 std::vector<uint32_t> unit, std::optional<QuiverProvenance> prov,
                 std::string name)
    : field_(field),
      dim_(labels.size()),
      name_(std::move(name)),
      labels_(std::move(labels)),
      sc_(std::move(structure)),
      unit_(std::move(unit)),
      prov_(std::move(prov)) {
    if (dim_ == 0) throw SchemaError("algebra must have positive dimension");
    if (sc_.size() != dim_ || unit_.size() != dim_)
        throw SchemaError("structure constant shape mismatch");
    for (auto& row : sc_) {
        if (row.size() != dim_) throw SchemaError("structure constant shape mismatch");
        for (auto& v : row) {
            if (v.size() != dim_) throw SchemaError("structure constant shape mismatch");
            for (uint32_t x : v)
                if (x >= field_.p()) throw SchemaError("structure constant out of field range");
        }
    }
    for (uint32_t x : unit_)
        if (x >= field_.p()) throw SchemaError("unit coordinate out of field range");

    // greedy generating set: pull in basis elements until the closure of
    // span{1, gens} under products is everything
    RowSpace span(field_, dim_);
    span.add_row(unit_);
    auto close = [&]() {
        bool grew = true;
        while (grew) {
            grew = false;
            Matrix basis = span.basis();
            for (size_t i = 0; i < basis.rows(); ++i)
                for (size_t j = 0; j < basis.rows(); ++j) {
                    auto prod = mul(basis.row(i), basis.row(j));
                    if (!span.contains(prod)) {
                        span.add_row(prod);
                        grew = true;
                    }
                }
        }
    };
    close();
    for (size_t i = 0; i < dim_ && span.dim() < dim_; ++i) {
        std::vector<uint32_t> e(dim_, 0);
        e[i] = 1;
        if (!span.contains(e)) {
            generators_.push_back(i);
            span.add_row(e);
            close();
        }
    }
}

std::vector<uint32_t> Algebra::mul(const std::vector<uint32_t>& x,
                                   const std::vector<uint32_t>& y) const {
    if (x.size() != dim_ || y.size() != dim_) throw ComputeError("algebra element size mismatch");
    std::vector<uint64_t> acc(dim_, 0);
    const uint64_t p = field_.p();
    for (size_t i = 0; i < dim_; ++i) {
        if (x[i] == 0) continue;
        for (size_t j = 0; j < dim_; ++j) {
            if (y[j] == 0) continue;
            uint64_t c = static_cast<uint64_t>(x[i]) * y[j] % p;
            if (c == 0) continue;
            const auto& v = sc_[i][j];
            for (size_t k = 0; k < dim_; ++k) acc[k] = (acc[k] + c * v[k]) % p;
        }
    }
    std::vector<uint32_t> out(dim_);
    for (size_t k = 0; k < dim_; ++k) out[k] = static_cast<uint32_t>(acc[k]);
    return out;
}

Matrix Algebra::right_mul_matrix(size_t j) const {
    Matrix m(field_, dim_, dim_);
    for (size_t i = 0; i < dim_; ++i)
        for (size_t k = 0; k < dim_; ++k) m.at(k, i) = sc_[i][j][k];
    return m;
}

Matrix Algebra::left_mul_matrix(size_t j) const {
    Matrix m(field_, dim_, dim_);
    for (size_t i = 0; i < dim_; ++i)
        for (size_t k = 0; k < dim_; ++k) m.at(k, i) = sc_[j][i][k];
    return m;
}

Matrix Algebra::right_mul_matrix_of(const std::vector<uint32_t>& coords) const {
    Matrix m(field_, dim_, dim_);
    for (size_t j = 0; j < dim_; ++j) {
        if (coords[j] == 0) continue;
        m = add(m, smul(coords[j], right_mul_matrix(j)));
    }
    return m;
}

Matrix Algebra::left_mul_matrix_of(const std::vector<uint32_t>& coords) const {
    Matrix m(field_, dim_, dim_);
    for (size_t j = 0; j < dim_; ++j) {
        if (coords[j] == 0) continue;
        m = add(m, smul(coords[j], left_mul_matrix(j)));
    }
    return m;
}

bool Algebra::structurally_equal(const Algebra& o) const {
    return field_ == o.field_ && dim_ == o.dim_ && sc_ == o.sc_ && unit_ == o.unit_;
}

AlgebraPtr make_algebra(Field field, std::vector<std::string> labels,
                        std::vector<std::vector<std::vector<uint32_t>>> structure,
                        std::vector<uint32_t> unit, std::optional<QuiverProvenance> prov,
                        std::string name) {
    return std::make_shared<const Algebra>(field, std::move(labels), std::move(structure),
                                           std::move(unit), std::move(prov), std::move(name));
}

namespace {

struct Path {
    size_t source;
    size_t target;
    std::vector<size_t> arrows;  // composition order, left to right
};

struct PathTable {
    std::vector<Path> paths;                  // ordered by length, then discovery
    std::vector<size_t> level_start;          // index of first path of each length
    std::map<std::pair<size_t, std::vector<size_t>>, size_t> index;

    size_t find(size_t source, const std::vector<size_t>& arrows) const {
        auto it = index.find({source, arrows});
        if (it == index.end()) throw ComputeError("path not enumerated");
        return it->second;
    }
};

PathTable enumerate_paths(const Quiver& q, size_t max_len) {
    PathTable t;
    constexpr size_t kPathCap = 50000;
    for (size_t v = 0; v < q.vertices; ++v) {
        t.index[{v, {}}] = t.paths.size();
        t.paths.push_back({v, v, {}});
    }
    t.level_start.push_back(0);
    size_t level_begin = 0, level_end = t.paths.size();
    for (size_t len = 1; len <= max_len; ++len) {
        t.level_start.push_back(t.paths.size());
        for (size_t i = level_begin; i < level_end; ++i) {
            Path base = t.paths[i];
            for (size_t a = 0; a < q.arrows.size(); ++a) {
                if (q.arrows[a].source != base.target) continue;
                Path ext = base;
                ext.arrows.push_back(a);
                ext.target = q.arrows[a].target;
                t.index[{ext.source, ext.arrows}] = t.paths.size();
                t.paths.push_back(std::move(ext));
                if (t.paths.size() > kPathCap)
                    throw ComputeError(
                        "path enumeration exceeded cap; arrow ideal is not nilpotent below the "
                        "bound or the bound is too large");
            }
        }
        level_begin = level_end;
        level_end = t.paths.size();
    }
    t.level_start.push_back(t.paths.size());
    return t;
}

struct CheckedRelation {
    size_t source, target;
    size_t min_len, max_len;
    std::vector<PathTerm> terms;
};

CheckedRelation check_relation(const Quiver& q, const Relation& rel, const Field& f) {
    CheckedRelation out;
    out.min_len = SIZE_MAX;
    out.max_len = 0;
    bool first = true;
    for (const auto& term : rel) {
        uint32_t coef = term.coef % f.p();
        if (coef == 0) continue;
        if (term.arrows.empty()) throw SchemaError("relation term with empty path");
        for (size_t k = 0; k + 1 < term.arrows.size(); ++k) {
            if (term.arrows[k] >= q.arrows.size() || term.arrows[k + 1] >= q.arrows.size())
                throw SchemaError("relation arrow index out of range");
            if (q.arrows[term.arrows[k]].target != q.arrows[term.arrows[k + 1]].source)
                throw SchemaError("non-composable path in relation");
        }
        size_t src = q.arrows[term.arrows.front()].source;
        size_t tgt = q.arrows[term.arrows.back()].target;
        if (first) {
            out.source = src;
            out.target = tgt;
            first = false;
        } else if (src != out.source || tgt != out.target) {
            throw SchemaError("relation terms are not parallel paths");
        }
        if (term.arrows.size() < 2)
            throw SchemaError("non-admissible relation: term of path length < 2");
        out.min_len = std::min(out.min_len, term.arrows.size());
        out.max_len = std::max(out.max_len, term.arrows.size());
        out.terms.push_back({coef, term.arrows});
    }
    return out;
}

}  // namespace

AlgebraPtr from_bound_quiver(Field field, const Quiver& q, const std::vector<Relation>& relations,
                             size_t nilpotency_bound, std::string name) {
    q.validate();
    if (q.vertices == 0) throw SchemaError("quiver must have at least one vertex");
    const size_t bound = nilpotency_bound;
    if (bound == 0) throw SchemaError("nilpotency bound must be positive");

    std::vector<CheckedRelation> rels;
    size_t spread = 0;
    for (const auto& r : relations) {
        auto cr = check_relation(q, r, field);
        if (cr.terms.empty()) continue;
        spread = std::max(spread, cr.max_len - cr.min_len);
        rels.push_back(std::move(cr));
    }

    // Working degree: products u.r.v with min-degree <= bound have all their
    // components within degree bound + spread.
    const size_t work_len = bound + spread;
    PathTable table = enumerate_paths(q, work_len);
    const size_t npaths = table.paths.size();
    const size_t n_below = table.level_start[bound];  // paths of length < bound

    // two-sided ideal generators u.r.v restricted by min-degree <= bound
    std::vector<std::vector<uint32_t>> gen_rows;
    for (const auto& r : rels) {
        for (size_t ui = 0; ui < npaths; ++ui) {
            const Path& u = table.paths[ui];
            if (u.target != r.source) continue;
            if (u.arrows.size() + r.min_len > bound) continue;
            for (size_t vi = 0; vi < npaths; ++vi) {
                const Path& v = table.paths[vi];
                if (v.source != r.target) continue;
                if (u.arrows.size() + r.min_len + v.arrows.size() > bound) continue;
                std::vector<uint32_t> row(npaths, 0);
                for (const auto& term : r.terms) {
                    std::vector<size_t> arr = u.arrows;
                    arr.insert(arr.end(), term.arrows.begin(), term.arrows.end());
                    arr.insert(arr.end(), v.arrows.begin(), v.arrows.end());
                    size_t pi = table.find(u.source, arr);
                    row[pi] = field.add(row[pi], term.coef);
                }
                gen_rows.push_back(std::move(row));
            }
        }
    }

    RowSpace ideal(field, npaths);
    if (!gen_rows.empty()) ideal.add_rows(Matrix::from_rows(field, gen_rows, npaths));

    // every path of length exactly `bound` must die in the quotient
    for (size_t i = table.level_start[bound]; i < table.level_start[bound + 1]; ++i) {
        std::vector<uint32_t> ind(npaths, 0);
        ind[i] = 1;
        if (!ideal.contains(ind)) {
            std::string lbl;
            for (size_t a : table.paths[i].arrows)
                lbl += (lbl.empty() ? "" : "*") + q.arrows[a].label;
            throw ComputeError("arrow ideal not nilpotent below the bound (witness path: " + lbl +
                               ")");
        }
    }

    // quotient of the span of paths of length < bound
    std::vector<std::vector<uint32_t>> proj_rows;
    for (const auto& row : gen_rows)
        proj_rows.emplace_back(row.begin(), row.begin() + n_below);
    RowSpace ideal_below(field, n_below);
    if (!proj_rows.empty()) ideal_below.add_rows(Matrix::from_rows(field, proj_rows, n_below));

    Rref red = rref(ideal_below.basis());
    std::vector<bool> is_pivot(n_below, false);
    for (size_t c : red.pivots) is_pivot[c] = true;
    std::vector<size_t> basis_paths;  // indices into table.paths
    for (size_t i = 0; i < n_below; ++i)
        if (!is_pivot[i]) basis_paths.push_back(i);
    const size_t dim = basis_paths.size();
    std::vector<size_t> path_to_basis(n_below, SIZE_MAX);
    for (size_t b = 0; b < dim; ++b) path_to_basis[basis_paths[b]] = b;

    auto normal_form = [&](size_t path_index) -> std::vector<uint32_t> {
        std::vector<uint32_t> ind(n_below, 0);
        ind[path_index] = 1;
        auto res = ideal_below.residue(ind);
        std::vector<uint32_t> coords(dim, 0);
        for (size_t b = 0; b < dim; ++b) coords[b] = res[basis_paths[b]];
        return coords;
    };

    std::vector<std::vector<std::vector<uint32_t>>> sc(
        dim, std::vector<std::vector<uint32_t>>(dim, std::vector<uint32_t>(dim, 0)));
    for (size_t i = 0; i < dim; ++i) {
        const Path& pi = table.paths[basis_paths[i]];
        for (size_t j = 0; j < dim; ++j) {
            const Path& pj = table.paths[basis_paths[j]];
            if (pi.target != pj.source) continue;  // product is zero
            if (pi.arrows.size() + pj.arrows.size() >= bound) continue;
            std::vector<size_t> arr = pi.arrows;
            arr.insert(arr.end(), pj.arrows.begin(), pj.arrows.end());
            sc[i][j] = normal_form(table.find(pi.source, arr));
        }
    }

    std::vector<std::string> labels(dim);
    QuiverProvenance prov;
    prov.quiver = q;
    prov.vertex_idempotents.assign(q.vertices, SIZE_MAX);
    prov.arrow_basis.assign(q.arrows.size(), SIZE_MAX);
    std::vector<uint32_t> unit(dim, 0);
    for (size_t b = 0; b < dim; ++b) {
        const Path& p = table.paths[basis_paths[b]];
        prov.basis_paths.push_back(p.arrows);
        prov.basis_source.push_back(p.source);
        prov.basis_target.push_back(p.target);
        if (p.arrows.empty()) {
            labels[b] = "e" + std::to_string(p.source);
            prov.vertex_idempotents[p.source] = b;
            unit[b] = 1;
        } else {
            std::string lbl;
            for (size_t a : p.arrows) lbl += (lbl.empty() ? "" : "*") + q.arrows[a].label;
            labels[b] = lbl;
            prov.radical_basis.push_back(b);
            if (p.arrows.size() == 1) prov.arrow_basis[p.arrows[0]] = b;
        }
    }
    for (size_t v = 0; v < q.vertices; ++v)
        if (prov.vertex_idempotents[v] == SIZE_MAX)
            throw ComputeError("trivial path eliminated; relations are not admissible");

    if (name.empty()) name = "boundquiver";
    return make_algebra(field, std::move(labels), std::move(sc), std::move(unit), std::move(prov),
                        std::move(name));
}

AlgebraPtr opposite_algebra(const AlgebraPtr& a) {
    {
        std::lock_guard<std::mutex> lock(a->op_mutex_);
        if (auto cached = a->opposite_.lock()) return cached;
    }
    const size_t dim = a->dim();
    std::vector<std::vector<std::vector<uint32_t>>> sc(dim,
                                                       std::vector<std::vector<uint32_t>>(dim));
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j) sc[i][j] = a->structure()[j][i];
    std::optional<QuiverProvenance> prov;
    if (a->provenance()) {
        QuiverProvenance p = *a->provenance();
        for (auto& arrow : p.quiver.arrows) std::swap(arrow.source, arrow.target);
        for (auto& path : p.basis_paths) std::reverse(path.begin(), path.end());
        std::swap(p.basis_source, p.basis_target);
        prov = std::move(p);
    }
    std::string name = a->name();
    if (name.size() >= 3 && name.substr(name.size() - 3) == "^op")
        name = name.substr(0, name.size() - 3);
    else
        name += "^op";
    auto op = make_algebra(a->field(), a->basis_labels(), std::move(sc), a->unit(),
                           std::move(prov), name);
    {
        std::lock_guard<std::mutex> lock(op->op_mutex_);
        op->opposite_ = a;
    }
    {
        std::lock_guard<std::mutex> lock(a->op_mutex_);
        a->opposite_ = op;
    }
    return op;
}

AlgebraCheckReport check_algebra(const Algebra& a) {
    AlgebraCheckReport rep;
    const size_t n = a.dim();
    auto fail = [&](const std::string& msg) {
        rep.ok = false;
        rep.failures.push_back(msg);
    };

    std::vector<uint32_t> e(n, 0);
    for (size_t i = 0; i < n; ++i) {
        std::fill(e.begin(), e.end(), 0);
        e[i] = 1;
        if (a.mul(a.unit(), e) != e || a.mul(e, a.unit()) != e) {
            fail("unit law fails at basis " + std::to_string(i));
            break;
        }
    }

    for (size_t i = 0; i < n && rep.witness_triple == std::nullopt; ++i)
        for (size_t j = 0; j < n && rep.witness_triple == std::nullopt; ++j)
            for (size_t k = 0; k < n; ++k) {
                std::fill(e.begin(), e.end(), 0);
                e[k] = 1;
                auto lhs = a.mul(a.structure()[i][j], e);
                std::fill(e.begin(), e.end(), 0);
                e[i] = 1;
                auto rhs = a.mul(e, a.structure()[j][k]);
                if (lhs != rhs) {
                    rep.witness_triple = std::array<size_t, 3>{i, j, k};
                    fail("associativity fails at basis triple (" + std::to_string(i) + "," +
                         std::to_string(j) + "," + std::to_string(k) + ")");
                    break;
                }
            }

    if (a.provenance()) {
        const auto& prov = *a.provenance();
        const auto& idem = prov.vertex_idempotents;
        std::vector<uint32_t> sum(n, 0);
        for (size_t u = 0; u < idem.size(); ++u) {
            sum[idem[u]] = a.field().add(sum[idem[u]], 1);
            for (size_t v = 0; v < idem.size(); ++v) {
                std::vector<uint32_t> expect(n, 0);
                if (u == v) expect[idem[u]] = 1;
                if (a.structure()[idem[u]][idem[v]] != expect)
                    fail("idempotents not orthogonal at vertices " + std::to_string(u) + "," +
                         std::to_string(v));
            }
        }
        if (sum != a.unit()) fail("idempotents do not sum to the unit");

        std::vector<bool> in_rad(n, false);
        for (size_t r : prov.radical_basis) in_rad[r] = true;
        auto in_radical_span = [&](const std::vector<uint32_t>& v) {
            for (size_t k = 0; k < n; ++k)
                if (v[k] != 0 && !in_rad[k]) return false;
            return true;
        };
        for (size_t r : prov.radical_basis)
            for (size_t b = 0; b < n; ++b) {
                if (!in_radical_span(a.structure()[r][b]))
                    fail("radical subset not a right ideal at (" + std::to_string(r) + "," +
                         std::to_string(b) + ")");
                if (!in_radical_span(a.structure()[b][r]))
                    fail("radical subset not a left ideal at (" + std::to_string(b) + "," +
                         std::to_string(r) + ")");
            }

        // nilpotence of the radical ideal
        std::vector<std::vector<uint32_t>> power;
        for (size_t r : prov.radical_basis) {
            std::vector<uint32_t> v(n, 0);
            v[r] = 1;
            power.push_back(v);
        }
        size_t steps = 0;
        while (!power.empty() && steps <= n + 1) {
            RowSpace next(a.field(), n);
            for (const auto& x : power)
                for (size_t r : prov.radical_basis) {
                    std::vector<uint32_t> rv(n, 0);
                    rv[r] = 1;
                    auto prod = a.mul(x, rv);
                    if (std::any_of(prod.begin(), prod.end(), [](uint32_t t) { return t != 0; }))
                        next.add_row(prod);
                }
            power.clear();
            for (size_t i = 0; i < next.basis().rows(); ++i) power.push_back(next.basis().row(i));
            ++steps;
        }
        if (!power.empty()) fail("radical subset does not span a nilpotent ideal");
    }

    return rep;
}

void Subalgebra::validate() const {
    if (!parent) throw SchemaError("subalgebra without parent");
    if (basis.cols() != parent->dim()) throw SchemaError("subalgebra basis width mismatch");
    RowSpace span(basis);
    if (span.dim() != basis.rows()) throw SchemaError("subalgebra basis is not independent");
    if (!span.contains(parent->unit())) throw SchemaError("subalgebra does not contain the unit");
    for (size_t i = 0; i < basis.rows(); ++i)
        for (size_t j = 0; j < basis.rows(); ++j)
            if (!span.contains(parent->mul(basis.row(i), basis.row(j))))
                throw SchemaError("subalgebra not closed under multiplication");
}

AlgebraPtr Subalgebra::as_algebra() const {
    validate();
    const size_t d = basis.rows();
    Solver coord_solver(transpose(basis));
    auto coords = [&](const std::vector<uint32_t>& v) {
        Matrix b(parent->field(), v.size(), 1);
        for (size_t i = 0; i < v.size(); ++i) b.at(i, 0) = v[i];
        auto x = coord_solver.solve(b);
        if (!x) throw ComputeError("subalgebra coordinate solve failed");
        return x->col(0);
    };
    std::vector<std::vector<std::vector<uint32_t>>> sc(d, std::vector<std::vector<uint32_t>>(d));
    for (size_t i = 0; i < d; ++i)
        for (size_t j = 0; j < d; ++j) sc[i][j] = coords(parent->mul(basis.row(i), basis.row(j)));
    std::vector<std::string> labels(d);
    for (size_t i = 0; i < d; ++i) labels[i] = "s" + std::to_string(i);
    return make_algebra(parent->field(), std::move(labels), std::move(sc),
                        coords(parent->unit()), std::nullopt, parent->name() + "|sub");
}

}  // namespace relhom
