#include "relhom/matrix.hpp"

#include <algorithm>

namespace relhom {

bool is_prime(uint32_t n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (uint32_t d = 3; static_cast<uint64_t>(d) * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

Field::Field(uint32_t p) : p_(p) {
    if (p < 2 || p >= (1u << 31) || !is_prime(p))
        throw SchemaError("field modulus must be a prime in [2, 2^31): got " + std::to_string(p));
}

uint32_t Field::inv(uint32_t a) const {
    if (a == 0) throw ComputeError("inverse of zero in GF(p)");
    // extended euclid
    int64_t t = 0, nt = 1, r = p_, nr = a;
    while (nr != 0) {
        int64_t q = r / nr;
        std::swap(t -= q * nt, nt);
        std::swap(r -= q * nr, nr);
    }
    if (t < 0) t += p_;
    return static_cast<uint32_t>(t);
}

Matrix Matrix::identity(Field f, size_t n) {
    Matrix m(f, n, n);
    for (size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

Matrix Matrix::from_rows(Field f, const std::vector<std::vector<uint32_t>>& rows, size_t cols) {
    Matrix m(f, rows.size(), cols);
    for (size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != cols) throw SchemaError("ragged matrix rows");
        for (size_t c = 0; c < cols; ++c) {
            if (rows[r][c] >= f.p()) throw SchemaError("matrix entry out of field range");
            m.at(r, c) = rows[r][c];
        }
    }
    return m;
}

Matrix Matrix::from_flat(Field f, size_t rows, size_t cols, std::vector<uint32_t> data) {
    if (data.size() != rows * cols) throw SchemaError("matrix data size mismatch");
    Matrix m(f, rows, cols);
    for (size_t i = 0; i < data.size(); ++i) {
        if (data[i] >= f.p()) throw SchemaError("matrix entry out of field range");
    }
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c) m.at(r, c) = data[r * cols + c];
    return m;
}

std::vector<uint32_t> Matrix::row(size_t r) const {
    return std::vector<uint32_t>(a_.begin() + r * cols_, a_.begin() + (r + 1) * cols_);
}

std::vector<uint32_t> Matrix::col(size_t c) const {
    std::vector<uint32_t> v(rows_);
    for (size_t r = 0; r < rows_; ++r) v[r] = at(r, c);
    return v;
}

bool Matrix::is_zero() const {
    return std::all_of(a_.begin(), a_.end(), [](uint32_t x) { return x == 0; });
}

bool Matrix::is_identity() const {
    if (rows_ != cols_) return false;
    for (size_t r = 0; r < rows_; ++r)
        for (size_t c = 0; c < cols_; ++c)
            if (at(r, c) != (r == c ? 1u : 0u)) return false;
    return true;
}

static void check_same_field(const Matrix& a, const Matrix& b) {
    if (!(a.field() == b.field())) throw ComputeError("matrix field mismatch");
}

Matrix add(const Matrix& a, const Matrix& b) {
    check_same_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ComputeError("shape mismatch in add");
    Matrix m(a.field(), a.rows(), a.cols());
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.field().add(a.at(r, c), b.at(r, c));
    return m;
}

Matrix sub(const Matrix& a, const Matrix& b) {
    check_same_field(a, b);
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw ComputeError("shape mismatch in sub");
    Matrix m(a.field(), a.rows(), a.cols());
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.field().sub(a.at(r, c), b.at(r, c));
    return m;
}

Matrix neg(const Matrix& a) {
    Matrix m(a.field(), a.rows(), a.cols());
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.field().neg(a.at(r, c));
    return m;
}

Matrix smul(uint32_t s, const Matrix& a) {
    Matrix m(a.field(), a.rows(), a.cols());
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.field().mul(s, a.at(r, c));
    return m;
}

Matrix mul(const Matrix& a, const Matrix& b) {
    check_same_field(a, b);
    if (a.cols() != b.rows()) throw ComputeError("shape mismatch in mul");
    const Field& f = a.field();
    Matrix m(f, a.rows(), b.cols());
    const uint64_t p = f.p();
    // (p-1)^2 * k stays below 2^64 for desk-scale k when p is moderate
    const bool lazy = p < (1u << 26) || a.cols() < 4;
    for (size_t r = 0; r < a.rows(); ++r) {
        for (size_t c = 0; c < b.cols(); ++c) {
            uint64_t acc = 0;
            if (lazy) {
                for (size_t k = 0; k < a.cols(); ++k)
                    acc += static_cast<uint64_t>(a.at(r, k)) * b.at(k, c);
                acc %= p;
            } else {
                for (size_t k = 0; k < a.cols(); ++k)
                    acc = (acc + static_cast<uint64_t>(a.at(r, k)) * b.at(k, c)) % p;
            }
            m.at(r, c) = static_cast<uint32_t>(acc);
        }
    }
    return m;
}

Matrix transpose(const Matrix& a) {
    Matrix m(a.field(), a.cols(), a.rows());
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) m.at(c, r) = a.at(r, c);
    return m;
}

Matrix hstack(const Matrix& a, const Matrix& b) {
    check_same_field(a, b);
    if (a.rows() != b.rows()) throw ComputeError("row mismatch in hstack");
    Matrix m(a.field(), a.rows(), a.cols() + b.cols());
    for (size_t r = 0; r < a.rows(); ++r) {
        for (size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c);
        for (size_t c = 0; c < b.cols(); ++c) m.at(r, a.cols() + c) = b.at(r, c);
    }
    return m;
}

Matrix vstack(const Matrix& a, const Matrix& b) {
    check_same_field(a, b);
    if (a.cols() != b.cols()) throw ComputeError("col mismatch in vstack");
    Matrix m(a.field(), a.rows() + b.rows(), a.cols());
    for (size_t r = 0; r < a.rows(); ++r)
        for (size_t c = 0; c < a.cols(); ++c) m.at(r, c) = a.at(r, c);
    for (size_t r = 0; r < b.rows(); ++r)
        for (size_t c = 0; c < b.cols(); ++c) m.at(a.rows() + r, c) = b.at(r, c);
    return m;
}

Matrix block(const Matrix& m, size_t r0, size_t c0, size_t nr, size_t nc) {
    if (r0 + nr > m.rows() || c0 + nc > m.cols()) throw ComputeError("block out of range");
    Matrix b(m.field(), nr, nc);
    for (size_t r = 0; r < nr; ++r)
        for (size_t c = 0; c < nc; ++c) b.at(r, c) = m.at(r0 + r, c0 + c);
    return b;
}

Matrix kron(const Matrix& a, const Matrix& b) {
    check_same_field(a, b);
    Matrix m(a.field(), a.rows() * b.rows(), a.cols() * b.cols());
    for (size_t ar = 0; ar < a.rows(); ++ar)
        for (size_t ac = 0; ac < a.cols(); ++ac) {
            uint32_t s = a.at(ar, ac);
            if (s == 0) continue;
            for (size_t br = 0; br < b.rows(); ++br)
                for (size_t bc = 0; bc < b.cols(); ++bc)
                    m.at(ar * b.rows() + br, ac * b.cols() + bc) = a.field().mul(s, b.at(br, bc));
        }
    return m;
}

std::vector<uint32_t> apply_vec(const Matrix& m, const std::vector<uint32_t>& v) {
    if (v.size() != m.cols()) throw ComputeError("shape mismatch in apply");
    const uint64_t p = m.field().p();
    std::vector<uint32_t> out(m.rows(), 0);
    for (size_t r = 0; r < m.rows(); ++r) {
        uint64_t acc = 0;
        for (size_t c = 0; c < m.cols(); ++c)
            acc = (acc + static_cast<uint64_t>(m.at(r, c)) * v[c]) % p;
        out[r] = static_cast<uint32_t>(acc);
    }
    return out;
}

Rref rref(const Matrix& m) {
    Matrix r = m;
    const Field& f = m.field();
    std::vector<size_t> pivots;
    size_t lead = 0;
    for (size_t c = 0; c < r.cols() && lead < r.rows(); ++c) {
        size_t pr = lead;
        while (pr < r.rows() && r.at(pr, c) == 0) ++pr;
        if (pr == r.rows()) continue;
        if (pr != lead)
            for (size_t j = 0; j < r.cols(); ++j) std::swap(r.at(pr, j), r.at(lead, j));
        uint32_t iv = f.inv(r.at(lead, c));
        if (iv != 1)
            for (size_t j = c; j < r.cols(); ++j) r.at(lead, j) = f.mul(iv, r.at(lead, j));
        for (size_t i = 0; i < r.rows(); ++i) {
            if (i == lead) continue;
            uint32_t v = r.at(i, c);
            if (v == 0) continue;
            uint32_t nv = f.neg(v);
            for (size_t j = c; j < r.cols(); ++j)
                r.at(i, j) = f.add(r.at(i, j), f.mul(nv, r.at(lead, j)));
        }
        pivots.push_back(c);
        ++lead;
    }
    size_t rk = pivots.size();
    return Rref{std::move(r), std::move(pivots), rk};
}

size_t rank(const Matrix& m) { return rref(m).rank; }

Matrix kernel_basis(const Matrix& m) {
    Rref r = rref(m);
    const Field& f = m.field();
    std::vector<bool> is_pivot(m.cols(), false);
    for (size_t c : r.pivots) is_pivot[c] = true;
    size_t nfree = m.cols() - r.rank;
    Matrix k(f, nfree, m.cols());
    size_t row = 0;
    for (size_t cf = 0; cf < m.cols(); ++cf) {
        if (is_pivot[cf]) continue;
        k.at(row, cf) = 1;
        for (size_t i = 0; i < r.rank; ++i) k.at(row, r.pivots[i]) = f.neg(r.reduced.at(i, cf));
        ++row;
    }
    return k;
}

Matrix image_basis(const Matrix& m) {
    // pivot columns of m form a basis of the column space; emit them as rows
    Rref r = rref(m);
    Matrix img(m.field(), r.rank, m.rows());
    for (size_t i = 0; i < r.rank; ++i)
        for (size_t row = 0; row < m.rows(); ++row) img.at(i, row) = m.at(row, r.pivots[i]);
    return img;
}

Solver::Solver(const Matrix& m) : r_(m), t_(Matrix::identity(m.field(), m.rows())), cols_(m.cols()) {
    const Field& f = m.field();
    size_t lead = 0;
    for (size_t c = 0; c < r_.cols() && lead < r_.rows(); ++c) {
        size_t pr = lead;
        while (pr < r_.rows() && r_.at(pr, c) == 0) ++pr;
        if (pr == r_.rows()) continue;
        if (pr != lead) {
            for (size_t j = 0; j < r_.cols(); ++j) std::swap(r_.at(pr, j), r_.at(lead, j));
            for (size_t j = 0; j < t_.cols(); ++j) std::swap(t_.at(pr, j), t_.at(lead, j));
        }
        uint32_t iv = f.inv(r_.at(lead, c));
        if (iv != 1) {
            for (size_t j = 0; j < r_.cols(); ++j) r_.at(lead, j) = f.mul(iv, r_.at(lead, j));
            for (size_t j = 0; j < t_.cols(); ++j) t_.at(lead, j) = f.mul(iv, t_.at(lead, j));
        }
        for (size_t i = 0; i < r_.rows(); ++i) {
            if (i == lead) continue;
            uint32_t v = r_.at(i, c);
            if (v == 0) continue;
            uint32_t nv = f.neg(v);
            for (size_t j = 0; j < r_.cols(); ++j)
                r_.at(i, j) = f.add(r_.at(i, j), f.mul(nv, r_.at(lead, j)));
            for (size_t j = 0; j < t_.cols(); ++j)
                t_.at(i, j) = f.add(t_.at(i, j), f.mul(nv, t_.at(lead, j)));
        }
        pivots_.push_back(c);
        ++lead;
    }
}

std::optional<Matrix> Solver::solve(const Matrix& b) const {
    if (b.rows() != t_.cols()) throw ComputeError("rhs row mismatch in solve");
    Matrix y = mul(t_, b);
    for (size_t r = pivots_.size(); r < y.rows(); ++r)
        for (size_t c = 0; c < y.cols(); ++c)
            if (y.at(r, c) != 0) return std::nullopt;
    Matrix x(b.field(), cols_, b.cols());
    for (size_t i = 0; i < pivots_.size(); ++i)
        for (size_t c = 0; c < y.cols(); ++c) x.at(pivots_[i], c) = y.at(i, c);
    return x;
}

std::optional<Matrix> solve(const Matrix& m, const Matrix& b) {
    if (m.rows() != b.rows()) throw ComputeError("shape mismatch in solve");
    return Solver(m).solve(b);
}

std::optional<Matrix> inverse(const Matrix& m) {
    if (m.rows() != m.cols()) return std::nullopt;
    auto x = solve(m, Matrix::identity(m.field(), m.rows()));
    if (!x) return std::nullopt;
    if (!mul(m, *x).is_identity()) return std::nullopt;
    return x;
}

RowSpace::RowSpace(Field f, size_t width) : field_(f), width_(width), basis_(f, 0, width) {}

RowSpace::RowSpace(const Matrix& rows)
    : field_(rows.field()), width_(rows.cols()), basis_(rows.field(), 0, rows.cols()) {
    add_rows(rows);
}

void RowSpace::add_rows(const Matrix& rows) {
    if (rows.cols() != width_) throw ComputeError("row width mismatch");
    if (rows.rows() == 0) return;
    Rref r = rref(vstack(basis_, rows));
    basis_ = block(r.reduced, 0, 0, r.rank, width_);
    pivots_ = r.pivots;
}

void RowSpace::add_row(const std::vector<uint32_t>& v) {
    add_rows(Matrix::from_rows(field_, {v}, width_));
}

std::vector<uint32_t> RowSpace::residue(const std::vector<uint32_t>& v) const {
    if (v.size() != width_) throw ComputeError("vector width mismatch");
    std::vector<uint32_t> r = v;
    for (size_t i = 0; i < basis_.rows(); ++i) {
        uint32_t c = r[pivots_[i]];
        if (c == 0) continue;
        uint32_t nc = field_.neg(c);
        for (size_t j = 0; j < width_; ++j)
            r[j] = field_.add(r[j], field_.mul(nc, basis_.at(i, j)));
    }
    return r;
}

bool RowSpace::contains(const std::vector<uint32_t>& v) const {
    auto r = residue(v);
    return std::all_of(r.begin(), r.end(), [](uint32_t x) { return x == 0; });
}

bool RowSpace::contains_rows(const Matrix& rows) const {
    for (size_t i = 0; i < rows.rows(); ++i)
        if (!contains(rows.row(i))) return false;
    return true;
}

SubspaceQuotient::SubspaceQuotient(const RowSpace& sub, size_t ambient_dim) : sub_(sub) {
    if (sub.width() != ambient_dim) throw ComputeError("quotient width mismatch");
    std::vector<bool> piv(ambient_dim, false);
    Rref r = rref(sub.basis());
    for (size_t c : r.pivots) piv[c] = true;
    for (size_t c = 0; c < ambient_dim; ++c)
        if (!piv[c]) free_cols_.push_back(c);
}

std::vector<uint32_t> SubspaceQuotient::coords(const std::vector<uint32_t>& v) const {
    auto r = sub_.residue(v);
    std::vector<uint32_t> out(free_cols_.size());
    for (size_t i = 0; i < free_cols_.size(); ++i) out[i] = r[free_cols_[i]];
    return out;
}

size_t UnknownLayout::add_block(const std::string& name, size_t size) {
    blocks_.push_back({name, {total_, size}});
    size_t off = total_;
    total_ += size;
    return off;
}

size_t UnknownLayout::offset(const std::string& name) const {
    for (auto& b : blocks_)
        if (b.first == name) return b.second.first;
    throw ComputeError("unknown block: " + name);
}

size_t UnknownLayout::size(const std::string& name) const {
    for (auto& b : blocks_)
        if (b.first == name) return b.second.second;
    throw ComputeError("unknown block: " + name);
}

void LinearSystem::add_block_rows(const Matrix& coeffs, size_t offset,
                                  const std::vector<uint32_t>& rhs) {
    if (coeffs.rows() != rhs.size()) throw ComputeError("rhs size mismatch");
    if (offset + coeffs.cols() > unknowns_) throw ComputeError("block exceeds unknown width");
    for (size_t r = 0; r < coeffs.rows(); ++r) {
        std::vector<uint32_t> row(unknowns_, 0);
        for (size_t c = 0; c < coeffs.cols(); ++c) row[offset + c] = coeffs.at(r, c);
        rows_.push_back(std::move(row));
        rhs_.push_back(rhs[r]);
    }
}

void LinearSystem::add_rows(const Matrix& coeffs, const std::vector<uint32_t>& rhs) {
    add_block_rows(coeffs, 0, rhs);
}

std::optional<std::vector<uint32_t>> LinearSystem::solve() const {
    Matrix a = Matrix::from_rows(field_, rows_, unknowns_);
    Matrix b(field_, rhs_.size(), 1);
    for (size_t i = 0; i < rhs_.size(); ++i) b.at(i, 0) = rhs_[i];
    auto x = Solver(a).solve(b);
    if (!x) return std::nullopt;
    return x->col(0);
}

std::optional<std::pair<std::vector<uint32_t>, Matrix>> LinearSystem::solve_space() const {
    Matrix a = Matrix::from_rows(field_, rows_, unknowns_);
    Matrix b(field_, rhs_.size(), 1);
    for (size_t i = 0; i < rhs_.size(); ++i) b.at(i, 0) = rhs_[i];
    auto x = Solver(a).solve(b);
    if (!x) return std::nullopt;
    return std::make_pair(x->col(0), kernel_basis(a));
}

Matrix left_mul_operator(const Matrix& l, size_t src_cols) {
    return kron(l, Matrix::identity(l.field(), src_cols));
}

Matrix right_mul_operator(const Matrix& r, size_t src_rows) {
    return kron(Matrix::identity(r.field(), src_rows), transpose(r));
}

}  // namespace relhom
