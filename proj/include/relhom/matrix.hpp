#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace relhom {

struct SchemaError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ComputeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Prime field GF(p), 2 <= p < 2^31. Primality is checked at construction.
class Field {
  public:
    explicit Field(uint32_t p);

    uint32_t p() const { return p_; }

    uint32_t add(uint32_t a, uint32_t b) const {
        uint32_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    uint32_t sub(uint32_t a, uint32_t b) const { return a >= b ? a - b : a + p_ - b; }
    uint32_t neg(uint32_t a) const { return a == 0 ? 0 : p_ - a; }
    uint32_t mul(uint32_t a, uint32_t b) const {
        return static_cast<uint32_t>(static_cast<uint64_t>(a) * b % p_);
    }
    uint32_t inv(uint32_t a) const;
    uint32_t reduce(int64_t v) const {
        int64_t r = v % static_cast<int64_t>(p_);
        if (r < 0) r += p_;
        return static_cast<uint32_t>(r);
    }

    bool operator==(const Field&) const = default;

  private:
    uint32_t p_;
};

bool is_prime(uint32_t n);

// Dense row-major matrix over GF(p). Immutable by convention after
// construction; all operations return fresh values.
class Matrix {
  public:
    Matrix(Field f, size_t rows, size_t cols)
        : field_(f), rows_(rows), cols_(cols), a_(rows * cols, 0) {}

    static Matrix identity(Field f, size_t n);
    static Matrix from_rows(Field f, const std::vector<std::vector<uint32_t>>& rows, size_t cols);
    static Matrix from_flat(Field f, size_t rows, size_t cols, std::vector<uint32_t> data);

    const Field& field() const { return field_; }
    size_t rows() const { return rows_; }
    size_t cols() const { return cols_; }

    uint32_t at(size_t r, size_t c) const { return a_[r * cols_ + c]; }
    uint32_t& at(size_t r, size_t c) { return a_[r * cols_ + c]; }
    const std::vector<uint32_t>& entries() const { return a_; }

    std::vector<uint32_t> row(size_t r) const;
    std::vector<uint32_t> col(size_t c) const;

    bool is_zero() const;
    bool is_identity() const;

    bool operator==(const Matrix& o) const {
        return field_ == o.field_ && rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

  private:
    Field field_;
    size_t rows_, cols_;
    std::vector<uint32_t> a_;
};

Matrix add(const Matrix& a, const Matrix& b);
Matrix sub(const Matrix& a, const Matrix& b);
Matrix neg(const Matrix& a);
Matrix smul(uint32_t c, const Matrix& a);
Matrix mul(const Matrix& a, const Matrix& b);
Matrix transpose(const Matrix& a);
Matrix hstack(const Matrix& a, const Matrix& b);
Matrix vstack(const Matrix& a, const Matrix& b);

// Block extraction: nr x nc submatrix with top-left corner (r0, c0).
Matrix block(const Matrix& m, size_t r0, size_t c0, size_t nr, size_t nc);

// Kronecker (tensor) product.
Matrix kron(const Matrix& a, const Matrix& b);

// Matrix-vector product m . v with v a column vector given as a flat vector.
std::vector<uint32_t> apply_vec(const Matrix& m, const std::vector<uint32_t>& v);

struct Rref {
    Matrix reduced;
    std::vector<size_t> pivots;
    size_t rank;
};

// Reduced row echelon form with deterministic pivoting (first nonzero row in
// column order), so downstream constructions are reproducible bit-for-bit.
Rref rref(const Matrix& m);

size_t rank(const Matrix& m);

// Rows of the result form a basis of the right null space {v : m.v = 0},
// ordered by ascending free column. Row count = cols(m) - rank(m).
Matrix kernel_basis(const Matrix& m);

// Rows of the result form a basis of the column space of m (vectors of
// length rows(m)).
Matrix image_basis(const Matrix& m);

// Particular solution of m.X = b (free variables set to zero), or nullopt
// when the system is inconsistent. b may have any number of columns.
std::optional<Matrix> solve(const Matrix& m, const Matrix& b);

std::optional<Matrix> inverse(const Matrix& m);

// Factored elimination of a fixed matrix, reusable across right-hand sides.
class Solver {
  public:
    explicit Solver(const Matrix& m);

    std::optional<Matrix> solve(const Matrix& b) const;
    size_t rank() const { return pivots_.size(); }
    const std::vector<size_t>& pivots() const { return pivots_; }

  private:
    Matrix r_;  // row echelon of m
    Matrix t_;  // accumulated row transform, t_ * m = r_
    std::vector<size_t> pivots_;
    size_t cols_;
};

// Row-space container kept in rref form; supports membership tests and the
// residue of a vector modulo the span.
class RowSpace {
  public:
    explicit RowSpace(Field f, size_t width);
    explicit RowSpace(const Matrix& rows);

    void add_rows(const Matrix& rows);
    void add_row(const std::vector<uint32_t>& v);

    size_t dim() const { return basis_.rows(); }
    size_t width() const { return width_; }
    const Matrix& basis() const { return basis_; }

    std::vector<uint32_t> residue(const std::vector<uint32_t>& v) const;
    bool contains(const std::vector<uint32_t>& v) const;
    bool contains_rows(const Matrix& rows) const;

  private:
    Field field_;
    size_t width_;
    Matrix basis_;                // rref, no zero rows
    std::vector<size_t> pivots_;  // pivot column per basis row
};

// Coordinates on the quotient k^n / U, with U a row space. The non-pivot
// coordinates of the residue give the quotient coordinates.
class SubspaceQuotient {
  public:
    SubspaceQuotient(const RowSpace& sub, size_t ambient_dim);

    size_t quotient_dim() const { return free_cols_.size(); }
    const std::vector<size_t>& free_columns() const { return free_cols_; }
    std::vector<uint32_t> coords(const std::vector<uint32_t>& v) const;

  private:
    RowSpace sub_;
    std::vector<size_t> free_cols_;
};

// Affine system A x = b assembled from named blocks of unknowns.
class UnknownLayout {
  public:
    size_t add_block(const std::string& name, size_t size);
    size_t offset(const std::string& name) const;
    size_t size(const std::string& name) const;
    size_t total() const { return total_; }

  private:
    std::vector<std::pair<std::string, std::pair<size_t, size_t>>> blocks_;
    size_t total_ = 0;
};

class LinearSystem {
  public:
    LinearSystem(Field f, size_t unknowns) : field_(f), unknowns_(unknowns) {}

    // coeffs: k x width block placed at column `offset`; rhs: k x 1.
    void add_block_rows(const Matrix& coeffs, size_t offset, const std::vector<uint32_t>& rhs);
    // coeffs spanning the full unknown width
    void add_rows(const Matrix& coeffs, const std::vector<uint32_t>& rhs);

    std::optional<std::vector<uint32_t>> solve() const;
    // particular solution plus a basis of the homogeneous solution space
    std::optional<std::pair<std::vector<uint32_t>, Matrix>> solve_space() const;
    size_t unknowns() const { return unknowns_; }

  private:
    Field field_;
    size_t unknowns_;
    std::vector<std::vector<uint32_t>> rows_;
    std::vector<uint32_t> rhs_;
};

// Row-major vectorization helpers: vec(L X R) = kron(L, R^T) vec(X).
Matrix left_mul_operator(const Matrix& l, size_t src_cols);
Matrix right_mul_operator(const Matrix& r, size_t src_rows);

}  // namespace relhom
