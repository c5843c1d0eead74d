#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "relhom/matrix.hpp"

using namespace relhom;

namespace {

Matrix random_matrix(Field f, size_t r, size_t c, std::mt19937_64& rng) {
    Matrix m(f, r, c);
    std::uniform_int_distribution<uint64_t> dist(0, f.p() - 1);
    for (size_t i = 0; i < r; ++i)
        for (size_t j = 0; j < c; ++j) m.at(i, j) = static_cast<uint32_t>(dist(rng));
    return m;
}

}  // namespace

TEST_CASE("field construction accepts primes only") {
    CHECK_NOTHROW(Field(2));
    CHECK_NOTHROW(Field(3));
    CHECK_NOTHROW(Field(2147483629));  // largest prime below 2^31
    CHECK_THROWS_AS(Field(1), SchemaError);
    CHECK_THROWS_AS(Field(4), SchemaError);
    CHECK_THROWS_AS(Field(91), SchemaError);  // 7 * 13
}

TEST_CASE("field inverses") {
    for (uint32_t p : {2u, 3u, 5u, 7u, 101u}) {
        Field f(p);
        for (uint32_t a = 1; a < p && a < 120; ++a) CHECK(f.mul(a, f.inv(a)) == 1);
    }
}

TEST_CASE("rref of the identity is itself") {
    Field f(2);
    Matrix id = Matrix::identity(f, 3);
    Rref r = rref(id);
    CHECK(r.reduced == id);
    CHECK(r.rank == 3);
}

TEST_CASE("rref of the all-ones 2x2 over GF(2)") {
    Field f(2);
    Matrix m = Matrix::from_rows(f, {{1, 1}, {1, 1}}, 2);
    Rref r = rref(m);
    CHECK(r.rank == 1);
    CHECK(r.reduced == Matrix::from_rows(f, {{1, 1}, {0, 0}}, 2));
}

TEST_CASE("rref of zero matrices") {
    Field f(5);
    Matrix z(f, 2, 5);
    Rref r = rref(z);
    CHECK(r.rank == 0);
    CHECK(r.reduced == z);
}

TEST_CASE("kernel basis examples") {
    Field f(2);
    CHECK(kernel_basis(Matrix::identity(f, 4)).rows() == 0);
    Matrix m = Matrix::from_rows(f, {{1, 1}}, 2);
    Matrix k = kernel_basis(m);
    REQUIRE(k.rows() == 1);
    CHECK(k.row(0) == std::vector<uint32_t>{1, 1});
    Matrix z(f, 1, 2);
    CHECK(kernel_basis(z).rows() == 2);
}

TEST_CASE("solve examples") {
    Field f(2);
    Matrix id = Matrix::identity(f, 3);
    Matrix b = Matrix::from_rows(f, {{1}, {0}, {1}}, 1);
    auto x = solve(id, b);
    REQUIRE(x.has_value());
    CHECK(*x == b);

    Matrix zero1(f, 1, 1);
    Matrix one = Matrix::from_rows(f, {{1}}, 1);
    CHECK_FALSE(solve(zero1, one).has_value());

    Matrix m = Matrix::from_rows(f, {{1, 1}}, 2);
    Matrix rhs(f, 1, 1);
    auto sol = solve(m, rhs);
    REQUIRE(sol.has_value());
    CHECK(mul(m, *sol) == rhs);
}

TEST_CASE("tensor of identities is the identity") {
    Field f(3);
    CHECK(kron(Matrix::identity(f, 2), Matrix::identity(f, 3)) == Matrix::identity(f, 6));
}

TEST_CASE("rank of a tensor product is the product of ranks") {
    std::mt19937_64 rng(7);
    Field f(5);
    for (int t = 0; t < 20; ++t) {
        Matrix a = random_matrix(f, 3, 3, rng);
        Matrix b = random_matrix(f, 3, 3, rng);
        CHECK(rank(kron(a, b)) == rank(a) * rank(b));
    }
}

TEST_CASE("hstack then block extraction round-trips") {
    std::mt19937_64 rng(11);
    Field f(3);
    Matrix a = random_matrix(f, 4, 2, rng);
    Matrix b = random_matrix(f, 4, 3, rng);
    Matrix h = hstack(a, b);
    CHECK(block(h, 0, 0, 4, 2) == a);
    CHECK(block(h, 0, 2, 4, 3) == b);
    Matrix v = vstack(a, block(h, 0, 2, 4, 2));
    CHECK(block(v, 0, 0, 4, 2) == a);
}

TEST_CASE("rank-nullity over random matrices") {
    std::mt19937_64 rng(13);
    for (uint32_t p : {2u, 3u, 5u}) {
        Field f(p);
        for (int t = 0; t < 30; ++t) {
            size_t r = rng() % 7, c = rng() % 7;
            Matrix m = random_matrix(f, r, c, rng);
            CHECK(rank(m) + kernel_basis(m).rows() == c);
        }
    }
}

TEST_CASE("rref is idempotent") {
    std::mt19937_64 rng(17);
    for (uint32_t p : {2u, 3u, 5u}) {
        Field f(p);
        for (int t = 0; t < 30; ++t) {
            Matrix m = random_matrix(f, 1 + rng() % 6, 1 + rng() % 6, rng);
            Matrix r = rref(m).reduced;
            CHECK(rref(r).reduced == r);
        }
    }
}

TEST_CASE("solve soundness: whenever a solution is returned it is exact") {
    std::mt19937_64 rng(19);
    for (uint32_t p : {2u, 3u, 5u}) {
        Field f(p);
        for (int t = 0; t < 40; ++t) {
            size_t r = 1 + rng() % 5, c = 1 + rng() % 5;
            Matrix m = random_matrix(f, r, c, rng);
            Matrix b = random_matrix(f, r, 2, rng);
            auto x = solve(m, b);
            if (x) CHECK(mul(m, *x) == b);
        }
    }
}

TEST_CASE("kernel completeness: exhaustive enumeration over GF(2), cols <= 12") {
    std::mt19937_64 rng(23);
    Field f(2);
    for (int t = 0; t < 10; ++t) {
        size_t r = 1 + rng() % 4, c = 1 + rng() % 12;
        Matrix m = random_matrix(f, r, c, rng);
        RowSpace span(kernel_basis(m));
        size_t found = 0;
        for (uint64_t bits = 0; bits < (1ull << c); ++bits) {
            std::vector<uint32_t> v(c);
            for (size_t i = 0; i < c; ++i) v[i] = (bits >> i) & 1;
            auto mv = apply_vec(m, v);
            if (std::all_of(mv.begin(), mv.end(), [](uint32_t x) { return x == 0; })) {
                CHECK(span.contains(v));
                ++found;
            }
        }
        CHECK(found == (1ull << kernel_basis(m).rows()));
    }
}

TEST_CASE("image basis spans the column space") {
    std::mt19937_64 rng(29);
    Field f(3);
    for (int t = 0; t < 20; ++t) {
        Matrix m = random_matrix(f, 4, 5, rng);
        Matrix img = image_basis(m);
        CHECK(img.rows() == rank(m));
        RowSpace span(img);
        for (size_t c = 0; c < m.cols(); ++c) CHECK(span.contains(m.col(c)));
    }
}

TEST_CASE("inverse round-trips") {
    std::mt19937_64 rng(31);
    Field f(5);
    for (int t = 0; t < 20; ++t) {
        Matrix m = random_matrix(f, 4, 4, rng);
        auto inv = inverse(m);
        if (rank(m) == 4) {
            REQUIRE(inv.has_value());
            CHECK(mul(m, *inv).is_identity());
            CHECK(mul(*inv, m).is_identity());
        } else {
            CHECK_FALSE(inv.has_value());
        }
    }
}

TEST_CASE("solver handles degenerate shapes") {
    Field f(2);
    Matrix e00(f, 0, 0);
    CHECK(rref(e00).rank == 0);
    CHECK(kernel_basis(e00).rows() == 0);
    Matrix e03(f, 0, 3);
    CHECK(kernel_basis(e03).rows() == 3);
    Matrix e30(f, 3, 0);
    CHECK(kernel_basis(e30).rows() == 0);
    auto x = solve(e30, Matrix(f, 3, 2));
    REQUIRE(x.has_value());
    CHECK(x->rows() == 0);
}

TEST_CASE("vec operators match direct products") {
    std::mt19937_64 rng(37);
    Field f(3);
    Matrix l = random_matrix(f, 3, 3, rng);
    Matrix r = random_matrix(f, 4, 4, rng);
    Matrix x = random_matrix(f, 3, 4, rng);
    // vec(L X R) = kron(L, R^T) vec(X) with row-major vec
    Matrix lxr = mul(l, mul(x, r));
    auto v = apply_vec(kron(l, transpose(r)), x.entries());
    CHECK(v == lxr.entries());
}
