#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

using namespace glv;

TEST_CASE("matrix basics", "[linalg]") {
    Mat m(2, 3);
    REQUIRE(m.rows == 2);
    REQUIRE(m.cols == 3);
    REQUIRE(max_abs(m) == 0.0);
    m(0, 1) = 2.0;
    m(1, 2) = -5.0;
    REQUIRE(max_abs(m) == 5.0);

    const Mat t = transpose(m);
    REQUIRE(t.rows == 3);
    REQUIRE(t.cols == 2);
    REQUIRE(t(1, 0) == 2.0);
    REQUIRE(t(2, 1) == -5.0);

    const Mat id = Mat::identity(3);
    const Vec y = matvec(id, {1.0, 2.0, 3.0});
    REQUIRE(y == Vec{1.0, 2.0, 3.0});

    REQUIRE(frobenius(id) == Catch::Approx(std::sqrt(3.0)));
    REQUIRE(norm2({3.0, 4.0}) == 5.0);
}

TEST_CASE("matmul against hand product", "[linalg]") {
    Mat a(2, 2), b(2, 2);
    a(0, 0) = 1; a(0, 1) = 2; a(1, 0) = 3; a(1, 1) = 4;
    b(0, 0) = 5; b(0, 1) = 6; b(1, 0) = 7; b(1, 1) = 8;
    const Mat c = matmul(a, b);
    REQUIRE(c(0, 0) == 19.0);
    REQUIRE(c(0, 1) == 22.0);
    REQUIRE(c(1, 0) == 43.0);
    REQUIRE(c(1, 1) == 50.0);
}

TEST_CASE("lu_solve recovers a pinned 2x2 solution", "[linalg]") {
    Mat m(2, 2);
    m(0, 0) = 0.9; m(0, 1) = -0.1;
    m(1, 0) = 0.1; m(1, 1) = 1.1;
    const Vec y = lu_solve(m, {1.0, 1.0});
    REQUIRE(y[0] == Catch::Approx(1.2).margin(1e-15));
    REQUIRE(y[1] == Catch::Approx(0.8).margin(1e-15));
}

TEST_CASE("lu_solve residual on random systems", "[linalg]") {
    for (int n : {1, 2, 4, 7}) {
        for (std::uint64_t seed : {11ull, 12ull, 13ull}) {
            const Vec entries = random_state(n * n, derive_seed(seed, {static_cast<std::uint64_t>(n)}), -2.0, 2.0);
            Mat m(n, n);
            std::copy(entries.begin(), entries.end(), m.data.begin());
            for (int i = 0; i < n; ++i) m(i, i) += 3.0; // keep it comfortably regular
            const Vec b = random_state(n, seed, -1.0, 1.0);
            const Vec y = lu_solve(m, b);
            const Vec r = matvec(m, y);
            REQUIRE(oracle::max_rel_err(r, b) <= 1e-12);
        }
    }
}

TEST_CASE("lu_solve rejects singular systems", "[linalg]") {
    Mat m(2, 2);
    m(0, 0) = 1.0; m(0, 1) = 2.0;
    m(1, 0) = 2.0; m(1, 1) = 4.0;
    REQUIRE_THROWS_AS(lu_solve(m, {1.0, 1.0}), SingularSystem);
}

TEST_CASE("singular values of a diagonal matrix", "[linalg]") {
    Mat m(3, 3);
    m(0, 0) = -2.0; m(1, 1) = 0.5; m(2, 2) = 3.0;
    const auto sv = singular_values(m);
    REQUIRE(sv.size() == 3);
    REQUIRE(sv[0] == Catch::Approx(3.0).margin(1e-12));
    REQUIRE(sv[1] == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(sv[2] == Catch::Approx(0.5).margin(1e-12));
}

TEST_CASE("singular values on wide and tall shapes", "[linalg]") {
    Mat m(2, 4);
    m(0, 0) = 1.0; m(0, 2) = 1.0; // rows orthogonal, norms sqrt(2) and 2
    m(1, 1) = 2.0;
    const auto sv = singular_values(m);
    REQUIRE(sv.size() == 2);
    REQUIRE(sv[0] == Catch::Approx(2.0).margin(1e-12));
    REQUIRE(sv[1] == Catch::Approx(std::sqrt(2.0)).margin(1e-12));

    const auto svt = singular_values(transpose(m));
    REQUIRE(svt.size() == 2);
    REQUIRE(svt[0] == Catch::Approx(sv[0]).margin(1e-12));
    REQUIRE(svt[1] == Catch::Approx(sv[1]).margin(1e-12));
}

TEST_CASE("svd rank agrees with elimination rank on random low-rank products", "[linalg]") {
    for (int r : {1, 2, 3}) {
        for (std::uint64_t seed : {21ull, 22ull, 23ull}) {
            const int rows = 5, cols = 4;
            const Vec le = random_state(rows * r, derive_seed(seed, {1}), -1.0, 1.0);
            const Vec ri = random_state(r * cols, derive_seed(seed, {2}), -1.0, 1.0);
            Mat l(rows, r), rm(r, cols);
            std::copy(le.begin(), le.end(), l.data.begin());
            std::copy(ri.begin(), ri.end(), rm.data.begin());
            const Mat prod = matmul(l, rm);

            const auto sv = singular_values(prod);
            int svd_rank = 0;
            for (double s : sv)
                if (s > 1e-8 * sv.front()) ++svd_rank;
            REQUIRE(svd_rank == r);
            REQUIRE(oracle::echelon_rank(prod, 1e-10) == r);
        }
    }
}
