#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"

#include <cmath>

using namespace glv;

TEST_CASE("structure_matrix entries and antisymmetry", "[poisson]") {
    const Mat p = structure_matrix({1.0, 2.0, 3.0});
    REQUIRE(p(0, 1) == 2.0);
    REQUIRE(p(0, 2) == 3.0);
    REQUIRE(p(1, 2) == 6.0);
    for (int i = 0; i < 3; ++i) {
        REQUIRE(p(i, i) == 0.0);
        for (int j = 0; j < 3; ++j) REQUIRE(p(i, j) == -p(j, i));
    }
}

TEST_CASE("bracket of coordinates reproduces the structure matrix", "[poisson]") {
    const SystemParams p = build_system({1.0, 1.0});
    REQUIRE(bracket(p, Integral::coordinate(1), Integral::coordinate(2), {1.0, 2.0}) == 2.0);
    REQUIRE(bracket(p, Integral::coordinate(2), Integral::coordinate(1), {1.0, 2.0}) == -2.0);
    REQUIRE(bracket(p, Integral::coordinate(1), Integral::coordinate(1), {1.0, 2.0}) == 0.0);
}

TEST_CASE("bracket is antisymmetric and obeys the Leibniz rule", "[poisson]") {
    const SystemParams p = build_system({1.0, -2.0, 0.5, 1.0});
    for (std::uint64_t pt = 0; pt < 10; ++pt) {
        const Vec x = random_state(4, derive_seed(31, {pt}), 0.5, 2.0);
        const double fg = bracket(p, Integral::F(1), Integral::J(1), x);
        const double gf = bracket(p, Integral::J(1), Integral::F(1), x);
        REQUIRE(fg == Catch::Approx(-gf).margin(1e-13 * (1.0 + std::abs(fg))));

        // {x_i x_j, x_k} = x_i {x_j, x_k} + x_j {x_i, x_k}
        const double lhs = bracket(p, Integral::product(1, 3), Integral::coordinate(2), x);
        const double rhs = comp(x, 1) * bracket(p, Integral::coordinate(3), Integral::coordinate(2), x) +
                           comp(x, 3) * bracket(p, Integral::coordinate(1), Integral::coordinate(2), x);
        REQUIRE(lhs == Catch::Approx(rhs).margin(1e-12 * (1.0 + std::abs(rhs))));
    }
}

TEST_CASE("bracket agrees with a finite-difference oracle", "[poisson]") {
    const SystemParams p = build_system({1.0, 2.0, -1.0});
    const Vec x = {0.8, 1.3, 0.6};
    const double lib = bracket(p, Integral::F(1), Integral::C(), x);
    const double fd = oracle::fd_bracket([&](const Vec& y) { return eval(p, Integral::F(1), y); },
                                         [&](const Vec& y) { return eval(p, Integral::C(), y); }, x);
    REQUIRE(lib == Catch::Approx(fd).margin(1e-6 * (1.0 + std::abs(lib))));
}

TEST_CASE("prefix sums close under the bracket", "[poisson]") {
    // {v_i, v_j} = v_i (v_j - v_i) for i < j
    const SystemParams p2 = build_system({1.0, 1.0});
    REQUIRE(bracket(p2, Integral::prefix_sum(1), Integral::prefix_sum(2), {1.0, 2.0}) == 2.0);

    for (int n : {2, 3, 5, 6}) {
        for (const auto& a : oracle::coefficient_patterns(n)) {
            const SystemParams p = build_system(a);
            const Vec x = random_state(n, derive_seed(32, {static_cast<std::uint64_t>(n)}), 0.5, 2.0);
            const CumulativeSums cs = cumulative_sums(p, x);
            for (int i = 1; i < n; ++i)
                for (int j = i + 1; j <= n; ++j) {
                    const double got = bracket(p, Integral::prefix_sum(i), Integral::prefix_sum(j), x);
                    const double want = cs.at(i) * (cs.at(j) - cs.at(i));
                    REQUIRE(got == Catch::Approx(want).margin(1e-12 * (1.0 + std::abs(want))));
                }
        }
    }
}

TEST_CASE("hamiltonian vector field is P grad H", "[poisson]") {
    for (int n = 1; n <= 6; ++n) {
        for (const auto& a : oracle::coefficient_patterns(n)) {
            const SystemParams p = build_system(a);
            const Vec x = random_state(n, derive_seed(33, {static_cast<std::uint64_t>(n)}), 0.5, 2.0);
            const Vec want = vector_field(p, x);
            const Vec got = matvec(structure_matrix(x), gradient(p, Integral::H(), x));
            REQUIRE(oracle::max_rel_err(got, want) <= 1e-12);
        }
    }
}

TEST_CASE("liouville sets pass check_involution across all patterns", "[poisson]") {
    for (int n = 2; n <= 8; ++n) {
        for (const auto& a : oracle::coefficient_patterns(n)) {
            const SystemParams p = build_system(a);
            std::vector<Vec> pts;
            for (std::uint64_t k = 0; k < 10; ++k)
                pts.push_back(random_state(n, derive_seed(34, {static_cast<std::uint64_t>(n), k}), 0.5, 2.0));
            const InvolutionReport rep = check_involution(p, liouville_set(p), pts);
            INFO("n=" << n << " ell=" << p.ell << " worst=" << rep.worst);
            REQUIRE(rep.pass);
            REQUIRE(rep.points_used > 0);
        }
    }
}

TEST_CASE("check_involution flags a non-involutive pair", "[poisson]") {
    const SystemParams p = build_system({1.0, 1.0});
    const InvolutionReport rep =
        check_involution(p, {Integral::coordinate(1), Integral::coordinate(2)}, {Vec{1.0, 1.0}});
    REQUIRE_FALSE(rep.pass);
    REQUIRE(rep.worst > 0.1);
    REQUIRE(rep.pairs.size() == 1);

    REQUIRE_THROWS_AS(check_involution(p, {}, {Vec{1.0, 1.0}}), EmptySet);
    REQUIRE_THROWS_AS(check_involution(p, {Integral::H()}, {}), Error);
}

TEST_CASE("check_involution skips pole points but needs one good one", "[poisson]") {
    const SystemParams p = build_system({1.0, 1.0, 1.0});
    // x2 = 0 puts C on a pole; the second point works
    const InvolutionReport rep =
        check_involution(p, liouville_set(p), {Vec{1.0, 0.0, 1.0}, Vec{1.0, 2.0, 3.0}});
    REQUIRE(rep.pass);
    REQUIRE(rep.points_used == 1);
    REQUIRE(rep.points_skipped == 1);
}

TEST_CASE("casimir annihilates every coordinate bracket", "[poisson]") {
    for (int n : {1, 3, 5, 7}) {
        for (std::uint64_t pt = 0; pt < 10; ++pt) {
            const Vec x = random_state(n, derive_seed(35, {static_cast<std::uint64_t>(n), pt}), 0.5, 2.0);
            REQUIRE(check_casimir(x));
        }
    }
    REQUIRE_THROWS_AS(check_casimir(Vec{1.0, 2.0}), EvenDimension);

    // an ordinary integral is not a Casimir: {H, x_1} != 0 generically
    const SystemParams p = build_system({1.0, 1.0, 1.0});
    const double b = bracket(p, Integral::H(), Integral::coordinate(1), {1.0, 2.0, 3.0});
    REQUIRE(std::abs(b) > 0.1);
}

TEST_CASE("fd_jacobian matches an analytic jacobian", "[poisson]") {
    // map (x,y) -> (x*y, x + y^2)
    auto map = [](const Vec& v) { return Vec{v[0] * v[1], v[0] + v[1] * v[1]}; };
    const Vec x = {0.7, 1.3};
    const Mat j = fd_jacobian(map, x);
    REQUIRE(j(0, 0) == Catch::Approx(1.3).margin(1e-9));
    REQUIRE(j(0, 1) == Catch::Approx(0.7).margin(1e-9));
    REQUIRE(j(1, 0) == Catch::Approx(1.0).margin(1e-9));
    REQUIRE(j(1, 1) == Catch::Approx(2.6).margin(1e-9));

    auto throwing = [](const Vec&) -> Vec { throw MapPoleError(1); };
    REQUIRE_THROWS_AS(fd_jacobian(throwing, x), NumericalJacobianFailure);
    auto shrinking = [](const Vec& v) { return Vec{v[0]}; };
    REQUIRE_THROWS_AS(fd_jacobian(shrinking, x), NumericalJacobianFailure);
}

TEST_CASE("kahan and exact-flow maps preserve the bracket, a shear does not", "[poisson]") {
    for (int n = 2; n <= 6; ++n) {
        for (const auto& a : oracle::coefficient_patterns(n)) {
            const SystemParams p = build_system(a);
            const Vec x = random_state(n, derive_seed(36, {static_cast<std::uint64_t>(n)}), 0.5, 2.0);
            for (double eps : {0.1, 0.01}) {
                PoissonMapReport rep;
                try {
                    rep = poisson_map_check([&](const Vec& y) { return kahan_step_closed(p, y, eps); }, x);
                } catch (const Error&) {
                    continue; // map pole at or near x for this pattern
                }
                INFO("n=" << n << " eps=" << eps << " worst=" << rep.worst);
                REQUIRE(rep.pass);
            }
        }
    }

    const SystemParams p3 = build_system({1.0, 1.0, 1.0});
    const PoissonMapReport flow =
        poisson_map_check([&](const Vec& y) { return exact_flow(p3, y, 0.17); }, Vec{1.0, 0.8, 1.2});
    REQUIRE(flow.pass);

    const PoissonMapReport shear =
        poisson_map_check([](const Vec& y) { return Vec{y[0] + y[1], y[1]}; }, Vec{1.0, 1.0});
    REQUIRE_FALSE(shear.pass);
    REQUIRE(shear.worst == Catch::Approx(1.0 / 3.0).margin(1e-6));
}

TEST_CASE("diagonal brackets always satisfy Jacobi", "[poisson]") {
    REQUIRE(jacobiator(default_diagonal_bracket(3), {1.0, 2.0, 3.0}, 1, 2, 3) == 0.0);

    for (std::uint64_t trial = 0; trial < 50; ++trial) {
        const int n = 3 + static_cast<int>(trial % 4);
        const Vec entries = random_state(n * n, derive_seed(37, {trial}), -2.0, 2.0);
        Mat coef(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) {
                coef(i, j) = entries[static_cast<std::size_t>(i * n + j)];
                coef(j, i) = -coef(i, j);
            }
        const DiagonalBracket b(coef);
        const Vec x = random_state(n, derive_seed(38, {trial}), 0.5, 2.0);
        for (int i = 1; i <= n; ++i)
            for (int j = i + 1; j <= n; ++j)
                for (int k = j + 1; k <= n; ++k) {
                    const double r = jacobiator(b, x, i, j, k);
                    const double scale = std::abs(comp(x, i) * comp(x, j) * comp(x, k)) * 8.0;
                    REQUIRE(std::abs(r) <= 1e-12 * (1.0 + scale));
                }
    }
}

TEST_CASE("jacobiator agrees with nested finite-difference brackets", "[poisson]") {
    const int n = 3;
    Mat coef(n, n);
    coef(0, 1) = 1.5; coef(1, 0) = -1.5;
    coef(0, 2) = -0.7; coef(2, 0) = 0.7;
    coef(1, 2) = 2.0; coef(2, 1) = -2.0;
    const DiagonalBracket b(coef);
    const Vec x = {0.9, 1.4, 0.7};

    // brackets under b of coordinates: {x_i, x_j} = b_ij x_i x_j
    auto br = [&](const std::function<double(const Vec&)>& f,
                  const std::function<double(const Vec&)>& g, const Vec& y) {
        const Vec gf = oracle::fd_gradient(f, y), gg = oracle::fd_gradient(g, y);
        double s = 0.0;
        for (int i = 1; i <= n; ++i)
            for (int j = 1; j <= n; ++j)
                s += comp(gf, i) * b.at(i, j) * comp(y, i) * comp(y, j) * comp(gg, j);
        return s;
    };
    auto coord = [](int i) {
        return [i](const Vec& y) { return comp(y, i); };
    };
    double cyc = 0.0;
    cyc += br([&](const Vec& y) { return br(coord(1), coord(2), y); }, coord(3), x);
    cyc += br([&](const Vec& y) { return br(coord(2), coord(3), y); }, coord(1), x);
    cyc += br([&](const Vec& y) { return br(coord(3), coord(1), y); }, coord(2), x);

    // nested finite differences are good to about 1e-4 here; the point is
    // that the independent cyclic sum vanishes, like the library value
    const double lib = jacobiator(b, x, 1, 2, 3);
    REQUIRE(std::abs(cyc) <= 1e-3);
    REQUIRE(std::abs(lib) <= 1e-12);
}

TEST_CASE("diagonal bracket validation and field invariance", "[poisson]") {
    Mat bad(3, 3);
    bad(0, 1) = 1.0; bad(1, 0) = 1.0; // not skew
    REQUIRE_THROWS_AS(DiagonalBracket(bad), Error);
    Mat diag(3, 3);
    diag(1, 1) = 2.0;
    REQUIRE_THROWS_AS(DiagonalBracket(diag), Error);

    const SystemParams p = build_system({0.0, 1.0, 0.0, 1.0});
    Mat coef(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) coef(i, j) = i < j ? 1.0 : (i > j ? -1.0 : 0.0);
    coef(0, 2) = 7.0; coef(2, 0) = -7.0; // pair (1,3): a_1 = a_3 = 0, legal
    for (std::uint64_t pt = 0; pt < 10; ++pt) {
        const Vec x = random_state(4, derive_seed(39, {pt}), 0.5, 2.0);
        REQUIRE(diagonal_vector_field_invariance(p, DiagonalBracket(coef), x));
    }

    Mat illegal = coef;
    illegal(0, 1) = 2.0; illegal(1, 0) = -2.0; // pair (1,2): a_2 != 0
    REQUIRE_THROWS_AS(diagonal_vector_field_invariance(p, DiagonalBracket(illegal), {1.0, 1.0, 1.0, 1.0}),
                      IllegalOverride);

    REQUIRE(default_diagonal_bracket(4).at(1, 3) == 1.0);
    REQUIRE(default_diagonal_bracket(4).at(3, 1) == -1.0);
    REQUIRE(default_diagonal_bracket(4).at(2, 2) == 0.0);
}
