#include <catch2/catch_amalgamated.hpp>

#include "hadcont/constants.hpp"
#include "fixtures.hpp"

using namespace hadcont;

TEST_CASE("worked fixture: circle of radius 0.2 around 0.5, entered at 0.3") {
    auto path = Path::circle(cplx(0.5), cplx(0.3), 1);
    auto A = SingularSet::finite({cplx(1.0)});
    auto k = select_constants(path, A, A);

    REQUIRE(k.min_f_singularity == 1.0);
    REQUIRE(k.min_g_singularity == 1.0);
    REQUIRE(k.path_max_modulus == Catch::Approx(0.7).margin(0.005));
    REQUIRE(k.path_clearance == Catch::Approx(0.3).margin(0.005));
    REQUIRE(k.contour_radius == Catch::Approx(std::sqrt(0.3)).margin(1e-12));
    REQUIRE(k.cutoff_width == Catch::Approx(std::min(0.25, 0.3 / 1.4)).margin(0.005));
    REQUIRE(k.growth_rate == Catch::Approx(path.length() / 0.3).epsilon(0.02));
}

TEST_CASE("basepoint range violations are rejected") {
    auto omega = SingularSet::finite({cplx(0.0), cplx(1.0)});

    // |gamma(0)| = 1.5 >= a*b = 1
    auto far = smooth_waypoints(loop_waypoints(cplx(1.5, 0.3), cplx(1.5), 1));
    REQUIRE_THROWS_AS(validate_path(far, omega, 1.0, 1.0), validation_error);

    // basepoint at 0
    REQUIRE_THROWS_AS(validate_path(smooth_waypoints({cplx(0.0), cplx(0.5)}), omega, 1.0, 1.0),
                      validation_error);
}

TEST_CASE("paths through forbidden points are rejected") {
    auto omega = SingularSet::finite({cplx(0.0), cplx(1.0)});
    // straight path crossing 0
    auto through_zero = smooth_waypoints({cplx(0.3), cplx(-0.3)});
    REQUIRE_THROWS_AS(validate_path(through_zero, omega, 1.0, 1.0), validation_error);
    // straight path crossing 1
    auto through_one = smooth_waypoints({cplx(0.5), cplx(1.5)});
    REQUIRE_THROWS_AS(validate_path(through_one, omega, 1.0, 1.0), validation_error);
}

TEST_CASE("valid loop around 1 certifies its clearance") {
    auto omega = SingularSet::finite({cplx(0.0), cplx(1.0)});
    auto loop = smooth_waypoints(loop_waypoints(cplx(1.0), cplx(0.3), 1));
    auto cert = validate_path(loop, omega, 1.0, 1.0);
    REQUIRE(cert.obstruction_clearance > 0.0);
    REQUIRE(cert.min_modulus > 0.0);
    REQUIRE(cert.basepoint_modulus == Catch::Approx(0.3));
}

TEST_CASE("selected constants satisfy their defining inequalities on random fixtures") {
    auto rng = oracles::rng(1234);
    int done = 0, attempts = 0;
    while (done < 100 && attempts < 600) {
        ++attempts;
        auto fx = fixtures::try_geometry_fixture(rng);
        if (!fx) continue;
        ContinuationConstants k;
        try {
            k = select_constants(fx->path, fx->A, fx->B);
        } catch (const validation_error&) {
            continue;  // sampled geometry too tight; draw again
        }
        ++done;

        const double a = k.min_f_singularity, b = k.min_g_singularity;
        const double bp = k.cert.basepoint_modulus;
        const double rho = k.contour_radius, delta = k.path_clearance;
        const double M = k.path_max_modulus, eps = k.cutoff_width;

        // admissible contour radius window
        REQUIRE(bp / b < rho);
        REQUIRE(rho < a);

        // clearance and magnitude window along the path, sampled densely
        const auto omega = product_set(fx->A, fx->B);
        const auto forbidden = omega.enumerate(2.0 * M);
        for (int i = 0; i <= 512; ++i) {
            const cplx g = fx->path.eval(i / 512.0);
            REQUIRE(std::abs(g) >= delta);
            REQUIRE(std::abs(g) <= M);
            for (cplx w : forbidden) REQUIRE(std::abs(g - w) >= delta);
        }

        // cutoff width window
        REQUIRE(eps < 0.5 * a);
        REQUIRE(a * delta / eps > M + (2.0 * M / a) * eps);
    }
    REQUIRE(done == 100);
}

TEST_CASE("cutoff width formula lands strictly inside its window") {
    // eps = min(a/4, a*delta/(2M)) gives eps <= a/4 < a/2, and
    // a*delta/eps >= 2M > M + (2M/a)*eps because (2M/a)*eps <= M/2 < M.
    for (auto [a, delta, M] : {std::tuple{1.0, 0.3, 0.7}, std::tuple{2.0, 0.01, 9.0},
                               std::tuple{0.5, 0.2, 0.21}}) {
        const double eps = std::min(0.25 * a, a * delta / (2.0 * M));
        REQUIRE(eps < 0.5 * a);
        REQUIRE(a * delta / eps > M + (2.0 * M / a) * eps);
    }
}
