// Randomized geometric fixtures shared by the unit tests and the acceptance
// suite: finite singular sets plus a valid loop path anchored near the origin.
#pragma once

#include <optional>
#include <random>
#include <vector>

#include "hadcont/constants.hpp"
#include "hadcont/path.hpp"
#include "hadcont/singular_set.hpp"
#include "oracles.hpp"

namespace fixtures {

using hadcont::cplx;

struct GeometryFixture {
    std::vector<cplx> A_pts, B_pts;
    hadcont::SingularSet A, B;
    hadcont::Path path;
};

/// One attempt at a random valid fixture; returns nothing when the sampled
/// geometry is too tight (caller draws again).
inline std::optional<GeometryFixture> try_geometry_fixture(std::mt19937_64& rng) {
    std::uniform_int_distribution<int> count(1, 3);
    std::uniform_real_distribution<double> frac(0.15, 0.6);
    std::uniform_real_distribution<double> ang(0.0, hadcont::two_pi);

    std::vector<cplx> A_pts, B_pts;
    for (int i = count(rng); i-- > 0;) A_pts.push_back(oracles::random_point(rng, 0.7, 3.0));
    for (int i = count(rng); i-- > 0;) B_pts.push_back(oracles::random_point(rng, 0.7, 3.0));
    auto A = hadcont::SingularSet::finite(A_pts);
    auto B = hadcont::SingularSet::finite(B_pts);

    const double a = hadcont::min_modulus(A);
    const double b = hadcont::min_modulus(B);
    const cplx bp = frac(rng) * a * b * hadcont::unit_dir(ang(rng));

    const auto omega = hadcont::product_set(A, B);
    double d0 = std::abs(bp);  // distance to 0 is always an obstruction bound
    for (cplx w : omega.enumerate(2.0 * std::abs(bp) + 4.0)) d0 = std::min(d0, std::abs(bp - w));
    if (d0 < 0.05) return std::nullopt;

    const double loop_radius = 0.35 * d0;
    const cplx center = bp + loop_radius * hadcont::unit_dir(ang(rng));
    try {
        auto path = hadcont::smooth_waypoints(hadcont::loop_waypoints(center, bp, 1));
        return GeometryFixture{std::move(A_pts), std::move(B_pts), std::move(A), std::move(B),
                               std::move(path)};
    } catch (const hadcont::validation_error&) {
        return std::nullopt;
    }
}

}  // namespace fixtures
