#include <catch2/catch_amalgamated.hpp>

#include "hadcont/path.hpp"
#include "oracles.hpp"

using namespace hadcont;

namespace {

double dist_to_polyline(cplx p, const std::vector<cplx>& pts) {
    double best = 1e300;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i)
        best = std::min(best, dist_point_segment(p, pts[i], pts[i + 1]));
    return best;
}

}  // namespace

TEST_CASE("two points give a straight segment with constant derivative") {
    auto p = smooth_waypoints({cplx(0.1, 0.0), cplx(0.5, 0.3)});
    REQUIRE(std::abs(p.basepoint() - cplx(0.1, 0.0)) < 1e-15);
    REQUIRE(std::abs(p.endpoint() - cplx(0.5, 0.3)) < 1e-15);
    const cplx d0 = p.eval_derivative(0.3);
    const cplx d1 = p.eval_derivative(0.8);
    REQUIRE(std::abs(d0 - d1) < 1e-13);
    REQUIRE(std::abs(std::abs(d0) - p.length()) < 1e-12);
}

TEST_CASE("collinear triple stays straight") {
    auto p = smooth_waypoints({cplx(0.0), cplx(0.5), cplx(1.0)});
    for (double t : {0.1, 0.35, 0.5, 0.77})
        REQUIRE(std::abs(p.eval(t).imag()) < 1e-15);
}

TEST_CASE("duplicate consecutive waypoints are rejected") {
    REQUIRE_THROWS_AS(smooth_waypoints({cplx(0.0), cplx(0.0), cplx(1.0)}), validation_error);
}

TEST_CASE("rounded square: deviation bounded by the cutback, corners C1") {
    const std::vector<cplx> square{cplx(0.3, 0.0), cplx(1.7, 0.0), cplx(1.7, 1.4),
                                   cplx(0.3, 1.4), cplx(0.3, 0.0)};
    // open polyline through 5 waypoints: interior corners rounded
    const double rounding = 0.1;
    auto p = smooth_waypoints(square, rounding);
    REQUIRE(std::abs(p.basepoint() - square.front()) < 1e-15);
    REQUIRE(std::abs(p.endpoint() - square.back()) < 1e-15);

    for (int k = 0; k <= 2000; ++k) {
        const double t = k / 2000.0;
        REQUIRE(dist_to_polyline(p.eval(t), square) <= rounding + 1e-12);
    }

    // |gamma'| is constant and gamma' is continuous across joints
    const double L = p.length();
    const double h = 1e-6;
    for (int k = 1; k < 400; ++k) {
        const double t = k / 400.0;
        REQUIRE(std::abs(std::abs(p.eval_derivative(t)) - L) < 1e-9 * L);
        REQUIRE(std::abs(p.eval_derivative(t + h) - p.eval_derivative(t - h)) < 200.0 * h * L * L);
    }
}

TEST_CASE("derivative difference quotients are bounded (Lipschitz check)") {
    auto p = smooth_waypoints({cplx(0.3, 0.0), cplx(1.5, 0.2), cplx(1.2, 1.1), cplx(0.2, 0.6),
                               cplx(0.3, 0.0)},
                              0.08);
    double min_arc_radius = 1e300;
    for (const auto& s : p.segments())
        if (s.is_arc) min_arc_radius = std::min(min_arc_radius, s.radius);
    const double lip_bound = p.length() * p.length() / min_arc_radius;

    const double h = 1e-5;
    double worst = 0.0;
    for (int k = 0; k < 5000; ++k) {
        const double t = k / 5000.0;
        worst = std::max(worst,
                         std::abs(p.eval_derivative(std::min(t + h, 1.0)) - p.eval_derivative(t)) / h);
    }
    REQUIRE(worst <= 1.05 * lip_bound);
}

TEST_CASE("reversals are rejected") {
    REQUIRE_THROWS_AS(smooth_waypoints({cplx(0.0), cplx(1.0), cplx(0.0)}), validation_error);
}

TEST_CASE("circle path") {
    auto p = Path::circle(cplx(1.0), cplx(0.3), 1);
    REQUIRE(std::abs(p.basepoint() - cplx(0.3)) < 1e-15);
    REQUIRE(std::abs(p.endpoint() - cplx(0.3)) < 1e-12);
    for (double t : {0.0, 0.2, 0.5, 0.9})
        REQUIRE(std::abs(std::abs(p.eval(t) - cplx(1.0)) - 0.7) < 1e-13);

    // winding: counterclockwise start heads upward from a point left of center
    REQUIRE(p.eval_derivative(0.0).imag() < 0.0);  // at 0.3, left of 1: ccw tangent points down
}

TEST_CASE("octagon loop waypoints close up and smooth") {
    auto pts = loop_waypoints(cplx(1.0), cplx(0.3), 1);
    REQUIRE(pts.size() == 9);
    REQUIRE(std::abs(pts.front() - cplx(0.3)) < 1e-12);
    REQUIRE(pts.back() == cplx(0.3));
    auto p = smooth_waypoints(pts);
    REQUIRE(std::abs(p.basepoint() - cplx(0.3)) < 1e-12);
    // loop encircles 1: sample winding number via argument sum
    double total = 0.0;
    cplx prev = p.eval(0.0) - cplx(1.0);
    for (int k = 1; k <= 1000; ++k) {
        const cplx cur = p.eval(k / 1000.0) - cplx(1.0);
        total += std::arg(cur / prev);
        prev = cur;
    }
    REQUIRE(total == Catch::Approx(two_pi).margin(1e-6));
}
