#include <catch2/catch_amalgamated.hpp>

#include "hadcont/branch_tracker.hpp"
#include "hadcont/germ.hpp"
#include "oracles.hpp"

using namespace hadcont;

namespace {

// Regular n-gon around `center` through `start`, closing back at `start`;
// vertices are tracker step targets.
std::vector<cplx> polygon_loop(cplx center, cplx start, int sides, int turns = 1) {
    std::vector<cplx> pts;
    const double r = std::abs(start - center);
    const double th0 = std::arg(start - center);
    const double sgn = turns > 0 ? 1.0 : -1.0;
    for (int k = 1; k <= sides * std::abs(turns); ++k)
        pts.push_back(center + r * unit_dir(th0 + sgn * two_pi * k / sides));
    pts.back() = start;
    return pts;
}

Germ geometric_holonomic(cplx alpha) {
    HolonomicBackend hb;
    hb.ode = {{-alpha}, {cplx(1.0), -alpha}};
    hb.coeff = [alpha](int n) { return std::pow(alpha, n); };
    return Germ(std::move(hb), SingularSet::finite({cplx(1.0) / alpha}), 1.0 / std::abs(alpha),
                "geometric(holonomic)");
}

Germ log_taylor_only(int terms) {
    TaylorBackend tb;
    tb.coeffs.resize(static_cast<std::size_t>(terms), cplx(0.0));
    for (int n = 1; n < terms; ++n) tb.coeffs[static_cast<std::size_t>(n)] = cplx(1.0 / n);
    return Germ(std::move(tb), SingularSet::finite({cplx(1.0)}), 1.0, "log(taylor)");
}

}  // namespace

TEST_CASE("catalog heads and singular sets") {
    auto log0 = catalog_log_f0();
    auto head = log0.taylor_head(4);
    REQUIRE(head[0] == cplx(0.0));
    REQUIRE(head[1] == cplx(1.0));
    REQUIRE(head[2] == cplx(0.5));
    REQUIRE(std::abs(head[3] - cplx(1.0 / 3)) < 1e-16);
    REQUIRE(log0.singular_set().enumerate(2.0) == std::vector<cplx>{cplx(1.0)});

    auto li2 = catalog_li2();
    auto lh = li2.taylor_head(4);
    REQUIRE(lh[0] == cplx(0.0));
    REQUIRE(lh[1] == cplx(1.0));
    REQUIRE(lh[2] == cplx(0.25));
    REQUIRE(std::abs(lh[3] - cplx(1.0 / 9)) < 1e-16);
    REQUIRE(li2.singular_set().enumerate(2.0) == std::vector<cplx>{cplx(0.0), cplx(1.0)});

    auto geo2 = catalog_geometric(cplx(2.0));
    REQUIRE(geo2.taylor_head(4) == std::vector<cplx>{cplx(1.0), cplx(2.0), cplx(4.0), cplx(8.0)});
    REQUIRE(geo2.singular_set().enumerate(1.0) == std::vector<cplx>{cplx(0.5)});
    REQUIRE(geo2.radius_of_convergence() == Catch::Approx(0.5));

    auto f1 = catalog_f1();
    REQUIRE(std::abs(f1.taylor_coeff(0) - cplx(1.0)) < 1e-16);
    REQUIRE(std::abs(f1.taylor_coeff(3) - cplx(0.25)) < 1e-16);

    auto pw = catalog_power(cplx(0.5));
    REQUIRE(std::abs(pw.taylor_coeff(0) - cplx(1.0)) < 1e-16);
    REQUIRE(std::abs(pw.taylor_coeff(1) - cplx(-0.5)) < 1e-16);
    REQUIRE(std::abs(pw.taylor_coeff(2) - cplx(-0.125)) < 1e-16);
}

TEST_CASE("catalog parameter validation") {
    REQUIRE_THROWS_AS(catalog_geometric(cplx(0.0)), validation_error);
    REQUIRE_THROWS_AS(catalog_rational({cplx(1.0)}, {cplx(0.0), cplx(1.0)}), validation_error);
}

TEST_CASE("rational backend poles define the singular set") {
    // (1)/(1 - 3z + 2z^2) = 1/((1-z)(1-2z)): poles at 1 and 1/2
    auto g = catalog_rational({cplx(1.0)}, {cplx(1.0), cplx(-3.0), cplx(2.0)});
    auto poles = g.singular_set().enumerate(3.0);
    REQUIRE(poles.size() == 2);
    REQUIRE(std::abs(poles[0] - cplx(0.5)) < 1e-12);
    REQUIRE(std::abs(poles[1] - cplx(1.0)) < 1e-12);
    REQUIRE(g.radius_of_convergence() == Catch::Approx(0.5).margin(1e-12));

    // removable factor: (1-z)/((1-z)(1-2z)) has a pole only at 1/2
    auto r = catalog_rational({cplx(1.0), cplx(-1.0)}, {cplx(1.0), cplx(-3.0), cplx(2.0)});
    auto rp = r.singular_set().enumerate(3.0);
    REQUIRE(rp.size() == 1);
    REQUIRE(std::abs(rp[0] - cplx(0.5)) < 1e-12);
}

TEST_CASE("tracker initialization values") {
    auto t_log = tracker_init(catalog_log_f0(), cplx(0.5));
    REQUIRE(std::abs(t_log.value() - cplx(0.6931471805599453)) < 1e-12);

    auto t_geo = tracker_init(catalog_geometric(cplx(1.0)), cplx(0.0));
    REQUIRE(t_geo.value() == cplx(1.0));

    auto t_li2 = tracker_init(catalog_li2(), cplx(0.5));
    REQUIRE(std::abs(t_li2.value() - cplx(0.5822405264650125)) < 1e-12);
    REQUIRE(std::abs(t_li2.value() - oracles::dilog_series(cplx(0.5))) < 1e-13);

    REQUIRE_THROWS_AS(tracker_init(catalog_log_f0(), cplx(1.5)), validation_error);
}

TEST_CASE("log germ picks up -2·pi·i around its branch point") {
    auto trk = tracker_init(catalog_log_f0(), cplx(0.5), 1e-11);
    for (cplx p : polygon_loop(cplx(1.0), cplx(0.5), 16)) trk.step(p);
    REQUIRE(std::abs(trk.point() - cplx(0.5)) < 1e-15);

    const cplx expect = cplx(0.6931471805599453) - cplx(0.0, two_pi);
    REQUIRE(std::abs(trk.value() - expect) < 1e-9);

    // independent route: integrate gamma'/(1-gamma) along the rounded loop
    std::vector<cplx> wp{cplx(0.5)};
    for (cplx p : polygon_loop(cplx(1.0), cplx(0.5), 16)) wp.push_back(p);
    const cplx oracle = oracles::neg_log1m_along(smooth_waypoints(wp));
    REQUIRE(std::abs(trk.value() - oracle) < 1e-9);
}

TEST_CASE("rational germs are single-valued around any loop") {
    auto trk = tracker_init(catalog_geometric(cplx(1.0)), cplx(0.3));
    const cplx before = trk.value();
    for (cplx p : polygon_loop(cplx(1.0), cplx(0.3), 12)) trk.step(p);
    REQUIRE(std::abs(trk.value() - before) < 1e-14);
    REQUIRE(std::abs(before - cplx(10.0 / 7.0)) < 1e-14);
}

TEST_CASE("dilogarithm branch after a loop around 1 matches the ODE oracle") {
    auto trk = tracker_init(catalog_li2(), cplx(0.5), 1e-11);
    std::vector<cplx> wp{cplx(0.5)};
    for (cplx p : polygon_loop(cplx(1.0), cplx(0.5), 16)) {
        trk.step(p);
        wp.push_back(p);
    }
    const cplx principal = oracles::dilog_series(cplx(0.5));
    REQUIRE(std::abs(trk.value() - principal) > 1.0);  // detectable branch jump

    const cplx oracle = oracles::dilog_along(smooth_waypoints(wp));
    REQUIRE(std::abs(trk.value() - oracle) < 1e-8);
}

TEST_CASE("stepping into a singular point is refused") {
    auto trk = tracker_init(catalog_log_f0(), cplx(0.5));
    REQUIRE_THROWS_AS(trk.step(cplx(1.5)), validation_error);  // segment crosses 1
}

TEST_CASE("reversibility: there and back within 10x step tolerance") {
    auto rng = oracles::rng(31337);
    std::uniform_real_distribution<double> u(-0.45, 0.45);
    for (int rep = 0; rep < 20; ++rep) {
        auto trk = tracker_init(catalog_li2(), cplx(0.4), 1e-10);
        const cplx v0 = trk.value();
        const cplx mid = cplx(0.4) + cplx(u(rng), u(rng));
        if (std::abs(mid - cplx(1.0)) < 0.1 || std::abs(mid) < 0.1) continue;
        trk.step(mid);
        trk.step(cplx(0.4));
        REQUIRE(std::abs(trk.value() - v0) < 1e-9);
    }
}

TEST_CASE("homotopic polylines agree") {
    const cplx from(0.4, 0.0), to(-0.6, 0.1);
    // two routes through the upper half disc, both clear of {0, 1}
    auto t1 = tracker_init(catalog_li2(), from, 1e-11);
    t1.step(cplx(0.3, 0.5));
    t1.step(cplx(-0.3, 0.5));
    t1.step(to);
    auto t2 = tracker_init(catalog_li2(), from, 1e-11);
    t2.step(cplx(0.45, 0.3));
    t2.step(cplx(0.0, 0.62));
    t2.step(cplx(-0.55, 0.35));
    t2.step(to);
    REQUIRE(std::abs(t1.value() - t2.value()) < 1e-9);
}

TEST_CASE("backend agreement: rational vs holonomic continuation") {
    const cplx alpha(0.8, 0.3);
    auto tr = tracker_init(catalog_geometric(alpha), cplx(0.2), 1e-12);
    auto th = tracker_init(geometric_holonomic(alpha), cplx(0.2), 1e-12);
    REQUIRE(std::abs(tr.value() - th.value()) < 1e-12);
    for (cplx p : {cplx(0.3, 0.4), cplx(-0.2, 0.5), cplx(-0.4, -0.3), cplx(0.2, -0.2)}) {
        tr.step(p);
        th.step(p);
        REQUIRE(std::abs(tr.value() - th.value()) <= 1e-10 * std::abs(tr.value()));
    }
}

TEST_CASE("taylor-only backend: accurate inside its disc, refuses to leave it") {
    auto tt = tracker_init(log_taylor_only(160), cplx(0.4), 1e-10);
    auto th = tracker_init(catalog_log_f0(), cplx(0.4), 1e-10);
    for (cplx p : {cplx(0.5, 0.3), cplx(-0.1, 0.6), cplx(-0.55, 0.1), cplx(-0.3, -0.4)}) {
        tt.step(p);
        th.step(p);
        REQUIRE(std::abs(tt.value() - th.value()) < 1e-10);
    }
    // a loop around the branch point necessarily leaves the disc of
    // convergence, where truncated data stops determining the germ
    REQUIRE_THROWS_AS(tt.step(cplx(1.0, 0.8)), validation_error);
}

TEST_CASE("taylor consistency near the origin") {
    for (const Germ& g : {catalog_log_f0(), catalog_li2(), catalog_geometric(cplx(1.0))}) {
        for (cplx xi : {cplx(0.31, 0.2), cplx(-0.25, 0.31), cplx(0.05, -0.4)}) {
            // |xi| < 0.5 * radius
            auto trk = tracker_init(g, cplx(0.05), 1e-12);
            trk.step(xi);
            cplx direct(0.0), p(1.0);
            for (int n = 0; n < 200; ++n) {
                direct += g.taylor_coeff(n) * p;
                p *= xi;
            }
            REQUIRE(std::abs(trk.value() - direct) < 1e-12);
        }
    }
}

TEST_CASE("local coefficients reproduce the germ nearby") {
    auto trk = tracker_init(catalog_li2(), cplx(0.4, 0.1), 1e-12);
    auto jet = trk.jet(40);
    for (cplx dz : {cplx(0.05, 0.02), cplx(-0.06, 0.01), cplx(0.0, -0.07)}) {
        const cplx z = cplx(0.4, 0.1) + dz;
        REQUIRE(std::abs(jet.eval(z) - oracles::dilog_series(z)) < 1e-11);
    }

    // entire germ: series value matches std::exp
    auto te = tracker_init(catalog_exponential(), cplx(1.0, 2.0), 1e-12);
    REQUIRE(std::abs(te.value() - std::exp(cplx(1.0, 2.0))) < 1e-12);
}
