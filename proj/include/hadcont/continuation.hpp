#pragma once

#include <algorithm>
#include <cstdlib>
#include <future>
#include <optional>
#include <sstream>
#include <thread>
#include <vector>

#include "hadcont/constants.hpp"
#include "hadcont/contour.hpp"
#include "hadcont/deformation.hpp"
#include "hadcont/germ.hpp"

namespace hadcont {

struct ContinueOptions {
    int n_nodes = 256;
    double tolerance = 1e-9;     // target for the reported quadrature error estimate
    double flow_tol = 1e-11;     // per-unit-time flow integration tolerance
    double tracker_tol = 1e-11;  // branch-tracker step tolerance
    FieldVariant field_variant = FieldVariant::cutoff;
    std::vector<double> snapshot_times;
    int max_nodes = 8192;
    int local_taylor_terms = 12;
    unsigned threads = 0;  // 0: HADCONT_THREADS env var, else hardware concurrency
};

struct ContourSnapshot {
    double t = 0.0;
    std::vector<cplx> nodes;
};

struct Diagnostics {
    double quadrature_error_estimate = 0.0;
    double min_pin_distance = std::numeric_limits<double>::infinity();
    double min_obstacle_distance = std::numeric_limits<double>::infinity();
    int node_count = 0;
    int time_steps = 0;
    int refinements = 0;
    int collisions = 0;
    int nonsimple_snapshots = 0;
};

struct ContinuationResult {
    cplx endpoint;
    cplx value;
    std::vector<cplx> local_taylor;
    std::vector<ContourSnapshot> snapshots;
    Diagnostics diagnostics;
};

namespace detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("HADCONT_THREADS")) {
        const int v = std::atoi(env);
        if (v > 0) return static_cast<unsigned>(v);
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? hc : 1;
}

/// Disjoint index-range dispatch; results must be written to per-index slots
/// so the outcome is independent of the schedule.
template <class F>
void parallel_over(std::size_t n, unsigned threads, F&& body) {
    if (threads <= 1 || n < 16) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    const std::size_t chunk = (n + threads - 1) / threads;
    std::vector<std::future<void>> futs;
    for (std::size_t lo = 0; lo < n; lo += chunk) {
        const std::size_t hi = std::min(n, lo + chunk);
        futs.push_back(std::async(std::launch::async, [lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        }));
    }
    for (auto& f : futs) f.get();
}

// Gauss-Legendre rules mapped to [0, 1].
struct GaussRule {
    const double* x;
    const double* w;
    int n;
};

inline GaussRule gauss8() {
    static const double xs[8] = {
        0.5 - 0.4801449282487681 , 0.5 - 0.3983332387068134, 0.5 - 0.2627662049581645,
        0.5 - 0.0917173212478249, 0.5 + 0.0917173212478249, 0.5 + 0.2627662049581645,
        0.5 + 0.3983332387068134, 0.5 + 0.4801449282487681};
    static const double ws[8] = {0.0506142681451881, 0.1111905172266872, 0.1568533229389436,
                                 0.1813418916891810, 0.1813418916891810, 0.1568533229389436,
                                 0.1111905172266872, 0.0506142681451881};
    return {xs, ws, 8};
}

}  // namespace detail

// =============================================================================
// Principal-domain evaluation of the multiplicative contour integral
//   (1/2*pi*i) * integral over the circle |zeta| = rho of
//        f(zeta) g(xi/zeta) dzeta/zeta,
// which reduces to the plain average of f(zeta_j) g(xi/zeta_j) over
// equispaced circle nodes; the periodic trapezoid rule converges
// geometrically for this integrand.
// =============================================================================
inline cplx hadamard_principal_fixed(const Germ& f, const Germ& g, cplx xi, double rho, int n) {
    if (!(rho > 0.0 && rho < f.radius_of_convergence()))
        throw validation_error("hadamard_principal: contour radius outside (0, R_f)");
    if (!(std::abs(xi) < rho * g.radius_of_convergence()))
        throw validation_error("hadamard_principal: evaluation point outside the principal domain");
    if (n < 1) throw validation_error("hadamard_principal: need at least one node");
    cplx sum(0.0);
    for (int j = 0; j < n; ++j) {
        const cplx zeta = rho * unit_dir(two_pi * j / n);
        sum += f.eval_principal(zeta) * g.eval_principal(xi / zeta);
    }
    return sum / double(n);
}

/// Node-doubling driver around the fixed-resolution rule; converged when one
/// doubling moves the value by at most `tol` (relative to the value scale).
inline cplx hadamard_principal(const Germ& f, const Germ& g, cplx xi, double rho,
                               int n_nodes = 256, double tol = 1e-12) {
    int n = std::max(n_nodes, 16);
    cplx prev = hadamard_principal_fixed(f, g, xi, rho, n);
    for (; n <= (1 << 20); n *= 2) {
        const cplx next = hadamard_principal_fixed(f, g, xi, rho, 2 * n);
        if (std::abs(next - prev) <= tol * std::max(1.0, std::abs(next))) return next;
        prev = next;
    }
    throw numeric_error("hadamard_principal: no convergence under node doubling");
}

/// Advances every contour node from t0 to t1 under the flow and refreshes the
/// per-node clearance diagnostics.  Trackers are not touched (callers step
/// them along the recorded chords).  Throws on node collision below the hard
/// floor; near-collisions only bump the returned counter.
inline int flow_contour(const FlowMap& fm, Contour& contour, double t0, double t1,
                        unsigned threads = 1) {
    const DeformationField* field = fm.field();
    detail::parallel_over(contour.nodes.size(), threads, [&](std::size_t i) {
        auto& node = contour.nodes[i];
        node.pos = fm.flow(t0, t1, node.pos);
        if (!field) return;
        double dobs = std::abs(node.pos);  // 0 is always an obstacle
        for (cplx a : field->fixed_obstacles()) dobs = std::min(dobs, std::abs(node.pos - a));
        node.min_obstacle_dist = std::min(node.min_obstacle_dist, dobs);
        const cplx gamma_t1 = field->path().eval(t1);
        for (cplx b : field->moving_factors())
            node.min_pin_dist = std::min(node.min_pin_dist, std::abs(node.pos - gamma_t1 / b));
    });

    // Adjacent nodes drifting together marks strong local compression of the
    // parametrization (the flow squeezes arcs feeding a tether); flag it so
    // callers can refine or report, but it is not by itself fatal.
    int collisions = 0;
    const double diam = contour.diameter();
    const std::size_t n = contour.nodes.size();
    for (std::size_t j = 0; j < n; ++j) {
        const double gap = std::abs(contour.nodes[j].pos - contour.nodes[(j + 1) % n].pos);
        if (gap < 1e-6 * diam) ++collisions;
    }
    return collisions;
}

namespace detail {

// =============================================================================
// The full continuation pipeline: constants, seeded circle contour, the
// time march (flow + both trackers per node, adaptive time grid, midpoint
// refinement by deterministic replay), and the final deformed-contour
// quadrature with local Taylor extraction.
// =============================================================================
class ContinuationEngine {
public:
    ContinuationEngine(Germ f, Germ g, Path path, ContinueOptions opts)
        : f_(std::move(f)),
          g_(std::move(g)),
          path_(std::move(path)),
          opts_(std::move(opts)),
          threads_(resolve_threads(opts_.threads)),
          k_(select_constants(path_, f_.singular_set(), g_.singular_set())),
          field_(opts_.field_variant == FieldVariant::cutoff
                     ? DeformationField::make_cutoff(path_, k_, f_.singular_set(),
                                                     g_.singular_set())
                     : DeformationField::make_finite_b(path_, k_, f_.singular_set(),
                                                       g_.singular_set())),
          flow_(make_flow()) {
        if (opts_.n_nodes < 64) throw validation_error("continue: need at least 64 nodes");
        if (!(opts_.tolerance > 0.0)) throw validation_error("continue: tolerance must be positive");

        std::vector<cplx> zero_and_fixed{cplx(0.0)};
        for (cplx a : field_.fixed_obstacles()) zero_and_fixed.push_back(a);
        fixed0_ = ObstacleSet(std::move(zero_and_fixed));

        pin_factors_ = field_.moving_factors();
        std::vector<cplx> zero_and_b{cplx(0.0)};
        for (cplx b : pin_factors_) zero_and_b.push_back(b);
        g_obstacles_ = ObstacleSet(std::move(zero_and_b));

        omega_near_ = product_set(f_.singular_set(), g_.singular_set())
                          .enumerate(2.0 * k_.path_max_modulus + std::abs(path_.endpoint()) + 1.0);
    }

    ContinuationResult run() {
        seed_contour();
        march();
        for (int round = 0;; ++round) {
            auto result = quadrature();
            if (result.diagnostics.quadrature_error_estimate <= opts_.tolerance || round >= 2)
                {
                    if (result.diagnostics.quadrature_error_estimate > opts_.tolerance)
                        throw numeric_error(
                            "continue: quadrature error estimate " +
                            std::to_string(result.diagnostics.quadrature_error_estimate) +
                            " above tolerance after node doubling");
                    return result;
                }
            double_nodes();
            refine(1.0);
        }
    }

    const ContinuationConstants& constants() const { return k_; }

private:
    FlowMap make_flow() const {
        IntegratorSettings s;
        s.abs_tol = opts_.flow_tol;
        s.rel_tol = opts_.flow_tol;
        return FlowMap(field_, s);
    }

    ContourNode make_node(double s) const {
        const cplx pos = k_.contour_radius * unit_dir(two_pi * s);
        return ContourNode{s, pos, BranchTracker(f_, pos, opts_.tracker_tol),
                           BranchTracker(g_, path_.basepoint() / pos, opts_.tracker_tol),
                           std::numeric_limits<double>::infinity(),
                           std::numeric_limits<double>::infinity()};
    }

    void seed_contour() {
        contour_.origin_radius = k_.contour_radius;
        contour_.nodes.clear();
        contour_.nodes.reserve(static_cast<std::size_t>(opts_.n_nodes));
        std::vector<std::optional<ContourNode>> slots(static_cast<std::size_t>(opts_.n_nodes));
        parallel_over(slots.size(), threads_, [&](std::size_t j) {
            slots[j] = make_node(double(j) / opts_.n_nodes);
        });
        for (auto& slot : slots) contour_.nodes.push_back(std::move(*slot));
    }

    double f_clearance(const ContourNode& n) const { return fixed0_.dist(n.pos); }
    double g_clearance(const ContourNode& n) const { return g_obstacles_.dist(n.g_trk.point()); }

    // Largest admissible time step at time t: every node's position may move
    // at most min(cutoff width, clearance)/8, and the g-side argument
    // gamma(t)/position at most an eighth of its own clearance.
    double choose_dt(double t, const ContourNode& node) const {
        const double cap = std::min(k_.cutoff_width, k_.path_clearance) / 8.0;
        const cplx x = field_(t, node.pos);
        const cplx gamma = path_.eval(t);
        const cplx dgamma = path_.eval_derivative(t);
        const double vx = std::abs(x);
        const double vw = std::abs(dgamma * node.pos - gamma * x) / std::norm(node.pos);
        double dt = 0.05;
        const double lim_f = std::min(cap, f_clearance(node) / 8.0);
        const double lim_g = g_clearance(node) / 8.0;
        if (vx > 1e-300) dt = std::min(dt, lim_f / vx);
        if (vw > 1e-300) dt = std::min(dt, lim_g / vw);
        return std::max(dt, 1e-7);
    }

    // One marching step of a single node over [t, t_next].
    void advance_node(ContourNode& node, double t, double t_next) const {
        const cplx new_pos = flow_.flow(t, t_next, node.pos);
        node.f_trk.step(new_pos);
        node.g_trk.step(path_.eval(t_next) / new_pos);
        node.pos = new_pos;

        double dobs = std::abs(new_pos);
        dobs = std::min(dobs, fixed0_.dist(new_pos));
        node.min_obstacle_dist = std::min(node.min_obstacle_dist, dobs);
        const cplx gamma = path_.eval(t_next);
        for (cplx b : pin_factors_)
            node.min_pin_dist = std::min(node.min_pin_dist, std::abs(new_pos - gamma / b));
    }

    // Deterministic reconstruction of the node seeded at parameter s: replay
    // its own flow and both trackers from t = 0, independent of neighbors.
    ContourNode replay_node(double s, double t_target) const {
        ContourNode node = make_node(s);
        double t = 0.0;
        for (long guard = 0; t < t_target; ++guard) {
            if (guard > 2'000'000) throw numeric_error("replay: step budget exhausted");
            const double t_next = std::min(t + choose_dt(t, node), t_target);
            advance_node(node, t, t_next);
            t = t_next;
        }
        return node;
    }

    // Insert replayed midpoint nodes wherever an adjacent gap outgrows the
    // 0.4 * clearance rule on either the f side or the g side.  Only the
    // final contour needs this resolution (jet-based quadrature and the
    // polygon-curve homotopy live at t = 1); transient mid-run crowding near
    // a pin must not be chased, as dips there are exponentially deeper than
    // the final standoff the homeomorphism guarantees.
    void refine(double t) {
        for (int pass = 0; pass < 48; ++pass) {
            std::vector<double> new_s;
            const std::size_t n = contour_.nodes.size();
            for (std::size_t j = 0; j < n; ++j) {
                const auto& a = contour_.nodes[j];
                const auto& b = contour_.nodes[(j + 1) % n];
                const double gap = std::abs(a.pos - b.pos);
                const double wgap = std::abs(a.g_trk.point() - b.g_trk.point());
                const double lim = 0.4 * std::min(f_clearance(a), f_clearance(b));
                const double wlim = 0.4 * std::min(g_clearance(a), g_clearance(b));
                if (gap > lim || wgap > wlim) {
                    double mid = j + 1 < n ? 0.5 * (a.s + b.s) : 0.5 * (a.s + b.s + 1.0);
                    if (mid >= 1.0) mid -= 1.0;
                    new_s.push_back(mid);
                }
            }
            if (new_s.empty()) return;
            if (static_cast<int>(contour_.nodes.size() + new_s.size()) > opts_.max_nodes)
                throw numeric_error("continue: node budget exhausted during refinement");
            std::vector<ContourNode> inserted(new_s.size(),
                                              ContourNode{0, cplx(0), contour_.nodes[0].f_trk,
                                                          contour_.nodes[0].g_trk, 0, 0});
            parallel_over(new_s.size(), threads_,
                          [&](std::size_t i) { inserted[i] = replay_node(new_s[i], t); });
            for (auto& node : inserted) contour_.nodes.push_back(std::move(node));
            std::sort(contour_.nodes.begin(), contour_.nodes.end(),
                      [](const ContourNode& x, const ContourNode& y) { return x.s < y.s; });
            diag_.refinements += static_cast<int>(new_s.size());
        }
        throw numeric_error("continue: refinement did not stabilize");
    }

    // Mid-run snapshots may show polygon self-crossings purely from coarse
    // sampling of a transiently pinched neck; only the final polygon (post
    // refinement) must be simple.
    void record_snapshot(double t) {
        ContourSnapshot snap;
        snap.t = t;
        snap.nodes.reserve(contour_.nodes.size());
        for (const auto& n : contour_.nodes) snap.nodes.push_back(n.pos);
        snaps_.push_back(std::move(snap));
        if (!contour_.is_simple_polygon()) ++diag_.nonsimple_snapshots;
    }

    void march() {
        std::vector<double> pending = opts_.snapshot_times;
        std::erase_if(pending, [](double t) { return t < 0.0 || t > 1.0; });
        std::sort(pending.begin(), pending.end());
        pending.erase(std::unique(pending.begin(), pending.end()), pending.end());
        std::size_t next_snap = 0;
        while (next_snap < pending.size() && pending[next_snap] <= 0.0) {
            record_snapshot(0.0);
            ++next_snap;
        }

        double t = 0.0;
        for (long guard = 0; t < 1.0; ++guard) {
            if (guard > 2'000'000) throw numeric_error("continue: time-step budget exhausted");
            double dt = 0.05;
            for (const auto& node : contour_.nodes) dt = std::min(dt, choose_dt(t, node));
            double t_next = std::min(t + dt, 1.0);
            if (next_snap < pending.size()) t_next = std::min(t_next, pending[next_snap]);

            parallel_over(contour_.nodes.size(), threads_,
                          [&](std::size_t i) { advance_node(contour_.nodes[i], t, t_next); });
            t = t_next;
            ++diag_.time_steps;

            const double diam = contour_.diameter();
            const std::size_t n = contour_.nodes.size();
            for (std::size_t j = 0; j < n; ++j) {
                const double gap = std::abs(contour_.nodes[j].pos - contour_.nodes[(j + 1) % n].pos);
                if (gap < 1e-6 * diam) ++diag_.collisions;
            }

            if (next_snap < pending.size() && t >= pending[next_snap]) {
                record_snapshot(t);
                ++next_snap;
            }
        }
        refine(1.0);
        if (!contour_.is_simple_polygon())
            throw numeric_error("continue: final contour polygon self-intersects");
    }

    // Doubles the resolution globally (used when the quadrature estimate
    // misses the requested tolerance).
    void double_nodes() {
        std::vector<double> mids;
        const std::size_t n = contour_.nodes.size();
        for (std::size_t j = 0; j < n; ++j) {
            const double a = contour_.nodes[j].s;
            const double b = j + 1 < n ? contour_.nodes[j + 1].s : contour_.nodes[0].s + 1.0;
            double mid = 0.5 * (a + b);
            if (mid >= 1.0) mid -= 1.0;
            mids.push_back(mid);
        }
        if (static_cast<int>(n + mids.size()) > opts_.max_nodes)
            throw numeric_error("continue: node budget exhausted while tightening quadrature");
        std::vector<ContourNode> inserted(mids.size(), contour_.nodes[0]);
        parallel_over(mids.size(), threads_,
                      [&](std::size_t i) { inserted[i] = replay_node(mids[i], 1.0); });
        for (auto& node : inserted) contour_.nodes.push_back(std::move(node));
        std::sort(contour_.nodes.begin(), contour_.nodes.end(),
                  [](const ContourNode& x, const ContourNode& y) { return x.s < y.s; });
        diag_.refinements += static_cast<int>(mids.size());
    }

    // Contour integral at xi over the final polygon: per-chord Gauss rules
    // with the integrand supplied by the per-node jets.  The polygon is
    // homotopic to the flowed contour in the obstruction-free region (gap
    // triggers keep chords well clear), so the integral matches the curve's.
    // Contour integral over the polygon chord [za, zb] (jets of the two
    // adjacent nodes), optionally split at the chord midpoint for a sharper
    // rule.  All evaluation points stay within half a gap of a node, which
    // the refinement rule keeps well inside both jets' reliable discs.
    cplx integral_at(cplx xi, const std::vector<LocalJet>& fj, const std::vector<LocalJet>& gj,
                     bool split, double* tail_out = nullptr) const {
        const GaussRule rule = gauss8();
        const std::size_t n = contour_.nodes.size();
        cplx total(0.0);
        double tail = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const std::size_t jn = (j + 1) % n;
            const cplx za = contour_.nodes[j].pos;
            const cplx zb = contour_.nodes[jn].pos;
            const cplx dz = zb - za;
            cplx chord(0.0);
            double chord_tail = 0.0;
            const int pieces = split ? 2 : 1;
            for (int piece = 0; piece < pieces; ++piece) {
                for (int q = 0; q < rule.n; ++q) {
                    const double u = (piece + rule.x[q]) / pieces;
                    const cplx z = za + u * dz;
                    const LocalJet& F = u < 0.5 ? fj[j] : fj[jn];
                    const LocalJet& G = u < 0.5 ? gj[j] : gj[jn];
                    const cplx fv = F.eval(z);
                    const cplx gv = G.eval(xi / z);
                    chord += rule.w[q] / pieces * fv * gv / z;
                    if (tail_out)
                        chord_tail += rule.w[q] / pieces *
                                      (F.tail_estimate(z) * std::abs(gv) +
                                       std::abs(fv) * G.tail_estimate(xi / z)) /
                                      std::abs(z);
                }
            }
            total += chord * dz;
            tail += chord_tail * std::abs(dz);
        }
        if (tail_out) *tail_out = tail / two_pi;
        return total / cplx(0.0, two_pi);
    }

    ContinuationResult quadrature() {
        const std::size_t n = contour_.nodes.size();
        std::vector<LocalJet> fj(n), gj(n);
        parallel_over(n, threads_, [&](std::size_t i) {
            fj[i] = contour_.nodes[i].f_trk.jet(40);
            gj[i] = contour_.nodes[i].g_trk.jet(40);
        });

        const cplx xi_end = path_.endpoint();
        double tail = 0.0;
        const cplx value = integral_at(xi_end, fj, gj, /*split=*/true, &tail);
        const cplx value_unsplit = integral_at(xi_end, fj, gj, /*split=*/false);
        const double est =
            std::abs(value - value_unsplit) + tail + 1e-15 * std::max(1.0, std::abs(value));

        // local Taylor data from a ring of evaluation points around the endpoint
        double d_end = std::abs(xi_end);
        for (cplx w : omega_near_) d_end = std::min(d_end, std::abs(xi_end - w));
        double r_loc = 0.1 * d_end;
        for (std::size_t i = 0; i < n; ++i) {
            const double allowed = 0.2 * g_clearance(contour_.nodes[i]) * std::abs(contour_.nodes[i].pos);
            r_loc = std::min(r_loc, allowed);
        }
        if (!(r_loc > 1e-8 * std::max(d_end, 1e-300)))
            throw numeric_error("continue: no room for local Taylor extraction at the endpoint");
        const int ring = 32;
        std::vector<cplx> ring_vals(ring);
        parallel_over(static_cast<std::size_t>(ring), threads_, [&](std::size_t m) {
            ring_vals[m] = integral_at(xi_end + r_loc * unit_dir(two_pi * double(m) / ring), fj,
                                       gj, /*split=*/true);
        });
        const int terms = std::clamp(opts_.local_taylor_terms, 1, ring / 2);
        std::vector<cplx> taylor(static_cast<std::size_t>(terms));
        for (int k = 0; k < terms; ++k) {
            cplx acc(0.0);
            for (int m = 0; m < ring; ++m)
                acc += ring_vals[static_cast<std::size_t>(m)] *
                       unit_dir(-two_pi * double(k) * double(m) / ring);
            taylor[static_cast<std::size_t>(k)] = acc / double(ring) / std::pow(r_loc, k);
        }

        ContinuationResult out;
        out.endpoint = xi_end;
        out.value = value;
        out.local_taylor = std::move(taylor);
        out.snapshots = snaps_;
        out.diagnostics = diag_;
        out.diagnostics.quadrature_error_estimate = est;
        out.diagnostics.node_count = static_cast<int>(n);
        for (const auto& node : contour_.nodes) {
            out.diagnostics.min_obstacle_distance =
                std::min(out.diagnostics.min_obstacle_distance, node.min_obstacle_dist);
            out.diagnostics.min_pin_distance =
                std::min(out.diagnostics.min_pin_distance, node.min_pin_dist);
        }
        return out;
    }

    Germ f_, g_;
    Path path_;
    ContinueOptions opts_;
    unsigned threads_;
    ContinuationConstants k_;
    DeformationField field_;
    FlowMap flow_;
    ObstacleSet fixed0_;
    std::vector<cplx> pin_factors_;
    ObstacleSet g_obstacles_;
    std::vector<cplx> omega_near_;
    Contour contour_;
    Diagnostics diag_;
    std::vector<ContourSnapshot> snaps_;
};

}  // namespace detail

/// Analytic continuation of the Hadamard product of f and g along the path,
/// evaluated at the endpoint together with local Taylor data there.
inline ContinuationResult continue_hadamard(const Germ& f, const Germ& g, const Path& path,
                                            const ContinueOptions& opts = {}) {
    detail::ContinuationEngine engine(f, g, path, opts);
    return engine.run();
}

struct MonodromyResult {
    cplx base;
    cplx value_before;
    cplx value_after;
    cplx difference;
    std::vector<cplx> taylor_before;
    std::vector<cplx> taylor_after;
    std::vector<cplx> taylor_difference;
    Diagnostics diagnostics;
};

/// Branch change of the continued product around `omega`: continues along
/// (optional approach waypoints) + `turns` windings of an octagonal loop, and
/// reports the difference against the branch before the loop.  With no
/// approach path the reference is the principal branch at `basepoint`.
inline MonodromyResult monodromy(const Germ& f, const Germ& g, cplx basepoint, cplx omega,
                                 const std::vector<cplx>& pre_waypoints, int turns,
                                 const ContinueOptions& opts = {}) {
    if (turns == 0) throw validation_error("monodromy: turns must be nonzero");
    const cplx anchor = pre_waypoints.empty() ? basepoint : pre_waypoints.back();
    const auto loop = loop_waypoints(omega, anchor, turns);

    std::vector<cplx> combined;
    if (!pre_waypoints.empty()) {
        combined = pre_waypoints;
        combined.insert(combined.end(), loop.begin() + 1, loop.end());
    } else {
        combined = loop;
    }

    MonodromyResult out;
    out.base = anchor;

    if (pre_waypoints.empty()) {
        // principal branch reference: ring of principal evaluations at the base
        const double a = min_modulus(f.singular_set());
        const double b = min_modulus(g.singular_set());
        const double rho = std::sqrt(a * std::abs(basepoint) / b);
        const auto omega_set = product_set(f.singular_set(), g.singular_set());
        double d0 = std::abs(basepoint);
        for (cplx w : omega_set.enumerate(2.0 * std::abs(basepoint) + 2.0))
            d0 = std::min(d0, std::abs(basepoint - w));
        const double r = std::min(0.1 * d0, 0.25 * (rho * b - std::abs(basepoint)));
        if (!(r > 0.0)) throw validation_error("monodromy: basepoint too close to the forbidden set");
        const int ring = 32;
        std::vector<cplx> vals(ring);
        for (int m = 0; m < ring; ++m)
            vals[static_cast<std::size_t>(m)] = hadamard_principal(
                f, g, basepoint + r * unit_dir(two_pi * double(m) / ring), rho, 128, 1e-13);
        const int terms = std::clamp(opts.local_taylor_terms, 1, ring / 2);
        out.taylor_before.resize(static_cast<std::size_t>(terms));
        for (int k = 0; k < terms; ++k) {
            cplx acc(0.0);
            for (int m = 0; m < ring; ++m)
                acc += vals[static_cast<std::size_t>(m)] * unit_dir(-two_pi * double(k) * m / ring);
            out.taylor_before[static_cast<std::size_t>(k)] = acc / double(ring) / std::pow(r, k);
        }
        out.value_before = hadamard_principal(f, g, basepoint, rho, 128, 1e-13);
    } else {
        auto before = continue_hadamard(f, g, smooth_waypoints(pre_waypoints), opts);
        out.value_before = before.value;
        out.taylor_before = before.local_taylor;
    }

    auto after = continue_hadamard(f, g, smooth_waypoints(combined), opts);
    out.value_after = after.value;
    out.taylor_after = after.local_taylor;
    out.difference = out.value_after - out.value_before;
    out.diagnostics = after.diagnostics;
    const std::size_t nt = std::min(out.taylor_before.size(), out.taylor_after.size());
    out.taylor_difference.resize(nt);
    for (std::size_t i = 0; i < nt; ++i)
        out.taylor_difference[i] = out.taylor_after[i] - out.taylor_before[i];
    return out;
}

}  // namespace hadcont
