#pragma once

#include <cmath>
#include <sstream>
#include <vector>

#include "hadcont/germ.hpp"
#include "hadcont/ode.hpp"

namespace hadcont {

/// A polynomial jet centered somewhere in the plane.
struct LocalJet {
    cplx center;
    std::vector<cplx> coeffs;

    cplx eval(cplx z) const {
        const cplx dx = z - center;
        cplx acc(0.0);
        for (std::size_t i = coeffs.size(); i-- > 0;) acc = acc * dx + coeffs[i];
        return acc;
    }

    /// Crude magnitude of the truncated tail at z: the top two retained
    /// terms, geometrically extrapolated.  Blows up (correctly) when z sits
    /// outside the jet's reliable disc.
    double tail_estimate(cplx z) const {
        if (coeffs.size() < 2) return 0.0;
        const double r = std::abs(z - center);
        const std::size_t top = coeffs.size() - 1;
        const double t1 = std::abs(coeffs[top]) * std::pow(r, double(top));
        const double t2 = std::abs(coeffs[top - 1]) * std::pow(r, double(top - 1));
        return 4.0 * std::max(t1, t2);
    }
};

// =============================================================================
// Stateful analytic continuation of a germ along a polyline.  The tracker
// owns the branch: its value is the continuation of the germ along every
// segment visited since initialization.  Single-owner mutable state; distinct
// trackers over the same (immutable) germ may run concurrently.
//
// Per backend:
//   Rational   evaluates exactly (single-valued),
//   Holonomic  integrates the defining ODE along each segment,
//   Taylor     re-expands at centers spaced at most half the obstruction
//              distance apart.
// Every segment is required to keep clear of the germ's declared singular
// set; violating segments throw instead of silently crossing.
// =============================================================================
class BranchTracker {
public:
    BranchTracker(Germ germ, cplx start, double step_tol = 1e-10)
        : germ_(std::move(germ)), point_(start), tol_(step_tol) {
        if (!(std::abs(start) < germ_.radius_of_convergence()))
            throw validation_error("tracker: start point outside the disc of convergence of '" +
                                   germ_.name() + "'");
        if (const auto* tb = std::get_if<TaylorBackend>(&germ_.backend())) {
            state_ = tb->coeffs;
            check_taylor_trust(start);
            shift_state(start);
        } else if (std::holds_alternative<HolonomicBackend>(germ_.backend())) {
            init_holonomic_jet();
        } else {
            value_ = germ_.eval_principal(start);
        }
    }

    const Germ& germ() const { return germ_; }
    cplx point() const { return point_; }
    double step_tolerance() const { return tol_; }

    cplx value() const {
        if (std::holds_alternative<RationalBackend>(germ_.backend())) return value_;
        return state_.empty() ? cplx(0.0) : state_[0];
    }

    /// Continues along the straight segment to `target` and returns the value
    /// there.  The segment must stay clear of the declared singular set.
    cplx step(cplx target) {
        if (target != point_) {
            check_segment(point_, target);
            if (const auto* rb = std::get_if<RationalBackend>(&germ_.backend())) {
                value_ = detail::poly_eval(rb->num, target) / detail::poly_eval(rb->den, target);
            } else if (std::holds_alternative<HolonomicBackend>(germ_.backend())) {
                integrate_segment(target);
            } else {
                walk_taylor(target);
            }
            point_ = target;
        }
        return value();
    }

    /// Distance from the current point to the declared singular set, capped
    /// at max(1, |point|) so the search disc stays finite.
    double obstruction_clearance() const {
        const double cap = std::max(1.0, std::abs(point_));
        double best = cap;
        for (cplx s : germ_.singular_set().enumerate(std::abs(point_) + cap))
            best = std::min(best, std::abs(point_ - s));
        return best;
    }

    /// Taylor coefficients of the tracked branch at the current point.
    std::vector<cplx> local_coeffs(int m) const {
        std::vector<cplx> out(static_cast<std::size_t>(std::max(m, 0)), cplx(0.0));
        if (const auto* rb = std::get_if<RationalBackend>(&germ_.backend())) {
            const auto num = detail::poly_shift(rb->num, point_);
            const auto den = detail::poly_shift(rb->den, point_);
            return detail::series_divide(num, den, static_cast<std::size_t>(m));
        }
        if (const auto* hb = std::get_if<HolonomicBackend>(&germ_.backend())) {
            extend_holonomic_coeffs(*hb, out);
            return out;
        }
        for (std::size_t i = 0; i < out.size() && i < state_.size(); ++i) out[i] = state_[i];
        return out;
    }

    LocalJet jet(int m) const { return LocalJet{point_, local_coeffs(m)}; }

private:
    static double falling(int n, int k) {
        double f = 1.0;
        for (int i = n - k + 1; i <= n; ++i) f *= double(i);
        return f;
    }

    void check_segment(cplx from, cplx to) const {
        const double reach = std::max(std::abs(from), std::abs(to)) + std::abs(to - from) + 1.0;
        const double floor = std::max(tol_, 1e-13 * reach);
        for (cplx s : germ_.singular_set().enumerate(reach)) {
            const double d = dist_point_segment(s, from, to);
            if (d <= floor) {
                std::ostringstream msg;
                msg << "tracker('" << germ_.name() << "'): segment [" << from << " -> " << to
                    << "] passes within " << d << " of singular point " << s;
                throw validation_error(msg.str());
            }
        }
    }

    void init_holonomic_jet() {
        const auto& hb = std::get<HolonomicBackend>(germ_.backend());
        const int order = static_cast<int>(hb.ode.size()) - 1;
        state_.assign(static_cast<std::size_t>(order), cplx(0.0));
        for (int k = 0; k < order; ++k) {
            cplx sum(0.0), power(1.0);
            double ff = falling(k, k);  // (n+k)!/n! at n = 0
            int calm = 0;
            for (int n = 0; n < 500000; ++n) {
                const cplx term = ff * hb.coeff(n + k) * power;
                sum += term;
                power *= point_;
                ff *= double(n + 1 + k) / double(n + 1);
                if (std::abs(term) <= 1e-16 * (1.0 + std::abs(sum))) {
                    if (++calm >= 8 && n >= 16) break;
                } else {
                    calm = 0;
                }
                if (n + 1 == 500000)
                    throw numeric_error("tracker('" + germ_.name() +
                                        "'): initialization series did not converge");
            }
            state_[static_cast<std::size_t>(k)] = sum;
        }
    }

    void integrate_segment(cplx target) {
        const auto& hb = std::get<HolonomicBackend>(germ_.backend());
        const cplx from = point_, delta = target - point_;
        const std::size_t order = state_.size();
        auto rhs = [&](double tau, const std::vector<cplx>& y, std::vector<cplx>& dy) {
            const cplx z = from + tau * delta;
            for (std::size_t k = 0; k + 1 < order; ++k) dy[k] = delta * y[k + 1];
            cplx top(0.0);
            for (std::size_t k = 0; k < order; ++k)
                if (!hb.ode[k].empty()) top -= detail::poly_eval(hb.ode[k], z) * y[k];
            dy[order - 1] = delta * top / detail::poly_eval(hb.ode[order], z);
        };
        IntegratorSettings set;
        set.abs_tol = 0.05 * tol_;
        set.rel_tol = 0.05 * tol_;
        integrate_adaptive(rhs, 0.0, 1.0, state_, set, "tracker segment");
    }

    // Finite Taylor data determines the germ only inside its disc of
    // convergence: composed re-expansions of a fixed coefficient list are
    // exactly the recentered original polynomial, which carries no branch
    // information.  Steps are therefore confined to the region where the
    // stored truncation is still accurate to the step tolerance.
    void check_taylor_trust(cplx z) const {
        const double R = germ_.radius_of_convergence();
        if (!std::isfinite(R)) return;
        const double q = std::abs(z) / R;
        if (q < 1.0 && std::pow(q, double(state_.size())) <= 0.01 * tol_) return;
        throw validation_error(
            "tracker('" + germ_.name() +
            "'): target is beyond the reliable region of the stored Taylor data; use a "
            "holonomic or rational backend for continuation onto other sheets");
    }

    // Validate the segment in re-expansion hops of at most half the
    // obstruction distance, then recenter the stored data at the target with
    // a single shift from the origin.  Shifting fresh from 0 keeps every
    // accumulation dominated by its own output scale; composing shifts
    // between centers at very different distances from a singularity would
    // cancel catastrophically.
    void walk_taylor(cplx target) {
        check_taylor_trust(target);
        cplx here = point_;
        const double total = std::abs(target - here);
        for (int guard = 0; guard < 200000; ++guard) {
            const double remaining = std::abs(target - here);
            if (remaining == 0.0) break;
            double clear = 1e300;
            const double reach = std::abs(here) + remaining + 1.0;
            for (cplx s : germ_.singular_set().enumerate(reach))
                clear = std::min(clear, std::abs(here - s));
            if (clear >= 1e300) clear = 2.0 * remaining;  // nothing declared nearby
            const double hop = std::min(remaining, 0.5 * clear);
            if (hop <= 1e-13 * std::max(1.0, total))
                throw validation_error("tracker('" + germ_.name() +
                                       "'): cornered against the singular set during re-expansion");
            here = hop == remaining ? target : here + hop * (target - here) / remaining;
            if (here == target) break;
            if (guard + 1 == 200000)
                throw numeric_error("tracker('" + germ_.name() +
                                    "'): re-expansion walk did not terminate");
        }
        state_ = std::get<TaylorBackend>(germ_.backend()).coeffs;
        shift_state(target);
    }

    // In-place Taylor shift of the local coefficients by dx.
    void shift_state(cplx dx) {
        const std::size_t n = state_.size();
        for (std::size_t k = 0; k < n; ++k)
            for (std::size_t j = n - 1; j > k; --j) state_[j - 1] += dx * state_[j];
    }

    // Local coefficients beyond the jet via the shifted-ODE recurrence: with
    // u(x) = y(point + x) = sum c_i x^i, matching the x^M coefficient of
    // sum_k p_k(point + x) u^(k)(x) = 0 solves for c_{M + order}.
    void extend_holonomic_coeffs(const HolonomicBackend& hb, std::vector<cplx>& c) const {
        const int order = static_cast<int>(state_.size());
        const int m = static_cast<int>(c.size());
        std::vector<std::vector<cplx>> shifted(hb.ode.size());
        for (std::size_t k = 0; k < hb.ode.size(); ++k)
            shifted[k] = detail::poly_shift(hb.ode[k], point_);

        double ifact = 1.0;
        for (int i = 0; i < std::min(order, m); ++i) {
            if (i > 0) ifact *= double(i);
            c[static_cast<std::size_t>(i)] = state_[static_cast<std::size_t>(i)] / ifact;
        }
        const cplx lead = shifted.back().empty() ? cplx(0.0) : shifted.back()[0];
        for (int M = 0; M + order < m; ++M) {
            cplx acc(0.0);
            for (int k = 0; k <= order; ++k) {
                for (int j = 0; j < static_cast<int>(shifted[static_cast<std::size_t>(k)].size());
                     ++j) {
                    if (k == order && j == 0) continue;
                    if (j > M) break;
                    const int idx = M - j + k;
                    if (idx >= M + order || idx < 0) continue;
                    acc += shifted[static_cast<std::size_t>(k)][static_cast<std::size_t>(j)] *
                           c[static_cast<std::size_t>(idx)] * falling(idx, k);
                }
            }
            c[static_cast<std::size_t>(M + order)] = -acc / (lead * falling(M + order, order));
        }
    }

    Germ germ_;
    cplx point_;
    cplx value_{0.0};          // rational backend only
    std::vector<cplx> state_;  // holonomic: jet of derivatives; taylor: local coefficients
    double tol_;
};

/// Convenience constructors mirroring the operation names used elsewhere.
inline BranchTracker tracker_init(const Germ& g, cplx start, double step_tol = 1e-10) {
    return BranchTracker(g, start, step_tol);
}

}  // namespace hadcont
