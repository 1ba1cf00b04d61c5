#pragma once

#include <algorithm>
#include <cstddef>
#include <limits>
#include <vector>

#include "hadcont/common.hpp"

namespace hadcont {

struct IntegratorSettings {
    double abs_tol = 1e-11;
    double rel_tol = 1e-11;
    double initial_step = 0.05;
    double min_step = 1e-14;
    long max_steps = 4'000'000;
};

// =============================================================================
// Adaptive RK4 with step doubling (Richardson comparison).
//
// The fields we integrate are Lipschitz but not smooth across cutoff
// transition zones, so error control must not lean on high-order smoothness:
// comparing one full step against two half steps stays a valid estimate at
// reduced local order near kinks, while the scheme remains 4th order on the
// smooth bulk.  Accepted steps take the extrapolated value.
// =============================================================================
template <class RHS>
class AdaptiveRk4 {
public:
    explicit AdaptiveRk4(RHS rhs, IntegratorSettings settings = {})
        : rhs_(std::move(rhs)), set_(settings) {}

    /// Integrates y' = rhs(t, y) from t0 to t1 (either direction), advancing
    /// `y` in place.  Error is controlled per unit time so the global error
    /// scales with abs_tol/rel_tol over the whole span.
    void run(double t0, double t1, std::vector<cplx>& y, const char* what = "ode") {
        const double span = t1 - t0;
        if (span == 0.0) return;
        const double dir = span > 0.0 ? 1.0 : -1.0;
        const std::size_t n = y.size();
        resize_scratch(n);

        double t = t0;
        double h = std::min(set_.initial_step, std::abs(span)) * dir;
        long steps = 0;
        while (dir * (t1 - t) > 0.0) {
            if (++steps > set_.max_steps)
                throw numeric_error(std::string(what) + ": step budget exhausted");
            if (dir * (t + h) > dir * t1) h = t1 - t;

            rk4_step(t, y, h, full_);
            rk4_step(t, y, 0.5 * h, half_);
            rk4_step(t + 0.5 * h, half_, 0.5 * h, half_);

            double err = 0.0, scale = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                err = std::max(err, std::abs(half_[i] - full_[i]) / 15.0);
                scale = std::max(scale, std::abs(half_[i]));
            }
            // The per-unit-time tolerance must bottom out at the roundoff
            // floor of the comparison itself, or steps across derivative
            // kinks reject forever once h is small enough that the Richardson
            // difference is pure floating-point noise.
            const double tol = std::max(std::abs(h) * (set_.abs_tol + set_.rel_tol * scale),
                                        16.0 * std::numeric_limits<double>::epsilon() * (1.0 + scale));

            if (err <= tol) {
                for (std::size_t i = 0; i < n; ++i)
                    y[i] = half_[i] + (half_[i] - full_[i]) / 15.0;
                t += h;
                const double grow = err > 0.0 ? 0.9 * std::pow(tol / err, 0.2) : 4.0;
                h *= std::clamp(grow, 0.2, 4.0);
            } else {
                h *= std::max(0.2, 0.9 * std::pow(tol / err, 0.2));
                if (std::abs(h) < set_.min_step)
                    throw numeric_error(std::string(what) + ": step size underflow");
            }
        }
    }

private:
    void resize_scratch(std::size_t n) {
        for (auto* v : {&k1_, &k2_, &k3_, &k4_, &tmp_, &full_, &half_})
            v->resize(n);
    }

    // One classical RK4 step from (t, y) with size h, result into `out`.
    // `out` may not alias `y`.
    void rk4_step(double t, const std::vector<cplx>& y, double h, std::vector<cplx>& out) {
        const std::size_t n = y.size();
        rhs_(t, y, k1_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k1_[i];
        rhs_(t + 0.5 * h, tmp_, k2_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + 0.5 * h * k2_[i];
        rhs_(t + 0.5 * h, tmp_, k3_);
        for (std::size_t i = 0; i < n; ++i) tmp_[i] = y[i] + h * k3_[i];
        rhs_(t + h, tmp_, k4_);
        for (std::size_t i = 0; i < n; ++i)
            out[i] = y[i] + (h / 6.0) * (k1_[i] + 2.0 * k2_[i] + 2.0 * k3_[i] + k4_[i]);
    }

    RHS rhs_;
    IntegratorSettings set_;
    std::vector<cplx> k1_, k2_, k3_, k4_, tmp_, full_, half_;
};

template <class RHS>
void integrate_adaptive(RHS&& rhs, double t0, double t1, std::vector<cplx>& y,
                        const IntegratorSettings& settings = {}, const char* what = "ode") {
    AdaptiveRk4<std::decay_t<RHS>> ode(std::forward<RHS>(rhs), settings);
    ode.run(t0, t1, y, what);
}

}  // namespace hadcont
