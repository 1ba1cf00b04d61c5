#pragma once

#include <cmath>
#include <functional>
#include <memory>
#include <utility>
#include <vector>

#include "hadcont/constants.hpp"
#include "hadcont/cutoff.hpp"
#include "hadcont/ode.hpp"
#include "hadcont/path.hpp"
#include "hadcont/singular_set.hpp"

namespace hadcont {

enum class FieldVariant { cutoff, finite_b };

// =============================================================================
// The time-dependent field whose flow deforms the integration contour as the
// evaluation point travels along the path.  Two constructions:
//
//   cutoff:    X(t, z) = eta(z) * z / gamma(t) * gamma'(t)
//              with eta the Lipschitz cutoff vanishing on the fixed
//              obstacles; every fixed obstacle (and 0) is a stationary point
//              and each moving pin gamma(t)/beta rides the flow exactly.
//
//   finite_b:  X(t, z) = gamma'(t) * sum over beta1 of
//              eta_b1(z,t) / (eta_b1(z,t) + |z - gamma(t)/beta1|) / beta1,
//              eta_b1 = dist(z, {0} u fixed u other moving pins); requires a
//              finite moving-factor set.
//
// Fields are immutable; evaluation is safe from concurrent threads.
// =============================================================================
class DeformationField {
public:
    static DeformationField make_cutoff(Path path, ContinuationConstants k, const SingularSet& A,
                                        const SingularSet& B) {
        DeformationField f(std::move(path), std::move(k), FieldVariant::cutoff);
        f.init_cover(A);
        f.cutoff_ = std::make_shared<CutoffFunction>(f.k_.cutoff_width, f.fixed_);
        // moving pins are not part of the cutoff construction but feed the
        // per-node clearance diagnostics
        const double pin_reach = 16.0 * f.k_.path_max_modulus / f.k_.contour_radius +
                                 f.k_.min_g_singularity + 1.0;
        f.moving_ = B.enumerate_nonzero(pin_reach);
        return f;
    }

    static DeformationField make_finite_b(Path path, ContinuationConstants k,
                                          const SingularSet& A, const SingularSet& B) {
        DeformationField f(std::move(path), std::move(k), FieldVariant::finite_b);
        f.init_cover(A);
        f.moving_ = B.enumerate_nonzero(1e6);
        if (f.moving_.empty() || f.moving_.size() > 4096)
            throw validation_error(
                "finite-B field variant requires a nonempty finite moving-factor set");
        std::vector<cplx> with_zero{cplx(0.0)};
        with_zero.insert(with_zero.end(), f.fixed_.begin(), f.fixed_.end());
        f.fixed_with_zero_ = ObstacleSet(std::move(with_zero));
        return f;
    }

    cplx operator()(double t, cplx z) const {
        if (std::abs(z) > cover_radius_ - k_.cutoff_width)
            throw numeric_error("deformation field: trajectory left the covered disc");
        const cplx gamma = path_.eval(t);
        const cplx dgamma = path_.eval_derivative(t);
        if (variant_ == FieldVariant::cutoff) return (*cutoff_)(z) * z / gamma * dgamma;

        cplx sum(0.0);
        for (std::size_t i = 0; i < moving_.size(); ++i) {
            double eta = fixed_with_zero_.dist(z);
            for (std::size_t j = 0; j < moving_.size(); ++j)
                if (j != i) eta = std::min(eta, std::abs(z - gamma / moving_[j]));
            const double denom = eta + std::abs(z - gamma / moving_[i]);
            if (!(denom > 1e-12))
                throw numeric_error(
                    "finite-B field: vanishing denominator (path runs into the product set)");
            sum += eta / denom / moving_[i];
        }
        return dgamma * sum;
    }

    FieldVariant variant() const { return variant_; }
    const Path& path() const { return path_; }
    const ContinuationConstants& constants() const { return k_; }
    double cover_radius() const { return cover_radius_; }
    /// Fixed obstacle points (nonzero) inside the covered disc.
    const std::vector<cplx>& fixed_obstacles() const { return fixed_; }
    /// Nonzero factors generating the moving pins gamma(t)/beta.
    const std::vector<cplx>& moving_factors() const { return moving_; }

private:
    DeformationField(Path path, ContinuationConstants k, FieldVariant v)
        : path_(std::move(path)), k_(std::move(k)), variant_(v) {}

    // Covered disc: the growth bound would ask for radius rho*e^K, but K is a
    // worst-case constant; trajectories that actually reach the guard radius
    // abort loudly, so capping the cover keeps obstacle enumeration finite
    // without ever returning a wrong cutoff value.
    void init_cover(const SingularSet& A) {
        const double growth = std::exp(std::min(k_.growth_rate, 9.0));
        const double reach = std::max(
            {k_.contour_radius * growth,
             32.0 * std::max(k_.contour_radius, k_.path_max_modulus / k_.min_g_singularity),
             4.0});
        cover_radius_ = reach + 2.0 * k_.cutoff_width;
        fixed_ = A.enumerate_nonzero(cover_radius_);
    }

    Path path_;
    ContinuationConstants k_;
    FieldVariant variant_;
    double cover_radius_ = 0.0;
    std::vector<cplx> fixed_;
    std::vector<cplx> moving_;
    std::shared_ptr<const CutoffFunction> cutoff_;  // cutoff variant
    ObstacleSet fixed_with_zero_;                   // finite-b variant
};

// =============================================================================
// Flow of a time-dependent field.  The two-parameter family Phi^{t0,t1} is
// realized by adaptive integration of dz/dt = X(t, z); stationary obstacle
// points are preserved bitwise because every stage evaluation vanishes there.
// Normally wraps a DeformationField; a raw functor is accepted for tests and
// degenerate fixtures.
// =============================================================================
class FlowMap {
public:
    explicit FlowMap(DeformationField field, IntegratorSettings settings = flow_defaults())
        : field_(std::make_shared<const DeformationField>(std::move(field))),
          eval_([f = field_](double t, cplx z) { return (*f)(t, z); }),
          set_(settings) {}

    FlowMap(std::function<cplx(double, cplx)> raw_field,
            IntegratorSettings settings = flow_defaults())
        : eval_(std::move(raw_field)), set_(settings) {}

    static IntegratorSettings flow_defaults() {
        IntegratorSettings s;
        s.abs_tol = 1e-11;
        s.rel_tol = 1e-11;
        return s;
    }

    cplx flow(double t_from, double t_to, cplx z) const {
        std::vector<cplx> y{z};
        auto rhs = [this](double t, const std::vector<cplx>& v, std::vector<cplx>& dv) {
            dv[0] = eval_(t, v[0]);
        };
        integrate_adaptive(rhs, t_from, t_to, y, set_, "flow");
        return y[0];
    }

    cplx eval_field(double t, cplx z) const { return eval_(t, z); }

    /// Null when built from a raw functor.
    const DeformationField* field() const { return field_.get(); }
    const IntegratorSettings& settings() const { return set_; }

private:
    std::shared_ptr<const DeformationField> field_;
    std::function<cplx(double, cplx)> eval_;
    IntegratorSettings set_;
};

}  // namespace hadcont
