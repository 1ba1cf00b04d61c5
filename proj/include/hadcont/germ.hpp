#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hadcont/common.hpp"
#include "hadcont/polyroots.hpp"
#include "hadcont/singular_set.hpp"

namespace hadcont {

namespace detail {

inline cplx poly_eval(const std::vector<cplx>& p, cplx z) {
    cplx acc(0.0);
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
    return acc;
}

/// Taylor shift: coefficients of p(center + x) in x, same degree, via
/// repeated synthetic division (numerically stable Horner form).
inline std::vector<cplx> poly_shift(std::vector<cplx> p, cplx center) {
    const std::size_t n = p.size();
    for (std::size_t k = 0; k < n; ++k)
        for (std::size_t j = n - 1; j > k; --j) p[j - 1] += center * p[j];
    return p;
}

/// First `m` coefficients of num/den as a power series at 0 (den[0] != 0).
inline std::vector<cplx> series_divide(const std::vector<cplx>& num, const std::vector<cplx>& den,
                                       std::size_t m) {
    std::vector<cplx> a(m, cplx(0.0));
    for (std::size_t n = 0; n < m; ++n) {
        cplx acc = n < num.size() ? num[n] : cplx(0.0);
        for (std::size_t k = 1; k <= n && k < den.size(); ++k) acc -= den[k] * a[n - k];
        a[n] = acc / den[0];
    }
    return a;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Germ backends.  A germ carries its Taylor data at 0 plus one of three
// evaluation mechanisms; continuation strategy is chosen per backend by the
// branch tracker.
// ---------------------------------------------------------------------------

/// num(z)/den(z), both ascending coefficient lists.  Single-valued: tracking
/// a branch is plain evaluation.
struct RationalBackend {
    std::vector<cplx> num, den;
    std::vector<cplx> poles;  // of the reduced fraction
};

/// Solution of a linear ODE with polynomial coefficients:
///   sum_k ode[k](z) * y^(k)(z) = 0,
/// identified by its Taylor coefficients at 0 (the generator must supply
/// arbitrarily many).  Continuation integrates the ODE along segments.
struct HolonomicBackend {
    std::vector<std::vector<cplx>> ode;  // ode[k] multiplies y^(k); ode.back() nonzero
    std::function<cplx(int)> coeff;
};

/// Finite Taylor data only; continuation re-expands at intermediate centers.
struct TaylorBackend {
    std::vector<cplx> coeffs;
};

using GermBackend = std::variant<RationalBackend, HolonomicBackend, TaylorBackend>;

// =============================================================================
// An endlessly-continuable-with-declared-obstructions holomorphic germ at 0.
// Immutable and cheap to copy; safe to share across threads.  The declared
// singular set is the obstruction set for every continuation segment, across
// all branches (a conservative superset is legal and sound).
// =============================================================================
class Germ {
public:
    Germ(GermBackend backend, SingularSet singular, double radius, std::string name)
        : data_(std::make_shared<Data>(std::move(backend), std::move(singular), radius,
                                       std::move(name))) {
        if (!(radius > 0.0)) throw validation_error("germ '" + data_->name + "': radius must be positive");
        check_radius_invariant();
        check_leading_roots_declared();
    }

    const SingularSet& singular_set() const { return data_->singular; }
    double radius_of_convergence() const { return data_->radius; }
    const std::string& name() const { return data_->name; }
    const GermBackend& backend() const { return data_->backend; }

    /// Taylor coefficient at 0 of order n (principal branch).
    cplx taylor_coeff(int n) const {
        if (n < 0) return cplx(0.0);
        const Data& d = *data_;
        if (const auto* rb = std::get_if<RationalBackend>(&d.backend)) {
            std::scoped_lock lock(d.cache_mutex);
            if (d.coeff_cache.size() <= static_cast<std::size_t>(n)) {
                std::size_t m = std::max<std::size_t>(256, 2 * (static_cast<std::size_t>(n) + 1));
                if (m > (1u << 22)) throw numeric_error("taylor_coeff: order too large");
                d.coeff_cache = detail::series_divide(rb->num, rb->den, m);
            }
            return d.coeff_cache[static_cast<std::size_t>(n)];
        }
        if (const auto* hb = std::get_if<HolonomicBackend>(&d.backend)) return hb->coeff(n);
        const auto& tb = std::get<TaylorBackend>(d.backend);
        return static_cast<std::size_t>(n) < tb.coeffs.size() ? tb.coeffs[static_cast<std::size_t>(n)]
                                                              : cplx(0.0);
    }

    std::vector<cplx> taylor_head(int n) const {
        std::vector<cplx> out(static_cast<std::size_t>(std::max(0, n)));
        for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = taylor_coeff(i);
        return out;
    }

    /// Principal-branch value for |xi| < radius: exact for the rational
    /// backend, Taylor summation otherwise.
    cplx eval_principal(cplx xi, double tol = 1e-15) const {
        if (const auto* rb = std::get_if<RationalBackend>(&data_->backend))
            return detail::poly_eval(rb->num, xi) / detail::poly_eval(rb->den, xi);
        if (!(std::abs(xi) < data_->radius))
            throw validation_error("eval_principal: point outside the disc of convergence");
        cplx sum(0.0), power(1.0);
        int calm = 0;
        for (int n = 0; n < 400000; ++n) {
            const cplx term = taylor_coeff(n) * power;
            sum += term;
            power *= xi;
            if (std::abs(term) <= tol * (1.0 + std::abs(sum))) {
                if (++calm >= 6 && n >= 8) return sum;
            } else {
                calm = 0;
            }
        }
        throw numeric_error("eval_principal: series did not converge");
    }

private:
    struct Data {
        Data(GermBackend b, SingularSet s, double r, std::string n)
            : backend(std::move(b)), singular(std::move(s)), radius(r), name(std::move(n)) {}
        GermBackend backend;
        SingularSet singular;
        double radius;
        std::string name;
        mutable std::vector<cplx> coeff_cache;
        mutable std::mutex cache_mutex;
    };

    void check_radius_invariant() const {
        const double reach = std::isfinite(data_->radius) ? 2.0 * data_->radius + 1.0 : 1e12;
        const auto nz = data_->singular.enumerate_nonzero(reach);
        double a = std::numeric_limits<double>::infinity();
        for (cplx p : nz) a = std::min(a, std::abs(p));
        if (std::isfinite(a) && data_->radius < a - 1e-12)
            throw validation_error("germ '" + data_->name +
                                   "': declared radius is smaller than the nearest declared "
                                   "singularity allows");
    }

    // Every zero of the ODE's leading coefficient must be declared singular;
    // segments validated against the declared set are then automatically
    // clear of the ODE's own singular points.
    void check_leading_roots_declared() const {
        const auto* hb = std::get_if<HolonomicBackend>(&data_->backend);
        if (!hb) return;
        if (hb->ode.size() < 2 || hb->ode.back().empty())
            throw validation_error("germ '" + data_->name + "': holonomic backend needs an ODE");
        for (cplx root : polynomial_roots(hb->ode.back())) {
            if (std::abs(root) > 1e8) continue;
            bool declared = false;
            for (cplx s : data_->singular.enumerate(std::abs(root) + 1.0))
                if (std::abs(s - root) <= 1e-8 * std::max(1.0, std::abs(root))) declared = true;
            if (!declared)
                throw validation_error("germ '" + data_->name +
                                       "': ODE leading coefficient vanishes at an undeclared point");
        }
    }

    std::shared_ptr<const Data> data_;
};

// ---------------------------------------------------------------------------
// Catalog
// ---------------------------------------------------------------------------

/// 1/(1 - alpha*xi); the single pole sits at 1/alpha.
inline Germ catalog_geometric(cplx alpha) {
    if (alpha == cplx(0.0)) throw validation_error("geometric: alpha must be nonzero");
    RationalBackend rb{{cplx(1.0)}, {cplx(1.0), -alpha}, {cplx(1.0) / alpha}};
    const double r = 1.0 / std::abs(alpha);
    return Germ(std::move(rb), SingularSet::finite({cplx(1.0) / alpha}, "pole"), r,
                "geometric");
}

/// -log(1 - xi): coefficients 0, 1, 1/2, 1/3, ...; obstruction {1}.
inline Germ catalog_log_f0() {
    HolonomicBackend hb;
    hb.ode = {{}, {cplx(-1.0)}, {cplx(1.0), cplx(-1.0)}};  // (1-z) y'' - y' = 0
    hb.coeff = [](int n) { return n == 0 ? cplx(0.0) : cplx(1.0 / n); };
    return Germ(std::move(hb), SingularSet::finite({cplx(1.0)}, "log point"), 1.0, "log_f0");
}

/// -(1/xi) log(1 - xi): coefficients 1/(n+1); obstructions declared {0, 1}.
inline Germ catalog_f1() {
    HolonomicBackend hb;
    // z(1-z) y'' + (2-3z) y' - y = 0
    hb.ode = {{cplx(-1.0)}, {cplx(2.0), cplx(-3.0)}, {cplx(0.0), cplx(1.0), cplx(-1.0)}};
    hb.coeff = [](int n) { return cplx(1.0 / (n + 1)); };
    return Germ(std::move(hb), SingularSet::finite({cplx(0.0), cplx(1.0)}, "f1 branch points"),
                1.0, "f1");
}

/// Dilogarithm: coefficients 1/n^2; obstructions declared {0, 1} (0 is only
/// singular on non-principal sheets, but the declared set is the conservative
/// obstruction for every continuation segment).
inline Germ catalog_li2() {
    HolonomicBackend hb;
    // z(1-z) y''' + (2-3z) y'' - y' = 0
    hb.ode = {{}, {cplx(-1.0)}, {cplx(2.0), cplx(-3.0)}, {cplx(0.0), cplx(1.0), cplx(-1.0)}};
    hb.coeff = [](int n) { return n == 0 ? cplx(0.0) : cplx(1.0 / (double(n) * n)); };
    return Germ(std::move(hb), SingularSet::finite({cplx(0.0), cplx(1.0)}, "dilog branch points"),
                1.0, "li2");
}

/// (1 - xi)^lambda with the principal determination at 0.
inline Germ catalog_power(cplx lambda) {
    HolonomicBackend hb;
    hb.ode = {{lambda}, {cplx(1.0), cplx(-1.0)}};  // (1-z) y' + lambda y = 0
    hb.coeff = [lambda](int n) {
        cplx a(1.0);
        for (int j = 1; j <= n; ++j) a *= -(lambda - cplx(double(j) - 1.0)) / cplx(double(j));
        return a;
    };
    return Germ(std::move(hb), SingularSet::finite({cplx(1.0)}, "power branch point"), 1.0,
                "power");
}

/// num/den with ascending coefficient lists; singular set = poles of the
/// reduced fraction (roots of den where num does not also vanish).
inline Germ catalog_rational(std::vector<cplx> num, std::vector<cplx> den) {
    double den_scale = 0.0, num_scale = 0.0;
    for (cplx v : den) den_scale = std::max(den_scale, std::abs(v));
    for (cplx v : num) num_scale = std::max(num_scale, std::abs(v));
    if (den.empty() || den_scale == 0.0)
        throw validation_error("rational: zero denominator");
    if (std::abs(detail::poly_eval(den, cplx(0.0))) <= 1e-14 * den_scale)
        throw validation_error("rational: denominator vanishes at 0");

    std::vector<cplx> poles;
    for (cplx root : polynomial_roots(den)) {
        const double num_at = std::abs(detail::poly_eval(num, root));
        const double cancel_scale =
            num_scale * std::pow(std::max(1.0, std::abs(root)), double(num.size()));
        if (num_at <= 1e-10 * std::max(cancel_scale, 1e-300)) continue;  // removable
        bool dup = false;
        for (cplx p : poles)
            if (std::abs(p - root) <= 1e-9 * std::max(1.0, std::abs(root))) dup = true;
        if (!dup) poles.push_back(root);
    }
    double r = std::numeric_limits<double>::infinity();
    for (cplx p : poles) r = std::min(r, std::abs(p));
    RationalBackend rb{std::move(num), std::move(den), poles};
    return Germ(std::move(rb), SingularSet::finite(poles, "poles"), r, "rational");
}

/// exp(xi): coefficients 1/n!.  Entire; the empty singular set makes it a
/// Hadamard-unit for index-shift transforms but unusable as a product factor
/// (no nonzero singularity to anchor the geometry).
inline Germ catalog_exponential() {
    HolonomicBackend hb;
    hb.ode = {{cplx(-1.0)}, {cplx(1.0)}};  // y' = y
    hb.coeff = [](int n) {
        cplx a(1.0);
        for (int j = 2; j <= n; ++j) a /= double(j);
        return a;
    };
    return Germ(std::move(hb), SingularSet::finite({}, "none"),
                std::numeric_limits<double>::infinity(), "exp_e1_borel");
}

}  // namespace hadcont
