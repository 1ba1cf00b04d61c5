#pragma once

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "hadcont/common.hpp"
#include "hadcont/path.hpp"
#include "hadcont/singular_set.hpp"

namespace hadcont {

// =============================================================================
// Certified path geometry.  All bounds come from dense parameter sampling
// with the Lipschitz margin L*h/2 (L = max speed, h = sample spacing), so the
// continuous statements reduce to finitely many checks: lower bounds are
// sample minima minus the margin, upper bounds sample maxima plus it.
// =============================================================================
struct PathCertificate {
    double basepoint_modulus = 0.0;
    double min_modulus = 0.0;            // certified lower bound on |gamma(t)|
    double max_modulus = 0.0;            // certified upper bound on |gamma(t)|
    double obstruction_clearance = 0.0;  // certified lower bound on dist(gamma, forbidden set)
    double max_speed = 0.0;              // max |gamma'(t)| over samples
    double sample_margin = 0.0;
    int samples = 0;
};

/// Checks 0 < |gamma(0)| < a*b and positive clearance from the forbidden set
/// within the doubled path radius; throws validation_error on violation.
inline PathCertificate validate_path(const Path& path, const SingularSet& omega, double a, double b) {
    PathCertificate cert;
    cert.basepoint_modulus = std::abs(path.basepoint());
    if (!(cert.basepoint_modulus > 0.0 && cert.basepoint_modulus < a * b)) {
        std::ostringstream msg;
        msg << "validate_path: basepoint modulus " << cert.basepoint_modulus
            << " outside the admissible range (0, " << a * b << ")";
        throw validation_error(msg.str());
    }

    for (int n = 1 << 12; n <= (1 << 21); n *= 2) {
        const double h = 1.0 / n;
        const double margin = 0.5 * path.length() * h;

        double minmod = 1e300, maxmod = 0.0, maxspeed = 0.0;
        std::vector<cplx> samples(static_cast<std::size_t>(n) + 1);
        for (int k = 0; k <= n; ++k) {
            const double t = double(k) * h;
            const cplx g = path.eval(t);
            samples[static_cast<std::size_t>(k)] = g;
            minmod = std::min(minmod, std::abs(g));
            maxmod = std::max(maxmod, std::abs(g));
            maxspeed = std::max(maxspeed, std::abs(path.eval_derivative(t)));
        }

        const auto forbidden = omega.enumerate(2.0 * (maxmod + margin));
        double raw_clear = 1e300;
        for (const cplx g : samples)
            for (const cplx w : forbidden) raw_clear = std::min(raw_clear, std::abs(g - w));
        if (forbidden.empty()) raw_clear = maxmod + margin;  // nothing nearby to avoid

        const bool resolved = margin <= 0.02 * std::min(raw_clear, minmod);
        if (resolved || n == (1 << 21)) {
            cert.min_modulus = minmod - margin;
            cert.max_modulus = maxmod + margin;
            cert.obstruction_clearance = raw_clear - margin;
            cert.max_speed = maxspeed;
            cert.sample_margin = margin;
            cert.samples = n + 1;
            if (!(cert.obstruction_clearance > 0.0))
                throw validation_error(
                    "validate_path: path passes through or within sampling resolution of a "
                    "forbidden point (clearance bound " +
                    std::to_string(cert.obstruction_clearance) + ")");
            if (!(cert.min_modulus > 0.0))
                throw validation_error("validate_path: path passes through or too close to 0");
            if (resolved) return cert;
            throw numeric_error("validate_path: could not certify clearance at max resolution");
        }
    }
    throw numeric_error("validate_path: unreachable");
}

// =============================================================================
// The constants steering the contour deformation, all derived from the path
// and the two singular sets.  Selection rules:
//   contour_radius   geometric mean of the admissible interval endpoints
//   path_clearance   min(certified min |gamma|, certified obstruction clearance)
//   cutoff_width     min(a/4, a*delta/(2M)) -- strictly inside the admissible
//                    region for the cutoff (checked by tests, not re-derived here)
//   growth_rate      max |gamma'| / path_clearance
// =============================================================================
struct ContinuationConstants {
    double min_f_singularity = 0.0;  // smallest nonzero modulus in f's singular set
    double min_g_singularity = 0.0;  // same for g
    double contour_radius = 0.0;
    double path_clearance = 0.0;
    double path_max_modulus = 0.0;
    double cutoff_width = 0.0;
    double growth_rate = 0.0;
    PathCertificate cert;
};

inline ContinuationConstants select_constants(const Path& path, const SingularSet& A,
                                              const SingularSet& B) {
    ContinuationConstants k;
    k.min_f_singularity = min_modulus(A);
    k.min_g_singularity = min_modulus(B);
    const SingularSet omega = product_set(A, B);
    k.cert = validate_path(path, omega, k.min_f_singularity, k.min_g_singularity);

    k.path_max_modulus = k.cert.max_modulus;
    k.path_clearance = std::min(k.cert.min_modulus, k.cert.obstruction_clearance);
    k.contour_radius =
        std::sqrt(k.min_f_singularity * k.cert.basepoint_modulus / k.min_g_singularity);
    k.cutoff_width = std::min(0.25 * k.min_f_singularity,
                              k.min_f_singularity * k.path_clearance / (2.0 * k.path_max_modulus));
    k.growth_rate = k.cert.max_speed / k.path_clearance;
    return k;
}

}  // namespace hadcont
