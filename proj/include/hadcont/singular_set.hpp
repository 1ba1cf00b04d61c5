#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hadcont/common.hpp"

namespace hadcont {

// =============================================================================
// A closed discrete subset of the plane, exposed through an enumerator that
// must return every member of modulus <= R (each exactly once).  Instances
// are immutable; copies share the enumerator.
// =============================================================================
class SingularSet {
public:
    using Enumerator = std::function<std::vector<cplx>(double)>;

    SingularSet() : SingularSet(finite({}, "empty")) {}

    SingularSet(Enumerator e, std::string label)
        : enum_(std::make_shared<Enumerator>(std::move(e))), label_(std::move(label)) {}

    static SingularSet finite(std::vector<cplx> pts, std::string label = "finite") {
        return SingularSet(
            [pts = std::move(pts)](double R) {
                std::vector<cplx> out;
                for (cplx p : pts)
                    if (std::abs(p) <= R) out.push_back(p);
                return out;
            },
            std::move(label));
    }

    /// step * Z, optionally without the origin.
    static SingularSet lattice(cplx step, bool exclude_zero, std::string label = "lattice") {
        if (std::abs(step) == 0.0)
            throw validation_error("lattice singular set: step must be nonzero");
        return SingularSet(
            [step, exclude_zero](double R) {
                std::vector<cplx> out;
                const long kmax = static_cast<long>(std::floor(R / std::abs(step))) + 1;
                for (long k = -kmax; k <= kmax; ++k) {
                    if (k == 0 && exclude_zero) continue;
                    const cplx p = double(k) * step;
                    if (std::abs(p) <= R) out.push_back(p);
                }
                return out;
            },
            std::move(label));
    }

    /// Members of modulus <= R, deduplicated, in canonical (re, im) order.
    std::vector<cplx> enumerate(double R) const {
        std::vector<cplx> pts = (*enum_)(std::max(R, 0.0));
        std::sort(pts.begin(), pts.end(), [](cplx u, cplx v) {
            return u.real() != v.real() ? u.real() < v.real() : u.imag() < v.imag();
        });
        pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
        return pts;
    }

    /// Nonzero members of modulus <= R.
    std::vector<cplx> enumerate_nonzero(double R) const {
        std::vector<cplx> pts = enumerate(R);
        std::erase_if(pts, [](cplx p) { return p == cplx(0.0); });
        return pts;
    }

    const std::string& label() const { return label_; }

private:
    std::shared_ptr<Enumerator> enum_;
    std::string label_;
};

/// Smallest modulus among nonzero members, found by doubling the search
/// radius.  Throws if the set has no nonzero members.
inline double min_modulus(const SingularSet& s) {
    for (double R = 1.0; R <= 0x1p60; R *= 2.0) {
        const auto pts = s.enumerate_nonzero(R);
        if (!pts.empty()) {
            double m = std::abs(pts.front());
            for (cplx p : pts) m = std::min(m, std::abs(p));
            return m;
        }
    }
    throw validation_error("min_modulus: set '" + s.label() + "' has no nonzero members");
}

// =============================================================================
// {0} union the product of the nonzero members of two sets.  Enumeration at
// radius R only needs factors alpha with |alpha| <= R/b and beta with
// |beta| <= R/a (a, b the minimal nonzero moduli), which keeps the work
// finite and the result complete.
// =============================================================================
inline SingularSet product_set(const SingularSet& A, const SingularSet& B) {
    const double a = min_modulus(A);
    const double b = min_modulus(B);
    std::string label = "{0} u (" + A.label() + " * " + B.label() + ")";
    return SingularSet(
        [A, B, a, b](double R) {
            std::vector<cplx> out{cplx(0.0)};
            if (R <= 0.0) return out;
            const auto alphas = A.enumerate_nonzero(R / b);
            const auto betas = B.enumerate_nonzero(R / a);
            for (cplx al : alphas)
                for (cplx be : betas) {
                    const cplx p = al * be;
                    if (std::abs(p) <= R) out.push_back(p);
                }
            return out;
        },
        std::move(label));
}

}  // namespace hadcont
