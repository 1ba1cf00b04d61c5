#pragma once

#include <algorithm>
#include <cstdlib>
#include <vector>

#include "hadcont/common.hpp"

namespace hadcont {

template <class C>
struct series_traits {
    using mag_t = C;
    static mag_t abs(const C& x) {
        using std::abs;
        return static_cast<mag_t>(abs(x));
    }
};

template <class T>
struct series_traits<std::complex<T>> {
    using mag_t = T;
    static mag_t abs(const std::complex<T>& x) { return std::abs(x); }
};

// =============================================================================
// Truncated formal power series.
//
// coeffs[i] is the coefficient of x^(offset + i).  Everything at powers
// offset..truncation_order is represented; nothing beyond the truncation
// order is ever claimed, and binary operations return the smallest order
// both operands can honestly support (no silent zero-padding).
//
// The coefficient type C is a field: instantiated with std::complex<double>
// for numeric work and with an exact rational type for identity checks.
// =============================================================================
template <class C>
struct FormalSeries {
    std::vector<C> coeffs;
    int offset = 0;
    int truncation_order = -1;

    FormalSeries() = default;
    FormalSeries(std::vector<C> c, int off)
        : coeffs(std::move(c)), offset(off),
          truncation_order(off + static_cast<int>(coeffs.size()) - 1) {}

    int order() const { return truncation_order; }

    /// Coefficient of x^power (0 for represented-but-absent powers below the
    /// offset; powers above the truncation order are not queryable).
    C at(int power) const {
        if (power < offset) return C(0);
        const int i = power - offset;
        if (i >= static_cast<int>(coeffs.size())) return C(0);
        return coeffs[static_cast<std::size_t>(i)];
    }
};

namespace detail {

/// p! q! / (p+q)! computed as a product of ratios <= 1; exact for rational C.
template <class C>
C beta_weight(int p, int q) {
    C w(1);
    for (int i = 1; i <= q; ++i) w = w * C(i) / C(p + i);
    return w;
}

}  // namespace detail

/// Coefficientwise product, aligned by power.  Result covers the largest
/// power range both operands can vouch for.
template <class C>
FormalSeries<C> hadamard_coeff(const FormalSeries<C>& f, const FormalSeries<C>& g) {
    const int off = std::max(f.offset, g.offset);
    const int ord = std::min(f.truncation_order, g.truncation_order);
    std::vector<C> c;
    for (int p = off; p <= ord; ++p) c.push_back(f.at(p) * g.at(p));
    FormalSeries<C> r(std::move(c), off);
    r.truncation_order = ord;  // may exceed off + len - 1 only if ord < off (empty)
    return r;
}

/// Index-shifting transform sending the coefficient of x^(n+1) to the
/// coefficient c/n! of x^n.  Input must have no constant term (offset >= 1).
template <class C>
FormalSeries<C> borel(const FormalSeries<C>& f) {
    if (f.offset < 1)
        throw validation_error("borel: input has a constant term (offset < 1)");
    std::vector<C> c(f.coeffs.size());
    C inv_fact(1);
    // coefficient of x^(p) moves to x^(p-1) divided by (p-1)!
    for (std::size_t i = 0; i < f.coeffs.size(); ++i) {
        const int n = f.offset - 1 + static_cast<int>(i);  // target power
        if (i == 0) {
            inv_fact = C(1);
            for (int k = 2; k <= n; ++k) inv_fact = inv_fact / C(k);
        } else if (n >= 1) {
            inv_fact = inv_fact / C(n);
        }
        c[i] = f.coeffs[i] * inv_fact;
    }
    FormalSeries<C> r(std::move(c), f.offset - 1);
    r.truncation_order = f.truncation_order - 1;
    return r;
}

/// Cauchy product.
template <class C>
FormalSeries<C> multiply(const FormalSeries<C>& f, const FormalSeries<C>& g) {
    const int off = f.offset + g.offset;
    const int ord = std::min(f.truncation_order + g.offset, g.truncation_order + f.offset);
    std::vector<C> c(static_cast<std::size_t>(std::max(0, ord - off + 1)), C(0));
    for (int n = off; n <= ord; ++n)
        for (int p = f.offset; p <= std::min(f.truncation_order, n - g.offset); ++p)
            c[static_cast<std::size_t>(n - off)] = c[static_cast<std::size_t>(n - off)] + f.at(p) * g.at(n - p);
    FormalSeries<C> r(std::move(c), off);
    r.truncation_order = ord;
    return r;
}

/// Integral-type convolution: the monomial rule
/// x^p * x^q = p! q! / (p+q+1)! x^(p+q+1), extended bilinearly.
template <class C>
FormalSeries<C> convolve(const FormalSeries<C>& f, const FormalSeries<C>& g) {
    const int off = f.offset + g.offset + 1;
    const int ord = std::min(f.truncation_order + g.offset, g.truncation_order + f.offset) + 1;
    std::vector<C> c(static_cast<std::size_t>(std::max(0, ord - off + 1)), C(0));
    for (int p = f.offset; p <= f.truncation_order; ++p) {
        for (int q = g.offset; q <= g.truncation_order; ++q) {
            const int n = p + q + 1;
            if (n > ord) continue;
            const C w = detail::beta_weight<C>(p, q) / C(n);
            c[static_cast<std::size_t>(n - off)] = c[static_cast<std::size_t>(n - off)] + w * f.at(p) * g.at(q);
        }
    }
    FormalSeries<C> r(std::move(c), off);
    r.truncation_order = ord;
    return r;
}

/// The series with coefficient 1/n! at power n+1 (n = 0..order-1).
template <class C>
FormalSeries<C> factorial_kernel(int order) {
    std::vector<C> c;
    C w(1);
    for (int n = 0; n + 1 <= order; ++n) {
        if (n >= 1) w = w / C(n);
        c.push_back(w);
    }
    return FormalSeries<C>(std::move(c), 1);
}

/// Max coefficient discrepancy, through order N, between the two evaluations
/// of the Hadamard product of the transformed series:
///   hadamard(borel(ft), borel(gt))  vs  borel(k1 (.) ft (.) gt)
/// with k1 the factorial kernel.  Zero in exact arithmetic.
template <class C>
typename series_traits<C>::mag_t
bridge_identity_residual(const FormalSeries<C>& ft, const FormalSeries<C>& gt, int N) {
    if (ft.offset < 1 || gt.offset < 1)
        throw validation_error("bridge_identity_residual: offsets must be >= 1");
    const auto lhs = hadamard_coeff(borel(ft), borel(gt));
    const auto e1 = factorial_kernel<C>(std::max(ft.truncation_order, gt.truncation_order) + 1);
    const auto rhs = borel(hadamard_coeff(e1, hadamard_coeff(ft, gt)));
    const int top = std::min({N, lhs.truncation_order, rhs.truncation_order});
    typename series_traits<C>::mag_t worst(0);
    for (int n = 0; n <= top; ++n) {
        auto d = series_traits<C>::abs(lhs.at(n) - rhs.at(n));
        if (worst < d) worst = d;
    }
    return worst;
}

}  // namespace hadcont
