#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace hadcont {

using cplx = std::complex<double>;

inline constexpr double pi = 3.141592653589793238462643383279502884;
inline constexpr double two_pi = 2.0 * pi;

/// Bad input or violated geometric contract: malformed spec, basepoint out of
/// range, path through a forbidden point.  The CLI maps this to exit code 2.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numeric routine failed to reach its tolerance: integrator underflowed its
/// step size, quadrature did not converge, series summation stalled.  The CLI
/// maps this to exit code 3.
class numeric_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline cplx unit_dir(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Distance from point p to the closed segment [a, b].
inline double dist_point_segment(cplx p, cplx a, cplx b) {
    const cplx ab = b - a;
    const double len2 = std::norm(ab);
    if (len2 == 0.0) return std::abs(p - a);
    double t = ((p.real() - a.real()) * ab.real() + (p.imag() - a.imag()) * ab.imag()) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return std::abs(p - (a + t * ab));
}

}  // namespace hadcont
