#pragma once

#include <vector>

#include <Eigen/Eigenvalues>

#include "hadcont/common.hpp"

namespace hadcont {

/// Roots of sum c[k] z^k (ascending coefficients) via the companion-matrix
/// eigenproblem.  Trailing near-zero coefficients are trimmed against the
/// largest coefficient magnitude.
inline std::vector<cplx> polynomial_roots(std::vector<cplx> c) {
    double top = 0.0;
    for (cplx v : c) top = std::max(top, std::abs(v));
    if (top == 0.0) return {};
    while (!c.empty() && std::abs(c.back()) <= 1e-14 * top) c.pop_back();
    if (c.size() <= 1) return {};

    const int deg = static_cast<int>(c.size()) - 1;
    if (deg == 1) return {-c[0] / c[1]};

    Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(deg, deg);
    for (int i = 1; i < deg; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < deg; ++i) comp(i, deg - 1) = -c[static_cast<std::size_t>(i)] / c.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(comp, /*computeEigenvectors=*/false);
    std::vector<cplx> roots;
    roots.reserve(static_cast<std::size_t>(deg));
    for (int i = 0; i < deg; ++i) roots.push_back(solver.eigenvalues()(i));
    return roots;
}

}  // namespace hadcont
