#pragma once

#include <limits>
#include <vector>

#include "hadcont/branch_tracker.hpp"

namespace hadcont {

/// One node of the deformed integration contour: its seed parameter on the
/// initial circle, its current position, and the two branch trackers riding
/// with it (f at the node position, g at gamma(t)/position).
struct ContourNode {
    double s = 0.0;
    cplx pos;
    BranchTracker f_trk;
    BranchTracker g_trk;
    double min_obstacle_dist = std::numeric_limits<double>::infinity();
    double min_pin_dist = std::numeric_limits<double>::infinity();
};

struct Contour {
    std::vector<ContourNode> nodes;  // strictly increasing s in [0, 1)
    double origin_radius = 0.0;

    /// Bounding-box diagonal: a 2-approximation of the true diameter, enough
    /// for collision thresholds.
    double diameter() const {
        double xlo = 1e300, xhi = -1e300, ylo = 1e300, yhi = -1e300;
        for (const auto& n : nodes) {
            xlo = std::min(xlo, n.pos.real());
            xhi = std::max(xhi, n.pos.real());
            ylo = std::min(ylo, n.pos.imag());
            yhi = std::max(yhi, n.pos.imag());
        }
        return std::hypot(xhi - xlo, yhi - ylo);
    }

    /// Exhaustive segment-intersection scan over the closed polygon through
    /// the node positions (adjacent edges excluded).  Quadratic; meant for
    /// snapshot-time sanity checks, not the inner loop.
    bool is_simple_polygon() const {
        const std::size_t n = nodes.size();
        if (n < 4) return true;
        auto orient = [](cplx a, cplx b, cplx c) {
            const double v = (b.real() - a.real()) * (c.imag() - a.imag()) -
                             (b.imag() - a.imag()) * (c.real() - a.real());
            return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0);
        };
        auto crosses = [&](cplx a, cplx b, cplx c, cplx d) {
            return orient(a, b, c) != orient(a, b, d) && orient(c, d, a) != orient(c, d, b);
        };
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                // skip adjacent edges (sharing an endpoint), including the wrap pair
                if (j == i + 1 || (i == 0 && j == n - 1)) continue;
                if (crosses(nodes[i].pos, nodes[(i + 1) % n].pos, nodes[j].pos,
                            nodes[(j + 1) % n].pos))
                    return false;
            }
        }
        return true;
    }
};

}  // namespace hadcont
