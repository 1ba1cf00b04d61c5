#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hadcont/common.hpp"

namespace hadcont {

// =============================================================================
// A C1 curve on [0, 1] built from line segments and circular arcs, with
// arc-length-proportional parametrization (|gamma'| is constant, equal to the
// total length).  Tangents are continuous across joints by construction, so
// gamma' is Lipschitz with constant bounded by length^2 / min arc radius.
// =============================================================================
class Path {
public:
    struct Segment {
        bool is_arc = false;
        // line: from a to b
        cplx a, b;
        // arc: center + radius * e^{i(theta0 + u * sweep)}, u in [0, 1]
        cplx center;
        double radius = 0.0, theta0 = 0.0, sweep = 0.0;
        double length = 0.0;

        static Segment line(cplx a, cplx b) {
            Segment s;
            s.a = a;
            s.b = b;
            s.length = std::abs(b - a);
            return s;
        }
        static Segment arc(cplx center, double radius, double theta0, double sweep) {
            Segment s;
            s.is_arc = true;
            s.center = center;
            s.radius = radius;
            s.theta0 = theta0;
            s.sweep = sweep;
            s.length = radius * std::abs(sweep);
            s.a = center + radius * unit_dir(theta0);
            s.b = center + radius * unit_dir(theta0 + sweep);
            return s;
        }

        cplx point(double u) const {
            return is_arc ? center + radius * unit_dir(theta0 + u * sweep) : a + u * (b - a);
        }
        cplx unit_tangent(double u) const {
            if (!is_arc) return (b - a) / length;
            const double sgn = sweep >= 0.0 ? 1.0 : -1.0;
            return cplx(0.0, sgn) * unit_dir(theta0 + u * sweep);
        }
    };

    explicit Path(std::vector<Segment> segs) : segs_(std::move(segs)) {
        if (segs_.empty()) throw validation_error("path: no segments");
        cum_.reserve(segs_.size());
        double acc = 0.0;
        for (const auto& s : segs_) {
            acc += s.length;
            cum_.push_back(acc);
        }
        total_ = acc;
        if (!(total_ > 0.0)) throw validation_error("path: zero total length");
    }

    /// Full circles around `center` passing through `through`; `turns` is the
    /// signed winding count (positive = counterclockwise).
    static Path circle(cplx center, cplx through, int turns = 1) {
        if (turns == 0) throw validation_error("circle path: turns must be nonzero");
        const double r = std::abs(through - center);
        if (r == 0.0) throw validation_error("circle path: through-point equals center");
        const double th0 = std::arg(through - center);
        const double sgn = turns > 0 ? 1.0 : -1.0;
        std::vector<Segment> segs;
        for (int k = 0; k < std::abs(turns); ++k)
            segs.push_back(Segment::arc(center, r, th0 + sgn * two_pi * k, sgn * two_pi));
        return Path(std::move(segs));
    }

    cplx eval(double t) const {
        auto [idx, u] = locate(t);
        return segs_[idx].point(u);
    }

    /// dgamma/dt; |eval_derivative| == length() for every t.
    cplx eval_derivative(double t) const {
        auto [idx, u] = locate(t);
        return segs_[idx].unit_tangent(u) * total_;
    }

    cplx basepoint() const { return segs_.front().point(0.0); }
    cplx endpoint() const { return segs_.back().point(1.0); }
    double length() const { return total_; }
    const std::vector<Segment>& segments() const { return segs_; }

private:
    std::pair<std::size_t, double> locate(double t) const {
        const double s = std::clamp(t, 0.0, 1.0) * total_;
        auto it = std::lower_bound(cum_.begin(), cum_.end(), s);
        std::size_t idx = std::min<std::size_t>(it - cum_.begin(), segs_.size() - 1);
        const double s0 = idx == 0 ? 0.0 : cum_[idx - 1];
        const double u = segs_[idx].length > 0.0 ? (s - s0) / segs_[idx].length : 0.0;
        return {idx, std::clamp(u, 0.0, 1.0)};
    }

    std::vector<Segment> segs_;
    std::vector<double> cum_;
    double total_ = 0.0;
};

/// C1 path through the waypoints: the polyline with every interior corner
/// replaced by a tangent circular arc.  The cutback distance along each edge
/// is at most a quarter of the shorter adjacent segment (and at most
/// `rounding` when positive), which bounds the deviation from the polyline by
/// the cutback.  Endpoints are interpolated exactly.
inline Path smooth_waypoints(const std::vector<cplx>& pts, double rounding = -1.0) {
    if (pts.size() < 2) throw validation_error("smooth_waypoints: need at least 2 points");
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double len = std::abs(pts[i + 1] - pts[i]);
        if (len == 0.0)
            throw validation_error("smooth_waypoints: duplicate consecutive points at index " +
                                   std::to_string(i));
        scale = std::max(scale, len);
    }

    std::vector<Path::Segment> segs;
    cplx cursor = pts.front();
    for (std::size_t i = 1; i + 1 < pts.size(); ++i) {
        const cplx p = pts[i];
        const cplx u_in = (p - pts[i - 1]) / std::abs(p - pts[i - 1]);
        const cplx u_out = (pts[i + 1] - p) / std::abs(pts[i + 1] - p);
        const double turn = std::arg(u_out / u_in);
        if (std::abs(turn) < 1e-12) continue;  // collinear, nothing to round
        if (std::abs(turn) > pi - 1e-9)
            throw validation_error("smooth_waypoints: reversal at waypoint " + std::to_string(i));

        double d = 0.25 * std::min(std::abs(p - pts[i - 1]), std::abs(pts[i + 1] - p));
        if (rounding > 0.0) d = std::min(d, rounding);
        const double r = d / std::tan(0.5 * std::abs(turn));
        const cplx q1 = p - d * u_in;
        const cplx q2 = p + d * u_out;
        const double sgn = turn > 0.0 ? 1.0 : -1.0;
        const cplx center = q1 + cplx(0.0, sgn) * r * u_in;

        if (std::abs(q1 - cursor) > 1e-14 * scale)
            segs.push_back(Path::Segment::line(cursor, q1));
        segs.push_back(Path::Segment::arc(center, r, std::arg(q1 - center), turn));
        cursor = q2;
    }
    if (std::abs(pts.back() - cursor) > 1e-14 * scale)
        segs.push_back(Path::Segment::line(cursor, pts.back()));
    if (segs.empty()) segs.push_back(Path::Segment::line(pts.front(), pts.back()));
    return Path(std::move(segs));
}

/// Waypoints of a regular octagon around `center`, entered and left at
/// `through`; `turns` is the signed winding count.  Feed the result to
/// smooth_waypoints (possibly concatenated with an approach path).
inline std::vector<cplx> loop_waypoints(cplx center, cplx through, int turns) {
    if (turns == 0) throw validation_error("loop_waypoints: turns must be nonzero");
    const double r = std::abs(through - center);
    if (r == 0.0) throw validation_error("loop_waypoints: base point equals loop center");
    const double th0 = std::arg(through - center);
    const double sgn = turns > 0 ? 1.0 : -1.0;
    std::vector<cplx> pts;
    for (int k = 0; k <= 8 * std::abs(turns); ++k)
        pts.push_back(center + r * unit_dir(th0 + sgn * two_pi * k / 8.0));
    pts.back() = through;  // close exactly
    return pts;
}

}  // namespace hadcont
