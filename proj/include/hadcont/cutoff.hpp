#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <unordered_map>
#include <vector>

#include "hadcont/common.hpp"

namespace hadcont {

// =============================================================================
// A finite point cloud with distance queries.  Small clouds are scanned
// directly; large ones (lattice enumerations) go through a uniform hash grid
// whose cell size matches the query cap, so capped queries touch at most a
// 3x3 block of cells.
// =============================================================================
class ObstacleSet {
public:
    ObstacleSet() = default;

    explicit ObstacleSet(std::vector<cplx> pts, double cell = 0.0)
        : pts_(std::move(pts)), cell_(cell) {
        if (cell_ > 0.0 && pts_.size() > 64) {
            for (std::size_t i = 0; i < pts_.size(); ++i)
                grid_[key(pts_[i])].push_back(static_cast<std::uint32_t>(i));
            gridded_ = true;
        }
    }

    bool empty() const { return pts_.empty(); }
    const std::vector<cplx>& points() const { return pts_; }

    /// Exact distance when it is below `cap`, otherwise any value >= cap.
    /// Only meaningful for cap <= the construction cell size when gridded.
    double dist_capped(cplx z, double cap) const {
        if (pts_.empty()) return cap;
        if (!gridded_) {
            double best = cap;
            for (cplx p : pts_) best = std::min(best, std::abs(z - p));
            return best;
        }
        double best = cap;
        const auto [cx, cy] = cell_of(z);
        for (long dx = -1; dx <= 1; ++dx)
            for (long dy = -1; dy <= 1; ++dy) {
                auto it = grid_.find(pack(cx + dx, cy + dy));
                if (it == grid_.end()) continue;
                for (std::uint32_t i : it->second) best = std::min(best, std::abs(z - pts_[i]));
            }
        return best;
    }

    /// Exact minimum distance (infinity when empty).
    double dist(cplx z) const {
        if (pts_.empty()) return std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        for (cplx p : pts_) best = std::min(best, std::abs(z - p));
        return best;
    }

private:
    std::pair<long, long> cell_of(cplx z) const {
        return {static_cast<long>(std::floor(z.real() / cell_)),
                static_cast<long>(std::floor(z.imag() / cell_))};
    }
    std::uint64_t key(cplx z) const {
        auto [x, y] = cell_of(z);
        return pack(x, y);
    }
    static std::uint64_t pack(long x, long y) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(x)) << 32) |
               static_cast<std::uint64_t>(static_cast<std::uint32_t>(y));
    }

    std::vector<cplx> pts_;
    double cell_ = 0.0;
    bool gridded_ = false;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> grid_;
};

// =============================================================================
// Lipschitz cutoff vanishing on a set of obstacle points and identically 1 at
// distance >= width from all of them:  min(dist/width, 1).
// =============================================================================
class CutoffFunction {
public:
    CutoffFunction(double width, std::vector<cplx> obstacle_points)
        : width_(width), obstacles_(std::move(obstacle_points), width) {
        if (!(width > 0.0)) throw validation_error("cutoff: width must be positive");
    }

    double width() const { return width_; }
    const ObstacleSet& obstacles() const { return obstacles_; }

    double operator()(cplx z) const {
        return std::min(obstacles_.dist_capped(z, width_) / width_, 1.0);
    }

private:
    double width_;
    ObstacleSet obstacles_;
};

}  // namespace hadcont
