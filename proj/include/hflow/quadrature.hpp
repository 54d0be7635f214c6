#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "hflow/field.hpp"

namespace hflow {

/// Sum f * dx^dim over all nodes with the fixed pairwise-tree order.
double global_integral(const Field& scalar);

/// Precomputed node set of a lattice ball; reusable across centers.
class Ball {
public:
    Ball(const Lattice& lat, double radius);
    double radius() const { return radius_; }
    std::size_t count() const { return offsets_.size(); }
    /// Volume of the discrete ball: count * dx^dim.
    double volume(const Lattice& lat) const;
    const std::vector<std::array<int, 3>>& offsets() const { return offsets_; }

    /// Flattened node indices of the ball centered at `center`.
    void gather(const Lattice& lat, std::size_t center, std::vector<std::size_t>& out) const;

private:
    double radius_;
    std::vector<std::array<int, 3>> offsets_;
};

/// Normalized L^p average over the lattice ball:
/// ( sum_{ball} |f|^p dx^dim / vol )^{1/p}. Requires radius <= period/2.
double ball_mean_p(const Field& scalar, std::size_t center, double radius, double p);

/// Same with a precomputed ball (fast path for sweeps over centers).
double ball_mean_p(const Field& scalar, std::size_t center, const Ball& ball, double p);

}  // namespace hflow
