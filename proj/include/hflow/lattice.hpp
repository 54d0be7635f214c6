#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace hflow {

/// Periodic cubical grid: `n_per_axis` points per axis, all axes sharing the
/// same period L. Node i along an axis sits at coordinate i*spacing();
/// spacing is derived from (period, n_per_axis) so dx * n == L by construction.
class Lattice {
public:
    Lattice(int dim, int n_per_axis, double period);

    int dim() const { return dim_; }
    int n() const { return n_; }
    double period() const { return period_; }
    double spacing() const { return period_ / n_; }
    std::size_t nodes() const { return nodes_; }

    /// Stride of one step along `axis` in the flattened node index.
    std::size_t stride(int axis) const { return stride_[axis]; }

    /// Wrap an axis coordinate into [0, n).
    int wrap(int i) const {
        if (i >= n_) i -= n_;
        if (i < 0) i += n_;
        return i;
    }

    std::size_t index(const std::array<int, 3>& c) const {
        std::size_t idx = 0;
        for (int a = 0; a < dim_; ++a) idx += static_cast<std::size_t>(c[a]) * stride_[a];
        return idx;
    }

    std::array<int, 3> coords(std::size_t node) const {
        std::array<int, 3> c{0, 0, 0};
        for (int a = 0; a < dim_; ++a) {
            c[a] = static_cast<int>(node / stride_[a]);
            node -= static_cast<std::size_t>(c[a]) * stride_[a];
        }
        return c;
    }

    /// Physical position of a node (first dim() entries meaningful).
    std::array<double, 3> position(std::size_t node) const {
        auto c = coords(node);
        double dx = spacing();
        return {c[0] * dx, c[1] * dx, c[2] * dx};
    }

    /// Shortest periodic distance between two axis coordinates.
    double axis_dist(double a, double b) const;

    /// Torus distance between two positions.
    double torus_dist(const std::array<double, 3>& a, const std::array<double, 3>& b) const;

    /// Node index shifted by `off` steps along `axis` (periodic).
    std::size_t neighbor(std::size_t node, int axis, int off) const {
        auto c = coords(node);
        c[axis] = wrap(c[axis] + off);
        return index(c);
    }

    bool operator==(const Lattice& o) const {
        return dim_ == o.dim_ && n_ == o.n_ && period_ == o.period_;
    }

private:
    int dim_;
    int n_;
    double period_;
    std::size_t nodes_;
    std::array<std::size_t, 3> stride_;
};

/// Integer offsets (per axis) of all nodes whose torus distance from a center
/// node is <= radius. Order is fixed (lexicographic), so sums over a ball are
/// deterministic. Requires radius <= period/2.
std::vector<std::array<int, 3>> ball_offsets(const Lattice& lat, double radius);

}  // namespace hflow
