#include "hflow/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace hflow {

Lattice::Lattice(int dim, int n_per_axis, double period)
    : dim_(dim), n_(n_per_axis), period_(period) {
    if (dim != 2 && dim != 3) throw std::invalid_argument("lattice dim must be 2 or 3");
    if (n_per_axis < 8) throw std::invalid_argument("n_per_axis must be >= 8");
    if (!(period > 0)) throw std::invalid_argument("period must be positive");
    nodes_ = 1;
    for (int a = 0; a < dim_; ++a) nodes_ *= static_cast<std::size_t>(n_);
    // row-major: last axis contiguous
    stride_ = {1, 1, 1};
    for (int a = dim_ - 2; a >= 0; --a) stride_[a] = stride_[a + 1] * static_cast<std::size_t>(n_);
}

double Lattice::axis_dist(double a, double b) const {
    double d = std::fabs(a - b);
    d = std::fmod(d, period_);
    if (d > period_ / 2) d = period_ - d;
    return d;
}

double Lattice::torus_dist(const std::array<double, 3>& a, const std::array<double, 3>& b) const {
    double s = 0;
    for (int ax = 0; ax < dim_; ++ax) {
        double d = axis_dist(a[ax], b[ax]);
        s += d * d;
    }
    return std::sqrt(s);
}

std::vector<std::array<int, 3>> ball_offsets(const Lattice& lat, double radius) {
    if (!(radius > 0) || radius > lat.period() / 2)
        throw std::invalid_argument("ball radius must lie in (0, period/2]");
    double dx = lat.spacing();
    int m = static_cast<int>(std::floor(radius / dx));
    double r2 = radius * radius;
    std::vector<std::array<int, 3>> out;
    if (lat.dim() == 2) {
        for (int i = -m; i <= m; ++i)
            for (int j = -m; j <= m; ++j)
                if ((i * i + j * j) * dx * dx <= r2) out.push_back({i, j, 0});
    } else {
        for (int i = -m; i <= m; ++i)
            for (int j = -m; j <= m; ++j)
                for (int k = -m; k <= m; ++k)
                    if ((i * i + j * j + k * k) * dx * dx <= r2) out.push_back({i, j, k});
    }
    return out;
}

}  // namespace hflow
