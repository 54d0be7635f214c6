#include "hflow/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include "hflow/parallel.hpp"

namespace hflow {

double global_integral(const Field& scalar) {
    if (scalar.shape().kind != TensorKind::Scalar)
        throw std::invalid_argument("global_integral expects a scalar field");
    const Lattice& lat = scalar.lattice();
    double cell = std::pow(lat.spacing(), lat.dim());
    return deterministic_sum(scalar.comp(0)) * cell;
}

Ball::Ball(const Lattice& lat, double radius)
    : radius_(radius), offsets_(ball_offsets(lat, radius)) {}

double Ball::volume(const Lattice& lat) const {
    return static_cast<double>(offsets_.size()) * std::pow(lat.spacing(), lat.dim());
}

void Ball::gather(const Lattice& lat, std::size_t center, std::vector<std::size_t>& out) const {
    out.clear();
    out.reserve(offsets_.size());
    auto c = lat.coords(center);
    for (const auto& o : offsets_) {
        std::array<int, 3> p = c;
        for (int a = 0; a < lat.dim(); ++a) p[a] = lat.wrap(p[a] + o[a]);
        out.push_back(lat.index(p));
    }
}

double ball_mean_p(const Field& scalar, std::size_t center, const Ball& ball, double p) {
    if (scalar.shape().kind != TensorKind::Scalar)
        throw std::invalid_argument("ball_mean_p expects a scalar field");
    if (p < 1.0) throw std::invalid_argument("ball_mean_p requires p >= 1");
    const Lattice& lat = scalar.lattice();
    const double* f = scalar.data(0);
    const auto& offs = ball.offsets();
    auto c = lat.coords(center);
    // fixed offset order -> deterministic pairwise sum
    double s = deterministic_sum(offs.size(), [&](std::size_t i) {
        std::array<int, 3> q = c;
        for (int a = 0; a < lat.dim(); ++a) q[a] = lat.wrap(q[a] + offs[i][a]);
        return std::pow(std::fabs(f[lat.index(q)]), p);
    });
    return std::pow(s / static_cast<double>(offs.size()), 1.0 / p);
}

double ball_mean_p(const Field& scalar, std::size_t center, double radius, double p) {
    Ball ball(scalar.lattice(), radius);
    return ball_mean_p(scalar, center, ball, p);
}

}  // namespace hflow
