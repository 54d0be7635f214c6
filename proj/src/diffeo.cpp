#include "hflow/diffeo.hpp"

#include <cmath>
#include <stdexcept>

#include "hflow/stencil.hpp"

namespace hflow {

void interpolate(const Field& f, const std::array<double, 3>& pos, double* out) {
    const Lattice& lat = f.lattice();
    int d = lat.dim();
    int n = lat.n();
    double dx = lat.spacing();
    int base[3] = {0, 0, 0};
    double frac[3] = {0, 0, 0};
    for (int a = 0; a < d; ++a) {
        double xi = pos[a] / dx;
        double fl = std::floor(xi);
        base[a] = static_cast<int>(fl) % n;
        if (base[a] < 0) base[a] += n;
        frac[a] = xi - fl;
    }
    int corners = 1 << d;
    for (int c = 0; c < f.ncomp(); ++c) out[c] = 0.0;
    for (int m = 0; m < corners; ++m) {
        double w = 1.0;
        std::array<int, 3> crd{0, 0, 0};
        for (int a = 0; a < d; ++a) {
            int bit = (m >> a) & 1;
            crd[a] = lat.wrap(base[a] + bit);
            w *= bit ? frac[a] : 1.0 - frac[a];
        }
        std::size_t node = lat.index(crd);
        for (int c = 0; c < f.ncomp(); ++c) out[c] += w * f.at(c, node);
    }
}

namespace {

struct SeedState {
    std::array<double, 3> x{};
    std::array<std::array<double, 3>, 3> J{};
};

// velocity and its spatial derivative at (x, s) with linear time interpolation
// between the two endpoint snapshots
struct IntervalField {
    const Field* w0;
    const Field* w1;
    const Field* dw0;  // Raw d*d planes, dw[a*d+i] = d_a W^i
    const Field* dw1;
    double t0, t1;

    void eval(const std::array<double, 3>& x, double t, double vel[3], double grad[3][3],
              int dim) const {
        double u = (t1 > t0) ? (t - t0) / (t1 - t0) : 0.0;
        double a0[3], a1[3], g0[9], g1[9];
        interpolate(*w0, x, a0);
        interpolate(*w1, x, a1);
        interpolate(*dw0, x, g0);
        interpolate(*dw1, x, g1);
        for (int i = 0; i < dim; ++i) vel[i] = (1 - u) * a0[i] + u * a1[i];
        for (int a = 0; a < dim; ++a)
            for (int i = 0; i < dim; ++i)
                grad[a][i] = (1 - u) * g0[a * dim + i] + u * g1[a * dim + i];
    }
};

Field w_gradient(const Field& w) {
    const Lattice& lat = w.lattice();
    int d = lat.dim();
    Field out = Field::raw(lat, d * d);
    for (int a = 0; a < d; ++a)
        for (int i = 0; i < d; ++i) partial_plane(lat, w.data(i), a, 2, out.data(a * d + i));
    return out;
}

}  // namespace

DiffeoTrace integrate_diffeo(const std::vector<WSample>& w_series,
                             const std::vector<std::array<double, 3>>& seeds, int substeps) {
    if (w_series.size() < 2) throw std::invalid_argument("integrate_diffeo needs >= 2 snapshots");
    const Lattice& lat = w_series.front().w.lattice();
    int d = lat.dim();
    double L = lat.period();

    DiffeoTrace trace;
    trace.times.reserve(w_series.size());
    trace.positions.assign(seeds.size(), {});
    trace.jacobians.assign(seeds.size(), {});

    std::vector<SeedState> st(seeds.size());
    for (std::size_t s = 0; s < seeds.size(); ++s) {
        st[s].x = seeds[s];
        for (int i = 0; i < 3; ++i) st[s].J[i][i] = 1.0;
    }
    auto record = [&](double t) {
        trace.times.push_back(t);
        for (std::size_t s = 0; s < seeds.size(); ++s) {
            auto xm = st[s].x;
            for (int a = 0; a < d; ++a) xm[a] = std::fmod(std::fmod(xm[a], L) + L, L);
            trace.positions[s].push_back(xm);
            trace.jacobians[s].push_back(st[s].J);
        }
    };
    record(w_series.front().t);

    Field dw_cur = w_gradient(w_series.front().w);
    for (std::size_t k = 0; k + 1 < w_series.size(); ++k) {
        Field dw_next = w_gradient(w_series[k + 1].w);
        IntervalField iv{&w_series[k].w, &w_series[k + 1].w, &dw_cur, &dw_next,
                         w_series[k].t, w_series[k + 1].t};
        double h = (iv.t1 - iv.t0) / substeps;
        for (int m = 0; m < substeps; ++m) {
            double t = iv.t0 + m * h;
            for (auto& seed : st) {
                // rk4 on the joint (position, Jacobian) system
                auto deriv = [&](const SeedState& y, double tt, SeedState& dy) {
                    double vel[3], grad[3][3];
                    iv.eval(y.x, tt, vel, grad, d);
                    for (int i = 0; i < d; ++i) dy.x[i] = vel[i];
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j) {
                            double s = 0;
                            for (int a = 0; a < d; ++a) s += grad[a][i] * y.J[a][j];
                            dy.J[i][j] = s;
                        }
                };
                auto advance = [&](const SeedState& y, const SeedState& k_, double f) {
                    SeedState r = y;
                    for (int i = 0; i < d; ++i) r.x[i] += f * k_.x[i];
                    for (int i = 0; i < d; ++i)
                        for (int j = 0; j < d; ++j) r.J[i][j] += f * k_.J[i][j];
                    return r;
                };
                SeedState k1, k2, k3, k4;
                deriv(seed, t, k1);
                deriv(advance(seed, k1, h / 2), t + h / 2, k2);
                deriv(advance(seed, k2, h / 2), t + h / 2, k3);
                deriv(advance(seed, k3, h), t + h, k4);
                for (int i = 0; i < d; ++i)
                    seed.x[i] += h / 6.0 * (k1.x[i] + 2 * k2.x[i] + 2 * k3.x[i] + k4.x[i]);
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j)
                        seed.J[i][j] +=
                            h / 6.0 * (k1.J[i][j] + 2 * k2.J[i][j] + 2 * k3.J[i][j] + k4.J[i][j]);
            }
        }
        record(iv.t1);
        dw_cur = std::move(dw_next);
    }
    return trace;
}

}  // namespace hflow
