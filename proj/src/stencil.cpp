#include "hflow/stencil.hpp"

#include <array>
#include <stdexcept>

#include "hflow/parallel.hpp"

namespace hflow {

namespace {

void check_axis(const Field& f, int axis) {
    if (axis < 0 || axis >= f.lattice().dim()) throw std::out_of_range("stencil axis out of range");
}

void check_order(int order) {
    if (order != 2 && order != 4) throw std::invalid_argument("stencil order must be 2 or 4");
}

template <class Fn>
void for_each_line(const Lattice& lat, int axis, Fn&& fn) {
    int dim = lat.dim();
    int n = lat.n();
    std::array<int, 2> other{};
    int no = 0;
    for (int a = 0; a < dim; ++a)
        if (a != axis) other[no++] = a;
    if (dim == 2) {
        for (int i = 0; i < n; ++i) fn(static_cast<std::size_t>(i) * lat.stride(other[0]));
    } else {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                fn(static_cast<std::size_t>(i) * lat.stride(other[0]) +
                   static_cast<std::size_t>(j) * lat.stride(other[1]));
    }
}

void d1_line(const double* f, double* out, std::size_t base, std::size_t s, int n, int order, double dx) {
    auto idx = [&](int i) { return base + static_cast<std::size_t>(i) * s; };
    if (order == 2) {
        double c = 1.0 / (2.0 * dx);
        out[idx(0)] = (f[idx(1)] - f[idx(n - 1)]) * c;
        for (int i = 1; i < n - 1; ++i) out[idx(i)] = (f[idx(i + 1)] - f[idx(i - 1)]) * c;
        out[idx(n - 1)] = (f[idx(0)] - f[idx(n - 2)]) * c;
    } else {
        // grouped as differences so constants cancel exactly
        double c = 1.0 / (12.0 * dx);
        auto v = [&](int i) { return f[idx((i % n + n) % n)]; };
        for (int i = 0; i < 2; ++i)
            out[idx(i)] = (8 * (v(i + 1) - v(i - 1)) - (v(i + 2) - v(i - 2))) * c;
        for (int i = 2; i < n - 2; ++i)
            out[idx(i)] =
                (8 * (f[idx(i + 1)] - f[idx(i - 1)]) - (f[idx(i + 2)] - f[idx(i - 2)])) * c;
        for (int i = n - 2; i < n; ++i)
            out[idx(i)] = (8 * (v(i + 1) - v(i - 1)) - (v(i + 2) - v(i - 2))) * c;
    }
}

void d2_line(const double* f, double* out, std::size_t base, std::size_t s, int n, int order, double dx) {
    auto idx = [&](int i) { return base + static_cast<std::size_t>(i) * s; };
    if (order == 2) {
        double c = 1.0 / (dx * dx);
        auto stencil = [&](int im, int i0, int ip) {
            return ((f[idx(ip)] - f[idx(i0)]) + (f[idx(im)] - f[idx(i0)])) * c;
        };
        out[idx(0)] = stencil(n - 1, 0, 1);
        for (int i = 1; i < n - 1; ++i) out[idx(i)] = stencil(i - 1, i, i + 1);
        out[idx(n - 1)] = stencil(n - 2, n - 1, 0);
    } else {
        double c = 1.0 / (12.0 * dx * dx);
        auto v = [&](int i) { return f[idx((i % n + n) % n)]; };
        auto stencil = [&](auto at, int i) {
            double f0 = at(i);
            return (16 * ((at(i + 1) - f0) + (at(i - 1) - f0)) -
                    ((at(i + 2) - f0) + (at(i - 2) - f0))) *
                   c;
        };
        auto direct = [&](int i) { return f[idx(i)]; };
        for (int i = 0; i < 2; ++i) out[idx(i)] = stencil(v, i);
        for (int i = 2; i < n - 2; ++i) out[idx(i)] = stencil(direct, i);
        for (int i = n - 2; i < n; ++i) out[idx(i)] = stencil(v, i);
    }
}

}  // namespace

void partial_plane(const Lattice& lat, const double* f, int axis, int order, double* out) {
    std::size_t s = lat.stride(axis);
    int n = lat.n();
    double dx = lat.spacing();
    for_each_line(lat, axis, [&](std::size_t base) { d1_line(f, out, base, s, n, order, dx); });
}

void second_partial_plane(const Lattice& lat, const double* f, int axis, int order, double* out) {
    std::size_t s = lat.stride(axis);
    int n = lat.n();
    double dx = lat.spacing();
    for_each_line(lat, axis, [&](std::size_t base) { d2_line(f, out, base, s, n, order, dx); });
}

Field partial(const Field& f, int axis, int order) {
    check_axis(f, axis);
    check_order(order);
    Field out(f.lattice(), f.shape());
    for (int c = 0; c < f.ncomp(); ++c) partial_plane(f.lattice(), f.data(c), axis, order, out.data(c));
    return out;
}

Field second_partial(const Field& f, int a, int b, int order) {
    check_axis(f, a);
    check_axis(f, b);
    check_order(order);
    if (a == b) {
        Field out(f.lattice(), f.shape());
        for (int c = 0; c < f.ncomp(); ++c)
            second_partial_plane(f.lattice(), f.data(c), a, order, out.data(c));
        return out;
    }
    // composed first differences; inner pass along the smaller axis keeps the
    // (a,b) and (b,a) results identical by construction
    int inner = std::min(a, b), outer = std::max(a, b);
    Field tmp = partial(f, inner, order);
    return partial(tmp, outer, order);
}

Field gradient_sym2(const Field& g, int order) {
    const Lattice& lat = g.lattice();
    int dim = lat.dim();
    int ns = g.shape().nsym();
    Field out = Field::free_sym2(lat);
    for (int a = 0; a < dim; ++a)
        for (int c = 0; c < ns; ++c)
            partial_plane(lat, g.data(c), a, order, out.data(a * ns + c));
    return out;
}

Field gradient_scalar(const Field& f, int order) {
    const Lattice& lat = f.lattice();
    Field out = Field::vector(lat);
    for (int a = 0; a < lat.dim(); ++a) partial_plane(lat, f.data(0), a, order, out.data(a));
    return out;
}

Field hessian_sym2(const Field& g, int order) {
    const Lattice& lat = g.lattice();
    int dim = lat.dim();
    int ns = g.shape().nsym();
    Field out = Field::sym_sym(lat);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            Field d = second_partial(g, a, b, order);
            int pair = sym_index(dim, a, b);
            for (int c = 0; c < ns; ++c) {
                std::copy(d.data(c), d.data(c) + lat.nodes(), out.data(pair * ns + c));
            }
        }
    return out;
}

Field hessian_scalar(const Field& f, int order) {
    const Lattice& lat = f.lattice();
    int dim = lat.dim();
    Field out = Field::sym2(lat);
    for (int a = 0; a < dim; ++a)
        for (int b = a; b < dim; ++b) {
            Field d = second_partial(f, a, b, order);
            std::copy(d.data(0), d.data(0) + lat.nodes(), out.data(sym_index(dim, a, b)));
        }
    return out;
}

}  // namespace hflow
