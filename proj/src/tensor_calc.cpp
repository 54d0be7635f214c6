#include "hflow/tensor_calc.hpp"

#include <cmath>
#include <stdexcept>

#include "hflow/errors.hpp"
#include "hflow/stencil.hpp"

namespace hflow {

SymMat sym_at_node(const Field& g, std::size_t node) {
    SymMat m;
    int d = g.lattice().dim();
    m.dim = d;
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) m.a[i][j] = m.a[j][i] = g.at(sym_index(d, i, j), node);
    return m;
}

void store_sym(Field& g, std::size_t node, const SymMat& m) {
    int d = g.lattice().dim();
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) g.at(sym_index(d, i, j), node) = m.a[i][j];
}

void inverse_into(const Field& g, Field& out, double det_floor) {
    const Lattice& lat = g.lattice();
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        SymMat m = sym_at_node(g, node);
        double d = det(m);
        if (!(d > det_floor)) throw SingularMetric(node, d, "inverse");
        store_sym(out, node, inverse(m, d));
    }
}

Field inverse(const Field& g, double det_floor) {
    Field out = Field::sym2(g.lattice());
    inverse_into(g, out, det_floor);
    return out;
}

BiLipschitzReport coordinate_spectrum(const Field& g) {
    BiLipschitzReport r;
    r.lambda_min = 1e300;
    r.lambda_max = -1e300;
    for (std::size_t node = 0; node < g.nodes(); ++node) {
        double lo, hi;
        eig_range(sym_at_node(g, node), lo, hi);
        if (lo < r.lambda_min) { r.lambda_min = lo; r.argmin = node; }
        if (hi > r.lambda_max) { r.lambda_max = hi; r.argmax = node; }
    }
    return r;
}

Field christoffel(const Field& g, int order, const Field* ginv_opt) {
    const Lattice& lat = g.lattice();
    int d = lat.dim();
    int ns = d * (d + 1) / 2;
    Field ginv_local = ginv_opt ? Field::scalar(lat) : inverse(g);
    const Field& gi = ginv_opt ? *ginv_opt : ginv_local;
    Field dg = gradient_sym2(g, order);
    Field out = Field::free_sym2(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        for (int k = 0; k < d; ++k)
            for (int p = 0; p < d; ++p)
                for (int q = p; q < d; ++q) {
                    double s = 0;
                    for (int l = 0; l < d; ++l) {
                        double t = dg.at(p * ns + sym_index(d, q, l), node) +
                                   dg.at(q * ns + sym_index(d, p, l), node) -
                                   dg.at(l * ns + sym_index(d, p, q), node);
                        s += gi.at(sym_index(d, k, l), node) * t;
                    }
                    out.at(k * ns + sym_index(d, p, q), node) = 0.5 * s;
                }
    }
    return out;
}

Field riemann_from_christoffel(const Field& g, const Field& gamma, int order) {
    const Lattice& lat = g.lattice();
    int d = lat.dim();
    int ns = d * (d + 1) / 2;
    std::vector<Field> dgam;
    dgam.reserve(d);
    for (int a = 0; a < d; ++a) dgam.push_back(partial(gamma, a, order));
    Field out = Field::full4(lat);
    auto gam = [&](std::size_t node, int l, int p, int q) {
        return gamma.at(l * ns + sym_index(d, p, q), node);
    };
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        for (int l = 0; l < d; ++l)
            for (int i = 0; i < d; ++i)
                for (int j = 0; j < d; ++j)
                    for (int k = 0; k < d; ++k) {
                        double s = dgam[i].at(l * ns + sym_index(d, j, k), node) -
                                   dgam[j].at(l * ns + sym_index(d, i, k), node);
                        for (int p = 0; p < d; ++p)
                            s += gam(node, l, i, p) * gam(node, p, j, k) -
                                 gam(node, l, j, p) * gam(node, p, i, k);
                        out.at(((l * d + i) * d + j) * d + k, node) = s;
                    }
    }
    return out;
}

Field riemann(const Field& g, int order) {
    Field gamma = christoffel(g, order);
    return riemann_from_christoffel(g, gamma, order);
}

Field ricci_from_riemann(const Field& riem) {
    const Lattice& lat = riem.lattice();
    int d = lat.dim();
    Field out = Field::sym2(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node)
        for (int j = 0; j < d; ++j)
            for (int k = j; k < d; ++k) {
                double a = 0, b = 0;
                for (int l = 0; l < d; ++l) {
                    a += riem.at(((l * d + l) * d + j) * d + k, node);
                    b += riem.at(((l * d + l) * d + k) * d + j, node);
                }
                out.at(sym_index(d, j, k), node) = 0.5 * (a + b);
            }
    return out;
}

Field ricci(const Field& g, int order) { return ricci_from_riemann(riemann(g, order)); }

Field scalar_curv(const Field& g, int order) {
    const Lattice& lat = g.lattice();
    int d = lat.dim();
    Field ric = ricci(g, order);
    Field gi = inverse(g);
    Field out = Field::scalar(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        double s = 0;
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                s += gi.at(sym_index(d, j, k), node) * ric.at(sym_index(d, j, k), node);
        out.at(0, node) = s;
    }
    return out;
}

BiLipschitzReport bilipschitz(const Field& g, const Field& h) {
    if (!(g.lattice() == h.lattice())) throw std::invalid_argument("bilipschitz: lattice mismatch");
    BiLipschitzReport r;
    r.lambda_min = 1e300;
    r.lambda_max = -1e300;
    for (std::size_t node = 0; node < g.nodes(); ++node) {
        SymMat gm = sym_at_node(g, node);
        SymMat hm = sym_at_node(h, node);
        double hd = det(hm);
        if (!(hd > kDetFloor)) throw SingularMetric(node, hd, "bilipschitz (h)");
        double lo, hi;
        generalized_eig_range(gm, hm, hd, lo, hi);
        if (lo < r.lambda_min) { r.lambda_min = lo; r.argmin = node; }
        if (hi > r.lambda_max) { r.lambda_max = hi; r.argmax = node; }
    }
    return r;
}

namespace {

int tensor_rank(TensorKind k) {
    switch (k) {
        case TensorKind::Scalar: return 0;
        case TensorKind::Vector: return 1;
        case TensorKind::Sym2: return 2;
        case TensorKind::FreeSym2: return 3;
        case TensorKind::SymSym: return 4;
        case TensorKind::Full4: return 4;
        default: throw std::invalid_argument("tensor norm: unsupported layout");
    }
}

// component index of a full multi-index in the packed layout
int comp_of(const TensorShape& sh, const int* I) {
    int d = sh.dim;
    int ns = d * (d + 1) / 2;
    switch (sh.kind) {
        case TensorKind::Scalar: return 0;
        case TensorKind::Vector: return I[0];
        case TensorKind::Sym2: return sym_index(d, I[0], I[1]);
        case TensorKind::FreeSym2: return I[0] * ns + sym_index(d, I[1], I[2]);
        case TensorKind::SymSym: return sym_index(d, I[0], I[1]) * ns + sym_index(d, I[2], I[3]);
        case TensorKind::Full4: return ((I[0] * d + I[1]) * d + I[2]) * d + I[3];
        default: return 0;
    }
}

}  // namespace

Field tensor_norm_flat(const Field& t) {
    const Lattice& lat = t.lattice();
    int d = lat.dim();
    int rank = tensor_rank(t.shape().kind);
    Field out = Field::scalar(lat);
    // enumerate full multi-indices once
    std::vector<int> comps;
    int count = 1;
    for (int r = 0; r < rank; ++r) count *= d;
    comps.reserve(count);
    std::array<int, 4> I{};
    for (int flat = 0; flat < count; ++flat) {
        int rem = flat;
        for (int r = rank - 1; r >= 0; --r) { I[r] = rem % d; rem /= d; }
        comps.push_back(comp_of(t.shape(), I.data()));
    }
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        double s = 0;
        for (int c : comps) {
            double v = t.at(c, node);
            s += v * v;
        }
        out.at(0, node) = std::sqrt(s);
    }
    return out;
}

Field tensor_norm_h(const Field& t, const Field& h, unsigned up_mask) {
    const Lattice& lat = t.lattice();
    if (!(lat == h.lattice())) throw std::invalid_argument("tensor_norm_h: lattice mismatch");
    int d = lat.dim();
    int rank = tensor_rank(t.shape().kind);
    Field out = Field::scalar(lat);
    int count = 1;
    for (int r = 0; r < rank; ++r) count *= d;
    std::vector<int> comps(count);
    std::array<int, 4> I{};
    for (int flat = 0; flat < count; ++flat) {
        int rem = flat;
        for (int r = rank - 1; r >= 0; --r) { I[r] = rem % d; rem /= d; }
        comps[flat] = comp_of(t.shape(), I.data());
    }
    std::vector<double> full(count), half(count);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        SymMat hm = sym_at_node(h, node);
        double hd = det(hm);
        if (!(hd > kDetFloor)) throw SingularMetric(node, hd, "tensor_norm_h");
        SymMat hi = inverse(hm, hd);
        for (int f = 0; f < count; ++f) full[f] = t.at(comps[f], node);
        // contract each slot with h (upper) or h^{-1} (lower)
        int stride = count;
        for (int slot = 0; slot < rank; ++slot) {
            stride /= d;
            const SymMat& m = (up_mask >> slot) & 1u ? hm : hi;
            for (int f = 0; f < count; ++f) {
                int pos = (f / stride) % d;
                int base = f - pos * stride;
                double s = 0;
                for (int mth = 0; mth < d; ++mth) s += m.a[pos][mth] * full[base + mth * stride];
                half[f] = s;
            }
            std::swap(full, half);
        }
        double s = 0;
        for (int f = 0; f < count; ++f) s += full[f] * t.at(comps[f], node);
        out.at(0, node) = std::sqrt(std::max(0.0, s));
    }
    return out;
}

Field trace_h_g(const Field& g, const Field& h) {
    const Lattice& lat = g.lattice();
    int d = lat.dim();
    Field hi = inverse(h);
    Field out = Field::scalar(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        double s = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j)
                s += hi.at(sym_index(d, i, j), node) * g.at(sym_index(d, i, j), node);
        out.at(0, node) = s;
    }
    return out;
}

Field trace_g_h(const Field& g, const Field& h) { return trace_h_g(h, g); }

}  // namespace hflow
