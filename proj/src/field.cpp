#include "hflow/field.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>

namespace hflow {

int TensorShape::ncomp() const {
    switch (kind) {
        case TensorKind::Scalar: return 1;
        case TensorKind::Vector: return dim;
        case TensorKind::Sym2: return nsym();
        case TensorKind::FreeSym2: return dim * nsym();
        case TensorKind::SymSym: return nsym() * nsym();
        case TensorKind::Full4: return dim * dim * dim * dim;
        case TensorKind::Raw: return raw_ncomp;
    }
    return 0;
}

Field::Field(const Lattice& lat, TensorShape shape)
    : lat_(lat), shape_(shape), ncomp_(shape.ncomp()), nodes_(lat.nodes()),
      data_(static_cast<std::size_t>(shape.ncomp()) * lat.nodes(), 0.0) {
    if (shape.dim != lat.dim()) throw std::invalid_argument("field shape dim != lattice dim");
}

void Field::fill(double v) { std::fill(data_.begin(), data_.end(), v); }

bool Field::finite() const {
    for (double v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Field Field::translated(const std::array<int, 3>& shift) const {
    Field out(lat_, shape_);
    for (int c = 0; c < ncomp_; ++c) {
        const double* src = data(c);
        double* dst = out.data(c);
        for (std::size_t node = 0; node < nodes_; ++node) {
            auto crd = lat_.coords(node);
            for (int a = 0; a < lat_.dim(); ++a) crd[a] = lat_.wrap(crd[a] + shift[a]);
            dst[lat_.index(crd)] = src[node];
        }
    }
    return out;
}

Field identity_metric(const Lattice& lat) {
    Field g = Field::sym2(lat);
    for (int i = 0; i < lat.dim(); ++i) {
        double* c = g.data(sym_index(lat.dim(), i, i));
        std::fill(c, c + lat.nodes(), 1.0);
    }
    return g;
}

double max_abs_diff(const Field& a, const Field& b) {
    double m = 0;
    const auto& va = a.raw_values();
    const auto& vb = b.raw_values();
    for (std::size_t i = 0; i < va.size(); ++i) m = std::max(m, std::fabs(va[i] - vb[i]));
    return m;
}

double max_abs(const Field& a) {
    double m = 0;
    for (double v : a.raw_values()) m = std::max(m, std::fabs(v));
    return m;
}

}  // namespace hflow
