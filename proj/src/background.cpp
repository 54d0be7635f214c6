#include "hflow/background.hpp"

#include <cmath>

#include "hflow/stencil.hpp"
#include "hflow/tensor_calc.hpp"

namespace hflow {

BackgroundGeometry make_flat(const Lattice& lat) {
    BackgroundGeometry bg{
        identity_metric(lat), identity_metric(lat), Field::free_sym2(lat),
        Field::full4(lat),    Field::full4(lat),    true,
        0.0,                  true,                 {}};
    return bg;
}

BackgroundGeometry make_from_metric(const Field& h, int stencil_order) {
    const Lattice& lat = h.lattice();
    int d = lat.dim();
    Field h_inv = inverse(h);
    Field gamma = christoffel(h, stencil_order, &h_inv);
    Field riem = riemann_from_christoffel(h, gamma, stencil_order);

    // coupling U[j][k][p][l] = h^{pq} h_{jm} R~^m_{kql}
    Field coupling = Field::full4(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        for (int j = 0; j < d; ++j)
            for (int k = 0; k < d; ++k)
                for (int p = 0; p < d; ++p)
                    for (int l = 0; l < d; ++l) {
                        double s = 0;
                        for (int q = 0; q < d; ++q)
                            for (int m = 0; m < d; ++m)
                                s += h_inv.at(sym_index(d, p, q), node) *
                                     h.at(sym_index(d, j, m), node) *
                                     riem.at(((m * d + k) * d + q) * d + l, node);
                        coupling.at(((j * d + k) * d + p) * d + l, node) = s;
                    }
    }

    Field rm_norm = tensor_norm_h(riem, h, /*up_mask=*/1u);
    double sup_rm = max_abs(rm_norm);
    bool flat = max_abs_diff(h, identity_metric(lat)) == 0.0;

    BackgroundGeometry bg{h,    h_inv, std::move(gamma), std::move(riem), std::move(coupling),
                          flat, sup_rm, sup_rm <= 1.0,   {}};
    if (!bg.hypothesis_ok)
        bg.warning = "curvature hypothesis violated: sup |Rm(h)| = " + std::to_string(sup_rm) + " > 1";
    return bg;
}

}  // namespace hflow
