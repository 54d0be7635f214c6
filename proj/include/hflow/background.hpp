#pragma once

#include <memory>
#include <optional>
#include <string>

#include "hflow/field.hpp"

namespace hflow {

/// Fixed reference geometry h with precomputed connection and curvature.
/// Immutable for the lifetime of a run; the flat fast-path skips every
/// h-dependent term in the flow assembly.
struct BackgroundGeometry {
    Field h;                 // Sym2
    Field h_inv;             // Sym2
    Field christoffel_tilde; // FreeSym2 (zero when flat)
    Field riemann_tilde;     // Full4, R~^l_ijk (zero when flat)
    /// Lowered-and-raised coupling tensor U[j][k][p][l] = h^{pq} h_{jm} R~^m_kql,
    /// the combination entering the flow's curvature terms. Full4 layout.
    Field coupling;
    bool is_flat = true;
    double sup_riemann = 0.0; // sup-node |R~m|_h
    bool hypothesis_ok = true; // sup |R~m| <= 1
    std::string warning;      // set when the curvature hypothesis fails

    const Lattice& lattice() const { return h.lattice(); }
};

/// h = delta: zero Christoffels and curvature.
BackgroundGeometry make_flat(const Lattice& lat);

/// Precompute connection and curvature of a smooth sampled metric h. The
/// curvature bound |R~m| <= 1 is checked numerically; violation is recorded
/// as a warning (run may proceed with hypothesis_ok = false).
BackgroundGeometry make_from_metric(const Field& h, int stencil_order);

}  // namespace hflow
