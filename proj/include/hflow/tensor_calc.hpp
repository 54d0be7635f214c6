#pragma once

#include <cstddef>
#include <optional>

#include "hflow/field.hpp"
#include "hflow/smallmat.hpp"

namespace hflow {

/// Determinant floor below which a node matrix is treated as singular.
inline constexpr double kDetFloor = 1e-12;

/// Nodewise extremes of the generalized eigenvalues of the pencil (g, h).
struct BiLipschitzReport {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::size_t argmin = 0;
    std::size_t argmax = 0;
};

/// Load/store between a Sym2 field and a node matrix.
SymMat sym_at_node(const Field& g, std::size_t node);
void store_sym(Field& g, std::size_t node, const SymMat& m);

/// Nodewise symmetric inverse by cofactors. Throws SingularMetric when a
/// node determinant falls at or below `det_floor`.
Field inverse(const Field& g, double det_floor = kDetFloor);
void inverse_into(const Field& g, Field& out, double det_floor = kDetFloor);

/// Min/max over nodes of the eigenvalues of the node matrices of g
/// (coordinate spectrum, i.e. the pencil against delta).
BiLipschitzReport coordinate_spectrum(const Field& g);

/// Christoffel symbols Gamma^k_pq = 1/2 g^{kl}(d_p g_ql + d_q g_pl - d_l g_pq),
/// FreeSym2 layout with k free. `ginv` may be supplied to skip recomputation.
Field christoffel(const Field& g, int order, const Field* ginv = nullptr);

/// R^l_ijk = d_i Gam^l_jk - d_j Gam^l_ik + Gam^l_ip Gam^p_jk - Gam^l_jp Gam^p_ik.
Field riemann(const Field& g, int order);
Field riemann_from_christoffel(const Field& g, const Field& gamma, int order);

/// Ric_jk = R^l_ljk, symmetrized over (j,k); Sym2 output.
Field ricci(const Field& g, int order);
Field ricci_from_riemann(const Field& riem);

/// Scalar curvature g^{jk} Ric_jk.
Field scalar_curv(const Field& g, int order);

/// Extremes of the (g, h) pencil over nodes; order parameters irrelevant
/// (pointwise). h = identity uses the direct symmetric path.
BiLipschitzReport bilipschitz(const Field& g, const Field& h);

/// Pointwise norm of a tensor field with every slot contracted by h: lower
/// slots by h^{-1}, upper slots by h itself. Bit a of `up_mask` marks slot a
/// as contravariant. Slot order follows the layout (FreeSym2: free slot then
/// the symmetric pair; Full4: l, i, j, k). For h = delta this equals the
/// Euclidean component norm with symmetric multiplicities.
Field tensor_norm_h(const Field& t, const Field& h, unsigned up_mask = 0);

/// Fast path of tensor_norm_h for h = delta.
Field tensor_norm_flat(const Field& t);

/// h^{ij} g_ij  and  g^{ij} h_ij.
Field trace_h_g(const Field& g, const Field& h);
Field trace_g_h(const Field& g, const Field& h);

}  // namespace hflow
