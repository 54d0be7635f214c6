#include "hflow/flow.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "hflow/errors.hpp"
#include "hflow/parallel.hpp"
#include "hflow/stencil.hpp"

namespace hflow {

namespace {

// sym_index lookup for dim <= 3
constexpr int SY3[3][3] = {{0, 1, 2}, {1, 3, 4}, {2, 4, 5}};
constexpr int SY2[2][2] = {{0, 1}, {1, 2}};

inline int sy(int dim, int i, int j) { return dim == 3 ? SY3[i][j] : SY2[i][j]; }

void axpy(Field& y, double a, const Field& x) {
    auto& yv = y.raw_values();
    const auto& xv = x.raw_values();
    for (std::size_t i = 0; i < yv.size(); ++i) yv[i] += a * xv[i];
}

/// min/max node eigenvalue scan with finiteness check; returns false with the
/// offending node on failure.
bool health_scan(const Field& g, double& mn, double& mx, std::size_t& bad) {
    int d = g.lattice().dim();
    int ns = d * (d + 1) / 2;
    mn = 1e300;
    mx = -1e300;
    for (std::size_t node = 0; node < g.nodes(); ++node) {
        for (int c = 0; c < ns; ++c)
            if (!std::isfinite(g.at(c, node))) { bad = node; return false; }
        double lo, hi;
        eig_range(sym_at_node(g, node), lo, hi);
        if (!(lo > kDetFloor)) { bad = node; return false; }
        mn = std::min(mn, lo);
        mx = std::max(mx, hi);
    }
    return true;
}

}  // namespace

FlowState::FlowState(Field g0, double t0) : t(t0), g(std::move(g0)) {
    std::size_t bad = 0;
    healthy = health_scan(g, min_eig, max_eig, bad);
}

struct RhsWorkspace {
    explicit RhsWorkspace(const Lattice& lat)
        : ginv(Field::sym2(lat)),
          dg(Field::free_sym2(lat)),
          ddg(Field::sym_sym(lat)) {}
    Field ginv;
    Field dg;   // d_a g_ij (plain partials)
    Field ddg;  // d_a d_b g_ij
    // general-background extras, allocated on first use
    std::unique_ptr<Field> a_corr;  // A[q][ij] = -Gam~^m_qi g_mj - Gam~^m_qj g_im
    std::unique_ptr<Field> c1;      // covariant first derivative dg + A
    std::unique_ptr<Field> da;      // d_p A[q][ij], Raw d*d*ns
};

std::shared_ptr<RhsWorkspace> make_workspace(const Lattice& lat) {
    return std::make_shared<RhsWorkspace>(lat);
}

Field hflow_rhs(const Field& g, const BackgroundGeometry& bg, int order, RhsWorkspace* ws) {
    const Lattice& lat = g.lattice();
    const int d = lat.dim();
    const int ns = d * (d + 1) / 2;
    const std::size_t N = lat.nodes();

    std::shared_ptr<RhsWorkspace> local;
    if (!ws) {
        local = make_workspace(lat);
        ws = local.get();
    }
    inverse_into(g, ws->ginv);
    for (int a = 0; a < d; ++a)
        for (int c = 0; c < ns; ++c)
            partial_plane(lat, g.data(c), a, order, ws->dg.data(a * ns + c));
    for (int a = 0; a < d; ++a)
        for (int b = a; b < d; ++b) {
            int pair = sy(d, a, b);
            if (a == b) {
                for (int c = 0; c < ns; ++c)
                    second_partial_plane(lat, g.data(c), a, order, ws->ddg.data(pair * ns + c));
            } else {
                // compose: outer partial of the stored inner partial
                for (int c = 0; c < ns; ++c)
                    partial_plane(lat, ws->dg.data(a * ns + c), b, order, ws->ddg.data(pair * ns + c));
            }
        }

    const bool flat = bg.is_flat;
    const Field* c1_field = &ws->dg;
    if (!flat) {
        if (!ws->a_corr) {
            ws->a_corr = std::make_unique<Field>(Field::free_sym2(lat));
            ws->c1 = std::make_unique<Field>(Field::free_sym2(lat));
            ws->da = std::make_unique<Field>(Field::raw(lat, d * d * ns));
        }
        const Field& gam = bg.christoffel_tilde;
        for (std::size_t node = 0; node < N; ++node)
            for (int q = 0; q < d; ++q)
                for (int i = 0; i < d; ++i)
                    for (int j = i; j < d; ++j) {
                        double s = 0;
                        for (int m = 0; m < d; ++m)
                            s -= gam.at(m * ns + sy(d, q, i), node) * g.at(sy(d, m, j), node) +
                                 gam.at(m * ns + sy(d, q, j), node) * g.at(sy(d, i, m), node);
                        ws->a_corr->at(q * ns + sy(d, i, j), node) = s;
                    }
        for (int c = 0; c < d * ns; ++c) {
            const double* av = ws->a_corr->data(c);
            const double* dv = ws->dg.data(c);
            double* cv = ws->c1->data(c);
            for (std::size_t node = 0; node < N; ++node) cv[node] = dv[node] + av[node];
        }
        for (int p = 0; p < d; ++p)
            for (int c = 0; c < d * ns; ++c)
                partial_plane(lat, ws->a_corr->data(c), p, order, ws->da->data(p * d * ns + c));
        c1_field = ws->c1.get();
    }

    Field out = Field::sym2(lat);

    // plane pointers hoisted out of the node loop
    std::vector<const double*> GI(ns), DD(ns * ns), C1(d * ns), GLO(ns);
    for (int c = 0; c < ns; ++c) GI[c] = ws->ginv.data(c);
    for (int c = 0; c < ns * ns; ++c) DD[c] = ws->ddg.data(c);
    for (int c = 0; c < d * ns; ++c) C1[c] = c1_field->data(c);
    for (int c = 0; c < ns; ++c) GLO[c] = g.data(c);
    std::vector<double*> OUT(ns);
    for (int c = 0; c < ns; ++c) OUT[c] = out.data(c);

    parallel_for(N, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t node = lo; node < hi; ++node) {
        double gi[6];
        for (int c = 0; c < ns; ++c) gi[c] = GI[c][node];
        double Dv[3][6];
        for (int a = 0; a < d; ++a)
            for (int c = 0; c < ns; ++c) Dv[a][c] = C1[a * ns + c][node];
        double acc[6] = {0, 0, 0, 0, 0, 0};

        // principal part g^{pq} dd_pq g_ij (plain partial block)
        for (int p = 0; p < d; ++p)
            for (int q = p; q < d; ++q) {
                double w = (p == q ? 1.0 : 2.0) * gi[sy(d, p, q)];
                int pair = sy(d, p, q) * ns;
                for (int c = 0; c < ns; ++c) acc[c] += w * DD[pair + c][node];
            }

        // quadratic gradient terms, coefficients (+1, +2, -2, -2, -2)
        for (int k = 0; k < d; ++k)
            for (int l = 0; l < d; ++l) {
                double gkl = gi[sy(d, k, l)];
                for (int p = 0; p < d; ++p)
                    for (int q = 0; q < d; ++q) {
                        double c05 = 0.5 * gkl * gi[sy(d, p, q)];
                        for (int i = 0; i < d; ++i)
                            for (int j = i; j < d; ++j) {
                                double t = Dv[i][sy(d, p, k)] * Dv[j][sy(d, q, l)] +
                                           2.0 * Dv[k][sy(d, j, p)] * Dv[q][sy(d, i, l)] -
                                           2.0 * Dv[k][sy(d, j, p)] * Dv[l][sy(d, i, q)] -
                                           2.0 * Dv[j][sy(d, p, k)] * Dv[l][sy(d, i, q)] -
                                           2.0 * Dv[i][sy(d, p, k)] * Dv[l][sy(d, q, j)];
                                acc[sy(d, i, j)] += c05 * t;
                            }
                    }
            }

        if (!flat) {
            // covariant corrections to the principal part:
            //   g^{pq} ( d_p A_qij - Gam~^m_pq C1_mij - Gam~^m_pi C1_qmj - Gam~^m_pj C1_qim )
            const Field& gam = bg.christoffel_tilde;
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    double gpq = gi[sy(d, p, q)];
                    for (int i = 0; i < d; ++i)
                        for (int j = i; j < d; ++j) {
                            double corr = ws->da->at(p * d * ns + q * ns + sy(d, i, j), node);
                            for (int m = 0; m < d; ++m) {
                                corr -= gam.at(m * ns + sy(d, p, q), node) * Dv[m][sy(d, i, j)];
                                corr -= gam.at(m * ns + sy(d, p, i), node) * Dv[q][sy(d, m, j)];
                                corr -= gam.at(m * ns + sy(d, p, j), node) * Dv[q][sy(d, i, m)];
                            }
                            acc[sy(d, i, j)] += gpq * corr;
                        }
                }
            // curvature couplings via U[j][k][p][l] = h^{pq} h_{jm} R~^m_kql:
            //   + g^{kl} ( g_ip U[j][k][p][l] + g_jp U[i][k][p][l] )
            for (int k = 0; k < d; ++k)
                for (int l = 0; l < d; ++l) {
                    double gkl = gi[sy(d, k, l)];
                    for (int p = 0; p < d; ++p)
                        for (int i = 0; i < d; ++i)
                            for (int j = i; j < d; ++j) {
                                double u_j = bg.coupling.at(((j * d + k) * d + p) * d + l, node);
                                double u_i = bg.coupling.at(((i * d + k) * d + p) * d + l, node);
                                acc[sy(d, i, j)] += gkl * (GLO[sy(d, i, p)][node] * u_j +
                                                           GLO[sy(d, j, p)][node] * u_i);
                            }
                }
        }

        for (int c = 0; c < ns; ++c) OUT[c][node] = acc[c];
    }
    });
    return out;
}

Field deturck_vector(const Field& g, const BackgroundGeometry& bg, int order) {
    const Lattice& lat = g.lattice();
    int d = lat.dim();
    int ns = d * (d + 1) / 2;
    Field ginv = inverse(g);
    Field gamma = christoffel(g, order, &ginv);
    Field out = Field::vector(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node)
        for (int k = 0; k < d; ++k) {
            double s = 0;
            for (int p = 0; p < d; ++p)
                for (int q = 0; q < d; ++q) {
                    double dgam = gamma.at(k * ns + sy(d, p, q), node);
                    if (!bg.is_flat) dgam -= bg.christoffel_tilde.at(k * ns + sy(d, p, q), node);
                    s += ginv.at(sy(d, p, q), node) * dgam;
                }
            out.at(k, node) = s;
        }
    return out;
}

Field geometric_rhs(const Field& g, const BackgroundGeometry& bg, int order) {
    const Lattice& lat = g.lattice();
    int d = lat.dim();
    int ns = d * (d + 1) / 2;
    Field ginv = inverse(g);
    Field gamma = christoffel(g, order, &ginv);
    Field ric = ricci_from_riemann(riemann_from_christoffel(g, gamma, order));
    Field wup = deturck_vector(g, bg, order);
    Field wlo = Field::vector(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node)
        for (int j = 0; j < d; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) s += g.at(sy(d, j, k), node) * wup.at(k, node);
            wlo.at(j, node) = s;
        }
    Field dw = Field::raw(lat, d * d);  // dw[a][j] = d_a W_j
    for (int a = 0; a < d; ++a)
        for (int j = 0; j < d; ++j) partial_plane(lat, wlo.data(j), a, order, dw.data(a * d + j));
    Field out = Field::sym2(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node)
        for (int i = 0; i < d; ++i)
            for (int j = i; j < d; ++j) {
                double s = -2.0 * ric.at(sy(d, i, j), node) + dw.at(i * d + j, node) +
                           dw.at(j * d + i, node);
                for (int m = 0; m < d; ++m)
                    s -= 2.0 * gamma.at(m * ns + sy(d, i, j), node) * wlo.at(m, node);
                out.at(sy(d, i, j), node) = s;
            }
    return out;
}

namespace {

double cfl_dt(const FlowState& state, const StepPolicy& policy, double dt_cap) {
    const Lattice& lat = state.g.lattice();
    double dx = lat.spacing();
    double sup_inv = 1.0 / state.min_eig;  // sup-node lambda_max(g^{-1})
    double dt = policy.cfl_safety * dx * dx / (2.0 * lat.dim() * sup_inv);
    return std::min({dt, policy.dt_max, dt_cap});
}

}  // namespace

FlowState step(const FlowState& state, const StepPolicy& policy, const BackgroundGeometry& bg,
               double dt_cap, RhsWorkspace* ws) {
    if (!state.healthy) throw BlowUpError(state.t, 0, "step on unhealthy state");
    double dt = cfl_dt(state, policy, dt_cap);
    FlowState next = state;
    try {
        if (policy.integrator == StepPolicy::Integrator::Euler) {
            Field k1 = hflow_rhs(state.g, bg, policy.stencil_order, ws);
            axpy(next.g, dt, k1);
        } else {
            Field k1 = hflow_rhs(state.g, bg, policy.stencil_order, ws);
            Field stage = state.g;
            axpy(stage, 0.5 * dt, k1);
            Field k2 = hflow_rhs(stage, bg, policy.stencil_order, ws);
            stage = state.g;
            axpy(stage, 0.5 * dt, k2);
            Field k3 = hflow_rhs(stage, bg, policy.stencil_order, ws);
            stage = state.g;
            axpy(stage, dt, k3);
            Field k4 = hflow_rhs(stage, bg, policy.stencil_order, ws);
            axpy(next.g, dt / 6.0, k1);
            axpy(next.g, dt / 3.0, k2);
            axpy(next.g, dt / 3.0, k3);
            axpy(next.g, dt / 6.0, k4);
        }
    } catch (const SingularMetric& e) {
        throw BlowUpError(state.t, e.node, std::string("SPD lost inside a stage: ") + e.what());
    }
    std::size_t bad = 0;
    if (!health_scan(next.g, next.min_eig, next.max_eig, bad)) {
        next.healthy = false;
        throw BlowUpError(state.t + dt, bad,
                          "SPD lost or non-finite after step " + std::to_string(state.step_count + 1));
    }
    next.t = state.t + dt;
    next.step_count = state.step_count + 1;
    next.last_dt = dt;
    return next;
}

FlowState evolve(FlowState state, const StepPolicy& policy, const BackgroundGeometry& bg,
                 double t_end, std::vector<double> sample_times, const Observer& observer) {
    if (!(t_end > state.t)) throw std::invalid_argument("evolve: t_end must exceed state.t");
    std::sort(sample_times.begin(), sample_times.end());
    auto ws = make_workspace(state.g.lattice());
    if (observer) observer(state);
    std::size_t si = 0;
    while (si < sample_times.size() && sample_times[si] <= state.t) ++si;
    const double eps = 1e-12 * std::max(1.0, std::fabs(t_end));
    while (state.t < t_end - eps) {
        double target = t_end;
        bool sample_here = false;
        if (si < sample_times.size() && sample_times[si] < t_end) {
            target = sample_times[si];
            sample_here = true;
        }
        double cap = target - state.t;
        state = step(state, policy, bg, cap, ws.get());
        if (state.t >= target - eps) {
            state.t = target;  // exact landing
            if (sample_here) {
                if (observer) observer(state);
                ++si;
            }
        }
    }
    state.t = t_end;
    if (observer) observer(state);
    return state;
}

FlowState parabolic_rescale(const FlowState& state, double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("parabolic_rescale: lambda must be positive");
    const Lattice& lat = state.g.lattice();
    Lattice scaled(lat.dim(), lat.n(), lambda * lat.period());
    Field g2(scaled, state.g.shape());
    g2.raw_values() = state.g.raw_values();
    FlowState out(std::move(g2), state.t * lambda * lambda);
    out.step_count = state.step_count;
    out.last_dt = state.last_dt * lambda * lambda;
    return out;
}

}  // namespace hflow
