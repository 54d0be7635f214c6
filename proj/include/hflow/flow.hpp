#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hflow/background.hpp"
#include "hflow/field.hpp"
#include "hflow/tensor_calc.hpp"

namespace hflow {

/// Time-integration policy. dt is chosen every step as
///   cfl_safety * dx^2 / (2 * dim * sup-node lambda_max(g^{-1}))
/// capped by dt_max and by exact landing on sample times.
struct StepPolicy {
    double cfl_safety = 0.2;
    double dt_max = 1e30;
    enum class Integrator { Euler, Rk4 } integrator = Integrator::Rk4;
    int stencil_order = 4;
};

/// Current state of one flow run.
struct FlowState {
    double t = 0.0;
    Field g;
    long step_count = 0;
    double last_dt = 0.0;
    bool healthy = true;
    /// Coordinate spectrum of g from the last health check (drives the CFL dt).
    double min_eig = 1.0;
    double max_eig = 1.0;

    explicit FlowState(Field g0, double t0 = 0.0);
};

/// Scratch buffers reused across RHS evaluations of one run.
struct RhsWorkspace;
std::shared_ptr<RhsWorkspace> make_workspace(const Lattice& lat);

/// Right-hand side of the parabolic flow system:
///   g^{pq} D~_p D~_q g_ij  + curvature couplings + the five quadratic
///   gradient terms with coefficients (+1, +2, -2, -2, -2) under
///   (1/2) g^{kl} g^{pq}. Flat backgrounds reduce D~ to plain differences and
///   drop the curvature couplings exactly.
Field hflow_rhs(const Field& g, const BackgroundGeometry& bg, int stencil_order,
                RhsWorkspace* ws = nullptr);

/// DeTurck vector field W^k = g^{pq}(Gamma^k_pq - Gamma~^k_pq). Vector output.
Field deturck_vector(const Field& g, const BackgroundGeometry& bg, int stencil_order);

/// Geometric form of the same operator: -2 Ric(g) + D_i W_j + D_j W_i with the
/// connection of g and W_j = g_jk W^k. Agrees with hflow_rhs to stencil accuracy.
Field geometric_rhs(const Field& g, const BackgroundGeometry& bg, int stencil_order);

/// One CFL-controlled step (euler or rk4). Re-validates finiteness and SPD;
/// throws BlowUpError instead of propagating NaNs. `dt_cap` additionally
/// limits dt (used by evolve to land exactly on sample times).
FlowState step(const FlowState& state, const StepPolicy& policy, const BackgroundGeometry& bg,
               double dt_cap = 1e30, RhsWorkspace* ws = nullptr);

/// Observer callback: invoked at t0, at each requested sample time (the step
/// lands on it exactly), and at t_end.
using Observer = std::function<void(const FlowState&)>;

/// Repeated stepping to t_end with sampling. Sample times outside (t0, t_end]
/// are ignored. On blow-up the BlowUpError propagates after the observer saw
/// every completed sample.
FlowState evolve(FlowState state, const StepPolicy& policy, const BackgroundGeometry& bg,
                 double t_end, std::vector<double> sample_times, const Observer& observer);

/// The state viewed at spatial scale lambda: components unchanged, lattice
/// period scaled by lambda, time scaled by lambda^2.
FlowState parabolic_rescale(const FlowState& state, double lambda);

}  // namespace hflow
