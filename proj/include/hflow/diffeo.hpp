#pragma once

#include <array>
#include <vector>

#include "hflow/field.hpp"

namespace hflow {

/// Time-stamped snapshot of the DeTurck vector field, recorded by an observer.
struct WSample {
    double t = 0.0;
    Field w;  // Vector
};

/// Integrated trajectories x(t) of dx/dt = W(x, t) together with the Jacobian
/// J = dPsi/dx transported along each trajectory (dJ/dt = DW(Psi) J).
/// Positions are reduced mod the period.
struct DiffeoTrace {
    std::vector<double> times;
    // [seed][sample] -> position / Jacobian (row-major dPsi^i/dx^j)
    std::vector<std::vector<std::array<double, 3>>> positions;
    std::vector<std::vector<std::array<std::array<double, 3>, 3>>> jacobians;
};

/// Multilinear interpolation of a field at an off-grid torus position.
void interpolate(const Field& f, const std::array<double, 3>& pos, double* out);

/// RK4 integration of the trajectory ODE over the recorded W snapshots
/// (linear interpolation of W in time, multilinear in space), `substeps`
/// RK4 steps per snapshot interval. Snapshots must be time-sorted.
DiffeoTrace integrate_diffeo(const std::vector<WSample>& w_series,
                             const std::vector<std::array<double, 3>>& seeds,
                             int substeps = 4);

}  // namespace hflow
