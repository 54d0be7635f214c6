#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "hflow/field.hpp"

namespace hflow {

/// Families of rough (or control) initial metrics. All outputs are SPD with
/// nodewise eigenvalues inside [1/lambda0, lambda0] against delta.
enum class RoughKind { LoglogSpike, FourierMultiscale, PointSingularDemo, SmoothWarp };

/// Shapes of the analytic control family.
enum class WarpShape {
    /// g = delta + amplitude * sin(2 pi f x_axis / L) * E  (1D profile)
    Sinusoidal,
    /// g = e^{2u}(dx_a)^2 + rest flat, u = amplitude sin(...): flat in
    /// disguise, scalar curvature identically zero.
    ProfileConformal,
    /// g = (dx_a)^2 + e^{2u}(dx_{a+1})^2 + rest flat: R = -2(u'' + u'^2).
    WarpedProduct,
    /// pullback of delta by a periodic diffeomorphism x -> x + amplitude s(x):
    /// scalar curvature identically zero, attained everywhere.
    DiffeoFlat,
};

struct RoughSpec {
    RoughKind kind = RoughKind::SmoothWarp;
    double lambda0 = 1.5;    // target bi-Lipschitz bound, > 1
    double epsilon = 0.1;    // target gradient concentration (reported, not enforced)
    unsigned long long seed = 1;

    // loglog_spike / point_singular_demo
    std::array<double, 3> center{0.5, 0.5, 0.5};  // fractions of the period
    double beta = 4.0;       // oscillation rate of sin(beta loglog(1/r))
    double r0 = 0.35;        // cutoff radius (fraction of the period)
    double amp_margin = 0.9; // fraction of the SPD headroom used

    // fourier_multiscale
    int mode_min = 1;        // lowest dyadic frequency
    int mode_count = 4;      // dyadic rungs m, 2m, 4m, ...

    // smooth_warp
    WarpShape warp_shape = WarpShape::Sinusoidal;
    int axis = 0;
    double amplitude = 0.05;
    int frequency = 1;
};

struct GenerateReport {
    double lambda_min = 1.0;
    double lambda_max = 1.0;
    double concentration = 0.0;  // measured at radius period/4, p = dim
};

/// Sample the requested family on the lattice. Deterministic given (spec,
/// lattice). Throws SpecInfeasible when the SPD bound cannot be met.
Field generate(const RoughSpec& spec, const Lattice& lat, GenerateReport* report = nullptr);

/// Mollification kernel: unit-mass separable periodic kernel of scale sigma
/// (standard-deviation length). Box uses the uniform kernel of equal sigma.
struct MollifierSpec {
    enum class Kind { Gaussian, Box } kind = Kind::Gaussian;
    double sigma = 0.05;
};

/// Componentwise periodic convolution; preserves symmetry exactly and the
/// nodewise SPD interval (convex combination). Throws KernelUnderresolved
/// for sigma < dx/2.
Field mollify(const Field& g, const MollifierSpec& spec);

/// Largest ladder radius r with
///   sup_centers ( r^n fint_{B(x,r)} |dg|^n )^{1/n} < epsilon,
/// centers strided by `center_stride`. Empty when no rung qualifies.
std::optional<double> find_scale(const Field& g, double epsilon,
                                 const std::vector<double>& radii_ladder,
                                 int stencil_order = 2, int center_stride = 1);

/// Calibrate the warped-product amplitude so that min_x R = kappa exactly
/// (continuum formula R = -2(u'' + u'^2), u = a sin(2 pi f x / L)).
double calibrate_warp_amplitude(double kappa, int frequency, double period);

}  // namespace hflow
