#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hflow/background.hpp"
#include "hflow/field.hpp"

namespace hflow {

/// Which optional estimator groups a run records. Core columns (times,
/// bi-Lipschitz pair, derivative sup-norms, smoothing ratios, scalar range,
/// global gradient integral) are always present; a disabled group is absent
/// from the whole series (explicitly skipped), never half-filled.
struct DiagnosticsPlan {
    std::vector<double> radii;   // concentration radii
    int conc_stride = 1;         // 1 = exact sup over centers
    bool vs_reference = false;   // L^2 / W^{1,n} distances to a reference metric
    bool vs_average = false;     // sup |g - spatial average|
    bool sup_riemann = false;    // sup |Rm(g)| (costly)
    bool scalar = true;          // min/max scalar curvature
    int stencil_order = 2;       // diagnostics stencil
};

struct DiagnosticsRecord {
    double t = 0.0;
    double dt = 0.0;
    long step = 0;
    double lambda_min = 1.0;   // pencil (g, h)
    double lambda_max = 1.0;
    double sup_grad = 0.0;     // sup |d g|_h
    double sup_hess = 0.0;     // sup |d^2 g|_h
    double ratio1 = 0.0;       // t^{1/2} sup|d g|
    double ratio2 = 0.0;       // t   sup|d^2 g|
    double min_scal = 0.0;
    double max_scal = 0.0;
    double int_gradn = 0.0;    // integral of |d g|^n, n = dim
    std::vector<double> conc;  // one per plan radius
    double l2_ref = 0.0;
    double w1n_grad_ref = 0.0; // gradient part of the W^{1,n} distance
    double w1n_l_ref = 0.0;    // L^n part
    double sup_dev_avg = 0.0;
    double sup_rm = 0.0;
};

/// Time-indexed diagnostics of one run; strictly increasing sample times.
struct DiagnosticsSeries {
    DiagnosticsPlan plan;
    std::vector<DiagnosticsRecord> records;

    std::string to_csv() const;
    static DiagnosticsSeries from_csv(const std::string& text);
};

/// Builds one record from the current metric (reference / average groups are
/// filled by the caller that owns those fields).
DiagnosticsRecord measure(const Field& g, const BackgroundGeometry& bg,
                          const DiagnosticsPlan& plan, double t, double dt, long step,
                          const Field* reference = nullptr);

/// sup over strided centers of the normalized local L^n mean of |dg|_h over
/// balls of the given radius (n = dim).
double concentration(const Field& g, const BackgroundGeometry& bg, double radius,
                     int center_stride = 1, int stencil_order = 2);

/// Same from a precomputed gradient-norm field.
double concentration_of_norm(const Field& grad_norm, double radius, int center_stride);

/// Per-k smoothing curves t^{k/2} sup|d^k g| and their running maxima.
struct SmoothingRatios {
    std::vector<double> t;
    std::vector<double> c1_curve;  // t^{1/2} sup |d g|
    std::vector<double> c2_curve;  // t sup |d^2 g|
    double c1_hat = 0.0;           // running max (empirical constant)
    double c2_hat = 0.0;
};
SmoothingRatios smoothing_ratios(const DiagnosticsSeries& series);

/// Normalized discrete L^p distance under the h-norm, over the torus or a ball.
struct BallSpec {
    std::size_t center = 0;
    double radius = 0.0;
};
double lp_distance(const Field& g1, const Field& g2, double p, const BackgroundGeometry& bg,
                   const std::optional<BallSpec>& ball = std::nullopt);

/// W^{1,n} distance, gradient and L^n parts reported separately (n = dim).
struct W1nDistance {
    double grad_part = 0.0;  // ( int |d(g1-g2)|^n )^{1/n}, normalized
    double l_part = 0.0;     // ( fint |g1-g2|^n )^{1/n}
    double total() const { return grad_part + l_part; }
};
W1nDistance w1n_distance(const Field& g1, const Field& g2, const BackgroundGeometry& bg,
                         int stencil_order = 2,
                         const std::optional<BallSpec>& ball = std::nullopt);

/// Minimum of the scalar curvature over nodes with its location.
struct ScalarFloor {
    double min = 0.0;
    std::size_t argmin = 0;
    double max = 0.0;
};
ScalarFloor scalar_floor(const Field& g, int stencil_order = 2);

/// Discrete Sobolev-quotient sanity check on a compactly supported profile:
/// (fint phi^{2n/(n-2)})^{(n-2)/n} / (fint |d phi|^2) over the ball. dim 3
/// only; phi == 0 returns 0 by convention.
double sobolev_check(const Field& phi, std::size_t center, double radius,
                     int stencil_order = 2);

/// Spatial average of a Sym2 field as a constant-coefficient field (the L^2
/// projection onto constant metrics).
Field spatial_average(const Field& g);

}  // namespace hflow
