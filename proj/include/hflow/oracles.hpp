#pragma once

#include <map>
#include <string>
#include <vector>

#include "hflow/field.hpp"

namespace hflow {
namespace oracle {

/// Named reference values produced by an independent route (closed forms,
/// direct sums, fine-step integrations). The test suites compare the lattice
/// implementation against these; `hflow oracle <name>` prints them.
struct OracleResult {
    std::string name;
    std::map<std::string, double> values;   // reference values
    std::map<std::string, double> measured; // implementation-side values, when cheap
    std::string note;
};

std::vector<std::string> names();
OracleResult run(const std::string& name);

// --- closed-form profile evaluations shared with the test suites ---

/// Pointwise Eq-of-motion for metrics depending on one coordinate only:
/// given g(x), g'(x), g''(x) as 3x3 symmetric matrices (profile axis 0),
/// evaluates the flow right-hand side by pointwise algebra (no stencils).
void profile_rhs(const double g[3][3], const double gp[3][3], const double gpp[3][3],
                 double out[3][3]);

/// DeTurck vector of a 1D profile: W^k = g^{pq} Gamma^k_pq from analytic
/// derivatives.
void profile_deturck(const double g[3][3], const double gp[3][3], double out[3]);

/// Warped product g = dx^2 + e^{2u} dy^2 + dz^2: scalar curvature
/// R = -2 (u'' + u'^2).
double warped_scalar_curv(double u_pp, double u_p);

/// Geometric RHS of the flat-in-disguise profile e^{2u}dx^2 + dy^2 + dz^2:
/// only the (0,0) component is nonzero, equal to 2(u'' - u'^2).
double disguise_rhs_00(double u_pp, double u_p);

/// The canonical analytic 1D-profile metric sampled on a lattice (dim 3);
/// its closed-form derivatives drive profile_rhs / profile_deturck.
Field sample_profile_metric(const Lattice& lat);

/// A smooth multi-axis analytic test metric (no profile structure), used by
/// the form-equivalence refinement checks.
Field generic_analytic_metric(const Lattice& lat);

}  // namespace oracle
}  // namespace hflow
