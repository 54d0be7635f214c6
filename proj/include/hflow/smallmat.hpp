#pragma once

#include <algorithm>
#include <array>
#include <cmath>

namespace hflow {

/// Dense symmetric matrix in full dim x dim storage, dim <= 3. Entries beyond
/// dim are zero-filled so the same code paths serve dim 2 and 3.
struct SymMat {
    int dim = 3;
    std::array<std::array<double, 3>, 3> a{};

    double& operator()(int i, int j) { return a[i][j]; }
    double operator()(int i, int j) const { return a[i][j]; }

    static SymMat identity(int dim) {
        SymMat m;
        m.dim = dim;
        for (int i = 0; i < dim; ++i) m.a[i][i] = 1.0;
        return m;
    }
};

inline double det(const SymMat& m) {
    if (m.dim == 2) return m.a[0][0] * m.a[1][1] - m.a[0][1] * m.a[0][1];
    return m.a[0][0] * (m.a[1][1] * m.a[2][2] - m.a[1][2] * m.a[1][2]) -
           m.a[0][1] * (m.a[0][1] * m.a[2][2] - m.a[1][2] * m.a[0][2]) +
           m.a[0][2] * (m.a[0][1] * m.a[1][2] - m.a[1][1] * m.a[0][2]);
}

/// Cofactor inverse; caller checks the determinant against its floor.
inline SymMat inverse(const SymMat& m, double d) {
    SymMat r;
    r.dim = m.dim;
    if (m.dim == 2) {
        r.a[0][0] = m.a[1][1] / d;
        r.a[1][1] = m.a[0][0] / d;
        r.a[0][1] = r.a[1][0] = -m.a[0][1] / d;
        return r;
    }
    r.a[0][0] = (m.a[1][1] * m.a[2][2] - m.a[1][2] * m.a[1][2]) / d;
    r.a[1][1] = (m.a[0][0] * m.a[2][2] - m.a[0][2] * m.a[0][2]) / d;
    r.a[2][2] = (m.a[0][0] * m.a[1][1] - m.a[0][1] * m.a[0][1]) / d;
    r.a[0][1] = r.a[1][0] = (m.a[0][2] * m.a[1][2] - m.a[0][1] * m.a[2][2]) / d;
    r.a[0][2] = r.a[2][0] = (m.a[0][1] * m.a[1][2] - m.a[0][2] * m.a[1][1]) / d;
    r.a[1][2] = r.a[2][1] = (m.a[0][1] * m.a[0][2] - m.a[0][0] * m.a[1][2]) / d;
    return r;
}

/// Eigenvalue range of a symmetric 2x2 / 3x3 matrix (closed form; the 3x3
/// case uses the trigonometric solution of the characteristic cubic).
inline void eig_range(const SymMat& m, double& lo, double& hi) {
    if (m.dim == 2) {
        double tr = m.a[0][0] + m.a[1][1];
        double d = tr * tr / 4 - det(m);
        double s = std::sqrt(std::max(0.0, d));
        lo = tr / 2 - s;
        hi = tr / 2 + s;
        return;
    }
    double p1 = m.a[0][1] * m.a[0][1] + m.a[0][2] * m.a[0][2] + m.a[1][2] * m.a[1][2];
    double q = (m.a[0][0] + m.a[1][1] + m.a[2][2]) / 3.0;
    if (p1 == 0.0) {
        lo = std::min({m.a[0][0], m.a[1][1], m.a[2][2]});
        hi = std::max({m.a[0][0], m.a[1][1], m.a[2][2]});
        return;
    }
    double p2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        double d = m.a[i][i] - q;
        p2 += d * d;
    }
    p2 += 2.0 * p1;
    double p = std::sqrt(p2 / 6.0);
    SymMat b;
    b.dim = 3;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) b.a[i][j] = (m.a[i][j] - (i == j ? q : 0.0)) / p;
    double r = det(b) / 2.0;
    r = std::clamp(r, -1.0, 1.0);
    double phi = std::acos(r) / 3.0;
    hi = q + 2.0 * p * std::cos(phi);
    lo = q + 2.0 * p * std::cos(phi + 2.0 * M_PI / 3.0);
}

/// Real roots of the characteristic cubic of a product h^{-1} g of SPD
/// matrices (the generalized eigenvalues of the pencil (g, h)); roots are
/// real for an SPD pencil. Returns the min/max root.
inline void generalized_eig_range(const SymMat& g, const SymMat& h, double h_det, double& lo, double& hi) {
    SymMat hinv = inverse(h, h_det);
    // M = h^{-1} g; similar to a symmetric matrix, real spectrum.
    double M[3][3] = {};
    int d = g.dim;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            double s = 0;
            for (int k = 0; k < d; ++k) s += hinv.a[i][k] * g.a[k][j];
            M[i][j] = s;
        }
    if (d == 2) {
        double tr = M[0][0] + M[1][1];
        double dd = M[0][0] * M[1][1] - M[0][1] * M[1][0];
        double disc = std::sqrt(std::max(0.0, tr * tr / 4 - dd));
        lo = tr / 2 - disc;
        hi = tr / 2 + disc;
        return;
    }
    double c2 = M[0][0] + M[1][1] + M[2][2];
    double tr2 = 0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) tr2 += M[i][j] * M[j][i];
    double c1 = (c2 * c2 - tr2) / 2.0;
    double c0 = M[0][0] * (M[1][1] * M[2][2] - M[1][2] * M[2][1]) -
                M[0][1] * (M[1][0] * M[2][2] - M[1][2] * M[2][0]) +
                M[0][2] * (M[1][0] * M[2][1] - M[1][1] * M[2][0]);
    // lambda^3 - c2 lambda^2 + c1 lambda - c0 = 0; shift to t^3 + pt + q = 0
    double sh = c2 / 3.0;
    double pc = c1 - c2 * c2 / 3.0;
    double qc = -2.0 * c2 * c2 * c2 / 27.0 + c2 * c1 / 3.0 - c0;
    if (pc >= 0.0) {
        // triple (or near-triple) real root for an SPD pencil
        lo = hi = sh;
        return;
    }
    double amp = 2.0 * std::sqrt(-pc / 3.0);
    double arg = std::clamp(3.0 * qc / (pc * amp), -1.0, 1.0);
    double phi = std::acos(arg) / 3.0;
    double t0 = amp * std::cos(phi);
    double t1 = amp * std::cos(phi - 2.0 * M_PI / 3.0);
    double t2 = amp * std::cos(phi - 4.0 * M_PI / 3.0);
    lo = std::min({t0, t1, t2}) + sh;
    hi = std::max({t0, t1, t2}) + sh;
}

/// v^T m v for the quadratic-form property checks.
inline double quad_form(const SymMat& m, const std::array<double, 3>& v) {
    double s = 0;
    for (int i = 0; i < m.dim; ++i)
        for (int j = 0; j < m.dim; ++j) s += v[i] * m.a[i][j] * v[j];
    return s;
}

}  // namespace hflow
