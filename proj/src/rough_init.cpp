#include "hflow/rough_init.hpp"

#include <cmath>
#include <random>

#include "hflow/errors.hpp"
#include "hflow/estimators.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/stencil.hpp"
#include "hflow/tensor_calc.hpp"

namespace hflow {

namespace {

/// Portable uniform in [-1, 1) from a seeded engine (the distribution in
/// <random> is implementation-defined; this one is not).
struct Rng {
    std::mt19937_64 eng;
    explicit Rng(unsigned long long seed) : eng(seed) {}
    double uniform() { return (eng() >> 11) * 0x1.0p-53; }           // [0,1)
    double sym_uniform() { return 2.0 * uniform() - 1.0; }           // [-1,1)
    int integer(int lo, int hi) {                                    // inclusive
        return lo + static_cast<int>(uniform() * (hi - lo + 1));
    }
};

/// Fixed traceless direction diag(1,-1,0)/sqrt(2); operator norm 1/sqrt(2).
SymMat traceless_direction(int dim) {
    SymMat e;
    e.dim = dim;
    e.a[0][0] = 1.0 / std::sqrt(2.0);
    e.a[1][1] = -1.0 / std::sqrt(2.0);
    return e;
}

/// C2 cutoff: 1 on [0, plateau], quintic smoothstep down to 0 at 1.
double cutoff(double u, double plateau = 0.5) {
    if (u <= plateau) return 1.0;
    if (u >= 1.0) return 0.0;
    double s = (u - plateau) / (1.0 - plateau);
    return 1.0 - (10 * s * s * s - 15 * s * s * s * s + 6 * s * s * s * s * s);
}

void add_sym(Field& g, std::size_t node, const SymMat& m, double scale) {
    int d = g.lattice().dim();
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) g.at(sym_index(d, i, j), node) += scale * m.a[i][j];
}

Field gen_loglog_spike(const RoughSpec& spec, const Lattice& lat) {
    double L = lat.period();
    double r0 = spec.r0 * L;
    if (!(r0 > 0) || r0 > 0.9 || r0 > L / 2)
        throw SpecInfeasible("loglog_spike: cutoff radius must lie in (0, min(0.9, L/2)]");
    double headroom = 1.0 - 1.0 / spec.lambda0;
    double amp = spec.amp_margin * headroom * std::sqrt(2.0);  // opnorm = margin*headroom
    SymMat e = traceless_direction(lat.dim());
    std::array<double, 3> ctr{spec.center[0] * L, spec.center[1] * L, spec.center[2] * L};
    Field g = identity_metric(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        double r = lat.torus_dist(lat.position(node), ctr);
        if (r <= 0.0 || r >= r0) continue;  // center node keeps the cutoff-zero value
        double psi = cutoff(r / r0);
        double osc = std::sin(spec.beta * std::log(std::log(1.0 / r)));
        add_sym(g, node, e, psi * osc * amp);
    }
    return g;
}

Field gen_fourier_multiscale(const RoughSpec& spec, const Lattice& lat) {
    double L = lat.period();
    double headroom = 1.0 - 1.0 / spec.lambda0;
    Rng rng(spec.seed);
    int rungs = std::max(1, spec.mode_count);
    const int terms_per_rung = 3;

    struct Term {
        SymMat e;
        std::array<int, 3> k{};
        double phase = 0;
        double amp = 0;
    };
    std::vector<Term> terms;
    double weight_sum = 0;
    for (int j = 0; j < rungs; ++j) {
        int m = spec.mode_min << j;
        for (int c = 0; c < terms_per_rung; ++c) {
            Term t;
            t.e.dim = lat.dim();
            for (int i = 0; i < lat.dim(); ++i)
                for (int jj = i; jj < lat.dim(); ++jj)
                    t.e.a[i][jj] = t.e.a[jj][i] = rng.sym_uniform();
            double lo, hi;
            eig_range(t.e, lo, hi);
            double opn = std::max(std::fabs(lo), std::fabs(hi));
            if (opn < 1e-12) { --c; continue; }
            for (int i = 0; i < 3; ++i)
                for (int jj = 0; jj < 3; ++jj) t.e.a[i][jj] /= opn;
            do {
                for (int a = 0; a < lat.dim(); ++a) t.k[a] = rng.integer(-1, 1);
            } while (t.k[0] == 0 && t.k[1] == 0 && t.k[2] == 0);
            for (int a = 0; a < lat.dim(); ++a) t.k[a] *= m;
            t.phase = rng.uniform() * 2.0 * M_PI;
            t.amp = 1.0 / m;  // a_m ~ m^{-1}
            weight_sum += t.amp;
            terms.push_back(t);
        }
    }
    // truncate total operator norm inside the SPD headroom
    double scale = spec.amp_margin * headroom / weight_sum;
    Field g = identity_metric(lat);
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        auto pos = lat.position(node);
        for (const auto& t : terms) {
            double ph = t.phase;
            for (int a = 0; a < lat.dim(); ++a) ph += 2.0 * M_PI * t.k[a] * pos[a] / L;
            add_sym(g, node, t.e, scale * t.amp * std::sin(ph));
        }
    }
    return g;
}

Field gen_point_singular(const RoughSpec& spec, const Lattice& lat) {
    // conformal profile g = e^{2 phi} delta, phi = -c psi(r) r^alpha: bounded,
    // W^{1,n}, gradient blows up at the center; scalar curvature >= 0 on the
    // inner region where psi == 1 for small c.
    double L = lat.period();
    double r0 = spec.r0 * L;
    if (!(r0 > 0) || r0 > L / 2) throw SpecInfeasible("point_singular_demo: bad cutoff radius");
    const double alpha = 0.5;
    double c = spec.amp_margin * std::log(spec.lambda0) / (2.0 * std::pow(r0, alpha));
    std::array<double, 3> ctr{spec.center[0] * L, spec.center[1] * L, spec.center[2] * L};
    Field g = identity_metric(lat);
    int d = lat.dim();
    for (std::size_t node = 0; node < lat.nodes(); ++node) {
        double r = lat.torus_dist(lat.position(node), ctr);
        double phi = (r > 0 && r < r0) ? -c * cutoff(r / r0, 0.7) * std::pow(r, alpha) : 0.0;
        double conf = std::exp(2.0 * phi);
        for (int i = 0; i < d; ++i) g.at(sym_index(d, i, i), node) = conf;
    }
    return g;
}

Field gen_smooth_warp(const RoughSpec& spec, const Lattice& lat) {
    double L = lat.period();
    int d = lat.dim();
    int a = spec.axis;
    if (a < 0 || a >= d) throw SpecInfeasible("smooth_warp: axis out of range");
    double om = 2.0 * M_PI * spec.frequency / L;
    Field g = identity_metric(lat);
    switch (spec.warp_shape) {
        case WarpShape::Sinusoidal: {
            SymMat e = traceless_direction(d);
            double headroom = 1.0 - 1.0 / spec.lambda0;
            if (spec.amplitude / std::sqrt(2.0) > headroom)
                throw SpecInfeasible("smooth_warp: amplitude exceeds the SPD headroom");
            for (std::size_t node = 0; node < lat.nodes(); ++node) {
                double x = lat.position(node)[a];
                add_sym(g, node, e, spec.amplitude * std::sin(om * x));
            }
            break;
        }
        case WarpShape::ProfileConformal: {
            if (std::exp(2.0 * spec.amplitude) > spec.lambda0)
                throw SpecInfeasible("smooth_warp: conformal amplitude exceeds lambda0");
            for (std::size_t node = 0; node < lat.nodes(); ++node) {
                double x = lat.position(node)[a];
                g.at(sym_index(d, a, a), node) = std::exp(2.0 * spec.amplitude * std::sin(om * x));
            }
            break;
        }
        case WarpShape::WarpedProduct: {
            if (std::exp(2.0 * spec.amplitude) > spec.lambda0)
                throw SpecInfeasible("smooth_warp: warp amplitude exceeds lambda0");
            int b = (a + 1) % d;
            for (std::size_t node = 0; node < lat.nodes(); ++node) {
                double x = lat.position(node)[a];
                g.at(sym_index(d, b, b), node) = std::exp(2.0 * spec.amplitude * std::sin(om * x));
            }
            break;
        }
        case WarpShape::DiffeoFlat: {
            // g = J^T J with J the Jacobian of x -> x + amp * s(x)
            double amp = spec.amplitude;
            double w = 2.0 * M_PI * spec.frequency / L;
            for (std::size_t node = 0; node < lat.nodes(); ++node) {
                auto p = lat.position(node);
                double x = w * p[0], y = w * p[1], z = d == 3 ? w * p[2] : 0.0;
                double J[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
                if (d == 3) {
                    // s = (sin y sin z, 0.8 sin z sin x, 0.6 sin x sin y) / w
                    J[0][1] += amp * std::cos(y) * std::sin(z);
                    J[0][2] += amp * std::sin(y) * std::cos(z);
                    J[1][2] += 0.8 * amp * std::cos(z) * std::sin(x);
                    J[1][0] += 0.8 * amp * std::sin(z) * std::cos(x);
                    J[2][0] += 0.6 * amp * std::cos(x) * std::sin(y);
                    J[2][1] += 0.6 * amp * std::sin(x) * std::cos(y);
                } else {
                    J[0][1] += amp * std::cos(y);
                    J[1][0] += 0.8 * amp * std::cos(x);
                }
                for (int i = 0; i < d; ++i)
                    for (int j = i; j < d; ++j) {
                        double s = 0;
                        for (int m = 0; m < d; ++m) s += J[m][i] * J[m][j];
                        g.at(sym_index(d, i, j), node) = s;
                    }
            }
            break;
        }
    }
    return g;
}

}  // namespace

Field generate(const RoughSpec& spec, const Lattice& lat, GenerateReport* report) {
    if (!(spec.lambda0 > 1.0)) throw SpecInfeasible("lambda0 must exceed 1");
    Field g = [&] {
        switch (spec.kind) {
            case RoughKind::LoglogSpike: return gen_loglog_spike(spec, lat);
            case RoughKind::FourierMultiscale: return gen_fourier_multiscale(spec, lat);
            case RoughKind::PointSingularDemo: return gen_point_singular(spec, lat);
            case RoughKind::SmoothWarp: return gen_smooth_warp(spec, lat);
        }
        throw SpecInfeasible("unknown rough kind");
    }();
    auto eig = coordinate_spectrum(g);
    double tol = 1e-9;
    if (eig.lambda_min < 1.0 / spec.lambda0 - tol || eig.lambda_max > spec.lambda0 + tol)
        throw SpecInfeasible("generated metric violates the bi-Lipschitz target: [" +
                             std::to_string(eig.lambda_min) + ", " + std::to_string(eig.lambda_max) +
                             "] vs lambda0 " + std::to_string(spec.lambda0));
    if (report) {
        report->lambda_min = eig.lambda_min;
        report->lambda_max = eig.lambda_max;
        int stride = std::max(1, lat.n() / 16);
        BackgroundGeometry flat = make_flat(lat);
        report->concentration = concentration(g, flat, lat.period() / 4.0, stride, 2);
    }
    return g;
}

namespace {

std::vector<double> kernel_weights(const Lattice& lat, const MollifierSpec& spec, int& half) {
    double dx = lat.spacing();
    if (spec.sigma < dx / 2.0)
        throw KernelUnderresolved("mollifier sigma " + std::to_string(spec.sigma) +
                                  " below dx/2 = " + std::to_string(dx / 2.0));
    std::vector<double> w;
    if (spec.kind == MollifierSpec::Kind::Gaussian) {
        half = std::min(lat.n() / 2, static_cast<int>(std::ceil(5.0 * spec.sigma / dx)));
        w.resize(2 * half + 1);
        for (int k = -half; k <= half; ++k)
            w[k + half] = std::exp(-0.5 * (k * dx) * (k * dx) / (spec.sigma * spec.sigma));
    } else {
        // uniform kernel of matching standard deviation: half-width sqrt(3) sigma,
        // boundary cells weighted by their overlap with [-a, a] so the discrete
        // width varies smoothly in sigma
        double a = std::sqrt(3.0) * spec.sigma;
        half = std::min(lat.n() / 2, static_cast<int>(std::ceil(a / dx + 0.5)));
        w.assign(2 * half + 1, 0.0);
        for (int k = -half; k <= half; ++k) {
            double lo = std::max((k - 0.5) * dx, -a);
            double hi = std::min((k + 0.5) * dx, a);
            w[k + half] = std::max(0.0, hi - lo);
        }
    }
    double s = 0;
    for (double v : w) s += v;
    for (double& v : w) v /= s;  // unit mass exactly
    return w;
}

}  // namespace

Field mollify(const Field& g, const MollifierSpec& spec) {
    const Lattice& lat = g.lattice();
    int half = 0;
    std::vector<double> w = kernel_weights(lat, spec, half);
    Field out = g;
    Field tmp(lat, g.shape());
    for (int axis = 0; axis < lat.dim(); ++axis) {
        for (int c = 0; c < g.ncomp(); ++c) {
            const double* src = out.data(c);
            double* dst = tmp.data(c);
            std::size_t s = lat.stride(axis);
            // separable pass along `axis`
            for (std::size_t node = 0; node < lat.nodes(); ++node) {
                auto crd = lat.coords(node);
                double acc = 0;
                int base = crd[axis];
                for (int k = -half; k <= half; ++k) {
                    int i = lat.wrap(base + k);
                    std::ptrdiff_t off = static_cast<std::ptrdiff_t>(i - base) * static_cast<std::ptrdiff_t>(s);
                    acc += w[k + half] * src[static_cast<std::ptrdiff_t>(node) + off];
                }
                dst[node] = acc;
            }
        }
        std::swap(out, tmp);
    }
    return out;
}

std::optional<double> find_scale(const Field& g, double epsilon,
                                 const std::vector<double>& radii_ladder, int stencil_order,
                                 int center_stride) {
    if (!(epsilon > 0)) throw std::invalid_argument("find_scale: epsilon must be positive");
    Field norm = tensor_norm_flat(gradient_sym2(g, stencil_order));
    std::vector<double> ladder = radii_ladder;
    std::sort(ladder.begin(), ladder.end(), std::greater<>());
    for (double r : ladder) {
        double sup = concentration_of_norm(norm, r, center_stride);
        if (r * sup < epsilon) return r;
    }
    return std::nullopt;
}

double calibrate_warp_amplitude(double kappa, int frequency, double period) {
    if (kappa >= 0) return 0.0;
    double om = 2.0 * M_PI * frequency / period;
    auto min_r = [&](double a) {
        // R(x) = 2 a om^2 sin(om x) - 2 a^2 om^2 cos^2(om x)
        double mn = 1e300;
        const int m = 1 << 14;
        for (int i = 0; i < m; ++i) {
            double x = 2.0 * M_PI * i / m;  // one period of om*x
            double r = 2 * a * om * om * std::sin(x) - 2 * a * a * om * om * std::cos(x) * std::cos(x);
            mn = std::min(mn, r);
        }
        return mn;
    };
    double lo = 0.0, hi = 1.0;
    while (min_r(hi) > kappa) {
        hi *= 2;
        if (hi > 64) throw SpecInfeasible("calibrate_warp_amplitude: kappa unreachable");
    }
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (min_r(mid) > kappa) lo = mid;
        else hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace hflow
