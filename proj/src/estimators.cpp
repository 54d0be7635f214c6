#include "hflow/estimators.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "hflow/parallel.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/stencil.hpp"
#include "hflow/tensor_calc.hpp"

namespace hflow {

namespace {

Field grad_norm_field(const Field& g, const BackgroundGeometry& bg, int order) {
    Field dg = gradient_sym2(g, order);
    return bg.is_flat ? tensor_norm_flat(dg) : tensor_norm_h(dg, bg.h, 0);
}

double fint_pow(const Field& norm, double p) {
    // ( (1/N) sum |f|^p )^{1/p}
    double s = deterministic_sum(norm.nodes(), [&](std::size_t i) {
        return std::pow(std::fabs(norm.at(0, i)), p);
    });
    return std::pow(s / static_cast<double>(norm.nodes()), 1.0 / p);
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

double concentration_of_norm(const Field& grad_norm, double radius, int center_stride) {
    const Lattice& lat = grad_norm.lattice();
    if (center_stride < 1) throw std::invalid_argument("concentration: stride must be >= 1");
    Ball ball(lat, radius);
    double p = lat.dim();
    double sup = 0;
    int n = lat.n();
    std::array<int, 3> c{0, 0, 0};
    for (c[0] = 0; c[0] < n; c[0] += center_stride)
        for (c[1] = 0; c[1] < n; c[1] += center_stride) {
            if (lat.dim() == 2) {
                sup = std::max(sup, ball_mean_p(grad_norm, lat.index(c), ball, p));
            } else {
                for (c[2] = 0; c[2] < n; c[2] += center_stride)
                    sup = std::max(sup, ball_mean_p(grad_norm, lat.index(c), ball, p));
            }
        }
    return sup;
}

double concentration(const Field& g, const BackgroundGeometry& bg, double radius,
                     int center_stride, int stencil_order) {
    Field norm = grad_norm_field(g, bg, stencil_order);
    return concentration_of_norm(norm, radius, center_stride);
}

double lp_distance(const Field& g1, const Field& g2, double p, const BackgroundGeometry& bg,
                   const std::optional<BallSpec>& ball) {
    if (!(g1.lattice() == g2.lattice())) throw std::invalid_argument("lp_distance: lattice mismatch");
    Field diff = g1;
    {
        auto& dv = diff.raw_values();
        const auto& v2 = g2.raw_values();
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] -= v2[i];
    }
    Field norm = bg.is_flat ? tensor_norm_flat(diff) : tensor_norm_h(diff, bg.h, 0);
    if (ball) return ball_mean_p(norm, ball->center, ball->radius, p);
    return fint_pow(norm, p);
}

W1nDistance w1n_distance(const Field& g1, const Field& g2, const BackgroundGeometry& bg,
                         int stencil_order, const std::optional<BallSpec>& ball) {
    if (!(g1.lattice() == g2.lattice())) throw std::invalid_argument("w1n_distance: lattice mismatch");
    double n = g1.lattice().dim();
    Field diff = g1;
    {
        auto& dv = diff.raw_values();
        const auto& v2 = g2.raw_values();
        for (std::size_t i = 0; i < dv.size(); ++i) dv[i] -= v2[i];
    }
    W1nDistance out;
    Field lnorm = bg.is_flat ? tensor_norm_flat(diff) : tensor_norm_h(diff, bg.h, 0);
    Field gnorm = grad_norm_field(diff, bg, stencil_order);
    if (ball) {
        out.l_part = ball_mean_p(lnorm, ball->center, ball->radius, n);
        out.grad_part = ball_mean_p(gnorm, ball->center, ball->radius, n);
    } else {
        out.l_part = fint_pow(lnorm, n);
        out.grad_part = fint_pow(gnorm, n);
    }
    return out;
}

ScalarFloor scalar_floor(const Field& g, int stencil_order) {
    Field sc = scalar_curv(g, stencil_order);
    ScalarFloor r;
    r.min = 1e300;
    r.max = -1e300;
    for (std::size_t i = 0; i < sc.nodes(); ++i) {
        double v = sc.at(0, i);
        if (v < r.min) { r.min = v; r.argmin = i; }
        if (v > r.max) r.max = v;
    }
    return r;
}

double sobolev_check(const Field& phi, std::size_t center, double radius, int stencil_order) {
    const Lattice& lat = phi.lattice();
    if (lat.dim() != 3)
        throw std::invalid_argument("sobolev_check: the 2n/(n-2) exponent needs dim 3");
    if (max_abs(phi) == 0.0) return 0.0;
    Field grad = gradient_scalar(phi, stencil_order);
    Field gn = tensor_norm_flat(grad);
    // fint over the ball of phi^6 and |dphi|^2
    Ball ball(lat, radius);
    std::vector<std::size_t> idx;
    ball.gather(lat, center, idx);
    double lhs = deterministic_sum(idx.size(), [&](std::size_t i) {
        double v = phi.at(0, idx[i]);
        return v * v * v * v * v * v;
    }) / static_cast<double>(idx.size());
    double rhs = deterministic_sum(idx.size(), [&](std::size_t i) {
        double v = gn.at(0, idx[i]);
        return v * v;
    }) / static_cast<double>(idx.size());
    if (rhs == 0.0) return 0.0;
    return std::cbrt(lhs) / rhs;
}

Field spatial_average(const Field& g) {
    Field out(g.lattice(), g.shape());
    double inv = 1.0 / static_cast<double>(g.nodes());
    for (int c = 0; c < g.ncomp(); ++c) {
        double m = deterministic_sum(g.comp(c)) * inv;
        double* p = out.data(c);
        std::fill(p, p + g.nodes(), m);
    }
    return out;
}

DiagnosticsRecord measure(const Field& g, const BackgroundGeometry& bg,
                          const DiagnosticsPlan& plan, double t, double dt, long step,
                          const Field* reference) {
    DiagnosticsRecord r;
    r.t = t;
    r.dt = dt;
    r.step = step;
    auto bl = bilipschitz(g, bg.h);
    r.lambda_min = bl.lambda_min;
    r.lambda_max = bl.lambda_max;

    Field dg = gradient_sym2(g, plan.stencil_order);
    Field n1 = bg.is_flat ? tensor_norm_flat(dg) : tensor_norm_h(dg, bg.h, 0);
    r.sup_grad = max_abs(n1);
    Field ddg = hessian_sym2(g, plan.stencil_order);
    Field n2 = bg.is_flat ? tensor_norm_flat(ddg) : tensor_norm_h(ddg, bg.h, 0);
    r.sup_hess = max_abs(n2);
    r.ratio1 = std::sqrt(std::max(0.0, t)) * r.sup_grad;
    r.ratio2 = t * r.sup_hess;

    if (plan.scalar) {
        auto sf = scalar_floor(g, plan.stencil_order);
        r.min_scal = sf.min;
        r.max_scal = sf.max;
    }

    double n = g.lattice().dim();
    Field npow = Field::scalar(g.lattice());
    for (std::size_t i = 0; i < g.nodes(); ++i) npow.at(0, i) = std::pow(n1.at(0, i), n);
    r.int_gradn = global_integral(npow);

    r.conc.reserve(plan.radii.size());
    for (double rad : plan.radii) r.conc.push_back(concentration_of_norm(n1, rad, plan.conc_stride));

    if (plan.vs_reference && reference) {
        r.l2_ref = lp_distance(g, *reference, 2.0, bg);
        auto w = w1n_distance(g, *reference, bg, plan.stencil_order);
        r.w1n_grad_ref = w.grad_part;
        r.w1n_l_ref = w.l_part;
    }
    if (plan.vs_average) {
        Field avg = spatial_average(g);
        r.sup_dev_avg = max_abs_diff(g, avg);
    }
    if (plan.sup_riemann) {
        Field riem = riemann(g, plan.stencil_order);
        Field rn = bg.is_flat ? tensor_norm_flat(riem) : tensor_norm_h(riem, bg.h, 1u);
        r.sup_rm = max_abs(rn);
    }
    return r;
}

SmoothingRatios smoothing_ratios(const DiagnosticsSeries& series) {
    SmoothingRatios out;
    for (const auto& rec : series.records) {
        out.t.push_back(rec.t);
        out.c1_curve.push_back(rec.ratio1);
        out.c2_curve.push_back(rec.ratio2);
        out.c1_hat = std::max(out.c1_hat, rec.ratio1);
        out.c2_hat = std::max(out.c2_hat, rec.ratio2);
    }
    return out;
}

std::string DiagnosticsSeries::to_csv() const {
    std::ostringstream os;
    os << "t,dt,step,lambda_min,lambda_max,sup_grad,sup_hess,ratio1,ratio2";
    if (plan.scalar) os << ",min_scal,max_scal";
    os << ",int_gradn";
    for (double r : plan.radii) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6g", r);
        os << ",conc_" << buf;
    }
    if (plan.vs_reference) os << ",l2_ref,w1n_grad_ref,w1n_l_ref";
    if (plan.vs_average) os << ",sup_dev_avg";
    if (plan.sup_riemann) os << ",sup_rm";
    os << "\n";
    for (const auto& r : records) {
        os << fmt(r.t) << ',' << fmt(r.dt) << ',' << r.step << ',' << fmt(r.lambda_min) << ','
           << fmt(r.lambda_max) << ',' << fmt(r.sup_grad) << ',' << fmt(r.sup_hess) << ','
           << fmt(r.ratio1) << ',' << fmt(r.ratio2);
        if (plan.scalar) os << ',' << fmt(r.min_scal) << ',' << fmt(r.max_scal);
        os << ',' << fmt(r.int_gradn);
        for (double c : r.conc) os << ',' << fmt(c);
        if (plan.vs_reference) os << ',' << fmt(r.l2_ref) << ',' << fmt(r.w1n_grad_ref) << ',' << fmt(r.w1n_l_ref);
        if (plan.vs_average) os << ',' << fmt(r.sup_dev_avg);
        if (plan.sup_riemann) os << ',' << fmt(r.sup_rm);
        os << "\n";
    }
    return os.str();
}

DiagnosticsSeries DiagnosticsSeries::from_csv(const std::string& text) {
    DiagnosticsSeries s;
    std::istringstream is(text);
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("empty series CSV");
    std::vector<std::string> cols;
    {
        std::istringstream hs(line);
        std::string c;
        while (std::getline(hs, c, ',')) cols.push_back(c);
    }
    s.plan.scalar = false;
    for (const auto& c : cols) {
        if (c == "min_scal") s.plan.scalar = true;
        if (c.rfind("conc_", 0) == 0) s.plan.radii.push_back(std::stod(c.substr(5)));
        if (c == "l2_ref") s.plan.vs_reference = true;
        if (c == "sup_dev_avg") s.plan.vs_average = true;
        if (c == "sup_rm") s.plan.sup_riemann = true;
    }
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string cell;
        std::vector<double> v;
        while (std::getline(ls, cell, ',')) v.push_back(std::stod(cell));
        if (v.size() != cols.size()) throw std::runtime_error("series CSV row width mismatch");
        DiagnosticsRecord r;
        std::size_t i = 0;
        r.t = v[i++]; r.dt = v[i++]; r.step = static_cast<long>(v[i++]);
        r.lambda_min = v[i++]; r.lambda_max = v[i++];
        r.sup_grad = v[i++]; r.sup_hess = v[i++];
        r.ratio1 = v[i++]; r.ratio2 = v[i++];
        if (s.plan.scalar) { r.min_scal = v[i++]; r.max_scal = v[i++]; }
        r.int_gradn = v[i++];
        for (std::size_t k = 0; k < s.plan.radii.size(); ++k) r.conc.push_back(v[i++]);
        if (s.plan.vs_reference) { r.l2_ref = v[i++]; r.w1n_grad_ref = v[i++]; r.w1n_l_ref = v[i++]; }
        if (s.plan.vs_average) r.sup_dev_avg = v[i++];
        if (s.plan.sup_riemann) r.sup_rm = v[i++];
        s.records.push_back(std::move(r));
    }
    return s;
}

}  // namespace hflow
