#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hflow/errors.hpp"
#include "hflow/estimators.hpp"
#include "hflow/oracles.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/rough_init.hpp"
#include "hflow/stencil.hpp"
#include "hflow/tensor_calc.hpp"

using namespace hflow;

TEST_CASE("zero-amplitude smooth warp is exactly flat") {
    Lattice lat(3, 8, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::SmoothWarp;
    spec.amplitude = 0.0;
    for (auto shape : {WarpShape::Sinusoidal, WarpShape::ProfileConformal, WarpShape::WarpedProduct}) {
        spec.warp_shape = shape;
        CHECK(max_abs_diff(generate(spec, lat), identity_metric(lat)) == 0.0);
    }
}

TEST_CASE("every generator respects its bi-Lipschitz target") {
    Lattice lat(3, 16, 1.0);
    for (auto kind : {RoughKind::LoglogSpike, RoughKind::FourierMultiscale,
                      RoughKind::PointSingularDemo, RoughKind::SmoothWarp}) {
        RoughSpec spec;
        spec.kind = kind;
        spec.lambda0 = 1.5;
        GenerateReport rep;
        Field g = generate(spec, lat, &rep);
        CHECK(rep.lambda_min >= 1.0 / 1.5 - 1e-9);
        CHECK(rep.lambda_max <= 1.5 + 1e-9);
        // symmetric by storage; SPD verified by the report
        CHECK(g.shape().kind == TensorKind::Sym2);
    }
}

TEST_CASE("infeasible amplitude raises SpecInfeasible") {
    Lattice lat(3, 8, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::SmoothWarp;
    spec.warp_shape = WarpShape::Sinusoidal;
    spec.lambda0 = 1.2;
    spec.amplitude = 0.5;
    CHECK_THROWS_AS(generate(spec, lat), SpecInfeasible);
}

TEST_CASE("loglog spike concentration falls away from the center") {
    auto r = oracle::run("spike_field");
    CHECK(r.measured["lambda_min"] >= 1.0 / r.values["lambda0"] - 1e-9);
    CHECK(r.measured["lambda_max"] <= r.values["lambda0"] + 1e-9);
    CHECK(r.measured["mean_at_offset_1"] > r.measured["mean_at_offset_2"]);
    CHECK(r.measured["mean_at_offset_2"] > r.measured["mean_at_offset_3"]);
}

TEST_CASE("fourier multiscale is deterministic in the seed") {
    Lattice lat(3, 8, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::FourierMultiscale;
    spec.seed = 42;
    Field a = generate(spec, lat);
    Field b = generate(spec, lat);
    CHECK(max_abs_diff(a, b) == 0.0);
    spec.seed = 43;
    CHECK(max_abs_diff(generate(spec, lat), a) > 0.0);
}

TEST_CASE("point-singular demo has nonnegative scalar curvature off the center") {
    Lattice lat(3, 48, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::PointSingularDemo;
    spec.lambda0 = 1.5;
    spec.r0 = 0.4;
    Field g = generate(spec, lat);
    Field sc = scalar_curv(g, 2);
    // on the annulus where the cutoff is identically 1 and the profile is
    // resolved, the conformal construction forces R > 0; nodes within a few
    // spacings of the center see the unresolved gradient singularity
    std::array<double, 3> ctr{0.5, 0.5, 0.5};
    double worst = 1e300;
    int counted = 0;
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        double r = lat.torus_dist(lat.position(i), ctr);
        if (r > 6 * lat.spacing() && r < 0.7 * spec.r0 - 3 * lat.spacing()) {
            worst = std::min(worst, sc.at(0, i));
            ++counted;
        }
    }
    REQUIRE(counted > 0);
    CHECK(worst > 0.0);
    CHECK(scalar_floor(g, 2).max > 0.0);
}

TEST_CASE("mollifying a constant is the identity") {
    Lattice lat(3, 8, 1.0);
    Field c = identity_metric(lat);
    for (auto& v : c.raw_values()) v *= 1.7;
    Field m = mollify(c, {MollifierSpec::Kind::Gaussian, 0.2});
    CHECK(max_abs_diff(m, c) <= 1e-12);  // kernel has unit mass
    Field mb = mollify(c, {MollifierSpec::Kind::Box, 0.1});
    CHECK(max_abs_diff(mb, c) <= 1e-12);
}

TEST_CASE("mollification contracts the bi-Lipschitz interval") {
    Lattice lat(3, 16, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::LoglogSpike;
    spec.lambda0 = 1.5;
    Field g = generate(spec, lat);
    auto before = coordinate_spectrum(g);
    for (auto kind : {MollifierSpec::Kind::Gaussian, MollifierSpec::Kind::Box}) {
        Field m = mollify(g, {kind, 3 * lat.spacing()});
        auto after = coordinate_spectrum(m);
        CHECK(after.lambda_min >= before.lambda_min - 1e-12);
        CHECK(after.lambda_max <= before.lambda_max + 1e-12);
    }
}

TEST_CASE("mollification commutes with lattice translation") {
    Lattice lat(3, 8, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::FourierMultiscale;
    Field g = generate(spec, lat);
    std::array<int, 3> shift{1, 5, 2};
    MollifierSpec ms{MollifierSpec::Kind::Gaussian, 0.1};
    CHECK(max_abs_diff(mollify(g.translated(shift), ms), mollify(g, ms).translated(shift)) == 0.0);
}

TEST_CASE("underresolved kernels are rejected") {
    Lattice lat(3, 8, 1.0);
    Field g = identity_metric(lat);
    CHECK_THROWS_AS(mollify(g, {MollifierSpec::Kind::Gaussian, 0.4 * lat.spacing()}),
                    KernelUnderresolved);
}

TEST_CASE("W1n distance of the mollified spike shrinks with sigma") {
    auto r = oracle::run("mollify_w1n");
    CHECK(r.measured["w1n_sigma_0"] > r.measured["w1n_sigma_1"]);
    CHECK(r.measured["w1n_sigma_1"] > r.measured["w1n_sigma_2"]);
}

TEST_CASE("spike gradient integral is stable under refinement") {
    double vals[2];
    int k = 0;
    for (int n : {48, 96}) {
        Lattice lat(3, n, 1.0);
        RoughSpec spec;
        spec.kind = RoughKind::LoglogSpike;
        spec.lambda0 = 1.5;
        spec.beta = 2.9;
        Field g = generate(spec, lat);
        Field norm = tensor_norm_flat(gradient_sym2(g, 2));
        Field cube = Field::scalar(lat);
        for (std::size_t i = 0; i < lat.nodes(); ++i)
            cube.at(0, i) = std::pow(norm.at(0, i), 3.0);
        vals[k++] = global_integral(cube);
    }
    CHECK(std::fabs(vals[1] - vals[0]) <= 0.10 * vals[0]);
}

TEST_CASE("find_scale ladder behavior") {
    Lattice lat(3, 16, 1.0);
    std::vector<double> ladder{0.1, 0.2, 0.3, 0.4, 0.5};
    // flat: concentration 0, largest rung qualifies
    auto r0 = find_scale(identity_metric(lat), 0.01, ladder);
    REQUIRE(r0.has_value());
    CHECK(*r0 == 0.5);
    // smooth warp: small amplitude sits near the top; doubling the amplitude
    // shrinks or keeps the scale
    RoughSpec spec;
    spec.kind = RoughKind::SmoothWarp;
    spec.warp_shape = WarpShape::Sinusoidal;
    spec.amplitude = 0.05;
    auto r1 = find_scale(generate(spec, lat), 0.25, ladder);
    spec.amplitude = 0.1;
    auto r2 = find_scale(generate(spec, lat), 0.25, ladder);
    REQUIRE(r1.has_value());
    REQUIRE(r2.has_value());
    CHECK(*r1 >= *r2);
    // monotone non-increasing in epsilon
    spec.amplitude = 0.08;
    Field g = generate(spec, lat);
    std::optional<double> prev;
    for (double eps : {0.5, 0.25, 0.12}) {
        auto r = find_scale(g, eps, ladder);
        if (prev && r) CHECK(*r <= *prev);
        if (prev && !r) CHECK(true);
        if (r) prev = r;
    }
}

TEST_CASE("warp amplitude calibration hits the requested floor") {
    double kappa = -0.25;
    double a = calibrate_warp_amplitude(kappa, 1, 1.0);
    CHECK(a > 0);
    double om = 2.0 * M_PI;
    double mn = 1e300;
    for (int i = 0; i < 20000; ++i) {
        double x = 2.0 * M_PI * i / 20000;
        mn = std::min(mn, 2 * a * om * om * std::sin(x) - 2 * a * a * om * om * std::cos(x) * std::cos(x));
    }
    CHECK(mn == doctest::Approx(kappa).epsilon(1e-6));
    // the sampled metric's discrete floor matches at stencil accuracy
    Lattice lat(3, 32, 1.0);
    RoughSpec spec;
    spec.kind = RoughKind::SmoothWarp;
    spec.warp_shape = WarpShape::WarpedProduct;
    spec.amplitude = a;
    Field g = generate(spec, lat);
    CHECK(scalar_floor(g, 2).min == doctest::Approx(kappa).epsilon(0.02));
}
