#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <random>

#include "hflow/field.hpp"
#include "hflow/lattice.hpp"
#include "hflow/oracles.hpp"
#include "hflow/parallel.hpp"
#include "hflow/quadrature.hpp"
#include "hflow/snapshot.hpp"
#include "hflow/stencil.hpp"

using namespace hflow;

namespace {
constexpr double kTwoPi = 2.0 * M_PI;

Field sin_field(const Lattice& lat, int axis, int freq = 1) {
    Field f = Field::scalar(lat);
    double w = kTwoPi * freq / lat.period();
    for (std::size_t i = 0; i < lat.nodes(); ++i)
        f.at(0, i) = std::sin(w * lat.position(i)[axis]);
    return f;
}
}  // namespace

TEST_CASE("lattice invariants") {
    CHECK_THROWS(Lattice(4, 16, 1.0));
    CHECK_THROWS(Lattice(3, 4, 1.0));
    CHECK_THROWS(Lattice(3, 16, -1.0));
    Lattice lat(3, 16, 2.0);
    CHECK(lat.spacing() * lat.n() == lat.period());  // dx derived from (L, n)
    CHECK(lat.nodes() == 4096);
    CHECK(lat.wrap(-1) == 15);
    CHECK(lat.wrap(16) == 0);
    // index/coords round trip
    for (std::size_t node : {std::size_t(0), std::size_t(123), lat.nodes() - 1})
        CHECK(lat.index(lat.coords(node)) == node);
}

TEST_CASE("partial of a constant vanishes exactly") {
    Lattice lat(3, 8, 1.0);
    Field f = Field::scalar(lat);
    f.fill(3.7);
    for (int order : {2, 4})
        for (int a = 0; a < 3; ++a) CHECK(max_abs(partial(f, a, order)) == 0.0);
}

TEST_CASE("partial axis range is checked") {
    Lattice lat(2, 8, 1.0);
    Field f = Field::scalar(lat);
    CHECK_THROWS_AS(partial(f, 2, 2), std::out_of_range);
    CHECK_THROWS_AS(second_partial(f, 0, 2, 2), std::out_of_range);
}

TEST_CASE("order-2 partial of sin respects the Taylor remainder bound") {
    auto r = oracle::run("partial_sin_bound");
    CHECK(r.measured["max_err"] <= r.values["bound"]);
    CHECK(r.measured["max_err"] > 0.5 * r.values["bound"]);  // bound is tight
}

TEST_CASE("second partial of sin matches the analytic derivative at O(dx^2)") {
    auto r = oracle::run("second_partial_sin");
    CHECK(r.measured["max_err"] <= r.values["bound"]);
}

TEST_CASE("stencils are exact on polynomials away from the wrap") {
    Lattice lat(2, 32, 1.0);
    Field f = Field::scalar(lat);
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        double x = lat.position(i)[0];
        f.at(0, i) = x * x * x;
    }
    Field d2 = partial(f, 0, 2);
    Field d4 = partial(f, 0, 4);
    Field dd4 = second_partial(f, 0, 0, 4);
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        double x = lat.position(i)[0];
        if (x < 3 * lat.spacing() || x > lat.period() - 3 * lat.spacing()) continue;
        // order 2 is exact on quadratics only; cubic leaves the dx^2/6 f''' term
        CHECK(d2.at(0, i) == doctest::Approx(3 * x * x + lat.spacing() * lat.spacing()).epsilon(1e-10));
        CHECK(d4.at(0, i) == doctest::Approx(3 * x * x).epsilon(1e-9));
        CHECK(dd4.at(0, i) == doctest::Approx(6 * x).epsilon(1e-8));
    }
}

TEST_CASE("mixed second partials commute") {
    Lattice lat(3, 16, 1.0);
    Field f = Field::scalar(lat);
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        auto p = lat.position(i);
        f.at(0, i) = std::sin(kTwoPi * p[0]) * std::sin(kTwoPi * p[1]) * std::cos(kTwoPi * p[2]);
    }
    for (int order : {2, 4}) {
        Field ab = second_partial(f, 0, 1, order);
        Field ba = second_partial(f, 1, 0, order);
        CHECK(max_abs_diff(ab, ba) == 0.0);  // identical composition path
    }
}

TEST_CASE("mixed partial of a product matches the analytic value") {
    Lattice lat(2, 64, 1.0);
    Field f = Field::scalar(lat);
    double w = kTwoPi / lat.period();
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        auto p = lat.position(i);
        f.at(0, i) = std::sin(w * p[0]) * std::sin(w * p[1]);
    }
    Field d = second_partial(f, 0, 1, 2);
    double err = 0;
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        auto p = lat.position(i);
        err = std::max(err, std::fabs(d.at(0, i) - w * w * std::cos(w * p[0]) * std::cos(w * p[1])));
    }
    CHECK(err < 2.0 * w * w * w * w * lat.spacing() * lat.spacing() / 6.0);
}

TEST_CASE("refinement reduces stencil error at the advertised order") {
    for (int order : {2, 4}) {
        double errs[2];
        int k = 0;
        for (int n : {32, 64}) {
            Lattice lat(2, n, 1.0);
            Field f = sin_field(lat, 0, 2);
            Field d = partial(f, 0, order);
            double w = 2 * kTwoPi / lat.period();
            double e = 0;
            for (std::size_t i = 0; i < lat.nodes(); ++i)
                e = std::max(e, std::fabs(d.at(0, i) - w * std::cos(w * lat.position(i)[0])));
            errs[k++] = e;
        }
        double factor = errs[0] / errs[1];
        if (order == 2) CHECK(factor >= 3.8);
        else CHECK(factor >= 14.0);
    }
}

TEST_CASE("derivatives are translation equivariant") {
    Lattice lat(3, 12, 1.0);
    Field f = Field::scalar(lat);
    std::mt19937_64 eng(9);
    for (std::size_t i = 0; i < lat.nodes(); ++i)
        f.at(0, i) = (eng() >> 11) * 0x1.0p-53;
    std::array<int, 3> shift{3, 7, 5};
    for (int order : {2, 4}) {
        Field a = partial(f.translated(shift), 1, order);
        Field b = partial(f, 1, order).translated(shift);
        CHECK(max_abs_diff(a, b) == 0.0);
        Field c = second_partial(f.translated(shift), 0, 2, order);
        Field d = second_partial(f, 0, 2, order).translated(shift);
        CHECK(max_abs_diff(c, d) == 0.0);
    }
}

TEST_CASE("ball mean of a constant is its absolute value") {
    Lattice lat(3, 16, 2.0);
    Field f = Field::scalar(lat);
    f.fill(-2.5);
    CHECK(ball_mean_p(f, 5, 0.6, 1.0) == doctest::Approx(2.5).epsilon(1e-14));
    CHECK(ball_mean_p(f, 5, 0.6, 3.0) == doctest::Approx(2.5).epsilon(1e-14));
}

TEST_CASE("ball radius beyond half the period is rejected") {
    Lattice lat(3, 16, 1.0);
    Field f = Field::scalar(lat);
    CHECK_THROWS(ball_mean_p(f, 0, 0.6, 1.0));
}

TEST_CASE("half-space indicator mean matches the exact node count") {
    auto r = oracle::run("ball_indicator_half");
    CHECK(r.measured["ball_mean_p1"] == doctest::Approx(r.values["exact_fraction"]).epsilon(1e-14));
    // a centered ball on the interface averages to ~1/2 up to one shell
    Lattice lat(3, 32, 1.0);
    Field f = Field::scalar(lat);
    for (std::size_t i = 0; i < lat.nodes(); ++i)
        f.at(0, i) = lat.position(i)[0] < 0.5 ? 1.0 : 0.0;
    double v = ball_mean_p(f, lat.index({16, 16, 16}), 0.25, 1.0);
    CHECK(std::fabs(v - 0.5) < lat.spacing() / 0.25);
}

TEST_CASE("ball mean against a direct sum") {
    Lattice lat(3, 16, 1.0);
    Field f = Field::scalar(lat);
    std::mt19937_64 eng(4);
    for (std::size_t i = 0; i < lat.nodes(); ++i)
        f.at(0, i) = (eng() >> 11) * 0x1.0p-53;
    double radius = 0.3;
    std::size_t center = lat.index({3, 9, 14});
    Ball ball(lat, radius);
    std::vector<std::size_t> idx;
    ball.gather(lat, center, idx);
    double s = 0;
    for (auto id : idx) s += std::pow(std::fabs(f.at(0, id)), 3.0);
    double ref = std::cbrt(s / idx.size());
    CHECK(ball_mean_p(f, center, radius, 3.0) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("global integral closed forms") {
    Lattice lat(3, 16, 1.3);
    Field one = Field::scalar(lat);
    one.fill(1.0);
    CHECK(global_integral(one) ==
          doctest::Approx(std::pow(1.3, 3)).epsilon(1e-13));
    Field s = sin_field(lat, 0);
    CHECK(std::fabs(global_integral(s)) <= 1e-12 * std::pow(1.3, 3));
    auto r = oracle::run("integral_sin2");
    CHECK(r.measured["integral"] == doctest::Approx(r.values["closed_form"]).epsilon(1e-10));
}

TEST_CASE("deterministic sums are reproducible and match the tree split") {
    std::vector<double> v(10000);
    std::mt19937_64 eng(7);
    for (auto& x : v) x = (eng() >> 11) * 0x1.0p-53 - 0.5;
    double a = deterministic_sum(v);
    double b = deterministic_sum(v);
    CHECK(a == b);
    // the fixed pairwise split: sum(v) == sum(first half) + sum(second half)
    std::span<const double> sp(v);
    double c = deterministic_sum(sp.subspan(0, 5000)) + deterministic_sum(sp.subspan(5000));
    CHECK(a == c);
    double d = deterministic_sum(v.size(), [&](std::size_t i) { return v[i]; });
    CHECK(a == d);
}

TEST_CASE("snapshot round trip is bit exact") {
    Lattice lat(3, 8, 0.7);
    Field f = Field::sym2(lat);
    std::mt19937_64 eng(12);
    for (auto& x : f.raw_values()) x = (eng() >> 11) * 0x1.0p-53 - 0.5;
    auto path = std::filesystem::temp_directory_path() / "hflow_snap_test.bin";
    write_snapshot(path.string(), f);
    Field g = read_snapshot(path.string());
    CHECK(g.lattice() == f.lattice());
    CHECK(g.shape() == f.shape());
    REQUIRE(g.raw_values().size() == f.raw_values().size());
    CHECK(std::memcmp(g.raw_values().data(), f.raw_values().data(),
                      f.raw_values().size() * sizeof(double)) == 0);
    std::filesystem::remove(path);
}

TEST_CASE("field translation wraps periodically") {
    Lattice lat(2, 8, 1.0);
    Field f = Field::scalar(lat);
    f.at(0, lat.index({2, 3})) = 1.0;
    Field t = f.translated({7, 6, 0});
    CHECK(t.at(0, lat.index({1, 1})) == 1.0);
}

TEST_CASE("periodic hat function has the centered slope at smooth points") {
    Lattice lat(2, 32, 1.0);
    Field f = Field::scalar(lat);
    // triangle wave: distance to the nearest of {0, L/2} along x
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        double x = lat.position(i)[0];
        f.at(0, i) = std::min(std::fabs(x), std::min(std::fabs(x - 0.5), std::fabs(x - 1.0)));
    }
    Field d = partial(f, 0, 2);
    for (std::size_t i = 0; i < lat.nodes(); ++i) {
        double x = lat.position(i)[0];
        // kinks of the period-1/2 triangle sit at multiples of 1/4
        double dist_to_kink = 1e300;
        for (double kink : {0.0, 0.25, 0.5, 0.75, 1.0})
            dist_to_kink = std::min(dist_to_kink, std::fabs(x - kink));
        if (dist_to_kink <= lat.spacing() * 1.5) continue;  // stencil touches a kink
        double slope = ((x > 0 && x < 0.25) || (x > 0.5 && x < 0.75)) ? 1.0 : -1.0;
        CHECK(d.at(0, i) == doctest::Approx(slope).epsilon(1e-12));
    }
}
