#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "conetheta/cone.hpp"
#include "conetheta/fukaya.hpp"
#include "oracles.hpp"

using namespace conetheta;

namespace {
const ModuliParams P(cplx(0, 1), 25, 1e-10);

TriangleConfig fig_config(double q, double t, double v_override = -1e9) {
    TriangleConfig c;
    c.p = pi;
    c.s = 0.0;
    c.u = 0.0;  // p + s + pi mod 2 pi
    c.q = q;
    c.t = t;
    c.v = (v_override > -1e8) ? v_override : q + t + pi;
    return c;
}
}  // namespace

TEST_CASE("brane construction mirrors the bundle constraints") {
    CHECK_THROWS_AS(make_brane(2, 4, 0.0, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_brane(0, 1, 0.0, 0.0), std::invalid_argument);
    const BraneDescriptor b = make_brane(2, 1, pi, 0.3);
    CHECK(b.slope() == doctest::Approx(0.5));
    CHECK(b.position() == doctest::Approx(pi / 2));
}

TEST_CASE("intersections: counts and coordinates") {
    const BraneDescriptor l0 = make_brane(1, 0, pi, 0.0);
    const BraneDescriptor l1 = make_brane(1, 1, 0.0, 0.0);
    const auto pts = intersections(l0, l1);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0][0] == doctest::Approx(pi).epsilon(1e-12));
    CHECK(pts[0][1] == doctest::Approx(pi).epsilon(1e-12));

    const BraneDescriptor lh = make_brane(2, 1, 0.0, 0.0);
    CHECK(intersections(l0, lh).size() == 1);
    CHECK(intersections(lh, l1).size() == 1);

    // |b n - a m| points for a higher-degree pair
    const BraneDescriptor l2 = make_brane(1, 2, 0.4, 0.0);
    CHECK(intersections(l0, l2).size() == 2);

    CHECK_THROWS_AS(intersections(l1, make_brane(1, 1, 0.7, 0.0)), std::invalid_argument);
}

TEST_CASE("holonomy factors along brane edges") {
    const BraneDescriptor l0 = make_brane(1, 0, pi, 0.7);
    // zero-length edge
    CHECK(std::abs(holonomy_factor(l0, {1.0, pi}, {1.0, pi}) - 1.0) < 1e-15);
    // a full loop accumulates e^{i q}
    CHECK(std::abs(holonomy_factor(l0, {0.0, pi}, {two_pi, pi}) - std::exp(iu * 0.7)) < 1e-14);
    // orientation reversal conjugates the unit-modulus factor
    const cplx f = holonomy_factor(l0, {0.0, pi}, {1.3, pi});
    const cplx g = holonomy_factor(l0, {1.3, pi}, {0.0, pi});
    CHECK(std::abs(f * g - 1.0) < 1e-15);
    CHECK(std::abs(std::abs(f) - 1.0) < 1e-15);
    // off-line edges are rejected
    CHECK_THROWS_AS(holonomy_factor(l0, {0.0, pi + 0.1}, {1.0, pi + 0.1}), std::invalid_argument);
    // a slope-1/2 brane accepts its shifted covering copies
    const BraneDescriptor lh = make_brane(2, 1, 0.0, 0.4);
    CHECK_NOTHROW(holonomy_factor(lh, {0.0, pi}, {2.0, pi + 1.0}));
}

TEST_CASE("triangle family: areas and edge lengths at the reference configuration") {
    const auto tris = enumerate_triangles(fig_config(0.0, 0.0), P, 6);
    int checked = 0;
    int covered = 0;  // every family index with |n| <= 5 must appear
    for (const auto& tr : tris) {
        if (std::abs(tr.index) <= 5) ++covered;
        const double expect = 0.5 * pi * pi * (2.0 * tr.index + 1.0) * (2.0 * tr.index + 1.0);
        CHECK(tr.area_euclid == doctest::Approx(expect).epsilon(1e-10));
        // base edge parallel to the x-axis has length pi |2n + 1|
        const double base = std::abs(tr.vertices[2][0] - tr.vertices[1][0]);
        CHECK(base == doctest::Approx(pi * std::abs(2.0 * tr.index + 1.0)).epsilon(1e-12));
        CHECK(std::abs(tr.area_sympl - (-tr.area_euclid / P.tau)) < 1e-12);
        if (tr.index == 0 || tr.index == -1) {
            CHECK(tr.area_euclid == doctest::Approx(pi * pi / 2.0).epsilon(1e-12));
            ++checked;
        }
        if (tr.index == 1 || tr.index == -2) {
            CHECK(tr.area_euclid == doctest::Approx(4.5 * pi * pi).epsilon(1e-12));
            ++checked;
        }
    }
    CHECK(checked == 4);
    CHECK(covered == 11);
}

TEST_CASE("triangle terms cancel in symmetric pairs at the cone class") {
    const auto tris = enumerate_triangles(fig_config(0.3, 0.8), P, 6);
    auto find = [&](int idx) {
        for (const auto& tr : tris)
            if (tr.index == idx) return tr;
        throw std::runtime_error("missing triangle");
    };
    for (int n : {0, 1, 2}) {
        const auto& ta = find(n);
        const auto& tb = find(-n - 1);
        CHECK(ta.sign * tb.sign == -1);  // opposite parity markers
        CHECK(std::abs(ta.term + tb.term) < 1e-12 * (1.0 + std::abs(ta.term)));
    }
}

TEST_CASE("m2 vanishes exactly on the cone class") {
    std::mt19937 rng(510510);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const double q = ur(rng), t = ur(rng);
        const TriangleConfig c = fig_config(q, t);
        CHECK(std::abs(m2_constant(c, P, M2Route::Triangles)) < 1e-10);
        CHECK(std::abs(m2_constant(c, P, M2Route::ClosedForm)) < 1e-10);
    }
}

TEST_CASE("m2 routes agree away from the vanishing class") {
    std::mt19937 rng(99123);
    std::uniform_real_distribution<double> ur(-1.0, 1.0);
    for (cplx tau : {cplx(0, 1), cplx(0.3, 1.1), cplx(-0.5, 0.8)}) {
        const ModuliParams prm(tau, 25, 1e-10);
        for (int rep = 0; rep < 10; ++rep) {
            TriangleConfig c = fig_config(ur(rng), ur(rng));
            c.u = std::fmod(c.p + c.s + pi + 1.3, two_pi);  // generic offset
            c.v = ur(rng);
            const cplx a = m2_constant(c, prm, M2Route::Triangles);
            const cplx b = m2_constant(c, prm, M2Route::ClosedForm);
            CHECK(std::abs(a - b) < 1e-8 * (1.0 + std::abs(b)));
            CHECK(std::abs(b) > 1e-6);  // genuinely off the zero class
        }
    }
}

TEST_CASE("m2 theta-null form at the vanishing class") {
    // the closed form at u = p+s+pi, v = q+t+pi is the odd theta null at -1/tau
    const TriangleConfig c = fig_config(0.25, -0.4);
    const cplx val = m2_constant(c, P, M2Route::ClosedForm);
    const cplx null = oracle::theta_series(0.5, 0.5, 0.0, -1.0 / P.tau);
    CHECK(std::abs(val - null) < 1e-12);
    CHECK(std::abs(null) < 1e-13);
}

TEST_CASE("m3 constant ties the triangle data to the theta derivative") {
    for (cplx tau : {cplx(0, 1), cplx(0.3, 1.1), cplx(-0.5, 0.8)}) {
        const ModuliParams prm(tau, 25, 1e-10);
        const cplx m3 = m3_nontransversal_constant(prm);
        const cplx dz = oracle::theta_series_dz(0.5, 0.5, 0.0, -1.0 / tau);
        CHECK(std::abs(m3 + dz) < 1e-10 * std::abs(m3));
        // cross-side identity with c_tau
        const cplx c = c_tau(prm, CTauRoute::Direct);
        const cplx rhs = (std::conj(tau) - tau) / (4.0 * pi * tau) * iu * m3;
        CHECK(std::abs(c - rhs) < 1e-10 * std::abs(c));
    }
    // golden value at tau = i: minus the theta-kernel derivative constant
    const cplx m3 = m3_nontransversal_constant(P);
    CHECK(std::abs(m3 - cplx(2.8486946039877874, 0.0)) < 1e-12);
}

TEST_CASE("edge-length coefficients match the figure") {
    // coefficient of the l-th term is pi(2l+1): edge lengths pi, 3pi, ...
    const auto tris = enumerate_triangles(fig_config(0.0, 0.0), P, 3);
    for (const auto& tr : tris) {
        const double base = std::abs(tr.vertices[2][0] - tr.vertices[1][0]);
        if (tr.index == 0 || tr.index == -1) CHECK(base == doctest::Approx(pi));
        if (tr.index == 1 || tr.index == -2) CHECK(base == doctest::Approx(3.0 * pi));
    }
}
