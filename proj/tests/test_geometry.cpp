#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "ksbox/domain.hpp"

using namespace ksbox;
using Catch::Approx;

TEST_CASE("steklov constant on reference boxes", "[geometry]") {
    CHECK(steklov_constant(DomainSpec{pi, pi}) == Approx(2.0).epsilon(1e-15));
    CHECK(steklov_constant(DomainSpec{pi, pi, pi}) == Approx(3.0).epsilon(1e-15));
    CHECK(steklov_constant(DomainSpec{1.0, 1.0}) == Approx(2.0 * pi * pi).epsilon(1e-15));
    CHECK(steklov_constant(DomainSpec{1.0, 1.0}) == Approx(19.7392088021787).epsilon(1e-12));
}

TEST_CASE("steklov constant rejects bad domains", "[geometry]") {
    CHECK_THROWS_AS(steklov_constant(DomainSpec{}), std::invalid_argument);
    CHECK_THROWS_AS(steklov_constant(DomainSpec{1.0, -1.0}), std::invalid_argument);
    CHECK_THROWS_AS(steklov_constant(DomainSpec{1, 1, 1, 1, 1, 1, 1, 1}), std::invalid_argument);
    DomainSpec mismatched;
    mismatched.n = 3;
    mismatched.lengths = {1.0, 1.0};
    CHECK_THROWS_AS(steklov_constant(mismatched), std::invalid_argument);
}

TEST_CASE("damping margin on reference boxes", "[geometry]") {
    auto dm = damping_margin(DomainSpec{pi, pi});  // a = 2
    CHECK(dm.a == Approx(2.0).epsilon(1e-15));
    CHECK(dm.theta == Approx(0.5).epsilon(1e-15));
    CHECK(dm.geometric_ok);
    CHECK(dm.a * dm.a * dm.theta / 2.0 == Approx(1.0).epsilon(1e-15));

    // a = 1 exactly at L_i = sqrt(2) pi: marginal, no decay.
    const double L = std::sqrt(2.0) * pi;
    auto dm1 = damping_margin(DomainSpec{L, L});
    CHECK(dm1.theta == Approx(0.0).margin(1e-15));
    CHECK_FALSE(damping_margin(DomainSpec{2 * pi, 2 * pi}).geometric_ok);

    auto dm2 = damping_margin(DomainSpec{2.0, 2.0});
    CHECK(dm2.a == Approx(pi * pi / 2.0).epsilon(1e-15));
    CHECK(dm2.a == Approx(4.9348022005446793).epsilon(1e-14));
    CHECK(dm2.theta == Approx(1.0 - 2.0 / (pi * pi)).epsilon(1e-15));
    CHECK(dm2.theta == Approx(0.79735763271532445).epsilon(1e-14));
    CHECK(predicted_decay_rate(DomainSpec{2.0, 2.0}) == Approx(9.7087352789779633).epsilon(1e-12));
}

TEST_CASE("smallness margin at zero energy equals theta", "[geometry]") {
    DomainSpec dom{2.0, 2.0};
    auto dm = damping_margin(dom);
    auto sm = smallness_check(dom, 0.0, 1.0, ExponentMode::dimension_ncubed);
    CHECK(sm.margin == dm.theta);
    CHECK(sm.ok);
}

TEST_CASE("smallness margin vanishes exactly at the threshold energy", "[geometry]") {
    DomainSpec dom{pi, pi};  // a = 2, theta = 1/2
    // E* = a theta^2 / (2 cs^2 n^3) = 2 * 0.25 / 16 = 0.03125
    CHECK(max_initial_energy(dom, 1.0, ExponentMode::dimension_ncubed) == Approx(0.03125).epsilon(1e-15));
    auto sm = smallness_check(dom, 0.03125, 1.0, ExponentMode::dimension_ncubed);
    CHECK(sm.margin == Approx(0.0).margin(1e-15));
    CHECK_FALSE(sm.ok);
}

TEST_CASE("smallness margin with the worst-case multiplier", "[geometry]") {
    DomainSpec dom{pi, pi};
    // margin = theta - (2 cs^2 343 / (a theta)) E0 = 0.5 - 686 * 0.03125
    auto sm = smallness_check(dom, 0.03125, 1.0, ExponentMode::seven_cubed);
    CHECK(sm.margin == Approx(-20.9375).epsilon(1e-13));
    CHECK_FALSE(sm.ok);
    CHECK(max_initial_energy(dom, 1.0, ExponentMode::seven_cubed) ==
          Approx(0.5 / 686.0).epsilon(1e-14));
    CHECK(max_initial_energy(dom, 1.0, ExponentMode::seven_cubed) ==
          Approx(7.2886297376093293e-4).epsilon(1e-13));
}

TEST_CASE("smallness check rejects invalid inputs", "[geometry]") {
    DomainSpec dom{pi, pi};
    CHECK_THROWS_AS(smallness_check(dom, 0.1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(smallness_check(dom, 0.1, -1.0), std::invalid_argument);
    CHECK_THROWS_AS(smallness_check(dom, -0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(smallness_check(DomainSpec{2 * pi, 2 * pi}, 0.1, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(max_initial_energy(DomainSpec{2 * pi, 2 * pi}, 1.0), std::invalid_argument);
}

TEST_CASE("threshold energy round-trips through the margin", "[geometry]") {
    for (ExponentMode mode : {ExponentMode::dimension_ncubed, ExponentMode::seven_cubed}) {
        DomainSpec dom{2.0, 1.5, 3.0};
        const double cs = 0.7;
        const double estar = max_initial_energy(dom, cs, mode);
        CHECK(smallness_check(dom, 0.999 * estar, cs, mode).ok);
        CHECK_FALSE(smallness_check(dom, 1.001 * estar, cs, mode).ok);
    }
}

TEST_CASE("margin is affine and decreasing in E0", "[geometry]") {
    DomainSpec dom{2.0, 2.5};
    const double cs = 1.3;
    auto m = [&](double E0) { return smallness_check(dom, E0, cs).margin; };
    const double theta = damping_margin(dom).theta;
    CHECK(m(0.0) == theta);
    const double m1 = m(0.01), m2 = m(0.02), m3 = m(0.03);
    CHECK(m2 - m1 == Approx(m3 - m2).epsilon(1e-10));
    CHECK(m1 > m2);
    CHECK(m2 > m3);
}

TEST_CASE("steklov constant grows when any side is halved", "[geometry]") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> len(0.3, 8.0);
    std::uniform_int_distribution<int> dim(1, 7);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = dim(rng);
        std::vector<double> Ls(n);
        for (auto& L : Ls) L = len(rng);
        DomainSpec dom(Ls);
        const double a0 = steklov_constant(dom);
        for (int i = 0; i < n; ++i) {
            DomainSpec halved = dom;
            halved.lengths[static_cast<std::size_t>(i)] *= 0.5;
            CHECK(steklov_constant(halved) > a0);
        }
        CHECK(damping_margin(dom).theta < 1.0);
        CHECK(damping_margin(dom).geometric_ok == (a0 > 1.0));
    }
}

TEST_CASE("doubling every side quarters the constant", "[geometry]") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> len(0.3, 8.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> Ls(3);
        for (auto& L : Ls) L = len(rng);
        DomainSpec dom(Ls), dbl = dom;
        for (auto& L : dbl.lengths) L *= 2.0;
        CHECK(steklov_constant(dbl) == steklov_constant(dom) / 4.0);
    }
}

TEST_CASE("condition report bundles both conditions", "[geometry]") {
    auto rep = check_conditions(DomainSpec{2.0, 2.0}, 0.01, 0.5);
    CHECK(rep.geometric_ok);
    CHECK(rep.smallness_ok);
    CHECK(rep.theta == 1.0 - 1.0 / rep.a);
    CHECK(rep.decay_rate == rep.a * rep.a * rep.theta / 2.0);
    CHECK(rep.cs_used == 0.5);

    // Geometric failure is reported, not thrown.
    auto bad = check_conditions(DomainSpec{30.0, 30.0}, 0.01, 0.5);
    CHECK_FALSE(bad.geometric_ok);
    CHECK_FALSE(bad.smallness_ok);
    CHECK(bad.a == Approx(2.0 * pi * pi / 900.0).epsilon(1e-14));
}
