#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "doctest.h"
#include "horolab/lattice.hpp"
#include "horolab/quadrature.hpp"

using namespace horolab;

namespace {

GroupElement random_within(std::mt19937_64& rng, double radius) {
    std::uniform_real_distribution<double> u(0, 1);
    const double phi = 2 * std::numbers::pi * u(rng), r = radius * u(rng), th = 2 * std::numbers::pi * u(rng);
    return compose(compose(k_matrix(phi), geodesic(GroupElement::identity(), r)), k_matrix(th));
}

// Point of the upper half plane for the disk point rho e^{i phi}.
std::complex<double> from_disk(double rho, double phi) {
    const std::complex<double> w = std::polar(rho, phi), I(0, 1);
    return I * (1.0 + w) / (1.0 - w);
}

}  // namespace

TEST_CASE("octagon group data") {
    const auto grp = FuchsianGroup::regular_octagon();
    REQUIRE(grp.generators.size() == 8);
    for (std::size_t k = 0; k < 8; ++k) {
        const auto& g = grp.generators[k];
        CHECK(std::abs(g.det() - 1) < 1e-12);
        CHECK(std::abs(g.trace()) > 2);
        CHECK(projective_diff(compose(g, grp.generators[grp.inverse_index[k]]), GroupElement::identity()) < 1e-10);
        // each generator moves i by twice the inradius: cosh d = 5 + 4 sqrt 2
        CHECK(cosh_distance_to_i(g) == doctest::Approx(5 + 4 * std::sqrt(2.0)).epsilon(1e-12));
    }
    CHECK(projective_diff(grp.word_product(grp.relator), GroupElement::identity()) < 1e-8);
    CHECK(grp.domain_radius == doctest::Approx(std::acosh(3 + 2 * std::sqrt(2.0))));
}

TEST_CASE("json round trip") {
    const auto grp = FuchsianGroup::regular_octagon();
    const auto back = FuchsianGroup::from_json(grp.to_json());
    for (std::size_t k = 0; k < 8; ++k) CHECK(max_entry_diff(back.generators[k], grp.generators[k]) < 1e-15);
    CHECK(back.relator == grp.relator);
    CHECK_THROWS(FuchsianGroup::from_json("{\"generators\": []}"));
    CHECK_THROWS(FuchsianGroup::from_json("not json"));
}

TEST_CASE("reduction") {
    const auto grp = FuchsianGroup::regular_octagon();
    const auto id = reduce(grp, GroupElement::identity());
    CHECK(id.word.empty());
    CHECK(max_entry_diff(id.representative, GroupElement::identity()) == 0);
    for (int k = 0; k < 8; ++k) {
        const auto r = reduce(grp, grp.generators[k]);
        REQUIRE(r.word.size() == 1);
        CHECK(r.word[0] == grp.inverse_index[k]);
        CHECK(distance_to_i(r.representative) < 1e-6);
    }
    std::mt19937_64 rng(2);
    for (int i = 0; i < 20; ++i) {
        const auto g = random_within(rng, 5);
        const auto r = reduce(grp, g);
        CHECK(std::abs(distance_to_i(r.representative) - brute_force_min_distance(grp, g, 6)) < 1e-9);
        // representative = word applied to g
        GroupElement w = g;
        for (int k : r.word) w = compose(grp.generators[k], w);
        CHECK(projective_diff(w, r.representative) < 1e-8);
        CHECK(reduce(grp, r.representative).word.empty());
        for (const auto& gam : grp.generators) {
            CHECK(distance_to_i(r.representative) <= distance_to_i(compose(gam, r.representative)) + 1e-9);
            CHECK(projective_diff(reduce(grp, compose(gam, g)).representative, r.representative) < 1e-8);
        }
        const auto z = r.representative;
        const double y = height(z), x = (z.a * z.c + z.b * z.d) * y;
        CHECK(grp.in_domain(x, y, 1e-9));
    }
}

TEST_CASE("haar sampler") {
    const auto grp = FuchsianGroup::regular_octagon();
    CHECK(sample_haar(grp, 0, 1).empty());
    const auto a = sample_haar(grp, 50, 9), b = sample_haar(grp, 50, 9);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(max_entry_diff(a[i].representative, b[i].representative) == 0);

    // domain integrals in the disk model, boundary radius per angle by bisection
    auto boundary = [&](double phi) {
        double lo = 0, hi = 0.999;
        for (int it = 0; it < 60; ++it) {
            const double m = 0.5 * (lo + hi);
            const auto z = from_disk(m, phi);
            (grp.in_domain(z.real(), z.imag(), 0) ? lo : hi) = m;
        }
        return lo;
    };
    auto polar = [&](auto&& g) {
        return integrate_scalar(
                   [&](double phi) {
                       const double rb = boundary(phi);
                       return integrate_scalar(
                                  [&](double rho) {
                                      const double s = 1 - rho * rho;
                                      return g(from_disk(rho, phi)) * 4 * rho / (s * s);
                                  },
                                  0, rb)
                           .value[0];
                   },
                   0, 2 * std::numbers::pi, QuadOptions{std::numbers::pi / 32, 1e-12, 1e-10, 4})
            .value[0];
    };
    const double area = polar([](std::complex<double>) { return 1.0; });
    CHECK(area == doctest::Approx(4 * std::numbers::pi).epsilon(1e-5));
    const double mean_y = polar([](std::complex<double> z) { return z.imag(); }) / area;

    const auto s = sample_haar(grp, 100000, 4);
    double m = 0, m2 = 0;
    for (const auto& p : s) {
        const double y = height(p.representative);
        m += y;
        m2 += y * y;
    }
    m /= s.size();
    const double se = std::sqrt((m2 / s.size() - m * m) / s.size());
    CHECK(std::abs(m - mean_y) < 3 * se);

    const auto chi = haar_chi_square(grp, sample_haar(grp, 20000, 17));
    CHECK(chi.p_value > 0.01);
    CHECK(chi.total_mass == doctest::Approx(4 * std::numbers::pi).epsilon(1e-4));
}

TEST_CASE("recurrent orbits") {
    const auto grp = FuchsianGroup::regular_octagon();
    CHECK(recurrent_orbit_check(grp, GroupElement::identity(), 0).pass);
    const auto x = sample_haar(grp, 1, 5).front().representative;
    const auto rep = recurrent_orbit_check(grp, x, 1000);
    CHECK_MESSAGE(rep.pass, rep.summary());
    // without reduction the height follows 1/(c^2 + (c t + d)^2)
    for (double t : {10.0, 100.0, 1000.0}) {
        const double q = x.c * t + x.d;
        CHECK(height(horocycle(x, t)) == doctest::Approx(1 / (x.c * x.c + q * q)).epsilon(1e-12));
    }
    CHECK(height(horocycle(x, 1000)) < 1e-3 * height(x));
}
