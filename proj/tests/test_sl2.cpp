#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "horolab/observables.hpp"
#include "horolab/sl2.hpp"

using namespace horolab;

namespace {

GroupElement random_element(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.5, 1.5);
    for (;;) {
        const double a = u(rng), b = u(rng), c = u(rng);
        if (std::abs(a) < 0.2) continue;
        return {a, b, c, (1 + b * c) / a};
    }
}

// plain product, no renormalization
GroupElement raw_product(const GroupElement& g, const GroupElement& h) {
    return {g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c, g.c * h.b + g.d * h.d};
}

}  // namespace

TEST_CASE("composition and inverses") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 50; ++i) {
        const auto g = random_element(rng), h = random_element(rng);
        CHECK(max_entry_diff(compose(GroupElement::identity(), g), g) == 0);
        CHECK(max_entry_diff(compose(g, inverse(g)), GroupElement::identity()) < 1e-12);
        CHECK(std::abs(compose(g, h).det() - 1) < 1e-12);
        CHECK(max_entry_diff(compose(g, h), raw_product(g, h)) < 1e-12 * (1 + std::abs(raw_product(g, h).a)));
    }
    const auto hs = flow_matrix(Flow::Horocycle, 0.7), ht = flow_matrix(Flow::Horocycle, -1.9);
    CHECK(max_entry_diff(compose(hs, ht), flow_matrix(Flow::Horocycle, 0.7 - 1.9)) < 1e-15);
}

TEST_CASE("renormalization removes determinant drift") {
    GroupElement g{1 + 1e-9, 0.3, 0.2, 1.06};
    g.d = (1 + 1e-8 + g.b * g.c) / g.a;
    const auto r = renormalize(g);
    CHECK(std::abs(r.det() - 1) < 1e-14);
    GroupElement acc = GroupElement::identity();
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) acc = compose(acc, k_matrix(0.1 * i));
    CHECK(std::abs(acc.det() - 1) < 1e-12);
}

TEST_CASE("flow matrices") {
    const auto h1 = flow(GroupElement::identity(), Flow::Horocycle, 1);
    CHECK(h1.a == 1);
    CHECK(h1.b == 1);
    CHECK(h1.c == 0);
    CHECK(h1.d == 1);
    const auto a = flow_matrix(Flow::Geodesic, 2);
    CHECK(a.a == doctest::Approx(std::exp(1.0)).epsilon(1e-15));
    CHECK(a.d == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    const auto v = flow_matrix(Flow::Unstable, 0.5);
    CHECK(v.c == 0.5);
    CHECK(v.b == 0);

    std::mt19937_64 rng(5);
    const auto g = random_element(rng);
    for (auto w : {Flow::Horocycle, Flow::Geodesic, Flow::Unstable}) {
        CHECK(max_entry_diff(flow(g, w, 0), g) < 1e-15);
        for (double s : {-1.3, 0.4})
            for (double t : {-0.6, 2.1})
                CHECK(max_entry_diff(flow(flow(g, w, s), w, t), flow(g, w, s + t)) < 1e-11);
    }
}

TEST_CASE("geodesic-horocycle commutation on a grid") {
    std::mt19937_64 rng(8);
    const auto g = random_element(rng);
    for (double s = -2; s <= 2; s += 0.5) {
        for (double t = -2; t <= 2; t += 0.5) {
            const auto lhs = geodesic(horocycle(g, s), t);
            const auto rhs = horocycle(geodesic(g, t), std::exp(-t) * s);
            CHECK(max_entry_diff(lhs, rhs) < 1e-11);
        }
    }
}

TEST_CASE("generator commutators") {
    const auto U = lie_direction(LieTag::U).generator, X = lie_direction(LieTag::X).generator,
               V = lie_direction(LieTag::V).generator;
    CHECK(U == Mat2{0, 1, 0, 0});
    CHECK(X == Mat2{0.5, 0, 0, -0.5});
    CHECK(V == Mat2{0, 0, 1, 0});
    CHECK(commutator(X, U) == U);
    CHECK(commutator(X, V) == V * -1.0);
    CHECK(commutator(U, V) == X * 2.0);
}

TEST_CASE("exponential matches the flows") {
    for (double t : {-1.2, 0.3, 2.5}) {
        CHECK(max_entry_diff(exp_algebra(lie_direction(LieTag::U).generator * t), flow_matrix(Flow::Horocycle, t)) < 1e-14);
        CHECK(max_entry_diff(exp_algebra(lie_direction(LieTag::X).generator * t), flow_matrix(Flow::Geodesic, t)) < 1e-13);
        CHECK(max_entry_diff(exp_algebra(lie_direction(LieTag::V).generator * t), flow_matrix(Flow::Unstable, t)) < 1e-14);
    }
    // the rotation generator has entries +-1/2, so exp(theta Theta) = k(-theta/2)
    const auto R = exp_algebra(lie_direction(LieTag::Theta).generator * 0.4);
    CHECK(max_entry_diff(R, k_matrix(-0.2)) < 1e-14);
}

TEST_CASE("iwasawa coordinates") {
    const auto id = iwasawa(GroupElement::identity());
    CHECK(id.x == doctest::Approx(0).epsilon(1e-15));
    CHECK(id.y == doctest::Approx(1));
    CHECK(id.theta == doctest::Approx(0));

    const auto a = iwasawa(flow_matrix(Flow::Geodesic, 1.7));
    CHECK(a.x == doctest::Approx(0));
    CHECK(a.y == doctest::Approx(std::exp(1.7)).epsilon(1e-14));
    CHECK(a.theta == doctest::Approx(0));

    const auto n = iwasawa(flow_matrix(Flow::Horocycle, -0.8));
    CHECK(n.x == doctest::Approx(-0.8));
    CHECK(n.y == doctest::Approx(1));

    std::mt19937_64 rng(9);
    for (int i = 0; i < 100; ++i) {
        const auto g = random_element(rng);
        const auto k = iwasawa(g);
        CHECK(k.y > 0);
        CHECK(k.theta >= 0);
        CHECK(k.theta < 2 * std::numbers::pi);
        CHECK(max_entry_diff(from_iwasawa(k), g) < 1e-10);
        // n(x) a(y) k(theta) assembled by hand
        const auto hand = raw_product(raw_product(n_matrix(k.x), a_matrix(k.y)), k_matrix(k.theta));
        CHECK(max_entry_diff(hand, g) < 1e-10);
        CHECK(height(g) == doctest::Approx(k.y).epsilon(1e-12));
    }
}

TEST_CASE("lie derivative oracle") {
    const ScalarField one = [](const GroupElement&) { return 1.0; };
    const ScalarField y = [](const GroupElement& g) { return height(g); };
    std::mt19937_64 rng(12);
    const auto g = random_element(rng);
    for (auto tag : {LieTag::U, LieTag::X, LieTag::V})
        CHECK(std::abs(lie_derivative(one, tag, g, 1).value) < 1e-9);

    CHECK(lie_derivative(y, LieTag::X, GroupElement::identity(), 1).value == doctest::Approx(1).epsilon(1e-9));
    CHECK(std::abs(lie_derivative(y, LieTag::U, GroupElement::identity(), 1).value) < 1e-9);
    // second derivative of e^t at 0
    CHECK(lie_derivative(y, LieTag::X, GroupElement::identity(), 2).value == doctest::Approx(1).epsilon(1e-7));

    const ScalarField bad = [](const GroupElement& h) { return h.b > 1e-4 ? std::nan("") : 0.0; };
    CHECK_THROWS_WITH(lie_derivative(bad, LieTag::U, GroupElement::identity(), 1), "observable not finite near point");
}

TEST_CASE("casimir on power functions") {
    const ScalarField y = [](const GroupElement& g) { return height(g); };
    CHECK(std::abs(casimir_apply(y, GroupElement::identity()).value) < 1e-6);

    const ScalarField sy = [](const GroupElement& g) { return std::sqrt(height(g)); };
    CHECK(casimir_apply(sy, GroupElement::identity()).value == doctest::Approx(0.25).epsilon(1e-6));

    // Re y^{(1+3i)/2} has mu = 2.5
    const ScalarField p = [](const GroupElement& g) {
        return std::real(std::pow(std::complex<double>(height(g), 0), std::complex<double>(0.5, 1.5)));
    };
    std::mt19937_64 rng(21);
    const auto g = random_element(rng);
    CHECK(std::abs(casimir_apply(p, g).value - 2.5 * p(g)) < 1e-5);
}
