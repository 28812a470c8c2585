#include "horolab/sl2.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace horolab {

Mat2 commutator(const Mat2& p, const Mat2& q) { return p * q - q * p; }

GroupElement renormalize(const GroupElement& g) {
    const double det = g.det();
    if (!(det > 0)) throw NumericalError("group element lost unimodularity");
    if (std::abs(det - 1.0) <= 1e-13) return g;
    const double s = 1.0 / std::sqrt(det);
    return {g.a * s, g.b * s, g.c * s, g.d * s};
}

GroupElement compose(const GroupElement& g, const GroupElement& h) {
    return renormalize({g.a * h.a + g.b * h.c, g.a * h.b + g.b * h.d, g.c * h.a + g.d * h.c,
                        g.c * h.b + g.d * h.d});
}

GroupElement inverse(const GroupElement& g) { return {g.d, -g.b, -g.c, g.a}; }

double max_entry_diff(const GroupElement& g, const GroupElement& h) {
    return std::max({std::abs(g.a - h.a), std::abs(g.b - h.b), std::abs(g.c - h.c), std::abs(g.d - h.d)});
}

double projective_diff(const GroupElement& g, const GroupElement& h) {
    const GroupElement m{-h.a, -h.b, -h.c, -h.d};
    return std::min(max_entry_diff(g, h), max_entry_diff(g, m));
}

GroupElement flow_matrix(Flow which, double t) {
    switch (which) {
        case Flow::Horocycle: return {1, t, 0, 1};
        case Flow::Geodesic: return {std::exp(t / 2), 0, 0, std::exp(-t / 2)};
        case Flow::Unstable: return {1, 0, t, 1};
    }
    return {};
}

GroupElement flow(const GroupElement& g, Flow which, double t) { return compose(g, flow_matrix(which, t)); }

LieDirection lie_direction(LieTag tag) {
    switch (tag) {
        case LieTag::U: return {tag, {0, 1, 0, 0}};
        case LieTag::X: return {tag, {0.5, 0, 0, -0.5}};
        case LieTag::V: return {tag, {0, 0, 1, 0}};
        case LieTag::Y: return {tag, {0, -0.5, -0.5, 0}};
        case LieTag::Theta: return {tag, {0, 0.5, -0.5, 0}};
    }
    return {tag, {}};
}

std::string to_string(LieTag tag) {
    switch (tag) {
        case LieTag::U: return "U";
        case LieTag::X: return "X";
        case LieTag::V: return "V";
        case LieTag::Y: return "Y";
        case LieTag::Theta: return "Theta";
    }
    return "?";
}

Mat2 combine_generators(double aU, double aX, double aV) {
    return lie_direction(LieTag::U).generator * aU + lie_direction(LieTag::X).generator * aX +
           lie_direction(LieTag::V).generator * aV;
}

GroupElement exp_algebra(const Mat2& A) {
    // A^2 = delta I with delta = -det A for traceless A.
    const double delta = -(A.a * A.d - A.b * A.c);
    double ch, sh;
    if (std::abs(delta) < 1e-8) {
        ch = 1 + delta / 2 + delta * delta / 24;
        sh = 1 + delta / 6 + delta * delta / 120;
    } else if (delta > 0) {
        const double r = std::sqrt(delta);
        ch = std::cosh(r);
        sh = std::sinh(r) / r;
    } else {
        const double r = std::sqrt(-delta);
        ch = std::cos(r);
        sh = std::sin(r) / r;
    }
    return renormalize({ch + sh * A.a, sh * A.b, sh * A.c, ch + sh * A.d});
}

IwasawaCoords iwasawa(const GroupElement& g) {
    const double rho = g.c * g.c + g.d * g.d;
    if (!(rho > 0) || !std::isfinite(rho)) throw NumericalError("iwasawa: degenerate bottom row");
    IwasawaCoords k;
    k.y = 1.0 / rho;
    k.x = (g.a * g.c + g.b * g.d) / rho;
    double th = std::atan2(g.c, g.d);
    if (th < 0) th += 2 * std::numbers::pi;
    if (th >= 2 * std::numbers::pi) th = 0;
    k.theta = th;
    return k;
}

GroupElement n_matrix(double x) { return {1, x, 0, 1}; }
GroupElement a_matrix(double y) {
    const double r = std::sqrt(y);
    return {r, 0, 0, 1 / r};
}
GroupElement k_matrix(double theta) {
    return {std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta)};
}

GroupElement from_iwasawa(const IwasawaCoords& k) {
    return compose(compose(n_matrix(k.x), a_matrix(k.y)), k_matrix(k.theta));
}

double cosh_distance_to_i(const GroupElement& g) {
    return std::max(1.0, 0.5 * (g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d));
}

double distance_to_i(const GroupElement& g) { return std::acosh(cosh_distance_to_i(g)); }

namespace {

double checked(double v) {
    if (!std::isfinite(v)) throw NumericalError("observable not finite near point");
    return v;
}

// Two-level Richardson on a stencil D(h) with even error expansion.
template <class Stencil>
DerivativeEstimate richardson(Stencil&& D, double h0) {
    const double d1 = D(h0), d2 = D(h0 / 2), d4 = D(h0 / 4);
    const double r1 = (4 * d2 - d1) / 3;
    const double r2 = (4 * d4 - d2) / 3;
    const double rr = (16 * r2 - r1) / 15;
    return {rr, std::abs(rr - r2)};
}

}  // namespace

DerivativeEstimate lie_derivative(const ScalarField& f, const Mat2& W, const GroupElement& g, int order,
                                  double h0) {
    if (order != 1 && order != 2) throw std::invalid_argument("lie_derivative: order must be 1 or 2");
    auto phi = [&](double t) { return checked(f(compose(g, exp_algebra(W * t)))); };
    if (order == 1) {
        return richardson([&](double h) { return (phi(h) - phi(-h)) / (2 * h); }, h0);
    }
    const double f0 = phi(0);
    return richardson([&](double h) { return (phi(h) - 2 * f0 + phi(-h)) / (h * h); }, h0);
}

DerivativeEstimate lie_derivative(const ScalarField& f, LieTag W, const GroupElement& g, int order, double h0) {
    return lie_derivative(f, lie_direction(W).generator, g, order, h0);
}

DerivativeEstimate lie_derivative_mixed(const ScalarField& f, const Mat2& W1, const Mat2& W2,
                                        const GroupElement& g, double h0) {
    auto psi = [&](double s, double t) {
        return checked(f(compose(compose(g, exp_algebra(W1 * s)), exp_algebra(W2 * t))));
    };
    return richardson(
        [&](double h) { return (psi(h, h) - psi(h, -h) - psi(-h, h) + psi(-h, -h)) / (4 * h * h); }, h0);
}

DerivativeEstimate casimir_apply(const ScalarField& f, const GroupElement& g) {
    const Mat2 U = lie_direction(LieTag::U).generator;
    const Mat2 V = lie_direction(LieTag::V).generator;
    const auto xx = lie_derivative(f, LieTag::X, g, 2);
    const auto x1 = lie_derivative(f, LieTag::X, g, 1);
    const auto uv = lie_derivative_mixed(f, U, V, g);
    return {-xx.value + x1.value - uv.value, xx.error + x1.error + uv.error};
}

}  // namespace horolab
