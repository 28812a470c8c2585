#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "horolab/observables.hpp"
#include "horolab/quadrature.hpp"
#include "horolab/report.hpp"
#include "horolab/window.hpp"

namespace horolab {

struct ErgodicAverageRecord {
    GroupElement x;
    double T = 1;
    double value = 0;
    double quad_error = 0;
};

struct JRecord {
    enum class Method { DirectQuadrature, DerivativeIdentity };
    GroupElement x;
    double t = 0;
    double J = 0, Jp = 0, Jpp = 0;
    double quad_error = 0;
    Method method = Method::DerivativeIdentity;
};

// window, when given, is checked at every quadrature node.
ErgodicAverageRecord ergodic_average(const Observable& f, const GroupElement& x, double T,
                                     const WindowNorms* window = nullptr);
// (1/T) int_0^T l(x u_t) dt for an arbitrary continuous field.
ErgodicAverageRecord ergodic_average(const ScalarField& l, const GroupElement& x, double T);

// J = int_0^1 f(x u_s a_{-t}) ds, J' = int -Xf(...), J'' = int XXf(...).
JRecord j_function(const Observable& f, const GroupElement& x, double t, const WindowNorms* window = nullptr);
JRecord j_function(const ScalarField& l, const GroupElement& x, double t);

// G(x, xi) = Vf(x a_{-xi}) - Vf(x u_1 a_{-xi}).
double g_term(const Observable& f, const GroupElement& x, double xi, const WindowNorms* window = nullptr);

struct OdeResidual {
    double residual = 0;
    double quad_error = 0;
    double J = 0, Jp = 0, Jpp = 0, G = 0;
};
// |J'' + J' + mu J - e^{-t} G(t)|.
OdeResidual ode_residual(const Observable& f, const GroupElement& x, double t, const WindowNorms* window = nullptr);

// Roots z = -(1 +- nu)/2 of z^2 + z + mu.
std::pair<std::complex<double>, std::complex<double>> characteristic_roots(const SpectralParameter& p);

// |T <f>_T| <= 5 N on the T grid and |J(x,t)| <= 5 e^{-t} N on t_grid.
CheckReport discrete_boundedness_check(const Observable& f, const std::vector<GroupElement>& xs,
                                       const std::vector<double>& T_grid, const WindowNorms& norms,
                                       const std::vector<double>& t_grid = {0, 0.5, 1, 2, 4, 8});

// K0 = J(0) + J'(0) + int_0^inf e^{-xi} G(xi) dxi at x, truncated with a certified tail.
struct MuZeroConstant {
    double value = 0;
    double tail_bound = 0;
    double quad_error = 0;
};
MuZeroConstant mu_zero_constant(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                double tail_target = 1e-10);

// |<f>_T - (1/T) int_0^{log T} (Vf(x u_T a_xi) - Vf(x a_xi)) dxi - K0(x_T)| <= 3N/T.
CheckReport mu_zero_formula_check(const Observable& f, const GroupElement& x, double T, const WindowNorms& norms);

// The slack added to every asserted inequality.
inline double tolerance_slack(double quad_error, double tail_bound) {
    return 2 * (quad_error + tail_bound + 1e-9);
}

}  // namespace horolab
