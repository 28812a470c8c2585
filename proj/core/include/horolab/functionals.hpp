#pragma once

#include <functional>
#include <string>
#include <vector>

#include "horolab/odeengine.hpp"

namespace horolab {

struct FunctionalOptions {
    double tail_target = 1e-8;
    double horizon = 0;  // 0 chooses the horizon from tail_target
};

struct FunctionalRecord {
    double d_plus = 0;
    double d_minus = 0;
    double tail_plus = 0;   // certified truncation error of d_plus
    double tail_minus = 0;  // certified truncation error of d_minus
    double tail_bound = 0;  // max of the two
    double horizon = 0;     // truncation horizon Xi
    double quad_error = 0;
    double J0 = 0;  // int_0^1 f(x u_s) ds
    double JX = 0;  // int_0^1 Xf(x u_s) ds = -J'(0)
    CaseTag tag = CaseTag::Principal;
};

// Horizon with 2 sup|Vf| times the weight tail below target, for both weights of the case.
double truncation_horizon(const SpectralParameter& p, double sup_V, double target);
// Weight tails times 2 sup|Vf| times the prefactor; returns {plus, minus}.
std::pair<double, double> functional_tails(const SpectralParameter& p, double sup_V, double horizon);

FunctionalRecord functionals_principal(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                       const FunctionalOptions& opt = {});
FunctionalRecord functionals_quarter(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                     const FunctionalOptions& opt = {});
FunctionalRecord functionals_complementary(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                           const FunctionalOptions& opt = {});
// Dispatches on the spectral case; only the three positive cases have functionals.
FunctionalRecord functionals(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                             const FunctionalOptions& opt = {});

// Remainder bounds of the asymptotic expansion with N the window norm.
double remainder_bound(const SpectralParameter& p, double N, double T);
// Sup-norm bounds for the functionals.
double functional_norm_bound(const SpectralParameter& p, double N);

struct MainTerm {
    double amplitude = 0;
    std::string tag;
};

struct ExpansionRecord {
    GroupElement x;
    double T = 1;
    CaseTag tag = CaseTag::Principal;
    double direct = 0;
    double expansion = 0;
    std::vector<MainTerm> main_terms;
    double remainder = 0;  // direct - expansion
    double remainder_bound = 0;
    double slack = 0;
    double reconstruction_gap = 0;
    bool pass = true;
    FunctionalRecord functionals;
};

// Main terms at x_T = x a_{log T}; for mu = 0 the main term is the V-integral correction plus K0(x_T),
// for mu < 0 there is none.
ExpansionRecord expansion(const Observable& f, const GroupElement& x, double T, const WindowNorms& norms,
                          const FunctionalOptions& opt = {});

CheckReport reconstruction_check(const Observable& f, const std::vector<GroupElement>& xs,
                                 const std::vector<double>& T_grid, const WindowNorms& norms,
                                 std::vector<ExpansionRecord>* rows = nullptr);

CheckReport functional_norm_check(const Observable& f, const std::vector<GroupElement>& xs, const WindowNorms& norms);

// The logarithmic coarse bounds for the principal and complementary cases.
CheckReport coarse_bounds_check(const Observable& f, const GroupElement& x, const std::vector<double>& T_grid,
                                const WindowNorms& norms);

// D(Xf) against the action matrix on (D+ f, D- f), and the integration-by-parts identity for G_{Xf}.
CheckReport geodesic_action_check(const Observable& f, const GroupElement& x, const WindowNorms& norms_f,
                                  const WindowNorms& norms_xf);

// Integral of w(xi) G_f(x, xi) over [0, horizon].
QuadResult<1> weighted_g_integral(const Observable& f, const GroupElement& x, const std::function<double(double)>& w,
                                  double horizon, const WindowNorms* window = nullptr);

struct HolderFit {
    double exponent = 0;
    double constant = 0;  // exp(intercept)
    double r2 = 0;
    std::string direction;
};

// Log-spaced radii in (1e-4, 1e-1).
std::vector<double> holder_radii(int count = 10);

// Least-squares slope of log|D(x exp(rW)) - D(x)| against log r. Throws
// std::domain_error("locally constant; exponent undefined") if all differences are below 1e-12.
HolderFit holder_estimate(const std::function<double(const GroupElement&)>& D, const GroupElement& x, const Mat2& W,
                          const std::vector<double>& radii);

struct HolderDirection {
    std::string name;
    Mat2 W;
};
// Pure U, X, V and two mixed directions.
std::vector<HolderDirection> holder_directions();

// |G(y, xi) - G(x, xi)| <= 6 N min{1, r e^xi} for y = x exp(rW), xi in [0, 3 log(1/r)].
CheckReport g_difference_bound_check(const Observable& f, const GroupElement& x, const Mat2& W, double r,
                                     const WindowNorms& norms, int xi_points = 20,
                                     const std::vector<double>& extra_xi = {});

// The two elementary tail lemmas for F <= C0 min{1, e^xi r}.
// kinks lists points where F is not smooth; quadrature splits there.
CheckReport tail_lemma_check(const std::function<double(double)>& F, double C0, double r, double a,
                             const std::vector<double>& kinks = {});

// Window covering the horocycle arcs of xs up to every T together with the
// functional horizon. Two passes: the horizon depends on sup|Vf| over the window.
Window orbit_window(const Observable& f, const std::vector<GroupElement>& xs, const std::vector<double>& T_grid,
                    double min_horizon = 40);

// Sum of per-mu expansions against the direct average, within the sum of the remainder bounds.
// A combination of zero-eigenvalue components is checked against the logarithmic-growth formula instead.
CheckReport finite_sum_expansion_check(const Observable& f, const std::vector<GroupElement>& xs,
                                       const std::vector<double>& T_grid, const Window& window);

}  // namespace horolab
