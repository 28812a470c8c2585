#include "horolab/odeengine.hpp"

#include <cmath>
#include <cstdio>

namespace horolab {

namespace {

void check_window(const WindowNorms* w, const GroupElement& g) {
    if (w && !w->contains(g)) throw NumericalError("window exceeded; enlarge window");
}

std::string fmt(const char* f, double a, double b = 0) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

}  // namespace

ErgodicAverageRecord ergodic_average(const Observable& f, const GroupElement& x, double T, const WindowNorms* window) {
    if (!(T >= 1)) throw std::invalid_argument("ergodic_average: T must be >= 1");
    ErgodicAverageRecord r{x, T, 0, 0};
    if (f.is_zero()) return r;
    const auto q = integrate_scalar(
        [&](double t) {
            const GroupElement g = horocycle(x, t);
            check_window(window, g);
            return f.f(g);
        },
        0, T);
    r.value = q.value[0] / T;
    r.quad_error = q.error / T;
    return r;
}

ErgodicAverageRecord ergodic_average(const ScalarField& l, const GroupElement& x, double T) {
    if (!(T >= 1)) throw std::invalid_argument("ergodic_average: T must be >= 1");
    const auto q = integrate_scalar([&](double t) { return l(horocycle(x, t)); }, 0, T);
    return {x, T, q.value[0] / T, q.error / T};
}

JRecord j_function(const Observable& f, const GroupElement& x, double t, const WindowNorms* window) {
    JRecord r;
    r.x = x;
    r.t = t;
    if (f.is_zero()) return r;
    static constexpr Deriv words[3] = {Deriv::F, Deriv::X, Deriv::XX};
    const auto q = integrate<3>(
        [&](double s) {
            const GroupElement g = geodesic(horocycle(x, s), -t);
            check_window(window, g);
            double v[3];
            f.eval_some(g, words, 3, v);
            return Vec<3>{v[0], -v[1], v[2]};
        },
        0, 1);
    r.J = q.value[0];
    r.Jp = q.value[1];
    r.Jpp = q.value[2];
    r.quad_error = q.error;
    return r;
}

JRecord j_function(const ScalarField& l, const GroupElement& x, double t) {
    JRecord r;
    r.x = x;
    r.t = t;
    r.method = JRecord::Method::DirectQuadrature;
    const auto q = integrate_scalar([&](double s) { return l(geodesic(horocycle(x, s), -t)); }, 0, 1);
    r.J = q.value[0];
    r.quad_error = q.error;
    return r;
}

double g_term(const Observable& f, const GroupElement& x, double xi, const WindowNorms* window) {
    if (f.is_zero()) return 0;
    const GroupElement p = geodesic(x, -xi);
    const GroupElement q = geodesic(horocycle(x, 1), -xi);
    check_window(window, p);
    check_window(window, q);
    return f.Vf(p) - f.Vf(q);
}

OdeResidual ode_residual(const Observable& f, const GroupElement& x, double t, const WindowNorms* window) {
    OdeResidual r;
    if (f.is_zero()) return r;
    const double mu = f.spectral_or_throw().mu;
    const JRecord j = j_function(f, x, t, window);
    r.J = j.J;
    r.Jp = j.Jp;
    r.Jpp = j.Jpp;
    r.G = g_term(f, x, t, window);
    r.residual = std::abs(j.Jpp + j.Jp + mu * j.J - std::exp(-t) * r.G);
    r.quad_error = j.quad_error * (2 + std::abs(mu));
    return r;
}

std::pair<std::complex<double>, std::complex<double>> characteristic_roots(const SpectralParameter& p) {
    return {-(1.0 + p.nu) / 2.0, -(1.0 - p.nu) / 2.0};
}

CheckReport discrete_boundedness_check(const Observable& f, const std::vector<GroupElement>& xs,
                                       const std::vector<double>& T_grid, const WindowNorms& norms,
                                       const std::vector<double>& t_grid) {
    CheckReport rep;
    rep.name = "discrete-boundedness";
    const double N = norms.c2;
    for (const auto& x : xs) {
        for (double T : T_grid) {
            const auto avg = ergodic_average(f, x, T, &norms);
            rep.require("|T<f>_T| <= 5N", std::abs(T * avg.value), 5 * N + tolerance_slack(T * avg.quad_error, 0),
                        fmt("T=%.6g", T));
        }
        for (double t : t_grid) {
            const auto j = j_function(f, x, t, &norms);
            rep.require("|J(x,t)| <= 5 e^{-t} N", std::abs(j.J), 5 * std::exp(-t) * N + tolerance_slack(j.quad_error, 0),
                        fmt("t=%.6g", t));
        }
    }
    return rep;
}

MuZeroConstant mu_zero_constant(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                double tail_target) {
    MuZeroConstant k;
    if (f.is_zero()) return k;
    const double supG = 2 * norms.sup_V;
    // int_Xi^inf e^{-xi} |G| <= supG e^{-Xi}
    const double horizon = supG > 0 ? std::max(1.0, std::log(supG / tail_target)) : 1.0;
    const JRecord j0 = j_function(f, x, 0, &norms);
    const auto q = integrate_scalar([&](double xi) { return std::exp(-xi) * g_term(f, x, xi, &norms); }, 0, horizon);
    k.value = j0.J + j0.Jp + q.value[0];
    k.tail_bound = supG * std::exp(-horizon);
    k.quad_error = j0.quad_error + q.error;
    return k;
}

CheckReport mu_zero_formula_check(const Observable& f, const GroupElement& x, double T, const WindowNorms& norms) {
    CheckReport rep;
    rep.name = "mu-zero-formula";
    if (!f.is_zero() && f.spectral_or_throw().tag != CaseTag::ZeroMu)
        throw std::invalid_argument("mu_zero_formula_check requires a zero-eigenvalue observable");
    const auto avg = ergodic_average(f, x, T, &norms);
    const double lt = std::log(T);
    const GroupElement xuT = horocycle(x, T);
    double corr = 0, corr_err = 0;
    if (!f.is_zero()) {
        const auto q = integrate_scalar(
            [&](double xi) { return f.Vf(geodesic(xuT, xi)) - f.Vf(geodesic(x, xi)); }, 0, lt);
        corr = q.value[0] / T;
        corr_err = q.error / T;
    }
    const auto K0 = mu_zero_constant(f, geodesic(x, lt), norms);
    const double N = norms.c2;
    const double raw = std::abs(avg.value - corr);
    const double lhs = std::abs(avg.value - corr - K0.value);
    rep.note("K0(x_T)", K0.value);
    rep.note("|<f>_T - correction| without K0", raw);
    rep.require("|R_0 f(x,T)| <= 3N/T", lhs,
                3 * N / T + tolerance_slack(avg.quad_error + corr_err + K0.quad_error, K0.tail_bound),
                fmt("T=%.6g", T));
    return rep;
}

}  // namespace horolab
