#include "horolab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace horolab {

namespace {

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

// Smallest xi >= 0 with tail(xi) <= target, for a decreasing tail on [0, inf).
template <class F>
double solve_tail(F&& tail, double target) {
    if (tail(0.0) <= target) return 0;
    double lo = 0, hi = 1;
    while (tail(hi) > target) hi *= 2;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) > target ? lo : hi) = mid;
    }
    return hi;
}

struct Initial {
    double J0 = 0, JX = 0, err = 0;
};

Initial initial_terms(const Observable& f, const GroupElement& x, const WindowNorms& norms) {
    static constexpr Deriv words[2] = {Deriv::F, Deriv::X};
    const auto q = integrate<2>(
        [&](double s) {
            const GroupElement g = horocycle(x, s);
            if (!norms.contains(g)) throw NumericalError("window exceeded; enlarge window");
            double v[2];
            f.eval_some(g, words, 2, v);
            return Vec<2>{v[0], v[1]};
        },
        0, 1);
    return {q.value[0], q.value[1], q.error};
}

template <class W>
QuadResult<2> weighted_pair(const Observable& f, const GroupElement& x, W&& weights, double horizon,
                            const WindowNorms& norms) {
    const GroupElement x1 = horocycle(x, 1);
    return integrate<2>(
        [&](double xi) {
            const GroupElement p = geodesic(x, -xi), q = geodesic(x1, -xi);
            if (!norms.contains(p) || !norms.contains(q)) throw NumericalError("window exceeded; enlarge window");
            const double G = f.Vf(p) - f.Vf(q);
            const auto w = weights(xi);
            return Vec<2>{w[0] * G, w[1] * G};
        },
        0, horizon);
}

double horizon_for(const Observable& f, const WindowNorms& norms, const FunctionalOptions& opt) {
    if (opt.horizon > 0) return opt.horizon;
    return truncation_horizon(f.spectral_or_throw(), norms.sup_V, opt.tail_target);
}

void finish(FunctionalRecord& r, const SpectralParameter& p, double sup_V) {
    const auto [tp, tm] = functional_tails(p, sup_V, r.horizon);
    r.tail_plus = tp;
    r.tail_minus = tm;
    r.tail_bound = std::max(tp, tm);
}

}  // namespace

std::pair<double, double> functional_tails(const SpectralParameter& p, double sup_V, double X) {
    const double S = 2 * sup_V;
    switch (p.tag) {
        case CaseTag::Principal: {
            const double t = (2 / p.kappa()) * S * 2 * std::exp(-X / 2);
            return {t, t};
        }
        case CaseTag::QuarterPoint:
            return {S * (2 * X + 4) * std::exp(-X / 2), S * 2 * std::exp(-X / 2)};
        case CaseTag::Complementary: {
            const double nu = p.nu_real();
            const double am = (1 - nu) / 2, ap = (1 + nu) / 2;
            return {S * std::exp(-am * X) / (am * nu), S * std::exp(-ap * X) / (ap * nu)};
        }
        default: return {0, 0};
    }
}

double truncation_horizon(const SpectralParameter& p, double sup_V, double target) {
    if (!(sup_V > 0)) return 1;
    auto worst = [&](double X) {
        const auto [a, b] = functional_tails(p, sup_V, X);
        return std::max(a, b);
    };
    return std::max(1.0, solve_tail(worst, target));
}

FunctionalRecord functionals_principal(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                       const FunctionalOptions& opt) {
    const SpectralParameter& p = f.spectral_or_throw();
    if (p.tag != CaseTag::Principal) throw std::invalid_argument("functionals_principal: case is not principal");
    FunctionalRecord r;
    r.tag = p.tag;
    if (f.is_zero()) return r;
    const double k = p.kappa();
    r.horizon = horizon_for(f, norms, opt);
    const Initial in = initial_terms(f, x, norms);
    const auto q = weighted_pair(
        f, x,
        [k](double xi) {
            const double e = std::exp(-xi / 2);
            return std::array<double, 2>{e * std::sin(k * xi / 2), e * std::cos(k * xi / 2)};
        },
        r.horizon, norms);
    r.J0 = in.J0;
    r.JX = in.JX;
    r.d_plus = in.J0 - (2 / k) * q.value[0];
    r.d_minus = in.J0 / k - (2 / k) * in.JX + (2 / k) * q.value[1];
    r.quad_error = (1 + 2 / k) * in.err + (2 / k) * q.error;
    finish(r, p, norms.sup_V);
    return r;
}

FunctionalRecord functionals_quarter(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                     const FunctionalOptions& opt) {
    const SpectralParameter& p = f.spectral_or_throw();
    if (p.tag != CaseTag::QuarterPoint) throw std::invalid_argument("functionals_quarter: case is not mu = 1/4");
    FunctionalRecord r;
    r.tag = p.tag;
    if (f.is_zero()) return r;
    r.horizon = horizon_for(f, norms, opt);
    const Initial in = initial_terms(f, x, norms);
    const auto q = weighted_pair(
        f, x,
        [](double xi) {
            const double e = std::exp(-xi / 2);
            return std::array<double, 2>{xi * e, e};
        },
        r.horizon, norms);
    r.J0 = in.J0;
    r.JX = in.JX;
    r.d_plus = in.J0 - q.value[0];
    r.d_minus = in.J0 / 2 - in.JX + q.value[1];
    r.quad_error = 2 * in.err + q.error;
    finish(r, p, norms.sup_V);
    return r;
}

FunctionalRecord functionals_complementary(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                                           const FunctionalOptions& opt) {
    const SpectralParameter& p = f.spectral_or_throw();
    if (p.tag != CaseTag::Complementary)
        throw std::invalid_argument("functionals_complementary: case is not complementary");
    FunctionalRecord r;
    r.tag = p.tag;
    if (f.is_zero()) return r;
    const double nu = p.nu_real();
    r.horizon = horizon_for(f, norms, opt);
    const Initial in = initial_terms(f, x, norms);
    const auto q = weighted_pair(
        f, x,
        [nu](double xi) {
            return std::array<double, 2>{std::exp(-(1 - nu) * xi / 2), std::exp(-(1 + nu) * xi / 2)};
        },
        r.horizon, norms);
    r.J0 = in.J0;
    r.JX = in.JX;
    r.d_plus = -q.value[0] / nu - (1 - nu) / (2 * nu) * in.J0 + in.JX / nu;
    r.d_minus = q.value[1] / nu + (1 + nu) / (2 * nu) * in.J0 - in.JX / nu;
    r.quad_error = (2 / nu) * in.err + q.error / nu;
    finish(r, p, norms.sup_V);
    return r;
}

FunctionalRecord functionals(const Observable& f, const GroupElement& x, const WindowNorms& norms,
                             const FunctionalOptions& opt) {
    switch (f.spectral_or_throw().tag) {
        case CaseTag::Principal: return functionals_principal(f, x, norms, opt);
        case CaseTag::QuarterPoint: return functionals_quarter(f, x, norms, opt);
        case CaseTag::Complementary: return functionals_complementary(f, x, norms, opt);
        default: throw std::invalid_argument("functionals are defined only for mu > 0");
    }
}

double remainder_bound(const SpectralParameter& p, double N, double T) {
    const double lt = std::log(T);
    switch (p.tag) {
        case CaseTag::Principal: return 16 * N / (p.kappa() * T);
        case CaseTag::QuarterPoint: return 8 * N * (lt + 2) / T;
        case CaseTag::Complementary: {
            const double nu = p.nu_real();
            return 8 * N / ((1 - nu * nu) * nu * T);
        }
        case CaseTag::ZeroMu: return 3 * N / T;
        case CaseTag::DiscreteSeries: return 5 * N / T;
    }
    return 0;
}

double functional_norm_bound(const SpectralParameter& p, double N) {
    switch (p.tag) {
        case CaseTag::Principal: return (11 / p.kappa() + 1) * N;
        case CaseTag::QuarterPoint: return 9 * N;
        case CaseTag::Complementary: {
            const double nu = p.nu_real();
            return 6 * N / (nu * (1 - nu));
        }
        default: throw std::invalid_argument("functional norm bounds exist only for mu > 0");
    }
}

ExpansionRecord expansion(const Observable& f, const GroupElement& x, double T, const WindowNorms& norms,
                          const FunctionalOptions& opt) {
    const SpectralParameter& p = f.spectral_or_throw();
    ExpansionRecord e;
    e.x = x;
    e.T = T;
    e.tag = p.tag;
    const auto avg = ergodic_average(f, x, T, &norms);
    e.direct = avg.value;
    const double lt = std::log(T);
    const GroupElement xT = geodesic(x, lt);
    double amp_err = 0, amp_tail = 0;
    switch (p.tag) {
        case CaseTag::Principal: {
            const auto fr = functionals_principal(f, xT, norms, opt);
            const double k = p.kappa(), s = 1 / std::sqrt(T);
            e.main_terms = {{s * std::cos(k * lt / 2) * fr.d_plus, "cos"}, {s * std::sin(k * lt / 2) * fr.d_minus, "sin"}};
            amp_err = 2 * s * fr.quad_error;
            amp_tail = s * (fr.tail_plus + fr.tail_minus);
            e.functionals = fr;
            break;
        }
        case CaseTag::QuarterPoint: {
            const auto fr = functionals_quarter(f, xT, norms, opt);
            const double s = 1 / std::sqrt(T);
            e.main_terms = {{s * fr.d_plus, "T^-1/2"}, {s * lt * fr.d_minus, "T^-1/2 log T"}};
            amp_err = s * (1 + lt) * fr.quad_error;
            amp_tail = s * (fr.tail_plus + lt * fr.tail_minus);
            e.functionals = fr;
            break;
        }
        case CaseTag::Complementary: {
            const auto fr = functionals_complementary(f, xT, norms, opt);
            const double nu = p.nu_real();
            const double sp = std::pow(T, -(1 + nu) / 2), sm = std::pow(T, -(1 - nu) / 2);
            e.main_terms = {{sp * fr.d_plus, "T^-(1+nu)/2"}, {sm * fr.d_minus, "T^-(1-nu)/2"}};
            amp_err = (sp + sm) * fr.quad_error;
            amp_tail = sp * fr.tail_plus + sm * fr.tail_minus;
            e.functionals = fr;
            break;
        }
        case CaseTag::ZeroMu: {
            double corr = 0;
            if (!f.is_zero()) {
                const GroupElement xuT = horocycle(x, T);
                const auto q = integrate_scalar(
                    [&](double xi) { return f.Vf(geodesic(xuT, xi)) - f.Vf(geodesic(x, xi)); }, 0, lt);
                corr = q.value[0] / T;
                amp_err += q.error / T;
            }
            const auto K0 = mu_zero_constant(f, xT, norms);
            e.main_terms = {{corr, "V-correction"}, {K0.value, "K0"}};
            amp_err += K0.quad_error;
            amp_tail += K0.tail_bound;
            break;
        }
        case CaseTag::DiscreteSeries: break;
    }
    e.expansion = 0;
    for (const auto& m : e.main_terms) e.expansion += m.amplitude;
    e.remainder = e.direct - e.expansion;
    e.reconstruction_gap = std::abs(e.remainder);
    e.remainder_bound = remainder_bound(p, norms.c2, T);
    e.slack = tolerance_slack(avg.quad_error + amp_err, amp_tail);
    e.pass = e.reconstruction_gap <= e.remainder_bound + e.slack;
    return e;
}

CheckReport reconstruction_check(const Observable& f, const std::vector<GroupElement>& xs,
                                 const std::vector<double>& T_grid, const WindowNorms& norms,
                                 std::vector<ExpansionRecord>* rows) {
    CheckReport rep;
    rep.name = "reconstruction:" + to_string(f.spectral_or_throw().tag);
    for (const auto& x : xs) {
        for (double T : T_grid) {
            const auto e = expansion(f, x, T, norms);
            rep.require("|<f>_T - main terms| <= remainder bound", e.reconstruction_gap, e.remainder_bound + e.slack,
                        fmt("T=%.6g", T));
            if (rows) rows->push_back(e);
        }
    }
    return rep;
}

CheckReport functional_norm_check(const Observable& f, const std::vector<GroupElement>& xs, const WindowNorms& norms) {
    const SpectralParameter& p = f.spectral_or_throw();
    CheckReport rep;
    rep.name = "functional-norms:" + to_string(p.tag);
    const double bound = functional_norm_bound(p, norms.c2);
    for (const auto& x : xs) {
        const auto fr = functionals(f, x, norms);
        rep.require("|D+ f(x)| <= norm bound", std::abs(fr.d_plus),
                    bound + tolerance_slack(fr.quad_error, fr.tail_plus));
        rep.require("|D- f(x)| <= norm bound", std::abs(fr.d_minus),
                    bound + tolerance_slack(fr.quad_error, fr.tail_minus));
    }
    return rep;
}

CheckReport coarse_bounds_check(const Observable& f, const GroupElement& x, const std::vector<double>& T_grid,
                                const WindowNorms& norms) {
    const SpectralParameter& p = f.spectral_or_throw();
    if (p.tag != CaseTag::Principal && p.tag != CaseTag::Complementary)
        throw std::invalid_argument("coarse bounds apply to the principal and complementary cases");
    CheckReport rep;
    rep.name = "coarse-bounds:" + to_string(p.tag);
    const double N = norms.c2;
    for (double T : T_grid) {
        const double lt = std::log(T);
        const auto avg = ergodic_average(f, x, T, &norms);
        double bound;
        if (p.tag == CaseTag::Principal) {
            bound = 15 * (lt + 1) / std::sqrt(T) * N;
        } else {
            const double nu = p.nu_real();
            bound = 15 / ((1 - nu) * (1 - nu)) * N * (lt + 1) * std::pow(T, -(1 - nu) / 2);
        }
        rep.require("|<f>_T| <= coarse bound", std::abs(avg.value), bound + tolerance_slack(avg.quad_error, 0),
                    fmt("T=%.6g", T));
    }
    return rep;
}

QuadResult<1> weighted_g_integral(const Observable& f, const GroupElement& x, const std::function<double(double)>& w,
                                  double horizon, const WindowNorms* window) {
    return integrate_scalar([&](double xi) { return w(xi) * g_term(f, x, xi, window); }, 0, horizon);
}

namespace {

struct CaseWeight {
    std::string name;
    std::function<double(double)> l, dl;
    std::function<double(double)> tail_l, tail_sum;  // tails of |l| and |l + l'| beyond Xi
};

std::vector<CaseWeight> case_weights(const SpectralParameter& p) {
    std::vector<CaseWeight> out;
    switch (p.tag) {
        case CaseTag::Principal: {
            const double k = p.kappa();
            auto tl = [](double X) { return 2 * std::exp(-X / 2); };
            auto ts = [k](double X) { return (1 + k) * std::exp(-X / 2); };
            out.push_back({"e^{-xi/2} sin", [k](double s) { return std::exp(-s / 2) * std::sin(k * s / 2); },
                           [k](double s) {
                               return std::exp(-s / 2) * (-0.5 * std::sin(k * s / 2) + 0.5 * k * std::cos(k * s / 2));
                           },
                           tl, ts});
            out.push_back({"e^{-xi/2} cos", [k](double s) { return std::exp(-s / 2) * std::cos(k * s / 2); },
                           [k](double s) {
                               return std::exp(-s / 2) * (-0.5 * std::cos(k * s / 2) - 0.5 * k * std::sin(k * s / 2));
                           },
                           tl, ts});
            break;
        }
        case CaseTag::QuarterPoint:
            out.push_back({"xi e^{-xi/2}", [](double s) { return s * std::exp(-s / 2); },
                           [](double s) { return std::exp(-s / 2) * (1 - s / 2); },
                           [](double X) { return (2 * X + 4) * std::exp(-X / 2); },
                           [](double X) { return (X + 4) * std::exp(-X / 2); }});
            out.push_back({"e^{-xi/2}", [](double s) { return std::exp(-s / 2); },
                           [](double s) { return -0.5 * std::exp(-s / 2); },
                           [](double X) { return 2 * std::exp(-X / 2); },
                           [](double X) { return std::exp(-X / 2); }});
            break;
        case CaseTag::Complementary:
            for (double sgn : {-1.0, 1.0}) {
                const double a = (1 + sgn * p.nu_real()) / 2;
                out.push_back({fmt("e^{-%.6g xi}", a), [a](double s) { return std::exp(-a * s); },
                               [a](double s) { return -a * std::exp(-a * s); },
                               [a](double X) { return std::exp(-a * X) / a; },
                               [a](double X) { return (1 - a) * std::exp(-a * X) / a; }});
            }
            break;
        default: break;
    }
    return out;
}

}  // namespace

CheckReport geodesic_action_check(const Observable& f, const GroupElement& x, const WindowNorms& norms_f,
                                  const WindowNorms& norms_xf) {
    const SpectralParameter& p = f.spectral_or_throw();
    CheckReport rep;
    rep.name = "geodesic-action:" + to_string(p.tag);
    const Observable xf = f.apply_X();
    FunctionalOptions opt;
    opt.horizon = std::max(truncation_horizon(p, norms_f.sup_V, opt.tail_target),
                           truncation_horizon(p, norms_xf.sup_V, opt.tail_target));
    const auto a = functionals(f, x, norms_f, opt);
    const auto b = functionals(xf, x, norms_xf, opt);

    double m11 = 0, m12 = 0, m21 = 0, m22 = 0;
    switch (p.tag) {
        case CaseTag::Complementary:
            m11 = (1 + p.nu_real()) / 2;
            m22 = (1 - p.nu_real()) / 2;
            break;
        case CaseTag::QuarterPoint:
            m11 = 0.5;
            m12 = -1;
            m22 = 0.5;
            break;
        case CaseTag::Principal:
            m11 = 0.5;
            m12 = -p.kappa() / 2;
            m21 = p.kappa() / 2;
            m22 = 0.5;
            break;
        default: throw std::invalid_argument("geodesic action identities are stated for mu > 0");
    }
    const double mnorm = std::max(std::abs(m11) + std::abs(m12), std::abs(m21) + std::abs(m22));
    const double slack = tolerance_slack(mnorm * a.quad_error + b.quad_error, mnorm * a.tail_bound + b.tail_bound);
    const double pp = m11 * a.d_plus + m12 * a.d_minus, pm = m21 * a.d_plus + m22 * a.d_minus;
    rep.require("|D+(Xf) - predicted|", std::abs(b.d_plus - pp), 1e-5 + slack);
    rep.require("|D-(Xf) - predicted|", std::abs(b.d_minus - pm), 1e-5 + slack);
    rep.note("D+(Xf)", b.d_plus);
    rep.note("D-(Xf)", b.d_minus);

    // int l G_{Xf} = int (l + l') G_f + l(0) (mu J(0) + J'(0) + J''(0))
    const auto j0 = j_function(f, x, 0, &norms_f);
    const double g0 = p.mu * j0.J + j0.Jp + j0.Jpp;
    for (const auto& w : case_weights(p)) {
        const double X = opt.horizon;
        const auto lhs = weighted_g_integral(xf, x, w.l, X, &norms_xf);
        const auto rhs = weighted_g_integral(f, x, [&](double s) { return w.l(s) + w.dl(s); }, X, &norms_f);
        const double diff = std::abs(lhs.value[0] - rhs.value[0] - w.l(0) * g0);
        const double tails = 2 * norms_xf.sup_V * w.tail_l(X) + 2 * norms_f.sup_V * w.tail_sum(X);
        rep.require("integration by parts for G_{Xf}, weight " + w.name, diff,
                    tolerance_slack(lhs.error + rhs.error + std::abs(w.l(0)) * 3 * j0.quad_error, tails));
    }
    return rep;
}

std::vector<double> holder_radii(int count) {
    count = std::max(count, 8);
    std::vector<double> r;
    const double lo = std::log(1.5e-4), hi = std::log(0.08);
    for (int i = 0; i < count; ++i) r.push_back(std::exp(lo + (hi - lo) * i / (count - 1)));
    return r;
}

HolderFit holder_estimate(const std::function<double(const GroupElement&)>& D, const GroupElement& x, const Mat2& W,
                          const std::vector<double>& radii) {
    for (double r : radii)
        if (!(r > 1e-4 && r < 1e-1)) throw std::invalid_argument("holder_estimate: radii must lie in (1e-4, 1e-1)");
    if (radii.size() < 8) throw std::invalid_argument("holder_estimate: need at least 8 radii");
    const double d0 = D(x);
    std::vector<double> lx, ly;
    for (double r : radii) {
        const double diff = std::abs(D(compose(x, exp_algebra(W * r))) - d0);
        if (diff >= 1e-12) {
            lx.push_back(std::log(r));
            ly.push_back(std::log(diff));
        }
    }
    if (lx.empty()) throw std::domain_error("locally constant; exponent undefined");
    if (lx.size() < 3) throw std::domain_error("too few resolvable differences for a Hölder fit");
    const double n = static_cast<double>(lx.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxx += (lx[i] - mx) * (lx[i] - mx);
        sxy += (lx[i] - mx) * (ly[i] - my);
        syy += (ly[i] - my) * (ly[i] - my);
    }
    HolderFit fit;
    fit.exponent = sxy / sxx;
    fit.constant = std::exp(my - fit.exponent * mx);
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1;
    return fit;
}

std::vector<HolderDirection> holder_directions() {
    return {{"U", combine_generators(1, 0, 0)},
            {"X", combine_generators(0, 1, 0)},
            {"V", combine_generators(0, 0, 1)},
            {"mixed(1,1,1)/sqrt3", combine_generators(1, 1, 1) * (1 / std::sqrt(3.0))},
            {"mixed(0.6,-0.5,0.8)", combine_generators(0.6, -0.5, 0.8)}};
}

CheckReport g_difference_bound_check(const Observable& f, const GroupElement& x, const Mat2& W, double r,
                                     const WindowNorms& norms, int xi_points, const std::vector<double>& extra_xi) {
    CheckReport rep;
    rep.name = "g-difference";
    if (!(r > 0 && r < 1)) throw std::invalid_argument("g_difference_bound_check: r must lie in (0, 1)");
    const GroupElement y = compose(x, exp_algebra(W * r));
    std::vector<double> xis;
    const double top = 3 * std::log(1 / r);
    for (int i = 0; i < xi_points; ++i) xis.push_back(top * i / std::max(1, xi_points - 1));
    xis.insert(xis.end(), extra_xi.begin(), extra_xi.end());
    for (double xi : xis) {
        const double d = std::abs(g_term(f, y, xi, &norms) - g_term(f, x, xi, &norms));
        rep.require("|G(y,xi) - G(x,xi)| <= 6N min{1, r e^xi}", d,
                    6 * norms.c2 * std::min(1.0, r * std::exp(xi)) + tolerance_slack(0, 0), fmt("xi=%.6g r=%.3g", xi, r));
    }
    return rep;
}

CheckReport tail_lemma_check(const std::function<double(double)>& F, double C0, double r, double a,
                             const std::vector<double>& kinks) {
    CheckReport rep;
    rep.name = "tail-lemmas";
    if (!(r > 0 && r < 1) || !(a > 0 && a < 1) || !(C0 > 0))
        throw std::invalid_argument("tail_lemma_check: need C0 > 0, r in (0,1), a in (0,1)");
    // horizon with both weight tails below 1e-13
    const double X1 = std::log(C0 / (a * 1e-13)) / a;
    const double X2 = solve_tail([&](double X) { return C0 * (2 * X + 4) * std::exp(-X / 2); }, 1e-13);
    const double X = std::max(X1, X2);

    bool pre = true;
    double worst_pre = 0;
    for (double xi = 0; xi <= X; xi += 0.01) {
        const double v = F(xi), cap = C0 * std::min(1.0, std::exp(xi) * r);
        if (v < 0 || v > cap * (1 + 1e-12) + 1e-300) {
            pre = false;
            worst_pre = std::max(worst_pre, v - cap);
        }
    }
    rep.note("precondition F <= C0 min{1, e^xi r} on the sample grid", pre ? 1 : 0,
             pre ? "holds" : fmt("violated by %.3g", worst_pre));
    if (!pre) {
        rep.require_true("precondition", false, "F exceeds C0 min{1, e^xi r}");
        return rep;
    }

    std::vector<double> cuts{0};
    for (double k : kinks)
        if (k > 0 && k < X) cuts.push_back(k);
    cuts.push_back(X);
    std::sort(cuts.begin(), cuts.end());
    double I1 = 0, I2 = 0, err = 0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const auto q = integrate<2>(
            [&](double s) {
                const double v = F(s);
                return Vec<2>{std::exp(-a * s) * v, s * std::exp(-s / 2) * v};
            },
            cuts[i], cuts[i + 1]);
        I1 += q.value[0];
        I2 += q.value[1];
        err += q.error;
    }
    const double tail1 = C0 * std::exp(-a * X) / a;
    const double tail2 = C0 * (2 * X + 4) * std::exp(-X / 2);
    const double b1 = C0 * std::max(1 / (1 - a), 1 / a) * std::pow(r, a);
    const double b2 = -8 * C0 * std::sqrt(r) * std::log(r);
    rep.require("int e^{-a xi} F <= C0 max{1/(1-a), 1/a} r^a", I1, b1 + tolerance_slack(err, tail1),
                fmt("a=%.3g r=%.3g", a, r));
    rep.require("int xi e^{-xi/2} F <= -8 C0 sqrt(r) log r", I2, b2 + tolerance_slack(err, tail2),
                fmt("r=%.3g", r));
    // the sum of the two pieces of the first estimate, before they are merged into one max
    rep.note("C0 r^a (1/(1-a) + 1/a)", C0 * std::pow(r, a) * (1 / (1 - a) + 1 / a));
    return rep;
}

Window orbit_window(const Observable& f, const std::vector<GroupElement>& xs, const std::vector<double>& T_grid,
                    double min_horizon) {
    std::vector<double> Ts = T_grid;
    if (Ts.empty()) Ts.push_back(1);
    Window w;
    for (const auto& x : xs)
        for (double T : Ts) w.add_orbit(x, T, min_horizon);
    if (f.is_zero()) return w;
    WindowOptions quick;
    quick.budget = 2000;
    quick.grid = 8;
    quick.refine_candidates = 2;
    double horizon = min_horizon;
    for (const auto& p : f.spectrum()) {
        if (p.mu <= 0) continue;
        const auto n = window_norms(f.restrict_to_mu(p.mu), w, quick);
        horizon = std::max(horizon, truncation_horizon(p, 2 * n.sup_V, 1e-8) + 1);
    }
    if (horizon <= min_horizon) return w;
    Window wide;
    for (const auto& x : xs)
        for (double T : Ts) wide.add_orbit(x, T, horizon);
    return wide;
}

CheckReport finite_sum_expansion_check(const Observable& f, const std::vector<GroupElement>& xs,
                                       const std::vector<double>& T_grid, const Window& window) {
    CheckReport rep;
    rep.name = "finite-sum-expansion";
    const auto spec = f.spectrum();
    const bool zero_only =
        !spec.empty() && std::all_of(spec.begin(), spec.end(), [](const auto& p) { return p.tag == CaseTag::ZeroMu; });
    if (zero_only) {
        // int_0^T f(x u_s) ds = int_0^{log T} (Vf(x u_T a_xi) - Vf(x a_xi)) dxi + E(x, T)
        const auto norms = window_norms(f, window);
        for (const auto& x : xs) {
            for (double T : T_grid) {
                const auto avg = ergodic_average(f, x, T, &norms);
                const GroupElement xuT = horocycle(x, T);
                const auto q = integrate_scalar(
                    [&](double xi) { return f.Vf(geodesic(xuT, xi)) - f.Vf(geodesic(x, xi)); }, 0, std::log(T));
                const double E = T * avg.value - q.value[0];
                rep.require("|E(x,T)| <= 3N (logarithmic growth)", std::abs(E),
                            3 * norms.c2 + tolerance_slack(T * avg.quad_error + q.error, 0), fmt("T=%.6g", T));
            }
        }
        return rep;
    }
    std::vector<std::pair<Observable, WindowNorms>> groups;
    for (const auto& p : spec) {
        Observable g = f.restrict_to_mu(p.mu);
        const auto n = window_norms(g, window);
        groups.emplace_back(std::move(g), n);
    }
    const auto full = window_norms(f, window);
    for (const auto& x : xs) {
        for (double T : T_grid) {
            const auto avg = ergodic_average(f, x, T, &full);
            double main = 0, bound = 0, slack = tolerance_slack(avg.quad_error, 0);
            for (const auto& [g, n] : groups) {
                const auto e = expansion(g, x, T, n);
                main += e.expansion;
                bound += e.remainder_bound;
                slack += e.slack;
            }
            rep.require("|<f>_T - sum of component main terms| <= sum of remainder bounds", std::abs(avg.value - main),
                        bound + slack, fmt("T=%.6g", T));
        }
    }
    return rep;
}

}  // namespace horolab
