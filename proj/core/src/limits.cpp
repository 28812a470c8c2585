#include "horolab/limits.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>

namespace horolab {

namespace {

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

double remainder_constant(const SpectralParameter& p, double N) {
    switch (p.tag) {
        case CaseTag::Principal: return 16 * N / p.kappa();
        case CaseTag::QuarterPoint: return 16 * N;
        case CaseTag::Complementary: {
            const double nu = p.nu_real();
            return 8 * N / ((1 - nu * nu) * nu);
        }
        case CaseTag::ZeroMu: return 3 * N;
        case CaseTag::DiscreteSeries: return 5 * N;
    }
    return 0;
}

struct Group {
    Observable g;
    SpectralParameter p;
    WindowNorms norms;
};

// Main-term amplitudes at x_T from functionals evaluated at x_T.
struct Terms {
    double main = 0;
    double err = 0;   // quadrature error carried into the amplitude
    double tail = 0;  // truncation error carried into the amplitude
};

Terms main_terms(const SpectralParameter& p, const FunctionalRecord& fr, double T) {
    const double lt = std::log(T);
    Terms t;
    switch (p.tag) {
        case CaseTag::Principal: {
            const double s = 1 / std::sqrt(T), k = p.kappa();
            t.main = s * (std::cos(k * lt / 2) * fr.d_plus + std::sin(k * lt / 2) * fr.d_minus);
            t.err = 2 * s * fr.quad_error;
            t.tail = s * (fr.tail_plus + fr.tail_minus);
            break;
        }
        case CaseTag::QuarterPoint: {
            const double s = 1 / std::sqrt(T);
            t.main = s * (fr.d_plus + lt * fr.d_minus);
            t.err = s * (1 + lt) * fr.quad_error;
            t.tail = s * (fr.tail_plus + lt * fr.tail_minus);
            break;
        }
        case CaseTag::Complementary: {
            const double nu = p.nu_real();
            const double sp = std::pow(T, -(1 + nu) / 2), sm = std::pow(T, -(1 - nu) / 2);
            t.main = sp * fr.d_plus + sm * fr.d_minus;
            t.err = (sp + sm) * fr.quad_error;
            t.tail = sp * fr.tail_plus + sm * fr.tail_minus;
            break;
        }
        default: break;
    }
    return t;
}

}  // namespace

EmpiricalDistribution::EmpiricalDistribution(std::vector<double> sample) : sorted_(std::move(sample)) {
    for (double v : sorted_)
        if (!std::isfinite(v)) throw NumericalError("non-finite value in empirical sample");
    std::sort(sorted_.begin(), sorted_.end());
}

double EmpiricalDistribution::cdf(double x) const {
    if (sorted_.empty()) return 0;
    const auto it = std::upper_bound(sorted_.begin(), sorted_.end(), x);
    return static_cast<double>(it - sorted_.begin()) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::mean() const {
    if (sorted_.empty()) return 0;
    return std::accumulate(sorted_.begin(), sorted_.end(), 0.0) / static_cast<double>(sorted_.size());
}

double EmpiricalDistribution::variance() const {
    if (sorted_.size() < 2) return 0;
    const double m = mean();
    double s = 0;
    for (double v : sorted_) s += (v - m) * (v - m);
    return s / static_cast<double>(sorted_.size() - 1);
}

double levy_distance(const EmpiricalDistribution& F, const EmpiricalDistribution& G, double precision) {
    if (F.empty() || G.empty()) throw std::invalid_argument("empty distribution");
    // G <= F(. + eps) + eps only needs checking at the jumps of G, and symmetrically.
    auto one_side = [](const EmpiricalDistribution& A, const EmpiricalDistribution& B, double eps) {
        for (double a : A.values())
            if (A.cdf(a) > B.cdf(a + eps) + eps + 1e-15) return false;
        return true;
    };
    auto feasible = [&](double eps) { return one_side(G, F, eps) && one_side(F, G, eps); };
    if (feasible(0)) return 0;
    double lo = 0, hi = 1;
    while (hi - lo > precision) {
        const double mid = 0.5 * (lo + hi);
        (feasible(mid) ? hi : lo) = mid;
    }
    return hi;
}

double ks_distance(const EmpiricalDistribution& F, const EmpiricalDistribution& G) {
    double d = 0;
    for (double v : F.values()) d = std::max(d, std::abs(F.cdf(v) - G.cdf(v)));
    for (double v : G.values()) d = std::max(d, std::abs(F.cdf(v) - G.cdf(v)));
    return d;
}

CheckReport levy_lemma_check(const std::vector<double>& X, const std::vector<double>& Y,
                             const std::vector<std::size_t>& perm, double eps) {
    if (X.size() != Y.size() || perm.size() != X.size()) throw std::invalid_argument("sample size mismatch");
    CheckReport rep;
    rep.name = "levy-coupling";
    double gap = 0;
    for (std::size_t i = 0; i < X.size(); ++i) gap = std::max(gap, std::abs(X[i] - Y[perm[i]]));
    rep.require("pairing gap within eps", gap, eps);
    const double L = levy_distance(EmpiricalDistribution(X), EmpiricalDistribution(Y));
    rep.require("levy(X, Y) <= eps", L, eps + 1e-6);
    return rep;
}

double ks_to_normal(const EmpiricalDistribution& F, double mean, double sd) {
    if (!(sd > 0)) throw std::invalid_argument("normal scale must be positive");
    const auto& v = F.values();
    const double n = static_cast<double>(v.size());
    double d = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const double p = normal_cdf((v[i] - mean) / sd);
        d = std::max({d, static_cast<double>(i + 1) / n - p, p - static_cast<double>(i) / n});
    }
    return d;
}

LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least squares needs two points");
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
    return fit;
}

SpatialLtResult spatial_lt_experiment(const Observable& f, const std::vector<GroupElement>& ensemble,
                                      const std::vector<double>& T_grid, const Window& window) {
    SpatialLtResult res;
    res.report.name = "spatial-limit";
    if (ensemble.empty()) throw std::invalid_argument("empty ensemble");
    if (f.is_zero()) {
        // Both sides are the point mass at 0.
        for (double T : T_grid) {
            SpatialRow row;
            row.T = T;
            res.rows.push_back(row);
            res.report.require("levy(i_T, D) <= max gap", 0, 1e-6, fmt("T=%.6g", T));
        }
        res.report.note("degenerate: f = 0", 0);
        return res;
    }

    std::vector<Group> groups;
    for (const auto& p : f.spectrum()) {
        Observable g = f.restrict_to_mu(p.mu);
        auto n = window_norms(g, window);
        groups.push_back({std::move(g), p, n});
    }
    const auto full = window_norms(f, window);

    const Group* lead = nullptr;
    for (const auto& gr : groups)
        if (gr.p.mu > 0 && (!lead || gr.p.mu < lead->p.mu)) lead = &gr;
    if (!lead) throw std::domain_error("no component with mu > 0; the spatial limit does not apply");
    const SpectralParameter pf = lead->p;
    res.case_tag = pf.tag;
    res.mu_f = pf.mu;
    res.nu_f = pf.tag == CaseTag::Complementary ? pf.nu_real() : 0;

    res.eta0 = std::numeric_limits<double>::infinity();
    for (const auto& gr : groups)
        if (gr.p.mu > pf.mu) {
            const double re = gr.p.tag == CaseTag::Complementary ? gr.p.nu_real() : 0;
            res.eta0 = std::min(res.eta0, res.nu_f - re);
        }
    res.eta = 0.5 * std::min({res.eta0, 1 - res.nu_f, res.nu_f});

    double C_R = 0;
    for (const auto& gr : groups) C_R += remainder_constant(gr.p, gr.norms.c2);

    struct PointRow {
        double A = 0, target = 0, unpushed = 0, slack = 0;
        double Dp_lead = 0;
        std::vector<double> D;  // |D+| + |D-| per group, zero for mu <= 0
        double R = 0;
    };
    std::vector<std::vector<PointRow>> table;

    // Unpushed target at x, independent of T.
    std::vector<double> unpushed(ensemble.size());
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
        const auto fr = functionals(lead->g, ensemble[i], lead->norms);
        unpushed[i] = fr.d_minus;
        if (pf.tag == CaseTag::Principal) {
            unpushed[i] = 0;
            for (const auto& gr : groups) {
                if (gr.p.tag != CaseTag::Principal) continue;
                const auto q = functionals(gr.g, ensemble[i], gr.norms);
                unpushed[i] += q.d_plus + q.d_minus;
            }
        }
    }

    for (double T : T_grid) {
        if (!(T > std::exp(1.0) - 1e-12)) throw std::invalid_argument("spatial limit grid needs T >= e");
        const double lt = std::log(T);
        double scale = 0;
        switch (pf.tag) {
            case CaseTag::Complementary: scale = std::pow(T, (1 - res.nu_f) / 2); break;
            case CaseTag::QuarterPoint: scale = std::sqrt(T) / lt; break;
            default: scale = std::sqrt(T); break;
        }
        std::vector<PointRow> rows;
        for (std::size_t i = 0; i < ensemble.size(); ++i) {
            const auto& x = ensemble[i];
            const GroupElement xT = geodesic(x, lt);
            const auto avg = ergodic_average(f, x, T, &full);
            PointRow pr;
            pr.D.assign(groups.size(), 0);
            double main = 0, err = avg.quad_error, tail = 0;
            for (std::size_t k = 0; k < groups.size(); ++k) {
                const auto& gr = groups[k];
                if (gr.p.mu <= 0) continue;
                const auto fr = functionals(gr.g, xT, gr.norms);
                const auto t = main_terms(gr.p, fr, T);
                main += t.main;
                err += t.err;
                tail += t.tail;
                pr.D[k] = std::abs(fr.d_plus) + std::abs(fr.d_minus);
                if (&gr == lead) {
                    pr.Dp_lead = std::abs(fr.d_plus);
                    pr.target = fr.d_minus;
                }
                if (pf.tag == CaseTag::Principal && gr.p.tag == CaseTag::Principal) {
                    const double k2 = gr.p.kappa() * lt / 2;
                    if (&gr == lead) pr.target = 0;
                    pr.target += std::cos(k2) * fr.d_plus + std::sin(k2) * fr.d_minus;
                }
            }
            pr.A = scale * avg.value;
            pr.R = std::abs(avg.value - main);
            pr.slack = scale * tolerance_slack(err, tail);
            pr.unpushed = unpushed[i];
            rows.push_back(std::move(pr));
        }
        table.push_back(std::move(rows));
    }

    // Sup norms of the functionals over the ensemble and the grid.
    std::vector<double> supD(groups.size(), 0);
    for (const auto& rows : table)
        for (const auto& pr : rows)
            for (std::size_t k = 0; k < groups.size(); ++k) supD[k] = std::max(supD[k], pr.D[k]);
    const double sum_D = std::accumulate(supD.begin(), supD.end(), 0.0);
    res.C = std::max(sum_D, C_R);
    res.report.note("mu_f", res.mu_f, to_string(pf.tag));
    res.report.note("eta", res.eta);
    res.report.note("C", res.C);

    for (std::size_t it = 0; it < T_grid.size(); ++it) {
        const double T = T_grid[it], lt = std::log(T);
        const auto& rows = table[it];
        double maxDp = 0, maxR = 0, slack = 0;
        std::vector<double> maxD(groups.size(), 0);
        for (const auto& pr : rows) {
            maxDp = std::max(maxDp, pr.Dp_lead);
            maxR = std::max(maxR, pr.R);
            slack = std::max(slack, pr.slack);
            for (std::size_t k = 0; k < groups.size(); ++k) maxD[k] = std::max(maxD[k], pr.D[k]);
        }
        double sum_comp = 0, sum_upper = 0, sum_princ = 0;
        for (std::size_t k = 0; k < groups.size(); ++k) {
            const auto& p = groups[k].p;
            if (p.mu <= 0) continue;
            if (p.tag == CaseTag::Complementary && p.mu > pf.mu) sum_comp += maxD[k];
            if (p.mu >= 0.25) sum_upper += maxD[k];
            if (p.tag == CaseTag::Principal) sum_princ += maxD[k];
        }
        SpatialRow row;
        row.T = T;
        switch (pf.tag) {
            case CaseTag::Complementary: {
                const double nf = res.nu_f;
                const double eta0_term = std::isfinite(res.eta0) ? std::pow(T, -res.eta0 / 2) * sum_comp : 0;
                row.middle = std::pow(T, -nf) * maxDp + eta0_term + std::pow(T, -nf / 2) * lt * sum_upper +
                             std::pow(T, 1 - (1 - nf) / 2) * maxR;
                row.final_bound = 2 * res.C * std::pow(T, -res.eta) * (1 + lt);
                break;
            }
            case CaseTag::QuarterPoint:
                row.middle = (maxDp + sum_princ) / lt + std::sqrt(T) / lt * maxR;
                row.final_bound = 2 * res.C / lt;
                break;
            default:
                row.middle = std::sqrt(T) * maxR;
                row.final_bound = res.C * (1 + lt) / std::sqrt(T);
                break;
        }
        std::vector<double> A, tgt, un;
        bool chain_a = true;
        for (const auto& pr : rows) {
            const double gap = std::abs(pr.A - pr.target);
            row.max_gap = std::max(row.max_gap, gap);
            if (gap > row.middle + pr.slack) chain_a = false;
            A.push_back(pr.A);
            tgt.push_back(pr.target);
            un.push_back(pr.unpushed);
        }
        const EmpiricalDistribution FA(A), FT(tgt), FU(un);
        row.levy_pushed = levy_distance(FA, FT);
        row.ks_pushed = ks_distance(FA, FT);
        row.levy_unpushed = levy_distance(FA, FU);
        row.ks_unpushed = ks_distance(FA, FU);
        const std::string at = fmt("T=%.6g", T);
        bool ok = res.report.require("per-point |A - target(x_T)| <= middle", row.max_gap, row.middle + slack, at);
        ok = res.report.require_true("every point within its own middle bound", chain_a, at) && ok;
        ok = res.report.require("middle <= final bound", row.middle, row.final_bound + slack, at) && ok;
        ok = res.report.require("levy(i_T, D o phi) <= max gap", row.levy_pushed, row.max_gap + 1e-6, at) && ok;
        res.report.note("levy to unpushed target", row.levy_unpushed, at);
        res.report.note("ks to pushed target", row.ks_pushed, at);
        row.pass = ok;
        res.rows.push_back(row);
    }
    if (res.rows.size() >= 2)
        res.report.note("levy decay first to last", res.rows.front().levy_pushed - res.rows.back().levy_pushed);
    return res;
}

TemporalResult temporal_clt_experiment(const Observable& f, const GroupElement& x, const std::vector<double>& T_grid,
                                       std::size_t sample_count, std::uint64_t seed, double r2_threshold) {
    TemporalResult res;
    res.report.name = "temporal-clt";
    if (T_grid.size() < 2) throw std::invalid_argument("temporal CLT needs at least two T values");
    if (sample_count < 2) throw std::invalid_argument("temporal CLT needs at least two samples");
    for (const auto& p : f.spectrum())
        if (p.tag != CaseTag::ZeroMu) throw std::domain_error("temporal CLT requires a mu = 0 observable");

    Window w;
    for (double T : T_grid) w.add_orbit(x, T, 60);
    const auto norms = f.is_zero() ? WindowNorms{} : window_norms(f, w);
    res.report.note("N(f0)", norms.c2);

    std::vector<double> logs, vars, nvars;
    for (std::size_t k = 0; k < T_grid.size(); ++k) {
        const double T = T_grid[k];
        if (!(T > 1)) throw std::invalid_argument("temporal CLT needs T > 1");
        const double lt = std::log(T);
        std::mt19937_64 rng(seed + k);
        std::vector<double> ts(sample_count);
        for (auto& t : ts) t = static_cast<double>(rng() >> 11) * 0x1.0p-53 * T;
        std::vector<std::size_t> order(sample_count);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });
        std::vector<double> sorted(sample_count);
        for (std::size_t i = 0; i < sample_count; ++i) sorted[i] = ts[order[i]];

        const auto I = integrate_cumulative<1>([&](double s) { return Vec<1>{f.f(horocycle(x, s))}; }, 0, sorted);
        const auto CT = integrate_scalar([&](double s) { return f.Vf(geodesic(x, s)); }, 0, lt);

        TemporalRow row;
        row.T = T;
        row.log_T = lt;
        std::vector<double> raw(sample_count), normed(sample_count);
        double worst_excess = 0;  // lhs minus its quadrature slack
        for (std::size_t i = 0; i < sample_count; ++i) {
            raw[i] = I[i].value[0] + CT.value[0];
            normed[i] = raw[i] / std::sqrt(lt);
            const double t = sorted[i];
            if (f.is_zero() || !(t > 0)) continue;
            const GroupElement xut = horocycle(x, t);
            const auto q = integrate_scalar([&](double s) { return f.Vf(geodesic(xut, s)) - f.Vf(geodesic(x, s)); },
                                            std::log(t), lt);
            const double lhs = std::abs(q.value[0]);
            row.worst_reduction = std::max(row.worst_reduction, lhs);
            worst_excess = std::max(worst_excess, lhs - tolerance_slack(q.error, 0));
        }
        const EmpiricalDistribution R(raw), Nd(normed);
        row.variance_unnormalized = R.variance();
        row.variance_normalized = Nd.variance();
        row.mean_normalized = Nd.mean();
        const std::string at = fmt("T=%.6g", T);
        if (row.variance_unnormalized < 1e-12) {
            res.degenerate = true;
            res.message = "f appears to be a coboundary along this orbit";
        } else {
            row.ks_normal = ks_to_normal(Nd, row.mean_normalized, std::sqrt(row.variance_normalized));
            res.report.note("ks to fitted normal", row.ks_normal, at);
        }
        if (!f.is_zero())
            res.report.require("reduction: |difference of V-integrals| <= N(f0)", worst_excess, norms.c2, at);
        res.report.note("variance (unnormalized)", row.variance_unnormalized, at);
        logs.push_back(lt);
        vars.push_back(row.variance_unnormalized);
        nvars.push_back(row.variance_normalized);
        res.rows.push_back(row);
    }
    if (res.degenerate) {
        res.report.require_true("non-degenerate variance", false, res.message);
        return res;
    }
    const auto fit = least_squares(logs, vars);
    res.slope = fit.slope;
    res.intercept = fit.intercept;
    res.r2 = fit.r2;
    res.flat_slope = least_squares(logs, nvars).slope;
    res.report.require("R^2 of variance against log T", r2_threshold, fit.r2);
    res.report.require("variance slope positive", -fit.slope, 0.0, fmt("slope=%.6g", fit.slope));
    res.report.note("normalized variance slope", res.flat_slope);
    return res;
}

std::vector<BaselineRow> geodesic_clt_baseline(const Observable& f0, const std::vector<GroupElement>& ensemble,
                                               const std::vector<double>& S_grid) {
    std::vector<BaselineRow> out;
    for (double S : S_grid) {
        if (!(S > 0)) throw std::invalid_argument("baseline needs S > 0");
        std::vector<double> v;
        v.reserve(ensemble.size());
        for (const auto& y : ensemble) {
            const auto q = integrate_scalar([&](double s) { return f0.Vf(geodesic(y, s)); }, -S, 0);
            v.push_back(q.value[0] / std::sqrt(S));
        }
        const EmpiricalDistribution F(v);
        BaselineRow row;
        row.S = S;
        row.mean = F.mean();
        row.variance = F.variance();
        if (row.variance > 0 && F.size() > 1) row.ks_normal = ks_to_normal(F, row.mean, std::sqrt(row.variance));
        out.push_back(row);
    }
    return out;
}

}  // namespace horolab
