// Acceptance suite: one line per criterion, nonzero exit if any criterion fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "horolab/experiments.hpp"
#include "horolab/functionals.hpp"
#include "horolab/limits.hpp"

using namespace horolab;

namespace {

struct Verdict {
    bool pass = true;
    std::string detail;
};

struct Criterion {
    int id;
    std::string name;
    double budget_s;
    std::function<Verdict()> run;
};

std::string fmt(const char* f, double a, double b = 0) {
    char buf[160];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

Verdict from_report(const CheckReport& rep) {
    if (rep.pass) return {true, fmt("%.0f checks", static_cast<double>(rep.items.size()))};
    const auto* it = rep.first_failure();
    return {false, it->name + " (" + it->detail + "): " + fmt("%.6g > %.6g", it->lhs, it->rhs)};
}

Verdict run_config(const std::string& json) { return from_report(run_experiment(parse_config(json)).report); }

const std::vector<std::string> kThreeCases = {"power:s=0.5+1.5i:real", "power:s=0.5:real", "power:s=0.75:real"};

std::string keys(const std::vector<std::string>& ks) {
    std::string s = "[";
    for (std::size_t i = 0; i < ks.size(); ++i) s += (i ? ", \"" : "\"") + ks[i] + "\"";
    return s + "]";
}

std::string config(const std::string& experiment, const std::vector<std::string>& obs, int count,
                   const std::string& extra = "") {
    return R"({"schema_version": 1, "experiment": ")" + experiment + R"(", "observables": )" + keys(obs) +
           R"(, "base_points": {"source": "window", "count": )" + std::to_string(count) + R"(, "seed": 11})" + extra +
           "}";
}

Verdict change_of_variable() {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> lt(0, 6);
    const auto xs = reference_points(20, 21);
    const auto f = make_power_observable({0.75, 0});
    double worst = -1;
    for (const auto& x : xs) {
        const double T = std::exp(lt(rng));
        const auto a = ergodic_average(f, x, T);
        const auto j = j_function(f, geodesic(x, std::log(T)), std::log(T));
        worst = std::max(worst, std::abs(a.value - j.J) - (a.quad_error + j.quad_error + 1e-14));
    }
    return {worst <= 0, fmt("worst excess over combined quadrature error %.3g", worst)};
}

Verdict norm_bounds() {
    CheckReport rep;
    for (const auto& k : kThreeCases) {
        const auto f = observable_from_key(k);
        const auto xs = reference_points(100, 31);
        rep.merge(functional_norm_check(f, xs, window_norms(f, orbit_window(f, xs, {1}))));
    }
    return from_report(rep);
}

Verdict coarse_bounds() {
    CheckReport rep;
    std::vector<double> Ts;
    for (double k : {1, 2, 4, 6, 8}) Ts.push_back(std::exp(k));
    auto Tw = Ts;
    Tw.push_back(1);
    for (const auto& k : {kThreeCases[0], kThreeCases[2]}) {
        const auto f = observable_from_key(k);
        const auto xs = reference_points(10, 41);
        const auto n = window_norms(f, orbit_window(f, xs, Tw));
        for (const auto& x : xs) rep.merge(coarse_bounds_check(f, x, Ts, n));
    }
    return from_report(rep);
}

Verdict discrete_and_zero() {
    CheckReport rep;
    const std::vector<double> Ts{1, 10, 100, 1000};
    const auto xs = reference_points(10, 51);
    for (int n : {3, 4}) {
        const auto f = make_discrete_observable(n);
        rep.merge(discrete_boundedness_check(f, xs, Ts, window_norms(f, orbit_window(f, xs, Ts))));
    }
    const auto y = make_power_observable({1, 0});
    std::vector<double> Tz;
    for (double k : {1, 2, 4, 6}) Tz.push_back(std::exp(k));
    const auto nz = window_norms(y, orbit_window(y, xs, Tz));
    for (const auto& x : xs)
        for (double T : Tz) rep.merge(mu_zero_formula_check(y, x, T, nz));
    return from_report(rep);
}

Verdict levy_machinery() {
    std::string why;
    const double d = levy_distance(EmpiricalDistribution({0.0}), EmpiricalDistribution({0.3}));
    if (std::abs(d - 0.3) > 1e-6) why += fmt("point masses %.9g; ", d);
    std::mt19937_64 rng(61);
    std::normal_distribution<double> N;
    auto sample = [&](std::size_t n, double m) {
        std::vector<double> v(n);
        for (auto& x : v) x = m + N(rng);
        return v;
    };
    for (int i = 0; i < 50; ++i) {
        const EmpiricalDistribution F(sample(40, 0)), G(sample(35, 0.4)), H(sample(30, -0.3));
        const double fg = levy_distance(F, G);
        if (levy_distance(F, F) != 0) why += "identity; ";
        if (std::abs(fg - levy_distance(G, F)) > 1e-9) why += "symmetry; ";
        if (fg > levy_distance(F, H) + levy_distance(H, G) + 2e-6) why += "triangle; ";
        if (fg > ks_distance(F, G) + 1e-6) why += "levy above ks; ";
    }
    const auto X = sample(500, 0);
    std::uniform_real_distribution<double> U(-0.05, 0.05);
    std::vector<std::size_t> perm(X.size());
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<double> Y(X.size());
    for (std::size_t i = 0; i < X.size(); ++i) Y[perm[i]] = X[i] + U(rng);
    const auto lem = levy_lemma_check(X, Y, perm, 0.05);
    if (!lem.pass) why += "coupling bound; ";
    return {why.empty(), why.empty() ? fmt("point-mass distance %.9g", d) : why};
}

Verdict spatial() {
    const std::vector<std::pair<std::vector<std::string>, std::string>> cases = {
        {{"power:s=0.75:real", "power:s=0.5+1.5i:real", "power:s=0.6:real"}, "[1, 0.5, 0.5]"},
        {{"power:s=0.5:real", "power:s=0.5+1.5i:real"}, "[1, 0.5]"},
        {{"power:s=0.5+1.5i:real", "power:s=0.5+2.5i:imag"}, "[1, 0.5]"}};
    CheckReport rep;
    for (const auto& [obs, w] : cases)
        rep.merge(run_experiment(parse_config(config("spatial-lt", obs, 200, R"(, "weights": )" + w))).report);
    return from_report(rep);
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "ODE reduction residual < 1e-6", 60,
         [] {
             return run_config(config("ode-residual",
                                      {"power:s=0.5+1.5i:real", "power:s=0.5:real", "power:s=0.75:real",
                                       "power:s=1:real", "discrete:n=3:real"},
                                      5, R"(, "t_grid": [0, 0.5, 1, 2, 4], "tolerances": {"ode_residual": 1e-6})"));
         }},
        {2, "change of variable within quadrature error", 60, change_of_variable},
        {3, "expansion reconstruction within remainder bounds", 180,
         [] { return run_config(config("expansion", {kThreeCases[0], kThreeCases[1], kThreeCases[2]}, 10)); }},
        {4, "functional norm bounds at 100 points per case", 60, norm_bounds},
        {5, "coarse decay bounds", 60, coarse_bounds},
        {6, "geodesic-action identities", 60,
         [] { return run_config(config("geodesic-action", kThreeCases, 5)); }},
        {7, "Hoelder exponents within +-0.1 (+-0.15 quarter D+)", 120,
         [] {
             return run_config(config("holder", kThreeCases, 3,
                                      R"(, "tolerances": {"holder_window": 0.1, "holder_window_quarter_plus": 0.15})"));
         }},
        {8, "G-difference and tail lemma bounds", 30,
         [] { return run_config(config("tail-lemmas", {"power:s=0.75:real"}, 2, R"(, "seed": 8)")); }},
        {9, "discrete boundedness and mu = 0 formula", 60, discrete_and_zero},
        {10, "Levy machinery", 30, levy_machinery},
        {11, "spatial inequality chains, 200 points, three normalizations", 300, spatial},
        {12, "temporal variance against log T, R^2 >= 0.9, reduction per sample", 300,
         [] {
             return run_config(config("temporal-clt", {"power:s=1:real"}, 1,
                                      R"(, "seed": 12, "sample_count": 10000, "tolerances": {"r2": 0.9})"));
         }},
        {13, "lattice reduction oracle and Haar chi-square", 120,
         [] {
             return run_config(R"({"schema_version": 1, "experiment": "lattice-sanity", "seed": 13,
                 "base_points": {"source": "haar", "count": 100, "seed": 13}, "sample_count": 10000,
                 "tolerances": {"chi_square_p": 0.01}})");
         }},
    };
    int failed = 0;
    double total = 0;
    for (const auto& c : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Verdict v;
        try {
            v = c.run();
        } catch (const std::exception& e) {
            v = {false, std::string("aborted: ") + e.what()};
        }
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        total += s;
        const bool in_time = s <= c.budget_s;
        const bool ok = v.pass && in_time;
        if (!ok) ++failed;
        std::printf("%s criterion %2d: %s | %s | %.1fs of %.0fs%s\n", ok ? "PASS" : "FAIL", c.id, c.name.c_str(),
                    v.detail.c_str(), s, c.budget_s, in_time ? "" : " (over budget)");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed, %.1fs total (budget 900s)\n", static_cast<int>(criteria.size()) - failed,
                criteria.size(), total);
    return failed == 0 && total <= 900 ? 0 : 1;
}
