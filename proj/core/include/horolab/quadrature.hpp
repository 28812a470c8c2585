#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

namespace horolab {

// 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
    std::array<double, 16> nodes;
    std::array<double, 16> weights;
};
const GaussLegendre16& gauss_legendre16();

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
struct QuadResult {
    Vec<N> value{};
    double error = 0;  // refinement differences plus a rounding allowance, max over components
    std::size_t evaluations = 0;
};

struct QuadOptions {
    double max_panel = 0.25;
    double abs_tol = 1e-15;  // per base panel
    double rel_tol = 1e-13;
    int max_depth = 12;
};

namespace detail {

constexpr double kEps = 2.220446049250313e-16;

// Returns the panel integral; adds the integral of max_k |f_k| to mass.
template <std::size_t N, class F>
Vec<N> gl_panel(F& f, double a, double b, std::size_t& evals, double& mass) {
    const auto& r = gauss_legendre16();
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    Vec<N> acc{};
    double m = 0;
    for (int i = 0; i < 16; ++i) {
        const Vec<N> v = f(mid + half * r.nodes[i]);
        double vmax = 0;
        for (std::size_t k = 0; k < N; ++k) {
            acc[k] += r.weights[i] * v[k];
            vmax = std::max(vmax, std::abs(v[k]));
        }
        m += r.weights[i] * vmax;
    }
    for (auto& x : acc) x *= half;
    mass = std::abs(half) * m;
    evals += 16;
    return acc;
}

template <std::size_t N>
double vdiff(const Vec<N>& p, const Vec<N>& q) {
    double m = 0;
    for (std::size_t k = 0; k < N; ++k) m = std::max(m, std::abs(p[k] - q[k]));
    return m;
}

template <std::size_t N>
double vnorm(const Vec<N>& p) {
    double m = 0;
    for (double x : p) m = std::max(m, std::abs(x));
    return m;
}

template <std::size_t N, class F>
void adapt(F& f, double a, double b, const Vec<N>& coarse, double tol, int depth, const QuadOptions& opt,
           QuadResult<N>& out) {
    const double m = 0.5 * (a + b);
    double ml = 0, mr = 0;
    const Vec<N> left = gl_panel<N>(f, a, m, out.evaluations, ml);
    const Vec<N> right = gl_panel<N>(f, m, b, out.evaluations, mr);
    Vec<N> fine;
    for (std::size_t k = 0; k < N; ++k) fine[k] = left[k] + right[k];
    const double err = vdiff(fine, coarse);
    // rounding in the panel sums is of order eps times the absolute mass
    const double floor = 64 * kEps * (ml + mr);
    if (err <= std::max({tol, opt.rel_tol * vnorm(fine), floor}) || depth >= opt.max_depth) {
        for (std::size_t k = 0; k < N; ++k) out.value[k] += fine[k];
        out.error += err + 16 * kEps * (ml + mr);
        return;
    }
    adapt<N>(f, a, m, left, tol / 2, depth + 1, opt, out);
    adapt<N>(f, m, b, right, tol / 2, depth + 1, opt, out);
}

}  // namespace detail

// Adaptive composite Gauss-Legendre of a vector-valued integrand over [a, b].
// Every panel is compared with its bisection; the reported error is the
// accumulated absolute difference of the accepted pairs.
template <std::size_t N, class F>
QuadResult<N> integrate(F&& f, double a, double b, const QuadOptions& opt = {}) {
    QuadResult<N> out;
    if (!(b > a)) return out;
    const auto panels = static_cast<std::size_t>(std::ceil((b - a) / opt.max_panel - 1e-12));
    const std::size_t n = std::max<std::size_t>(panels, 1);
    const double h = (b - a) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double lo = a + h * static_cast<double>(i);
        const double hi = (i + 1 == n) ? b : lo + h;
        double mass = 0;
        const Vec<N> coarse = detail::gl_panel<N>(f, lo, hi, out.evaluations, mass);
        detail::adapt<N>(f, lo, hi, coarse, opt.abs_tol, 0, opt, out);
    }
    return out;
}

template <class F>
QuadResult<1> integrate_scalar(F&& f, double a, double b, const QuadOptions& opt = {}) {
    return integrate<1>([&](double t) { return Vec<1>{f(t)}; }, a, b, opt);
}

// Integrals of f over [a, t_k] for ascending query points t_k >= a.
template <std::size_t N, class F>
std::vector<QuadResult<N>> integrate_cumulative(F&& f, double a, const std::vector<double>& sorted_points,
                                                const QuadOptions& opt = {}) {
    std::vector<QuadResult<N>> out;
    out.reserve(sorted_points.size());
    QuadResult<N> acc;
    double lo = a;
    for (double t : sorted_points) {
        if (t > lo) {
            const auto piece = integrate<N>(f, lo, t, opt);
            for (std::size_t k = 0; k < N; ++k) acc.value[k] += piece.value[k];
            acc.error += piece.error;
            acc.evaluations += piece.evaluations;
            lo = t;
        }
        out.push_back(acc);
    }
    return out;
}

}  // namespace horolab
