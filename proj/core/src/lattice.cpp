#include "horolab/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <boost/math/distributions/chi_squared.hpp>
#include <json.hpp>

#include "horolab/quadrature.hpp"

namespace horolab {

FuchsianGroup FuchsianGroup::regular_octagon() {
    const double alpha = 1 + std::sqrt(2.0);
    const double beta = std::sqrt(2 + 2 * std::sqrt(2.0));
    FuchsianGroup g;
    for (int k = 0; k < 8; ++k) {
        const double c = std::cos(k * std::numbers::pi / 4), s = std::sin(k * std::numbers::pi / 4);
        g.generators.push_back(renormalize({alpha + beta * c, -beta * s, -beta * s, alpha - beta * c}));
        g.inverse_index.push_back((k + 4) % 8);
    }
    g.relator = {0, 5, 2, 7, 4, 1, 6, 3};
    g.domain_radius = std::acosh(3 + 2 * std::sqrt(2.0));
    return g;
}

GroupElement FuchsianGroup::word_product(const std::vector<int>& word) const {
    GroupElement p;
    for (int k : word) p = compose(p, generators.at(static_cast<std::size_t>(k)));
    return p;
}

bool FuchsianGroup::in_domain(double x, double y, double tol) const {
    for (const auto& gk : generators) {
        // p = gk^{-1} i
        const GroupElement inv = inverse(gk);
        const double den = inv.c * inv.c + inv.d * inv.d;
        const double u = (inv.a * inv.c + inv.b * inv.d) / den, v = 1 / den;
        const double q = (v - 1) * (x * x + y * y) + 2 * u * x + v - u * u - v * v;
        if (q > tol * (1 + std::abs(v) + u * u + v * v)) return false;
    }
    return true;
}

double FuchsianGroup::y_min() const { return std::exp(-domain_radius); }
double FuchsianGroup::y_max() const { return std::exp(domain_radius); }

std::string FuchsianGroup::to_json() const {
    nlohmann::json j;
    j["generators"] = nlohmann::json::array();
    for (const auto& g : generators) j["generators"].push_back({g.a, g.b, g.c, g.d});
    j["inverse_index"] = inverse_index;
    j["relator"] = relator;
    j["domain_radius"] = domain_radius;
    return j.dump(2);
}

FuchsianGroup FuchsianGroup::from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    FuchsianGroup g;
    for (const auto& m : j.at("generators")) {
        const auto v = m.get<std::vector<double>>();
        if (v.size() != 4) throw std::invalid_argument("generator must have 4 entries");
        const GroupElement e{v[0], v[1], v[2], v[3]};
        if (std::abs(e.det() - 1) > 1e-10) throw std::invalid_argument("generator is not unimodular");
        if (std::abs(e.trace()) <= 2) throw std::invalid_argument("generator is not hyperbolic");
        g.generators.push_back(renormalize(e));
    }
    g.inverse_index = j.at("inverse_index").get<std::vector<int>>();
    g.relator = j.at("relator").get<std::vector<int>>();
    g.domain_radius = j.at("domain_radius").get<double>();
    const auto n = static_cast<int>(g.generators.size());
    if (static_cast<int>(g.inverse_index.size()) != n) throw std::invalid_argument("inverse_index size mismatch");
    for (int k = 0; k < n; ++k) {
        const int ik = g.inverse_index[static_cast<std::size_t>(k)];
        if (ik < 0 || ik >= n) throw std::invalid_argument("inverse_index out of range");
        const GroupElement p = compose(g.generators[static_cast<std::size_t>(k)], g.generators[static_cast<std::size_t>(ik)]);
        if (projective_diff(p, GroupElement::identity()) > 1e-8)
            throw std::invalid_argument("inverse_index does not pair inverse generators");
    }
    for (int k : g.relator)
        if (k < 0 || k >= n) throw std::invalid_argument("relator index out of range");
    if (projective_diff(g.word_product(g.relator), GroupElement::identity()) > 1e-8)
        throw std::invalid_argument("relator does not evaluate to the identity");
    return g;
}

ReducedPoint reduce(const FuchsianGroup& grp, const GroupElement& g) {
    ReducedPoint r{g, {}};
    double d = distance_to_i(g);
    for (int iter = 0; iter < 100000; ++iter) {
        int best = -1;
        double best_d = d;
        GroupElement best_g;
        for (std::size_t k = 0; k < grp.generators.size(); ++k) {
            const GroupElement cand = compose(grp.generators[k], r.representative);
            const double dk = distance_to_i(cand);
            if (dk < best_d) {
                best_d = dk;
                best = static_cast<int>(k);
                best_g = cand;
            }
        }
        if (best < 0 || d - best_d <= 1e-10) return r;
        r.representative = best_g;
        r.word.push_back(best);
        d = best_d;
    }
    throw NumericalError("reduction stalled");
}

namespace {

void brute_dfs(const FuchsianGroup& grp, const GroupElement& h, int last, int depth, int max_len, double& best) {
    best = std::min(best, distance_to_i(h));
    if (depth == max_len) return;
    for (std::size_t k = 0; k < grp.generators.size(); ++k) {
        if (last >= 0 && grp.inverse_index[static_cast<std::size_t>(last)] == static_cast<int>(k)) continue;
        brute_dfs(grp, compose(grp.generators[k], h), static_cast<int>(k), depth + 1, max_len, best);
    }
}

}  // namespace

double brute_force_min_distance(const FuchsianGroup& grp, const GroupElement& g, int max_len) {
    double best = distance_to_i(g);
    brute_dfs(grp, g, -1, 0, max_len, best);
    return best;
}

std::vector<ReducedPoint> sample_haar(const FuchsianGroup& grp, std::size_t count, std::uint64_t seed) {
    std::vector<ReducedPoint> out;
    if (count == 0) return out;
    std::mt19937_64 rng(seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const double R = grp.domain_radius;
    const double xm = std::sinh(R);
    const double vlo = std::exp(-R), vhi = std::exp(R);
    std::size_t tries = 0;
    out.reserve(count);
    while (out.size() < count) {
        ++tries;
        const double x = -xm + 2 * xm * unit();
        const double y = 1 / (vlo + (vhi - vlo) * unit());  // density proportional to 1/y^2
        const double th = 2 * std::numbers::pi * unit();
        if (tries > 1000 && static_cast<double>(out.size()) < 1e-3 * static_cast<double>(tries))
            throw std::runtime_error("bounding box misconfigured");
        if (!grp.in_domain(x, y)) continue;
        out.push_back(reduce(grp, from_iwasawa({x, y, th})));
    }
    return out;
}

namespace {

using Interval = std::pair<double, double>;

// Intersects a set of disjoint sorted intervals with {x : A x^2 + B x + C <= 0}.
std::vector<Interval> intersect_quadratic(const std::vector<Interval>& in, double A, double B, double C) {
    std::vector<Interval> allowed;
    const double inf = INFINITY;
    if (std::abs(A) < 1e-14) {
        if (std::abs(B) < 1e-14) {
            if (C <= 0) allowed.push_back({-inf, inf});
        } else if (B > 0) {
            allowed.push_back({-inf, -C / B});
        } else {
            allowed.push_back({-C / B, inf});
        }
    } else {
        const double disc = B * B - 4 * A * C;
        if (disc < 0) {
            if (A < 0) allowed.push_back({-inf, inf});
        } else {
            const double sq = std::sqrt(disc);
            double r1 = (-B - sq) / (2 * A), r2 = (-B + sq) / (2 * A);
            if (r1 > r2) std::swap(r1, r2);
            if (A > 0) {
                allowed.push_back({r1, r2});
            } else {
                allowed.push_back({-inf, r1});
                allowed.push_back({r2, inf});
            }
        }
    }
    std::vector<Interval> out;
    for (const auto& [a, b] : in)
        for (const auto& [c, d] : allowed) {
            const double lo = std::max(a, c), hi = std::min(b, d);
            if (hi > lo) out.push_back({lo, hi});
        }
    return out;
}

double slice_length(const FuchsianGroup& grp, double y, double x0, double x1) {
    std::vector<Interval> set{{x0, x1}};
    for (const auto& gk : grp.generators) {
        const GroupElement inv = inverse(gk);
        const double den = inv.c * inv.c + inv.d * inv.d;
        const double u = (inv.a * inv.c + inv.b * inv.d) / den, v = 1 / den;
        set = intersect_quadratic(set, v - 1, 2 * u, (v - 1) * y * y + v - u * u - v * v);
        if (set.empty()) return 0;
    }
    double L = 0;
    for (const auto& [a, b] : set) L += b - a;
    return L;
}

}  // namespace

double domain_cell_area(const FuchsianGroup& grp, double x0, double x1, double y0, double y1) {
    // y = e^eta, dy / y^2 = e^{-eta} deta
    QuadOptions opt;
    opt.max_panel = (std::log(y1) - std::log(y0)) / 64;
    opt.max_depth = 8;
    const auto q = integrate_scalar(
        [&](double eta) {
            const double y = std::exp(eta);
            return slice_length(grp, y, x0, x1) / y;
        },
        std::log(y0), std::log(y1), opt);
    return q.value[0];
}

ChiSquareResult haar_chi_square(const FuchsianGroup& grp, const std::vector<ReducedPoint>& sample, int bins) {
    const double R = grp.domain_radius, xm = std::sinh(R);
    const int nb = bins;
    const auto cells = static_cast<std::size_t>(nb * nb * nb);
    std::vector<double> observed(cells, 0), expected(cells, 0);
    auto xedge = [&](int i) { return -xm + 2 * xm * i / nb; };
    auto yedge = [&](int j) { return std::exp(-R + 2 * R * j / nb); };
    double total = 0;
    std::vector<double> area(static_cast<std::size_t>(nb * nb));
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) {
            const double a = domain_cell_area(grp, xedge(i), xedge(i + 1), yedge(j), yedge(j + 1));
            area[static_cast<std::size_t>(i * nb + j)] = a;
            total += a;
        }
    const double n = static_cast<double>(sample.size());
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            for (int k = 0; k < nb; ++k)
                expected[static_cast<std::size_t>((i * nb + j) * nb + k)] =
                    n * area[static_cast<std::size_t>(i * nb + j)] / total / nb;
    auto clampi = [nb](int v) { return std::clamp(v, 0, nb - 1); };
    for (const auto& p : sample) {
        const auto k = iwasawa(p.representative);
        const int i = clampi(static_cast<int>(std::floor((k.x + xm) / (2 * xm) * nb)));
        const int j = clampi(static_cast<int>(std::floor((std::log(k.y) + R) / (2 * R) * nb)));
        const int t = clampi(static_cast<int>(std::floor(k.theta / (2 * std::numbers::pi) * nb)));
        observed[static_cast<std::size_t>((i * nb + j) * nb + t)] += 1;
    }
    ChiSquareResult res;
    res.total_mass = total;
    double pool_o = 0, pool_e = 0;
    for (std::size_t c = 0; c < cells; ++c) {
        if (expected[c] < 5) {
            pool_o += observed[c];
            pool_e += expected[c];
            continue;
        }
        res.statistic += (observed[c] - expected[c]) * (observed[c] - expected[c]) / expected[c];
        ++res.cells;
    }
    if (pool_e > 0) {
        res.statistic += (pool_o - pool_e) * (pool_o - pool_e) / pool_e;
        ++res.cells;
    }
    res.dof = res.cells - 1;
    if (res.dof < 1) throw std::invalid_argument("chi-square test needs at least two cells");
    boost::math::chi_squared dist(res.dof);
    res.p_value = boost::math::cdf(boost::math::complement(dist, res.statistic));
    return res;
}

CheckReport recurrent_orbit_check(const FuchsianGroup& grp, const GroupElement& x, double T) {
    CheckReport rep;
    rep.name = "recurrent-orbit";
    const double lo = grp.y_min() * (1 - 1e-9), hi = grp.y_max() * (1 + 1e-9);
    GroupElement cur = reduce(grp, x).representative;
    rep.require("reduced height within domain range", std::max(lo - height(cur), height(cur) - hi), 0, "t=0");
    double min_unreduced = height(x);
    const int steps = static_cast<int>(std::floor(T / 0.5 + 1e-12));
    for (int k = 1; k <= steps; ++k) {
        cur = reduce(grp, horocycle(cur, 0.5)).representative;
        const double y = height(cur);
        if (y < lo || y > hi) {
            rep.require("reduced height within domain range", std::max(lo - y, y - hi), 0, "t=" + std::to_string(0.5 * k));
            return rep;
        }
        min_unreduced = std::min(min_unreduced, height(horocycle(x, 0.5 * k)));
    }
    rep.require("reduced height within domain range", 0, 0, "all checkpoints");
    rep.note("checkpoints", steps);
    rep.note("unreduced height at T", height(horocycle(x, T)));
    rep.note("smallest unreduced height", min_unreduced);
    return rep;
}

}  // namespace horolab
