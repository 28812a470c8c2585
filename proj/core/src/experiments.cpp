#include "horolab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "horolab/functionals.hpp"
#include "horolab/lattice.hpp"
#include "horolab/limits.hpp"
#include "json.hpp"

namespace horolab {

using nlohmann::json;

namespace {

const std::vector<std::string> kTolerances = {"ode_residual", "holder_window", "holder_window_quarter_plus",
                                              "r2", "chi_square_p", "reduction_match"};

const std::set<std::string> kNoObservables = {"lattice-sanity", "tail-lemmas"};

std::vector<double> exp_grid(std::initializer_list<double> logs) {
    std::vector<double> out;
    for (double l : logs) out.push_back(std::exp(l));
    return out;
}

std::uint64_t read_u64(const json& j, const std::string& what) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<long long>() >= 0) return static_cast<std::uint64_t>(j.get<long long>());
    throw ConfigError(what + " must be a non-negative integer");
}

std::vector<double> read_grid(const json& j, const std::string& what, double min_value) {
    if (!j.is_array()) throw ConfigError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(what + " must be an array of numbers");
        const double d = v.get<double>();
        if (!std::isfinite(d) || d < min_value) throw ConfigError(what + " entries must be finite and >= " + std::to_string(min_value));
        out.push_back(d);
    }
    return out;
}

void reject_unknown(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

template <class F>
void parallel_for(unsigned jobs, std::size_t n, F&& fn) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (jobs == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(jobs);
    for (unsigned w = 0; w < jobs; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += jobs) fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

std::string num(double v) { return csv_number(v); }

std::vector<std::string> point_cells(const GroupElement& g) { return {num(g.a), num(g.b), num(g.c), num(g.d)}; }

std::string nu_text(const SpectralParameter& p) {
    return p.tag == CaseTag::Principal ? num(p.nu.imag()) + "i" : num(p.nu.real());
}

struct Context {
    const ExperimentConfig& cfg;
    RunOptions opt;
    std::vector<Observable> obs;
    std::vector<GroupElement> xs;
    std::uint64_t seed = 0;

    std::vector<double> T_or(std::vector<double> fallback) const { return cfg.T_grid.empty() ? fallback : cfg.T_grid; }

    Observable combined() const {
        std::vector<std::pair<double, Observable>> terms;
        for (std::size_t i = 0; i < obs.size(); ++i) terms.emplace_back(cfg.weights.empty() ? 1.0 : cfg.weights[i], obs[i]);
        return zero_mean_combination(terms);
    }
};

void append(std::vector<std::vector<std::string>>& rows, std::vector<std::string> head,
            const std::vector<std::string>& tail) {
    head.insert(head.end(), tail.begin(), tail.end());
    rows.push_back(std::move(head));
}

// ------------------------------------------------------------------ experiments

ExperimentOutcome run_ode_residual(const Context& c) {
    ExperimentOutcome out;
    CsvTable tab{"ode_residual", {"case", "observable", "x_a", "x_b", "x_c", "x_d", "t", "residual", "quad_error", "pass"}, {}};
    const double tol = c.cfg.tolerance("ode_residual", 1e-6);
    const std::vector<double> ts = c.cfg.t_grid.empty() ? std::vector<double>{0, 0.5, 1, 2, 4} : c.cfg.t_grid;
    double worst = 0;
    for (const auto& f : c.obs) {
        const auto& p = f.spectral_or_throw();
        std::vector<std::vector<OdeResidual>> res(c.xs.size());
        parallel_for(c.opt.jobs, c.xs.size(), [&](std::size_t i) {
            for (double t : ts) res[i].push_back(ode_residual(f, c.xs[i], t));
        });
        for (std::size_t i = 0; i < c.xs.size(); ++i) {
            for (std::size_t k = 0; k < ts.size(); ++k) {
                const auto& r = res[i][k];
                worst = std::max(worst, r.residual);
                const bool ok = out.report.require("ODE residual", r.residual, tol,
                                                   f.key() + " t=" + num(ts[k]));
                append(tab.rows, {to_string(p.tag), f.key()},
                       [&] {
                           auto v = point_cells(c.xs[i]);
                           v.insert(v.end(), {num(ts[k]), num(r.residual), num(r.quad_error), ok ? "pass" : "fail"});
                           return v;
                       }());
            }
        }
    }
    out.report.note("max residual", worst);
    out.tables.push_back(std::move(tab));
    return out;
}

ExperimentOutcome run_expansion(const Context& c) {
    ExperimentOutcome out;
    CsvTable tab{"expansion",
                 {"case", "nu", "x_a", "x_b", "x_c", "x_d", "T", "direct", "expansion", "gap", "bound", "pass"},
                 {}};
    const auto Ts = c.T_or(exp_grid({1, 2, 4, 6}));
    for (const auto& f : c.obs) {
        const auto spec = f.spectral();
        const Window w = orbit_window(f, c.xs, Ts);
        if (!spec) {
            out.report.merge(finite_sum_expansion_check(f, c.xs, Ts, w));
            continue;
        }
        const auto norms = window_norms(f, w);
        std::vector<std::vector<ExpansionRecord>> rows(c.xs.size());
        parallel_for(c.opt.jobs, c.xs.size(), [&](std::size_t i) {
            for (double T : Ts) rows[i].push_back(expansion(f, c.xs[i], T, norms));
        });
        for (std::size_t i = 0; i < c.xs.size(); ++i) {
            for (const auto& e : rows[i]) {
                out.report.require("|<f>_T - main terms| <= remainder bound", e.reconstruction_gap,
                                   e.remainder_bound + e.slack, f.key() + " T=" + num(e.T));
                auto cells = point_cells(e.x);
                cells.insert(cells.end(), {num(e.T), num(e.direct), num(e.expansion), num(e.reconstruction_gap),
                                           num(e.remainder_bound + e.slack), e.pass ? "pass" : "fail"});
                append(tab.rows, {to_string(spec->tag), nu_text(*spec)}, cells);
            }
        }
    }
    out.tables.push_back(std::move(tab));
    return out;
}

ExperimentOutcome run_bounds(const Context& c) {
    ExperimentOutcome out;
    for (const auto& f : c.obs) {
        const auto& p = f.spectral_or_throw();
        switch (p.tag) {
            case CaseTag::Principal:
            case CaseTag::Complementary:
            case CaseTag::QuarterPoint: {
                const auto Ts = c.T_or(exp_grid({1, 2, 4, 6, 8}));
                auto Tw = Ts;
                Tw.push_back(1);
                const auto norms = window_norms(f, orbit_window(f, c.xs, Tw));
                out.report.merge(functional_norm_check(f, c.xs, norms));
                if (p.tag != CaseTag::QuarterPoint) {
                    std::vector<CheckReport> reps(c.xs.size());
                    parallel_for(c.opt.jobs, c.xs.size(),
                                 [&](std::size_t i) { reps[i] = coarse_bounds_check(f, c.xs[i], Ts, norms); });
                    for (const auto& r : reps) out.report.merge(r);
                }
                break;
            }
            case CaseTag::DiscreteSeries: {
                const auto Ts = c.T_or({1, 10, 100, 1000});
                const auto norms = window_norms(f, orbit_window(f, c.xs, Ts));
                out.report.merge(discrete_boundedness_check(f, c.xs, Ts, norms));
                break;
            }
            case CaseTag::ZeroMu: {
                const auto Ts = c.T_or(exp_grid({1, 2, 4, 6}));
                const auto norms = window_norms(f, orbit_window(f, c.xs, Ts));
                for (const auto& x : c.xs)
                    for (double T : Ts) out.report.merge(mu_zero_formula_check(f, x, T, norms));
                break;
            }
        }
    }
    return out;
}

ExperimentOutcome run_geodesic_action(const Context& c) {
    ExperimentOutcome out;
    for (const auto& f : c.obs) {
        const auto& p = f.spectral_or_throw();
        if (p.mu <= 0) {
            out.report.note("skipped: identities are stated for mu > 0", p.mu, f.key());
            continue;
        }
        const Observable xf = f.apply_X();
        const Window w = orbit_window(f, c.xs, {1});
        const auto nf = window_norms(f, w), nx = window_norms(xf, w);
        std::vector<CheckReport> reps(c.xs.size());
        parallel_for(c.opt.jobs, c.xs.size(), [&](std::size_t i) { reps[i] = geodesic_action_check(f, c.xs[i], nf, nx); });
        for (const auto& r : reps) out.report.merge(r);
    }
    return out;
}

ExperimentOutcome run_holder(const Context& c) {
    ExperimentOutcome out;
    CsvTable tab{"holder", {"observable", "functional", "x_a", "x_b", "x_c", "x_d", "direction", "exponent", "constant", "r2"}, {}};
    const auto radii = holder_radii(10);
    const auto dirs = holder_directions();
    for (const auto& f : c.obs) {
        const auto& p = f.spectral_or_throw();
        if (p.mu <= 0) {
            out.report.note("skipped: no functionals for mu <= 0", p.mu, f.key());
            continue;
        }
        std::vector<GroupElement> pts = c.xs;
        for (const auto& x : c.xs)
            for (const auto& d : dirs) pts.push_back(compose(x, exp_algebra(d.W * radii.back())));
        const auto norms = window_norms(f, orbit_window(f, pts, {1}));
        FunctionalOptions fo;
        fo.horizon = truncation_horizon(p, norms.sup_V, fo.tail_target);
        double pred_plus = 0.5, pred_minus = 0.5;
        if (p.tag == CaseTag::Complementary) {
            pred_plus = (1 - p.nu_real()) / 2;
            pred_minus = (1 + p.nu_real()) / 2;
        }
        const double win = c.cfg.tolerance("holder_window", 0.1);
        const double win_plus =
            p.tag == CaseTag::QuarterPoint ? c.cfg.tolerance("holder_window_quarter_plus", 0.15) : win;
        for (const auto& x : c.xs) {
            for (int which = 0; which < 2; ++which) {
                const std::string name = which == 0 ? "D+" : "D-";
                auto D = [&](const GroupElement& g) {
                    const auto r = functionals(f, g, norms, fo);
                    return which == 0 ? r.d_plus : r.d_minus;
                };
                std::vector<HolderFit> fits(dirs.size());
                parallel_for(c.opt.jobs, dirs.size(), [&](std::size_t k) {
                    try {
                        fits[k] = holder_estimate(D, x, dirs[k].W, radii);
                    } catch (const std::domain_error&) {
                        fits[k].exponent = std::nan("");
                    }
                    fits[k].direction = dirs[k].name;
                });
                const HolderFit* worst = nullptr;
                for (const auto& fit : fits) {
                    auto cells = point_cells(x);
                    cells.insert(cells.end(), {fit.direction, num(fit.exponent), num(fit.constant), num(fit.r2)});
                    append(tab.rows, {f.key(), name}, cells);
                    if (std::isfinite(fit.exponent) && (!worst || fit.constant > worst->constant)) worst = &fit;
                }
                const double pred = which == 0 ? pred_plus : pred_minus;
                const double w = which == 0 ? win_plus : win;
                if (!worst) {
                    out.report.require_true(name + " exponent", false, "locally constant; exponent undefined");
                    continue;
                }
                out.report.require("|" + name + " exponent - predicted|", std::abs(worst->exponent - pred), w,
                                   f.key() + " direction " + worst->direction + " exponent " + num(worst->exponent) +
                                       " predicted " + num(pred));
            }
        }
    }
    out.tables.push_back(std::move(tab));
    return out;
}

ExperimentOutcome run_spatial(const Context& c) {
    ExperimentOutcome out;
    const Observable f = c.combined();
    const auto Ts = c.T_or(exp_grid({2, 4, 6}));
    auto Tw = Ts;
    Tw.push_back(1);
    const Window w = orbit_window(f, c.xs, Tw);
    const auto res = spatial_lt_experiment(f, c.xs, Ts, w);
    out.report = res.report;
    CsvTable tab{"spatial_lt",
                 {"case", "T", "levy_pushed", "ks_pushed", "levy_unpushed", "ks_unpushed", "max_gap", "middle",
                  "final_bound", "pass"},
                 {}};
    for (const auto& r : res.rows)
        tab.rows.push_back({to_string(res.case_tag), num(r.T), num(r.levy_pushed), num(r.ks_pushed),
                            num(r.levy_unpushed), num(r.ks_unpushed), num(r.max_gap), num(r.middle),
                            num(r.final_bound), r.pass ? "pass" : "fail"});
    out.tables.push_back(std::move(tab));
    return out;
}

ExperimentOutcome run_temporal(const Context& c) {
    ExperimentOutcome out;
    const Observable f = c.combined();
    const auto Ts = c.T_or(exp_grid({4, 6, 8, 10}));
    const auto res = temporal_clt_experiment(f, c.xs.front(), Ts, c.cfg.sample_count, c.seed,
                                             c.cfg.tolerance("r2", 0.9));
    out.report = res.report;
    out.report.note("variance slope against log T", res.slope);
    out.report.note("R^2", res.r2);
    CsvTable tab{"temporal_clt",
                 {"T", "log_T", "variance_unnormalized", "variance_normalized", "mean_normalized", "ks_normal",
                  "worst_reduction"},
                 {}};
    for (const auto& r : res.rows)
        tab.rows.push_back({num(r.T), num(r.log_T), num(r.variance_unnormalized), num(r.variance_normalized),
                            num(r.mean_normalized), num(r.ks_normal), num(r.worst_reduction)});
    out.tables.push_back(std::move(tab));

    if (!f.is_zero()) {
        const std::vector<double> S = c.cfg.S_grid.empty() ? std::vector<double>{4, 6, 8, 10} : c.cfg.S_grid;
        const auto base = geodesic_clt_baseline(f, c.xs, S);
        CsvTable bt{"geodesic_baseline", {"S", "mean", "variance", "ks_normal"}, {}};
        for (const auto& r : base) {
            bt.rows.push_back({num(r.S), num(r.mean), num(r.variance), num(r.ks_normal)});
            out.report.note("baseline variance", r.variance, "S=" + num(r.S));
        }
        if (base.size() >= 2 && base.back().variance > 0)
            out.report.note("baseline relative variance change, last two S",
                            std::abs(base[base.size() - 2].variance - base.back().variance) / base.back().variance);
        out.tables.push_back(std::move(bt));
    }
    return out;
}

ExperimentOutcome run_lattice(const Context& c) {
    ExperimentOutcome out;
    const auto grp = FuchsianGroup::regular_octagon();
    const std::size_t n = c.cfg.base_points.count ? c.cfg.base_points.count : 100;
    std::mt19937_64 rng(c.seed ^ 0x9e3779b97f4a7c15ULL);
    CsvTable tab{"reduction", {"index", "word_length", "reduced_distance", "brute_force_distance"}, {}};
    const double match = c.cfg.tolerance("reduction_match", 1e-9);
    // random g with d(g i, i) <= 5, against the word ball of length 6
    std::uniform_real_distribution<double> U(0, 1);
    std::vector<GroupElement> pts(n);
    for (auto& g : pts) {
        const double phi = 2 * std::numbers::pi * U(rng), r = 5 * U(rng), th = 2 * std::numbers::pi * U(rng);
        g = compose(compose(k_matrix(phi), geodesic(GroupElement::identity(), r)), k_matrix(th));
    }
    std::vector<double> dr(n), db(n);
    std::vector<std::size_t> wl(n);
    parallel_for(c.opt.jobs, n, [&](std::size_t i) {
        const auto red = reduce(grp, pts[i]);
        dr[i] = distance_to_i(red.representative);
        wl[i] = red.word.size();
        db[i] = brute_force_min_distance(grp, pts[i], 6);
    });
    for (std::size_t i = 0; i < n; ++i) {
        out.report.require("|reduced distance - word-ball minimum|", std::abs(dr[i] - db[i]), match,
                           "point " + std::to_string(i));
        tab.rows.push_back({std::to_string(i), std::to_string(wl[i]), num(dr[i]), num(db[i])});
    }
    const auto big = sample_haar(grp, std::max<std::size_t>(c.cfg.sample_count, 1000), c.seed + 1);
    const auto chi = haar_chi_square(grp, big);
    out.report.require("chi-square p-value above threshold", c.cfg.tolerance("chi_square_p", 0.01), chi.p_value);
    out.report.note("chi-square statistic", chi.statistic);
    out.report.note("domain area from cells", chi.total_mass, "expected 4 pi");
    out.report.merge(recurrent_orbit_check(grp, big.front().representative, 1000));
    out.tables.push_back(std::move(tab));
    return out;
}

ExperimentOutcome run_tail_lemmas(const Context& c) {
    ExperimentOutcome out;
    // extremal F and seeded random F below the cap
    const double C0 = 1;
    for (double r : {1e-2, 1e-3}) {
        for (double a : {0.3, 0.5, 0.7}) {
            const double kink = -std::log(r);
            out.report.merge(tail_lemma_check([&](double s) { return C0 * std::min(1.0, std::exp(s) * r); }, C0, r, a,
                                              {kink}));
        }
    }
    std::mt19937_64 rng(c.seed);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 10; ++k) {
        const double r = std::pow(10.0, -1 - 3 * U(rng)), a = 0.1 + 0.8 * U(rng);
        const double om = 0.5 + 4 * U(rng), ph = 2 * std::numbers::pi * U(rng);
        auto F = [=](double s) { return C0 * std::min(1.0, std::exp(s) * r) * (0.5 + 0.5 * std::sin(om * s + ph)); };
        out.report.merge(tail_lemma_check(F, C0, r, a, {-std::log(r)}));
    }
    if (!c.obs.empty()) {
        const auto dirs = holder_directions();
        for (const auto& f : c.obs) {
            std::vector<GroupElement> pts = c.xs;
            for (const auto& x : c.xs)
                for (const auto& d : dirs) pts.push_back(compose(x, exp_algebra(d.W * 1e-2)));
            const auto norms = window_norms(f, orbit_window(f, pts, {1}));
            for (const auto& x : c.xs)
                for (const auto& d : dirs)
                    for (double r : {1e-2, 1e-3})
                        out.report.merge(g_difference_bound_check(f, x, d.W, r, norms, 20, {10}));
        }
    }
    return out;
}

json report_items(const CheckReport& rep) {
    json items = json::array();
    for (const auto& it : rep.items)
        items.push_back({{"name", it.name}, {"lhs", it.lhs}, {"rhs", it.rhs}, {"asserted", it.asserted},
                         {"pass", it.pass}, {"detail", it.detail}});
    return items;
}

}  // namespace

double ExperimentConfig::tolerance(const std::string& name, double fallback) const {
    const auto it = tolerances.find(name);
    return it == tolerances.end() ? fallback : it->second;
}

ExperimentConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    reject_unknown(j,
                   {"schema_version", "experiment", "observables", "weights", "base_points", "T_grid", "t_grid",
                    "S_grid", "seed", "sample_count", "tolerances", "output_dir", "dump_samples"},
                   "config");
    if (!j.contains("schema_version")) throw ConfigError("missing schema_version");
    if (!j["schema_version"].is_number_integer() || j["schema_version"].get<int>() != ExperimentConfig::kSchemaVersion)
        throw ConfigError("unsupported schema_version (expected " + std::to_string(ExperimentConfig::kSchemaVersion) + ")");
    if (!j.contains("experiment") || !j["experiment"].is_string()) throw ConfigError("missing experiment id");

    ExperimentConfig cfg;
    cfg.experiment = j["experiment"].get<std::string>();
    const auto& cat = experiment_catalog();
    if (std::none_of(cat.begin(), cat.end(), [&](const CatalogEntry& e) { return e.id == cfg.experiment; }))
        throw ConfigError("unknown experiment '" + cfg.experiment + "'");

    if (j.contains("observables")) {
        if (!j["observables"].is_array()) throw ConfigError("observables must be an array of keys");
        for (const auto& o : j["observables"]) {
            if (!o.is_string()) throw ConfigError("observables must be an array of keys");
            const auto key = o.get<std::string>();
            try {
                (void)observable_from_key(key);
            } catch (const std::exception& e) {
                throw ConfigError("observable '" + key + "': " + e.what());
            }
            cfg.observables.push_back(key);
        }
    }
    if (!kNoObservables.count(cfg.experiment) && cfg.observables.empty()) throw ConfigError("no observables selected");
    if (j.contains("weights")) {
        cfg.weights = read_grid(j["weights"], "weights", -1e300);
        if (cfg.weights.size() != cfg.observables.size())
            throw ConfigError("weights must have one entry per observable");
    }

    if (j.contains("base_points")) {
        const auto& b = j["base_points"];
        if (!b.is_object()) throw ConfigError("base_points must be an object");
        reject_unknown(b, {"source", "count", "seed", "matrices"}, "base_points");
        if (!b.contains("source") || !b["source"].is_string()) throw ConfigError("base_points.source missing");
        const auto src = b["source"].get<std::string>();
        auto& bp = cfg.base_points;
        if (src == "explicit") {
            bp.kind = BasePointSource::Kind::Explicit;
            if (!b.contains("matrices") || !b["matrices"].is_array() || b["matrices"].empty())
                throw ConfigError("explicit base points need a non-empty matrices array");
            for (const auto& m : b["matrices"]) {
                const auto v = read_grid(m, "base_points.matrices entry", -1e300);
                if (v.size() != 4) throw ConfigError("each matrix is [a, b, c, d]");
                GroupElement g{v[0], v[1], v[2], v[3]};
                if (std::abs(g.det() - 1) > 1e-9) throw ConfigError("base point matrix must have determinant 1");
                bp.matrices.push_back(g);
            }
            bp.count = bp.matrices.size();
        } else if (src == "haar" || src == "window") {
            bp.kind = src == "haar" ? BasePointSource::Kind::Haar : BasePointSource::Kind::Window;
            if (!b.contains("seed")) throw ConfigError("base_points.seed is required for sampled sources");
            bp.seed = read_u64(b["seed"], "base_points.seed");
            if (!b.contains("count")) throw ConfigError("base_points.count is required for sampled sources");
            bp.count = read_u64(b["count"], "base_points.count");
            if (bp.count == 0) throw ConfigError("base_points.count must be positive");
        } else {
            throw ConfigError("base_points.source must be explicit, haar or window");
        }
    } else if (!kNoObservables.count(cfg.experiment)) {
        throw ConfigError("missing base_points");
    }

    if (j.contains("T_grid")) cfg.T_grid = read_grid(j["T_grid"], "T_grid", 1);
    if (j.contains("t_grid")) cfg.t_grid = read_grid(j["t_grid"], "t_grid", 0);
    if (j.contains("S_grid")) cfg.S_grid = read_grid(j["S_grid"], "S_grid", 1e-300);
    if (j.contains("seed")) cfg.seed = read_u64(j["seed"], "seed");
    if ((cfg.experiment == "temporal-clt" || cfg.experiment == "lattice-sanity" || cfg.experiment == "tail-lemmas") &&
        !cfg.seed)
        throw ConfigError("experiment '" + cfg.experiment + "' needs an explicit seed");
    if (j.contains("sample_count")) {
        cfg.sample_count = read_u64(j["sample_count"], "sample_count");
        if (cfg.sample_count < 2) throw ConfigError("sample_count must be at least 2");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        if (!t.is_object()) throw ConfigError("tolerances must be an object");
        for (auto it = t.begin(); it != t.end(); ++it) {
            if (std::find(kTolerances.begin(), kTolerances.end(), it.key()) == kTolerances.end())
                throw ConfigError("unknown key '" + it.key() + "' in tolerances");
            if (!it->is_number() || !(it->get<double>() > 0)) throw ConfigError("tolerance " + it.key() + " must be positive");
            cfg.tolerances[it.key()] = it->get<double>();
        }
    }
    if (j.contains("output_dir")) {
        if (!j["output_dir"].is_string()) throw ConfigError("output_dir must be a string");
        cfg.output_dir = j["output_dir"].get<std::string>();
    }
    if (j.contains("dump_samples")) {
        if (!j["dump_samples"].is_boolean()) throw ConfigError("dump_samples must be a boolean");
        cfg.dump_samples = j["dump_samples"].get<bool>();
    }
    return cfg;
}

const std::vector<CatalogEntry>& experiment_catalog() {
    static const std::vector<CatalogEntry> cat = {
        {"ode-residual", "second-order ODE satisfied by the sliced horocycle integral J(x,t)",
         "residual of J'' + J' + mu J = e^{-t} G per spectral case", {"observables", "base_points"}},
        {"expansion", "asymptotic expansion of horocycle averages in every spectral case",
         "direct averages against main terms within the remainder bounds", {"observables", "base_points"}},
        {"bounds", "sup-norm bounds on the functionals, coarse decay bounds, discrete and mu = 0 bounds",
         "functional norm bounds, logarithmic coarse bounds, uniform boundedness, mu = 0 formula",
         {"observables", "base_points"}},
        {"geodesic-action", "action of the geodesic generator on the functionals",
         "D(Xf) against the case matrix, integration-by-parts identity for G", {"observables", "base_points"}},
        {"holder", "regularity of the functionals along transverse displacements",
         "log-log slopes against the predicted Hölder exponents", {"observables", "base_points"}},
        {"spatial-lt", "distributional limit of normalized ergodic integrals over an ensemble",
         "per-point inequality chains, Levy and KS distances per T", {"observables", "base_points"}},
        {"temporal-clt", "temporal fluctuations along one horocycle orbit for a mu = 0 observable",
         "variance growth against log T, reduction inequality, geodesic baseline",
         {"observables", "base_points", "seed"}},
        {"lattice-sanity", "regular-octagon surface group: reduction, Haar sampling, recurrence",
         "reduction against a word-ball oracle, chi-square test of the sampler", {"seed"}},
        {"tail-lemmas", "elementary integral bounds and the G-difference bound",
         "both tail estimates on extremal and random inputs, |G(y) - G(x)| bound", {"seed"}},
    };
    return cat;
}

std::string catalog_text() {
    std::ostringstream os;
    for (const auto& e : experiment_catalog()) {
        os << e.id << "\n  " << e.summary << "\n  checks: " << e.checks << "\n  required keys: schema_version, experiment";
        for (const auto& k : e.required_keys) os << ", " << k;
        os << "\n";
    }
    return os.str();
}

std::string catalog_json() {
    json arr = json::array();
    for (const auto& e : experiment_catalog())
        arr.push_back({{"id", e.id}, {"summary", e.summary}, {"checks", e.checks}, {"required_keys", e.required_keys}});
    return arr.dump(2);
}

std::string csv_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::render() const {
    std::ostringstream os;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            const auto& c = cells[i];
            os << (i ? "," : "");
            if (c.find_first_of(",\"\n") == std::string::npos) {
                os << c;
                continue;
            }
            os << '"';
            for (char ch : c) os << (ch == '"' ? "\"\"" : std::string(1, ch));
            os << '"';
        }
        os << "\n";
    };
    line(header);
    for (const auto& r : rows) line(r);
    return os.str();
}

std::string ExperimentOutcome::report_json() const {
    json j;
    j["experiment"] = experiment;
    j["parameters"] = parameters_json.empty() ? json::object() : json::parse(parameters_json);
    j["pass"] = report.pass;
    if (const auto* f = report.first_failure())
        j["first_failure"] = {{"name", f->name}, {"lhs", f->lhs}, {"rhs", f->rhs}, {"detail", f->detail}};
    j["checks"] = report_items(report);
    json tabs = json::array();
    for (const auto& t : tables) tabs.push_back(t.name + ".csv");
    j["tables"] = tabs;
    j["metric_note"] = "Levy distance is the certified one-dimensional lower bound; KS is the upper-bound companion";
    return j.dump(2);
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, const RunOptions& opt) {
    Context c{cfg, opt, {}, {}, 0};
    for (const auto& k : cfg.observables) c.obs.push_back(observable_from_key(k));
    c.seed = opt.seed_override ? *opt.seed_override : cfg.seed.value_or(0);
    const auto& bp = cfg.base_points;
    const std::uint64_t bseed = opt.seed_override ? *opt.seed_override : bp.seed.value_or(0);
    switch (bp.kind) {
        case BasePointSource::Kind::Explicit: c.xs = bp.matrices; break;
        case BasePointSource::Kind::Haar:
            for (const auto& r : sample_haar(FuchsianGroup::regular_octagon(), bp.count, bseed))
                c.xs.push_back(r.representative);
            break;
        case BasePointSource::Kind::Window: c.xs = reference_points(bp.count, bseed); break;
    }
    if (c.xs.empty() && !kNoObservables.count(cfg.experiment)) throw ConfigError("no base points");

    static const std::map<std::string, std::function<ExperimentOutcome(const Context&)>> runners = {
        {"ode-residual", run_ode_residual}, {"expansion", run_expansion},
        {"bounds", run_bounds},             {"geodesic-action", run_geodesic_action},
        {"holder", run_holder},             {"spatial-lt", run_spatial},
        {"temporal-clt", run_temporal},     {"lattice-sanity", run_lattice},
        {"tail-lemmas", run_tail_lemmas}};
    const auto it = runners.find(cfg.experiment);
    if (it == runners.end()) throw ConfigError("unknown experiment '" + cfg.experiment + "'");
    ExperimentOutcome out = it->second(c);
    out.experiment = cfg.experiment;
    out.report.name = cfg.experiment;

    json params;
    params["observables"] = cfg.observables;
    params["weights"] = cfg.weights;
    params["base_point_count"] = c.xs.size();
    params["T_grid"] = cfg.T_grid;
    params["seed"] = c.seed;
    params["sample_count"] = cfg.sample_count;
    params["tolerances"] = cfg.tolerances;
    out.parameters_json = params.dump();
    return out;
}

void write_outcome(const ExperimentOutcome& out, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write = [&](const std::string& name, const std::string& body) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        f << body;
    };
    write(out.experiment + ".json", out.report_json());
    for (const auto& t : out.tables) write(t.name + ".csv", t.render());
}

}  // namespace horolab
