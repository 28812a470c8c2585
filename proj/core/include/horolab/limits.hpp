#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horolab/functionals.hpp"

namespace horolab {

class EmpiricalDistribution {
public:
    EmpiricalDistribution() = default;
    explicit EmpiricalDistribution(std::vector<double> sample);

    // Right-continuous step CDF: fraction of the sample <= x.
    double cdf(double x) const;
    std::size_t size() const { return sorted_.size(); }
    bool empty() const { return sorted_.empty(); }
    const std::vector<double>& values() const { return sorted_; }
    double mean() const;
    double variance() const;  // unbiased

private:
    std::vector<double> sorted_;
};

// One-dimensional Levy distance by bisection on eps with exact step-CDF feasibility checks.
double levy_distance(const EmpiricalDistribution& F, const EmpiricalDistribution& G, double precision = 1e-6);
double ks_distance(const EmpiricalDistribution& F, const EmpiricalDistribution& G);

// Given |X_i - Y_{perm[i]}| <= eps for all i, asserts levy(X, Y) <= eps + 1e-6.
CheckReport levy_lemma_check(const std::vector<double>& X, const std::vector<double>& Y,
                             const std::vector<std::size_t>& perm, double eps);

// KS distance between a sample and N(mean, sd^2).
double ks_to_normal(const EmpiricalDistribution& F, double mean, double sd);

struct SpatialRow {
    double T = 1;
    double levy_pushed = 0;    // Levy distance to the target evaluated at x_T
    double ks_pushed = 0;
    double levy_unpushed = 0;  // Levy distance to the target at x (reported only)
    double ks_unpushed = 0;
    double max_gap = 0;        // max over the ensemble of |A - target(x_T)|
    double middle = 0;         // the term-by-term right-hand side
    double final_bound = 0;
    bool pass = true;
};

struct SpatialLtResult {
    CaseTag case_tag = CaseTag::Complementary;  // case of mu_f
    double mu_f = 0;
    double nu_f = 0;
    double eta0 = 0;  // +inf when no component has mu > mu_f
    double eta = 0;
    double C = 0;
    std::vector<SpatialRow> rows;
    CheckReport report;
};

// Per-point inequality chains of the spatial limit theorem over an ensemble,
// with Levy and KS distances per T.
SpatialLtResult spatial_lt_experiment(const Observable& f, const std::vector<GroupElement>& ensemble,
                                      const std::vector<double>& T_grid, const Window& window);

struct TemporalRow {
    double T = 1;
    double log_T = 0;
    double variance_normalized = 0;
    double variance_unnormalized = 0;
    double mean_normalized = 0;
    double ks_normal = 0;
    double worst_reduction = 0;  // largest lhs of the reduction inequality
};

struct TemporalResult {
    std::vector<TemporalRow> rows;
    double slope = 0;      // unnormalized variance against log T
    double intercept = 0;
    double r2 = 0;
    double flat_slope = 0;  // normalized variance against log T
    bool degenerate = false;
    std::string message;
    CheckReport report;
};

// t ~ U[0, T] from a seeded 64-bit generator; value (I_f(x,t) + int_0^{log T} Vf0(x a_s) ds) / sqrt(log T).
TemporalResult temporal_clt_experiment(const Observable& f, const GroupElement& x, const std::vector<double>& T_grid,
                                       std::size_t sample_count, std::uint64_t seed, double r2_threshold = 0.9);

struct BaselineRow {
    double S = 0;
    double variance = 0;
    double mean = 0;
    double ks_normal = 0;
};

// S^{-1/2} int_{-S}^0 Vf0(y a_s) ds over the ensemble.
std::vector<BaselineRow> geodesic_clt_baseline(const Observable& f0, const std::vector<GroupElement>& ensemble,
                                               const std::vector<double>& S_grid);

struct LinearFit {
    double slope = 0, intercept = 0, r2 = 0;
};
LinearFit least_squares(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace horolab
