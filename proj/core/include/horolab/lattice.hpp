#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "horolab/report.hpp"
#include "horolab/sl2.hpp"

namespace horolab {

// Cocompact Fuchsian group given by a symmetric generating set. The
// generators pair the sides of a Dirichlet domain centred at i, and
// generators[inverse_index[k]] is the inverse of generators[k].
struct FuchsianGroup {
    std::vector<GroupElement> generators;
    std::vector<int> inverse_index;
    std::vector<int> relator;
    double domain_radius = 0;  // circumradius of the Dirichlet domain about i

    // Genus-2 surface group of the regular octagon with angles pi/4.
    static FuchsianGroup regular_octagon();

    GroupElement word_product(const std::vector<int>& word) const;
    // Whether z = x + i y satisfies d(z, i) <= d(z, g_k^{-1} i) + tol for all k.
    bool in_domain(double x, double y, double tol = 1e-12) const;
    double y_min() const;
    double y_max() const;

    std::string to_json() const;
    static FuchsianGroup from_json(const std::string& text);
};

struct ReducedPoint {
    GroupElement representative;
    std::vector<int> word;  // generator indices, applied by left multiplication in order
};

ReducedPoint reduce(const FuchsianGroup& grp, const GroupElement& g);

// min over words of length <= max_len of d(w g i, i), by enumeration.
double brute_force_min_distance(const FuchsianGroup& grp, const GroupElement& g, int max_len);

std::vector<ReducedPoint> sample_haar(const FuchsianGroup& grp, std::size_t count, std::uint64_t seed);

struct ChiSquareResult {
    double statistic = 0;
    int dof = 0;
    double p_value = 0;
    int cells = 0;  // after pooling cells with expected count < 5
    double total_mass = 0;  // hyperbolic area of the domain from the cell masses
};

// Mass of the domain inside the box [x0,x1] x [y0,y1] for dx dy / y^2.
double domain_cell_area(const FuchsianGroup& grp, double x0, double x1, double y0, double y1);

// Partition: uniform in x over [-sinh R, sinh R], uniform in log y over [-R, R], uniform in theta.
ChiSquareResult haar_chi_square(const FuchsianGroup& grp, const std::vector<ReducedPoint>& sample, int bins = 4);

// Flows x along the horocycle, reducing every 0.5 time units, and checks that
// every checkpoint lies in the domain's height range.
CheckReport recurrent_orbit_check(const FuchsianGroup& grp, const GroupElement& x, double T);

}  // namespace horolab
