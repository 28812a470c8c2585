#pragma once

#include <cstdint>
#include <vector>

#include "horolab/observables.hpp"
#include "horolab/sl2.hpp"

namespace horolab {

// Points base * u_s * a_{-tau} for s in [0, 1], tau in [0, tau_max].
// For base = x a_{log T}, the sheet covers the horocycle arc of length T
// through x and every point used to compute J, G and the functionals at x_T.
struct Sheet {
    GroupElement base;
    double tau_max = 0;
};

inline GroupElement sheet_point(const Sheet& sh, double s, double tau) {
    return geodesic(horocycle(sh.base, s), -tau);
}

struct Window {
    std::vector<Sheet> sheets;

    void add_orbit(const GroupElement& x, double T, double horizon);
    void add_sheet(const GroupElement& base, double tau_max) { sheets.push_back({base, tau_max}); }
    bool empty() const { return sheets.empty(); }
};

struct WindowNorms {
    double c2 = 0;    // max over the 13 derivative words of the sampled sup, times the safety factor
    double sup_f = 0;
    double sup_V = 0;
    double y_max = 0;  // largest height seen in the window, with margin
    std::size_t samples = 0;

    bool contains(const GroupElement& g) const { return height(g) <= y_max; }
};

struct WindowOptions {
    std::size_t budget = 10000;  // quasi-random points spread over the sheets
    int grid = 16;               // per-sheet grid resolution in each direction
    double safety = 1.1;
    int refine_candidates = 6;
    bool check_singular = true;  // discrete components require c^2 + d^2 >= 1e-6
};

// Sampled sup of |f| and all first and second derivative words over the window.
WindowNorms window_norms(const Observable& f, const Window& w, const WindowOptions& opt = {});

// Base-point reference measure with c, d > 0: n(x0) a(y0) k(theta),
// x0 in [-1, 1], y0 in [0.5, 2], theta in [pi/8, 3 pi/8].
struct ReferenceBox {
    double x_lo = -1, x_hi = 1;
    double y_lo = 0.5, y_hi = 2;
    double th_lo = 0.39269908169872414, th_hi = 1.1780972450961724;
};
std::vector<GroupElement> reference_points(std::size_t count, std::uint64_t seed, const ReferenceBox& box = {});

double halton(std::uint64_t index, unsigned base);

}  // namespace horolab
