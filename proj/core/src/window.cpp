#include "horolab/window.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace horolab {

void Window::add_orbit(const GroupElement& x, double T, double horizon) {
    const double lt = std::log(T);
    sheets.push_back({geodesic(x, lt), std::max(lt, horizon)});
}

double halton(std::uint64_t index, unsigned base) {
    double f = 1, r = 0;
    while (index > 0) {
        f /= base;
        r += f * static_cast<double>(index % base);
        index /= base;
    }
    return r;
}

namespace {

constexpr std::size_t kWords = kDerivCount + 1;  // the 13 words plus the height

struct Candidate {
    double value = -1;
    std::size_t sheet = 0;
    double s = 0, u = 0;
};

// u in [0,1] maps to tau = tau_max u^2, which puts more samples where fields are largest.
GroupElement point_at(const Sheet& sh, double s, double u) { return sheet_point(sh, s, sh.tau_max * u * u); }

std::array<double, kWords> sample(const Observable& f, const GroupElement& g) {
    std::array<double, kWords> out{};
    const auto v = f.eval_all(g);
    for (std::size_t k = 0; k < kDerivCount; ++k) out[k] = std::abs(v[k]);
    out[kDerivCount] = height(g);
    return out;
}

void offer(std::vector<Candidate>& top, const Candidate& c, std::size_t keep) {
    if (top.size() < keep) {
        top.push_back(c);
    } else {
        auto worst = std::min_element(top.begin(), top.end(),
                                      [](const Candidate& a, const Candidate& b) { return a.value < b.value; });
        if (c.value <= worst->value) return;
        *worst = c;
    }
}

}  // namespace

WindowNorms window_norms(const Observable& f, const Window& w, const WindowOptions& opt) {
    WindowNorms out;
    if (w.empty()) return out;
    const auto keep = static_cast<std::size_t>(std::max(1, opt.refine_candidates));
    std::array<std::vector<Candidate>, kWords> top;
    std::array<double, kWords> best{};
    std::size_t evals = 0;

    auto visit = [&](std::size_t si, double s, double u) {
        const auto v = sample(f, point_at(w.sheets[si], s, u));
        ++evals;
        for (std::size_t k = 0; k < kWords; ++k) {
            if (!std::isfinite(v[k])) throw NumericalError("observable not finite in window");
            best[k] = std::max(best[k], v[k]);
            offer(top[k], {v[k], si, s, u}, keep);
        }
        return v;
    };

    const std::size_t per_sheet = std::max<std::size_t>(16, opt.budget / w.sheets.size());
    const int n = std::max(2, opt.grid);
    std::uint64_t hidx = 1;
    for (std::size_t si = 0; si < w.sheets.size(); ++si) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) visit(si, double(i) / (n - 1), double(j) / (n - 1));
        for (std::size_t k = 0; k < per_sheet; ++k, ++hidx) visit(si, halton(hidx, 2), halton(hidx, 3));
    }

    // Pattern search from the best candidates of every word.
    for (std::size_t k = 0; k < kWords; ++k) {
        for (const Candidate& c0 : top[k]) {
            Candidate c = c0;
            double step = 1.0 / (n - 1);
            for (int level = 0; level < 12; ++level) {
                bool moved = true;
                while (moved) {
                    moved = false;
                    static constexpr int dirs[8][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1},
                                                       {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
                    for (const auto& d : dirs) {
                        const double s = std::clamp(c.s + step * d[0], 0.0, 1.0);
                        const double u = std::clamp(c.u + step * d[1], 0.0, 1.0);
                        const double v = visit(c.sheet, s, u)[k];
                        if (v > c.value * (1 + 1e-12)) {
                            c = {v, c.sheet, s, u};
                            moved = true;
                        }
                    }
                }
                step /= 2;
            }
        }
    }

    const double y_raw = best[kDerivCount];
    if (opt.check_singular) {
        const bool discrete = std::any_of(f.components().begin(), f.components().end(), [](const Component& c) {
            return c.spectral.tag == CaseTag::DiscreteSeries;
        });
        if (discrete && 1.0 / y_raw < 1e-6) throw std::invalid_argument("near-singular window");
    }
    double c2 = 0;
    for (std::size_t k = 0; k < kDerivCount; ++k) c2 = std::max(c2, best[k]);
    out.c2 = opt.safety * c2;
    out.sup_f = opt.safety * best[static_cast<std::size_t>(Deriv::F)];
    out.sup_V = opt.safety * best[static_cast<std::size_t>(Deriv::V)];
    out.y_max = opt.safety * y_raw;
    out.samples = evals;
    return out;
}

std::vector<GroupElement> reference_points(std::size_t count, std::uint64_t seed, const ReferenceBox& box) {
    std::mt19937_64 rng(seed);
    auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    std::vector<GroupElement> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        IwasawaCoords k;
        k.x = box.x_lo + (box.x_hi - box.x_lo) * unit();
        k.y = box.y_lo + (box.y_hi - box.y_lo) * unit();
        k.theta = box.th_lo + (box.th_hi - box.th_lo) * unit();
        out.push_back(from_iwasawa(k));
    }
    return out;
}

}  // namespace horolab
