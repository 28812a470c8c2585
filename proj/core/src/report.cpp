#include "horolab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace horolab {

bool CheckReport::require(const std::string& what, double lhs, double rhs, const std::string& detail) {
    const bool ok = std::isfinite(lhs) && std::isfinite(rhs) && lhs <= rhs;
    items.push_back({what, lhs, rhs, true, ok, detail});
    pass = pass && ok;
    return ok;
}

bool CheckReport::require_true(const std::string& what, bool ok, const std::string& detail) {
    items.push_back({what, ok ? 0.0 : 1.0, 0.0, true, ok, detail});
    pass = pass && ok;
    return ok;
}

void CheckReport::note(const std::string& what, double value, const std::string& detail) {
    items.push_back({what, value, 0.0, false, true, detail});
}

void CheckReport::merge(const CheckReport& other) {
    items.insert(items.end(), other.items.begin(), other.items.end());
    pass = pass && other.pass;
}

const CheckItem* CheckReport::first_failure() const {
    for (const auto& it : items)
        if (it.asserted && !it.pass) return &it;
    return nullptr;
}

double CheckReport::worst_ratio() const {
    double w = 0;
    for (const auto& it : items) {
        if (!it.asserted) continue;
        if (!it.pass && !(it.rhs > 0)) return INFINITY;
        if (it.rhs > 0) w = std::max(w, it.lhs / it.rhs);
    }
    return w;
}

std::size_t CheckReport::asserted_count() const {
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(), [](const CheckItem& i) { return i.asserted; }));
}

std::string CheckReport::summary() const {
    char buf[256];
    if (const auto* f = first_failure()) {
        std::snprintf(buf, sizeof buf, "%s: FAIL at '%s' (%.6g > %.6g) %s", name.c_str(), f->name.c_str(), f->lhs,
                      f->rhs, f->detail.c_str());
    } else {
        std::snprintf(buf, sizeof buf, "%s: pass (%zu checks, worst ratio %.3g)", name.c_str(), asserted_count(),
                      worst_ratio());
    }
    return buf;
}

}  // namespace horolab
