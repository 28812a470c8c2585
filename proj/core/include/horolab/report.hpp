#pragma once

#include <string>
#include <vector>

namespace horolab {

// One asserted inequality lhs <= rhs, or a reported value when asserted is false.
struct CheckItem {
    std::string name;
    double lhs = 0;
    double rhs = 0;
    bool asserted = true;
    bool pass = true;
    std::string detail;
};

struct CheckReport {
    std::string name;
    bool pass = true;
    std::vector<CheckItem> items;

    // Records lhs <= rhs.
    bool require(const std::string& what, double lhs, double rhs, const std::string& detail = {});
    bool require_true(const std::string& what, bool ok, const std::string& detail = {});
    void note(const std::string& what, double value, const std::string& detail = {});
    void merge(const CheckReport& other);

    const CheckItem* first_failure() const;
    // Largest lhs/rhs over asserted items; <= 1 means every bound holds.
    double worst_ratio() const;
    std::size_t asserted_count() const;
    std::string summary() const;
};

}  // namespace horolab
