#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "horolab/sl2.hpp"

namespace horolab {

using cplx = std::complex<double>;

enum class CaseTag { Principal, QuarterPoint, Complementary, ZeroMu, DiscreteSeries };
std::string to_string(CaseTag tag);

struct SpectralParameter {
    double mu = 0;
    cplx nu{1, 0};
    CaseTag tag = CaseTag::ZeroMu;

    double kappa() const { return nu.imag(); }  // Im nu, principal series
    double nu_real() const { return nu.real(); }
};

// Classifies mu; negative mu must equal n(2-n)/4 for an integer n >= 3.
SpectralParameter classify_mu(double mu);

// Derivative words. UV means U applied to (V f).
enum class Deriv { F, U, X, V, UU, UX, UV, XU, XX, XV, VU, VX, VV };
inline constexpr std::size_t kDerivCount = 13;
inline constexpr std::array<Deriv, kDerivCount> kAllDerivs = {
    Deriv::F, Deriv::U, Deriv::X, Deriv::V, Deriv::UU, Deriv::UX, Deriv::UV,
    Deriv::XU, Deriv::XX, Deriv::XV, Deriv::VU, Deriv::VX, Deriv::VV};
std::string to_string(Deriv d);

// Sum_j coef_j w^(a0+j) wbar^(b0-j) with w = d + i c built from the bottom
// row of the group element. Powers use log w and its conjugate.
class LaurentField {
public:
    LaurentField() = default;
    LaurentField(cplx a0, cplx b0, int jmin, std::vector<cplx> coef);
    static LaurentField monomial(cplx a0, cplx b0) { return {a0, b0, 0, {cplx(1, 0)}}; }

    LaurentField apply_U() const;
    LaurentField apply_X() const;
    LaurentField apply_V() const;
    LaurentField apply(Deriv d) const;

    cplx operator()(double c, double d) const;
    cplx evaluate(const cplx& L, const cplx& phase) const;  // L = log w, phase = w / wbar

    bool is_zero() const;
    cplx a0() const { return a0_; }
    cplx b0() const { return b0_; }
    int jmin() const { return jmin_; }
    const std::vector<cplx>& coefficients() const { return coef_; }

private:
    cplx a0_{0, 0}, b0_{0, 0};
    int jmin_ = 0;
    std::vector<cplx> coef_;

    cplx& at(int j);
    void trim();
};

enum class Part { Real, Imag, Complex };
std::string to_string(Part p);

// coefficient * part(F(bottom row of shift * g)), with all 13 derivative fields precomputed.
struct Component {
    double coefficient = 1;
    Part part = Part::Real;
    GroupElement shift = GroupElement::identity();
    bool shifted = false;
    SpectralParameter spectral;
    std::string key;
    std::array<LaurentField, kDerivCount> fields;
};

class Observable {
public:
    Observable() = default;

    static Observable zero(const SpectralParameter& sp);
    static Observable from_field(const LaurentField& base, Part part, const SpectralParameter& sp,
                                 std::string key);

    double eval(Deriv which, const GroupElement& g) const;
    double f(const GroupElement& g) const { return eval(Deriv::F, g); }
    double Uf(const GroupElement& g) const { return eval(Deriv::U, g); }
    double Xf(const GroupElement& g) const { return eval(Deriv::X, g); }
    double Vf(const GroupElement& g) const { return eval(Deriv::V, g); }
    double XXf(const GroupElement& g) const { return eval(Deriv::XX, g); }
    double UVf(const GroupElement& g) const { return eval(Deriv::UV, g); }
    std::array<double, kDerivCount> eval_all(const GroupElement& g) const;
    // Evaluates only the requested words into out.
    void eval_some(const GroupElement& g, const Deriv* which, std::size_t count, double* out) const;

    ScalarField field(Deriv which = Deriv::F) const;

    const std::vector<Component>& components() const { return components_; }
    bool is_zero() const { return components_.empty(); }
    // Common spectral parameter, if all components share one.
    std::optional<SpectralParameter> spectral() const;
    const SpectralParameter& spectral_or_throw() const;
    const std::string& key() const { return key_; }

    // The observable Xf, with exact derivatives.
    Observable apply_X() const;
    // g -> f(h g); still a Casimir eigenfunction with the same mu.
    Observable left_translate(const GroupElement& h) const;
    // The sub-observable of components with the given mu.
    Observable restrict_to_mu(double mu, double tol = 1e-12) const;
    // Distinct mu values of the components, in descending order.
    std::vector<SpectralParameter> spectrum() const;

    friend Observable zero_mean_combination(const std::vector<std::pair<double, Observable>>& terms);

private:
    std::vector<Component> components_;
    std::optional<SpectralParameter> zero_spectral_;
    std::string key_;
};

// part(y^s), with y the Iwasawa height; mu = s(1-s).
Observable make_power_observable(cplx s, Part part = Part::Real);
// part((c i + d)^(-n)) on the bottom row; mu = n(2-n)/4.
Observable make_discrete_observable(int n, Part part = Part::Real);
Observable zero_mean_combination(const std::vector<std::pair<double, Observable>>& terms);

// "power:s=<re>+<im>i:part" or "discrete:n=<n>:part".
Observable observable_from_key(const std::string& key);

}  // namespace horolab
