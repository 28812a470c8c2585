#include "horolab/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <regex>
#include <stdexcept>

namespace horolab {

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::Principal: return "principal";
        case CaseTag::QuarterPoint: return "quarter";
        case CaseTag::Complementary: return "complementary";
        case CaseTag::ZeroMu: return "zero";
        case CaseTag::DiscreteSeries: return "discrete";
    }
    return "?";
}

std::string to_string(Part p) {
    switch (p) {
        case Part::Real: return "real";
        case Part::Imag: return "imag";
        case Part::Complex: return "complex";
    }
    return "?";
}

std::string to_string(Deriv d) {
    static const char* names[] = {"f", "Uf", "Xf", "Vf", "UUf", "UXf", "UVf",
                                  "XUf", "XXf", "XVf", "VUf", "VXf", "VVf"};
    return names[static_cast<int>(d)];
}

SpectralParameter classify_mu(double mu) {
    if (!std::isfinite(mu)) throw std::invalid_argument("non-finite Casimir eigenvalue");
    SpectralParameter p;
    p.mu = mu;
    if (std::abs(mu - 0.25) <= 1e-14) {
        p.mu = 0.25;
        p.nu = {0, 0};
        p.tag = CaseTag::QuarterPoint;
    } else if (mu > 0.25) {
        p.nu = {0, std::sqrt(4 * mu - 1)};
        p.tag = CaseTag::Principal;
    } else if (std::abs(mu) <= 1e-14) {
        p.mu = 0;
        p.nu = {1, 0};
        p.tag = CaseTag::ZeroMu;
    } else if (mu > 0) {
        p.nu = {std::sqrt(1 - 4 * mu), 0};
        p.tag = CaseTag::Complementary;
    } else {
        const double n = 1 + std::sqrt(1 - 4 * mu);
        const double r = std::round(n);
        if (std::abs(n - r) > 1e-9 || r < 3)
            throw std::invalid_argument("negative Casimir eigenvalue is not of the form n(2-n)/4 with n >= 3");
        const int k = static_cast<int>(r);
        p.mu = k * (2.0 - k) / 4.0;
        p.nu = {k - 1.0, 0};
        p.tag = CaseTag::DiscreteSeries;
    }
    return p;
}

// ---------------------------------------------------------------- LaurentField

LaurentField::LaurentField(cplx a0, cplx b0, int jmin, std::vector<cplx> coef)
    : a0_(a0), b0_(b0), jmin_(jmin), coef_(std::move(coef)) {
    trim();
}

cplx& LaurentField::at(int j) {
    if (coef_.empty()) {
        jmin_ = j;
        coef_.assign(1, 0);
    }
    if (j < jmin_) {
        coef_.insert(coef_.begin(), static_cast<std::size_t>(jmin_ - j), cplx(0, 0));
        jmin_ = j;
    }
    const auto idx = static_cast<std::size_t>(j - jmin_);
    if (idx >= coef_.size()) coef_.resize(idx + 1, cplx(0, 0));
    return coef_[idx];
}

void LaurentField::trim() {
    while (!coef_.empty() && coef_.back() == cplx(0, 0)) coef_.pop_back();
    std::size_t lead = 0;
    while (lead < coef_.size() && coef_[lead] == cplx(0, 0)) ++lead;
    if (lead > 0) {
        coef_.erase(coef_.begin(), coef_.begin() + static_cast<std::ptrdiff_t>(lead));
        jmin_ += static_cast<int>(lead);
    }
}

bool LaurentField::is_zero() const { return coef_.empty(); }

// Exact actions on T_j = w^A wbar^B, A = a0 + j, B = b0 - j:
//   X T_j = -(A/2) T_{j-1} - (B/2) T_{j+1}
//   U T_j = (A/2i)(T_j - T_{j-1}) + (B/2i)(T_{j+1} - T_j)
//   V T_j = (iA/2)(T_j + T_{j-1}) - (iB/2)(T_{j+1} + T_j)
LaurentField LaurentField::apply_X() const {
    LaurentField r(a0_, b0_, 0, {});
    for (std::size_t k = 0; k < coef_.size(); ++k) {
        const int j = jmin_ + static_cast<int>(k);
        const cplx A = a0_ + double(j), B = b0_ - double(j), q = coef_[k];
        r.at(j - 1) += -0.5 * A * q;
        r.at(j + 1) += -0.5 * B * q;
    }
    r.trim();
    return r;
}

LaurentField LaurentField::apply_U() const {
    const cplx inv2i(0, -0.5);
    LaurentField r(a0_, b0_, 0, {});
    for (std::size_t k = 0; k < coef_.size(); ++k) {
        const int j = jmin_ + static_cast<int>(k);
        const cplx A = a0_ + double(j), B = b0_ - double(j), q = coef_[k];
        r.at(j) += inv2i * (A - B) * q;
        r.at(j - 1) += -inv2i * A * q;
        r.at(j + 1) += inv2i * B * q;
    }
    r.trim();
    return r;
}

LaurentField LaurentField::apply_V() const {
    const cplx half_i(0, 0.5);
    LaurentField r(a0_, b0_, 0, {});
    for (std::size_t k = 0; k < coef_.size(); ++k) {
        const int j = jmin_ + static_cast<int>(k);
        const cplx A = a0_ + double(j), B = b0_ - double(j), q = coef_[k];
        r.at(j) += half_i * (A - B) * q;
        r.at(j - 1) += half_i * A * q;
        r.at(j + 1) += -half_i * B * q;
    }
    r.trim();
    return r;
}

LaurentField LaurentField::apply(Deriv d) const {
    switch (d) {
        case Deriv::F: return *this;
        case Deriv::U: return apply_U();
        case Deriv::X: return apply_X();
        case Deriv::V: return apply_V();
        case Deriv::UU: return apply_U().apply_U();
        case Deriv::UX: return apply_X().apply_U();
        case Deriv::UV: return apply_V().apply_U();
        case Deriv::XU: return apply_U().apply_X();
        case Deriv::XX: return apply_X().apply_X();
        case Deriv::XV: return apply_V().apply_X();
        case Deriv::VU: return apply_U().apply_V();
        case Deriv::VX: return apply_X().apply_V();
        case Deriv::VV: return apply_V().apply_V();
    }
    return *this;
}

cplx LaurentField::evaluate(const cplx& L, const cplx& phase) const {
    if (coef_.empty()) return {0, 0};
    const cplx base = std::exp(a0_ * L + b0_ * std::conj(L));
    cplx p = std::exp(double(jmin_) * (L - std::conj(L)));
    cplx acc(0, 0);
    for (const cplx& q : coef_) {
        acc += q * p;
        p *= phase;
    }
    return base * acc;
}

namespace {

struct BottomRow {
    cplx L;
    cplx phase;
};

BottomRow bottom_row(double c, double d) {
    const cplx w(d, c);
    const double r2 = std::norm(w);
    if (!(r2 > 0) || !std::isfinite(r2)) throw NumericalError("observable evaluated at a degenerate bottom row");
    return {std::log(w), w * w / r2};
}

double take_part(const cplx& v, Part p) { return p == Part::Imag ? v.imag() : v.real(); }

}  // namespace

cplx LaurentField::operator()(double c, double d) const {
    const auto br = bottom_row(c, d);
    return evaluate(br.L, br.phase);
}

// ---------------------------------------------------------------- Observable

Observable Observable::zero(const SpectralParameter& sp) {
    Observable o;
    o.zero_spectral_ = sp;
    o.key_ = "zero";
    return o;
}

Observable Observable::from_field(const LaurentField& base, Part part, const SpectralParameter& sp,
                                  std::string key) {
    Component c;
    c.part = part;
    c.spectral = sp;
    c.key = key;
    for (std::size_t i = 0; i < kDerivCount; ++i) c.fields[i] = base.apply(kAllDerivs[i]);
    Observable o;
    o.components_.push_back(std::move(c));
    o.key_ = std::move(key);
    return o;
}

void Observable::eval_some(const GroupElement& g, const Deriv* which, std::size_t count, double* out) const {
    std::fill(out, out + count, 0.0);
    for (const auto& comp : components_) {
        const GroupElement h = comp.shifted ? compose(comp.shift, g) : g;
        const auto br = bottom_row(h.c, h.d);
        for (std::size_t k = 0; k < count; ++k) {
            const auto& fld = comp.fields[static_cast<std::size_t>(which[k])];
            out[k] += comp.coefficient * take_part(fld.evaluate(br.L, br.phase), comp.part);
        }
    }
}

double Observable::eval(Deriv which, const GroupElement& g) const {
    double v;
    eval_some(g, &which, 1, &v);
    return v;
}

std::array<double, kDerivCount> Observable::eval_all(const GroupElement& g) const {
    std::array<double, kDerivCount> out{};
    eval_some(g, kAllDerivs.data(), kDerivCount, out.data());
    return out;
}

ScalarField Observable::field(Deriv which) const {
    return [self = *this, which](const GroupElement& g) { return self.eval(which, g); };
}

std::optional<SpectralParameter> Observable::spectral() const {
    if (components_.empty()) return zero_spectral_;
    const SpectralParameter& first = components_.front().spectral;
    for (const auto& c : components_)
        if (std::abs(c.spectral.mu - first.mu) > 1e-12) return std::nullopt;
    return first;
}

const SpectralParameter& Observable::spectral_or_throw() const {
    if (components_.empty()) {
        if (zero_spectral_) return *zero_spectral_;
        throw std::invalid_argument("zero observable carries no spectral parameter");
    }
    if (!spectral()) throw std::invalid_argument("observable mixes several Casimir eigenvalues");
    return components_.front().spectral;
}

Observable Observable::apply_X() const {
    Observable o = *this;
    for (auto& c : o.components_) {
        const LaurentField xf = c.fields[static_cast<std::size_t>(Deriv::X)];
        for (std::size_t i = 0; i < kDerivCount; ++i) c.fields[i] = xf.apply(kAllDerivs[i]);
        c.key = "X(" + c.key + ")";
    }
    o.key_ = "X(" + key_ + ")";
    return o;
}

Observable Observable::left_translate(const GroupElement& h) const {
    Observable o = *this;
    for (auto& c : o.components_) {
        c.shift = c.shifted ? compose(c.shift, h) : h;
        c.shifted = true;
    }
    o.key_ = "translate(" + key_ + ")";
    return o;
}

Observable Observable::restrict_to_mu(double mu, double tol) const {
    Observable o;
    for (const auto& c : components_)
        if (std::abs(c.spectral.mu - mu) <= tol) o.components_.push_back(c);
    if (o.components_.empty()) o.zero_spectral_ = classify_mu(mu);
    o.key_ = key_;
    return o;
}

std::vector<SpectralParameter> Observable::spectrum() const {
    std::vector<SpectralParameter> out;
    for (const auto& c : components_) {
        const bool seen = std::any_of(out.begin(), out.end(),
                                      [&](const SpectralParameter& p) { return std::abs(p.mu - c.spectral.mu) <= 1e-12; });
        if (!seen) out.push_back(c.spectral);
    }
    if (out.empty() && zero_spectral_) out.push_back(*zero_spectral_);
    std::sort(out.begin(), out.end(), [](const auto& p, const auto& q) { return p.mu > q.mu; });
    return out;
}

Observable zero_mean_combination(const std::vector<std::pair<double, Observable>>& terms) {
    if (terms.empty()) throw std::invalid_argument("zero_mean_combination: empty component list");
    Observable o;
    std::string key;
    for (const auto& [coef, obs] : terms) {
        for (auto c : obs.components_) {
            c.coefficient *= coef;
            o.components_.push_back(std::move(c));
        }
        char buf[64];
        std::snprintf(buf, sizeof buf, "%s%.17g*", key.empty() ? "" : " + ", coef);
        key += buf + obs.key();
    }
    if (o.components_.empty()) o.zero_spectral_ = terms.front().second.spectral();
    o.key_ = key;
    return o;
}

// ---------------------------------------------------------------- catalog

namespace {

std::string fmt_num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

SpectralParameter power_spectral(cplx s) {
    const cplx mu = s * (1.0 - s);
    if (std::abs(mu.imag()) > 1e-12)
        throw std::invalid_argument("power observable: s(1-s) is not real (need Im s = 0 or Re s = 1/2)");
    SpectralParameter p = classify_mu(mu.real());
    // the exponent fixes nu = 2s - 1 up to sign
    if (p.tag == CaseTag::Complementary || p.tag == CaseTag::ZeroMu || p.tag == CaseTag::DiscreteSeries) {
        p.nu = {std::abs(2 * s.real() - 1), 0};
        if (p.tag == CaseTag::DiscreteSeries) p.nu = {std::round(p.nu.real()), 0};
        p.mu = (1 - p.nu.real() * p.nu.real()) / 4;
    } else if (p.tag == CaseTag::Principal) {
        p.nu = {0, std::abs(2 * s.imag())};
        p.mu = (1 + p.nu.imag() * p.nu.imag()) / 4;
    }
    return p;
}

Part parse_part(const std::string& s) {
    if (s == "real") return Part::Real;
    if (s == "imag") return Part::Imag;
    if (s == "complex") return Part::Complex;
    throw std::invalid_argument("unknown part '" + s + "'");
}

}  // namespace

Observable make_power_observable(cplx s, Part part) {
    if (!(s.real() > 0)) throw std::invalid_argument("unbounded on forward region");
    if (part == Part::Complex && s.imag() != 0)
        throw std::invalid_argument("power observable: complex part requires a real-valued field (Im s = 0)");
    const SpectralParameter sp = power_spectral(s);
    const std::string key = "power:s=" + fmt_num(s.real()) + (s.imag() < 0 ? "" : "+") + fmt_num(s.imag()) +
                            "i:" + to_string(part);
    return Observable::from_field(LaurentField::monomial(-s, -s), part, sp, key);
}

Observable make_discrete_observable(int n, Part part) {
    if (n < 3) throw std::invalid_argument("discrete observable requires n >= 3");
    if (part == Part::Complex) throw std::invalid_argument("discrete observable: part must be real or imag");
    SpectralParameter sp;
    sp.mu = n * (2.0 - n) / 4.0;
    sp.nu = {n - 1.0, 0};
    sp.tag = CaseTag::DiscreteSeries;
    const std::string key = "discrete:n=" + std::to_string(n) + ":" + to_string(part);
    return Observable::from_field(LaurentField::monomial(cplx(-n, 0), cplx(0, 0)), part, sp, key);
}

Observable observable_from_key(const std::string& key) {
    static const std::regex power_re(
        R"(^power:s=([-+]?[0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)(?:([-+][0-9]*\.?[0-9]+(?:[eE][-+]?[0-9]+)?)i)?:(real|imag|complex)$)");
    static const std::regex discrete_re(R"(^discrete:n=([0-9]+):(real|imag|complex)$)");
    std::smatch m;
    if (std::regex_match(key, m, power_re)) {
        const double re = std::stod(m[1].str());
        const double im = m[2].matched ? std::stod(m[2].str()) : 0.0;
        return make_power_observable({re, im}, parse_part(m[3].str()));
    }
    if (std::regex_match(key, m, discrete_re)) {
        return make_discrete_observable(std::stoi(m[1].str()), parse_part(m[2].str()));
    }
    throw std::invalid_argument("unknown observable key '" + key + "'");
}

}  // namespace horolab
