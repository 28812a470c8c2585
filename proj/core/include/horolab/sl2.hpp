#pragma once

#include <array>
#include <functional>
#include <stdexcept>
#include <string>

namespace horolab {

class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Plain 2x2 real matrix, used for Lie algebra elements.
struct Mat2 {
    double a = 0, b = 0, c = 0, d = 0;

    Mat2 operator+(const Mat2& o) const { return {a + o.a, b + o.b, c + o.c, d + o.d}; }
    Mat2 operator-(const Mat2& o) const { return {a - o.a, b - o.b, c - o.c, d - o.d}; }
    Mat2 operator*(double s) const { return {a * s, b * s, c * s, d * s}; }
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    bool operator==(const Mat2&) const = default;
};

Mat2 commutator(const Mat2& p, const Mat2& q);

// Element of SL(2,R).
struct GroupElement {
    double a = 1, b = 0, c = 0, d = 1;

    static GroupElement identity() { return {}; }
    double det() const { return a * d - b * c; }
    double trace() const { return a + d; }
    Mat2 mat() const { return {a, b, c, d}; }
    std::array<double, 4> entries() const { return {a, b, c, d}; }
};

// Divides by sqrt(det) when |det - 1| exceeds 1e-13.
GroupElement renormalize(const GroupElement& g);
GroupElement compose(const GroupElement& g, const GroupElement& h);
GroupElement inverse(const GroupElement& g);
double max_entry_diff(const GroupElement& g, const GroupElement& h);
// Entrywise distance allowing g ~ -g.
double projective_diff(const GroupElement& g, const GroupElement& h);

enum class Flow { Horocycle, Geodesic, Unstable };

GroupElement flow_matrix(Flow which, double t);
GroupElement flow(const GroupElement& g, Flow which, double t);

inline GroupElement horocycle(const GroupElement& g, double t) { return flow(g, Flow::Horocycle, t); }
inline GroupElement geodesic(const GroupElement& g, double t) { return flow(g, Flow::Geodesic, t); }

enum class LieTag { U, X, V, Y, Theta };

struct LieDirection {
    LieTag tag;
    Mat2 generator;
};

LieDirection lie_direction(LieTag tag);
std::string to_string(LieTag tag);

// Mixed direction aU*U + aX*X + aV*V.
Mat2 combine_generators(double aU, double aX, double aV);

// Exponential of a traceless matrix.
GroupElement exp_algebra(const Mat2& A);

struct IwasawaCoords {
    double x = 0;
    double y = 1;
    double theta = 0;
};

IwasawaCoords iwasawa(const GroupElement& g);
GroupElement from_iwasawa(const IwasawaCoords& k);
GroupElement n_matrix(double x);
GroupElement a_matrix(double y);
GroupElement k_matrix(double theta);

// Height of g.i in the upper half plane; depends only on the bottom row.
inline double height(const GroupElement& g) { return 1.0 / (g.c * g.c + g.d * g.d); }

// cosh of the hyperbolic distance between g.i and i.
double cosh_distance_to_i(const GroupElement& g);
double distance_to_i(const GroupElement& g);

using ScalarField = std::function<double(const GroupElement&)>;

struct DerivativeEstimate {
    double value = 0;
    double error = 0;
};

// Richardson-extrapolated central differences along t -> g exp(tW).
DerivativeEstimate lie_derivative(const ScalarField& f, const Mat2& W, const GroupElement& g, int order,
                                  double h0 = 1e-3);
DerivativeEstimate lie_derivative(const ScalarField& f, LieTag W, const GroupElement& g, int order,
                                  double h0 = 1e-3);
// W1 (W2 f) at g, i.e. d/ds d/dt f(g exp(s W1) exp(t W2)).
DerivativeEstimate lie_derivative_mixed(const ScalarField& f, const Mat2& W1, const Mat2& W2,
                                        const GroupElement& g, double h0 = 1e-3);

// (-X^2 + X - UV) f at g, by finite differences.
DerivativeEstimate casimir_apply(const ScalarField& f, const GroupElement& g);

}  // namespace horolab
