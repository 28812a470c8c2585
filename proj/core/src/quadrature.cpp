#include "horolab/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>

namespace horolab {

const GaussLegendre16& gauss_legendre16() {
    static const GaussLegendre16 rule = [] {
        using G = boost::math::quadrature::gauss<double, 16>;
        const auto& x = G::abscissa();
        const auto& w = G::weights();
        GaussLegendre16 r{};
        for (std::size_t i = 0; i < 8; ++i) {
            r.nodes[7 - i] = -x[i];
            r.weights[7 - i] = w[i];
            r.nodes[8 + i] = x[i];
            r.weights[8 + i] = w[i];
        }
        return r;
    }();
    return rule;
}

}  // namespace horolab
