#include "bellcav/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace bellcav {

QuadratureResult integrate(const std::function<Complex(double)>& f, double a, double b,
                           const QuadratureOptions& opts)
{
    if (a == b)
        return {Complex(0.0, 0.0), 0.0};
    double err = 0.0;
    double l1 = 0.0;
    const Complex v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
        f, a, b, opts.max_depth, opts.rel_tol, &err, &l1);
    if (!is_finite(v))
        throw NumericalError("quadrature produced a non-finite value", err);
    const double target = std::max(opts.rel_tol * std::max(std::abs(v), l1), opts.abs_tol);
    if (err > target)
        throw NumericalError("quadrature did not reach its tolerance", err);
    if (opts.max_error)
        *opts.max_error = std::max(*opts.max_error, err);
    return {v, err};
}

std::vector<GaussNode> gauss_legendre_nodes(double a, double b)
{
    using rule = boost::math::quadrature::gauss<double, 30>;
    const auto& x = rule::abscissa();
    const auto& w = rule::weights();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    std::vector<GaussNode> nodes;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] == 0.0) {
            nodes.push_back({mid, half * w[i]});
        } else {
            nodes.push_back({mid - half * x[i], half * w[i]});
            nodes.push_back({mid + half * x[i], half * w[i]});
        }
    }
    return nodes;
}

}  // namespace bellcav
