#include "bellcav/roots.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "bellcav/types.hpp"

namespace bellcav {

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double x_tol)
{
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if ((flo > 0.0) == (fhi > 0.0))
        throw NumericalError("bisect_root: bracket has no sign change");
    auto tol = [x_tol](double a, double b) {
        return std::abs(b - a) <= std::max(x_tol, 4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(a)));
    };
    const auto r = boost::math::tools::bisect(f, lo, hi, tol);
    return 0.5 * (r.first + r.second);
}

double first_root_from_zero(const std::function<double(double)>& f, double step, double upper)
{
    if (!(step > 0.0))
        throw ValidationError("scan step must be > 0");
    double prev_x = step;
    double prev = f(prev_x);
    if (prev == 0.0)
        return prev_x;
    for (double x = 2.0 * step; x <= upper + 0.5 * step; x += step) {
        const double v = f(x);
        if (v == 0.0)
            return x;
        if ((v > 0.0) != (prev > 0.0))
            return bisect_root(f, prev_x, x);
        prev_x = x;
        prev = v;
    }
    std::ostringstream os;
    os << "no sign change found in (0, " << upper << "]; f(" << step << ") = " << f(step)
       << ", f(" << upper << ") = " << f(upper);
    throw NumericalError(os.str());
}

double parity_optimal_beta(double alpha_mag)
{
    if (alpha_mag < 0.0 || !std::isfinite(alpha_mag))
        throw ValidationError("alpha magnitude must be finite and >= 0");
    if (alpha_mag == 0.0)
        return 0.0;
    const double a = alpha_mag;
    auto f = [a](double b) { return (a - b) / (a + b) - std::tan(4.0 * a * b); };
    const double step = std::min(1e-3, kPi / (40.0 * a));
    // the first root lies below the tan pole at pi/(8a)
    return first_root_from_zero(f, step, kPi / (8.0 * a));
}

}  // namespace bellcav
