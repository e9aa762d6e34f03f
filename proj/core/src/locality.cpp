#include "bellcav/locality.hpp"

#include <cmath>

#include "bellcav/roots.hpp"

namespace bellcav {

void LocalityInputs::validate() const
{
    tl.validate();
    if (!(c > 0.0) || !std::isfinite(c))
        throw ValidationError("c must be > 0");
    if (!(tl.v > 0.0))
        throw ValidationError("v must be > 0");
    if (!(tl.v < c))
        throw ValidationError("v must be smaller than c");
}

bool check_locality_simple(double d, double T, double tA, double tC, double c)
{
    if (d < 0.0 || T < 0.0 || tA < 0.0 || tC < 0.0 || !(c > 0.0))
        throw ValidationError("locality inputs must be non-negative");
    return d >= c * (T + tA) && d >= c * (tC - T);
}

std::array<double, 2> locality_slack(const LocalityInputs& in, double t4, double t5, bool include_t6)
{
    const Timeline& tl = in.tl;
    const double t6 = include_t6 ? tl.t6 : 0.0;
    const double v = tl.v, c = in.c;
    const double a = tl.t3 / 2.0 + tl.t2 + tl.t1 + t6;
    const double b = tl.t3 / 2.0 + t4 + t5;
    const double f1 = v * (tl.t3 / 2.0 + t4 + t5 + tl.t1 + t6) - c * (t5 + tl.t1 + t6);
    const double f2 = v * std::hypot(a, b) - c * (tl.t3 + tl.t2 + tl.t1 + t6 - t5);
    return {f1, f2};
}

LocalitySolution min_travel_times(const LocalityInputs& in, bool include_t6)
{
    in.validate();
    const Timeline& tl = in.tl;
    const double t6 = include_t6 ? tl.t6 : 0.0;
    const double v = tl.v, c = in.c;
    const double k = tl.t3 + tl.t2 + tl.t1 + t6;

    auto slack = [&](double t4, double t5) { return locality_slack(in, t4, t5, include_t6); };
    auto norm = [](const std::array<double, 2>& f) { return std::hypot(f[0], f[1]); };

    // summing both equalities with the hypotenuse replaced by its long leg
    double s = c * (k + tl.t1 + t6) / (2.0 * v);
    double t5 = (v * (tl.t3 / 2.0 + s + tl.t1 + t6) - c * (tl.t1 + t6)) / c;
    double t4 = s - t5;

    bool ok = false;
    auto f = slack(t4, t5);
    for (int iter = 0; iter < 100; ++iter) {
        if (norm(f) < 1e-9 * c * 1e-3) {
            ok = true;
            break;
        }
        const double b = tl.t3 / 2.0 + t4 + t5;
        const double a = tl.t3 / 2.0 + tl.t2 + tl.t1 + t6;
        const double dh = v * b / std::hypot(a, b);
        const double j11 = v, j12 = v - c, j21 = dh, j22 = dh + c;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            break;
        const double d4 = -(j22 * f[0] - j12 * f[1]) / det;
        const double d5 = -(-j21 * f[0] + j11 * f[1]) / det;
        double lambda = 1.0;
        bool improved = false;
        for (int k2 = 0; k2 < 40; ++k2) {
            const auto fn = slack(t4 + lambda * d4, t5 + lambda * d5);
            if (norm(fn) < norm(f)) {
                t4 += lambda * d4;
                t5 += lambda * d5;
                f = fn;
                improved = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!improved) {
            ok = norm(f) < 1e-9 * c;
            break;
        }
    }

    if (!ok || t4 < 0.0 || t5 < 0.0) {
        // eliminate t4 with the first equality and bisect the second over t5
        auto t4_of = [&](double x) { return c * (x + tl.t1 + t6) / v - tl.t3 / 2.0 - x - tl.t1 - t6; };
        auto g = [&](double x) { return slack(t4_of(x), x)[1]; };
        if (!(g(0.0) < 0.0 && g(k) > 0.0) && !(g(0.0) > 0.0 && g(k) < 0.0))
            throw ValidationError("locality constraints are infeasible for these inputs");
        t5 = bisect_root(g, 0.0, k);
        t4 = t4_of(t5);
        f = slack(t4, t5);
    }
    if (t4 < 0.0 || t5 < 0.0)
        throw ValidationError("locality constraints are infeasible for these inputs");

    LocalitySolution out;
    out.t4 = t4;
    out.t5 = t5;
    out.l = separation_distance(v, t4, t5);
    out.residuals = f;
    return out;
}

double separation_distance(double v, double t4, double t5)
{
    if (v < 0.0 || t4 < 0.0 || t5 < 0.0)
        throw ValidationError("separation inputs must be non-negative");
    return v * (t4 + t5);
}

double max_waveguide_diameter(double omega0, double c)
{
    if (!(omega0 > 0.0))
        throw ValidationError("omega0 must be > 0");
    if (std::isinf(omega0))
        return 0.0;
    return 2.0 * 1.8412 * c / omega0;
}

}  // namespace bellcav
