#include "reference.hpp"

#include <cmath>

#include <boost/math/special_functions/binomial.hpp>
#include <boost/math/special_functions/laguerre.hpp>

namespace ref {

double poisson_tail(double m, int n_max)
{
    long double term = std::exp(-static_cast<long double>(m) * m);
    for (int n = 1; n <= n_max; ++n)
        term *= static_cast<long double>(m) * m / n;
    long double tail = 0.0L;
    long double t = term;
    for (int n = n_max + 1; n < n_max + 2000; ++n) {
        t *= static_cast<long double>(m) * m / n;
        tail += t;
        if (t < 1e-30L * (tail + 1e-300L))
            break;
    }
    return static_cast<double>(tail);
}

Eigen::MatrixXcd displacement(cplx beta, int N)
{
    Eigen::MatrixXcd d(N, N);
    const double x = std::norm(beta);
    for (int m = 0; m < N; ++m) {
        for (int n = 0; n < N; ++n) {
            const int lo = std::min(m, n);
            const int k = std::abs(m - n);
            const double lf = 0.5 * (std::lgamma(lo + 1.0) - std::lgamma(lo + k + 1.0));
            const double lag = boost::math::laguerre(static_cast<unsigned>(lo), static_cast<unsigned>(k), x);
            const double mag = std::exp(lf - 0.5 * x) * lag;
            cplx p = 1.0;
            for (int i = 0; i < k; ++i)
                p *= (m >= n) ? beta : -std::conj(beta);
            d(m, n) = mag * p;
        }
    }
    return d;
}

Eigen::MatrixXcd binomial_loss(const Eigen::MatrixXcd& rho, double eta)
{
    const int N = static_cast<int>(rho.rows());
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(N, N);
    for (int k = 0; k < N; ++k) {
        Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(N, N);
        for (int n = k; n < N; ++n)
            a(n - k, n) = std::sqrt(boost::math::binomial_coefficient<double>(n, k) * std::pow(eta, n - k)
                                    * std::pow(1.0 - eta, k));
        out += a * rho * a.adjoint();
    }
    return out;
}

double halve(const std::function<double(double)>& f, double lo, double hi, double tol)
{
    double flo = f(lo);
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid);
        if ((fm > 0) == (flo > 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double parity_beta(double a)
{
    auto f = [a](double b) { return (a - b) / (a + b) - std::tan(4.0 * a * b); };
    const double step = 1e-5;
    double x = step;
    double fx = f(x);
    while (true) {
        const double y = x + step;
        const double fy = f(y);
        if ((fx > 0) != (fy > 0))
            return halve(f, x, y);
        x = y;
        fx = fy;
    }
}

LightCone light_cone(double t1, double t2, double t3, double t6, double v, double c, bool include_t6)
{
    const double w = include_t6 ? t6 : 0.0;
    // v(t3/2 + t4 + t5 + t1 + w) = c(t5 + t1 + w)  ->  t4(t5)
    auto t4_of = [&](double t5) { return c * (t5 + t1 + w) / v - (t3 / 2.0 + t5 + t1 + w); };
    auto g = [&](double t5) {
        const double t4 = t4_of(t5);
        return v * std::hypot(t3 / 2.0 + t2 + t1 + w, t3 / 2.0 + t4 + t5) - c * (t3 + t2 + t1 + w - t5);
    };
    const double t5 = halve(g, 0.0, t3 + t2 + t1 + w, 1e-18);
    return {t4_of(t5), t5};
}

Eigen::Matrix2cd atom_decay_rk4(const Eigen::Matrix2cd& rho, double gamma, double t, int steps)
{
    Eigen::Matrix2cd sm;  // |g><e|
    sm << 0.0, 0.0, 1.0, 0.0;
    const Eigen::Matrix2cd sp = sm.adjoint();
    auto L = [&](const Eigen::Matrix2cd& r) -> Eigen::Matrix2cd {
        return gamma * (2.0 * sm * r * sp - sp * sm * r - r * sp * sm);
    };
    Eigen::Matrix2cd r = rho;
    const double h = t / steps;
    for (int i = 0; i < steps; ++i) {
        const Eigen::Matrix2cd k1 = L(r);
        const Eigen::Matrix2cd k2 = L(r + 0.5 * h * k1);
        const Eigen::Matrix2cd k3 = L(r + 0.5 * h * k2);
        const Eigen::Matrix2cd k4 = L(r + h * k3);
        r += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return r;
}

}  // namespace ref
