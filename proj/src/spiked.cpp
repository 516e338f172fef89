#include "spca/spiked.h"

#include <fmt/format.h>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "spca/errors.h"

namespace spca
{

namespace
{

void require_gamma(double gamma)
{
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
    {
        throw DomainError(fmt::format("aspect ratio must be finite and >= 0, got {}", gamma));
    }
}

void require_spike(double lambda, double gamma)
{
    require_gamma(gamma);
    if (!(lambda > 1.0) || !std::isfinite(lambda))
    {
        throw DomainError(fmt::format("population eigenvalue must exceed 1, got {}", lambda));
    }
}

}  // namespace

double phase_threshold(double gamma)
{
    require_gamma(gamma);
    return 1.0 + std::sqrt(gamma);
}

double spike_detection_edge(double gamma)
{
    const double t = phase_threshold(gamma);
    return t * t;
}

double rho(double lambda, double gamma)
{
    require_spike(lambda, gamma);
    return lambda * (1.0 + gamma / (lambda - 1.0));
}

double rho_inverse(double d, double gamma)
{
    require_gamma(gamma);
    if (!(d >= spike_detection_edge(gamma)))
    {
        throw DomainError(fmt::format("sample eigenvalue {} is below the detection edge {}", d,
                                      spike_detection_edge(gamma)));
    }
    const double b = d + 1.0 - gamma;
    const double disc = std::max(0.0, b * b - 4.0 * d);
    return 0.5 * (b + std::sqrt(disc));
}

double eigenvector_angle(double lambda, double gamma)
{
    require_spike(lambda, gamma);
    if (lambda <= phase_threshold(gamma))
    {
        return 0.0;
    }
    const double t = lambda - 1.0;
    return std::sqrt((1.0 - gamma / (t * t)) / (1.0 + gamma / t));
}

double score_angle(double lambda, double gamma)
{
    require_spike(lambda, gamma);
    if (lambda <= phase_threshold(gamma))
    {
        return 0.0;
    }
    const double t = lambda - 1.0;
    return std::sqrt(1.0 - gamma / (t * t));
}

double shrinkage_factor(double lambda, double gamma)
{
    require_spike(lambda, gamma);
    if (lambda <= phase_threshold(gamma))
    {
        throw DomainError(fmt::format("shrinkage factor undefined for lambda {} <= threshold {}", lambda,
                                      phase_threshold(gamma)));
    }
    return (lambda - 1.0) / (lambda + gamma - 1.0);
}

double adjustment_factor(double d_hat, double gamma)
{
    require_gamma(gamma);
    if (!(d_hat > spike_detection_edge(gamma)))
    {
        throw NotIdentifiable(fmt::format("rescaled eigenvalue {} does not exceed the detection edge {}", d_hat,
                                          spike_detection_edge(gamma)));
    }
    const double lambda = rho_inverse(d_hat, gamma);
    return (lambda + gamma - 1.0) / (lambda - 1.0);
}

double rescaling_objective(double x, const Eigen::Ref<const Eigen::VectorXd>& r, Eigen::Index k, double p,
                           double gamma)
{
    double sum = 0.0;
    for (Eigen::Index v = 0; v < k; ++v)
    {
        sum += rho_inverse(r(v) * x, gamma);
    }
    return sum + p - static_cast<double>(k) - x;
}

double solve_rescaling_root(const Eigen::Ref<const Eigen::VectorXd>& r, Eigen::Index k, double p, double gamma)
{
    if (k == 0)
    {
        return p;
    }
    // h is only defined where every retained spike stays above the edge.
    double lo = std::max(p, spike_detection_edge(gamma) / r(k - 1));
    if (rescaling_objective(lo, r, k, p, gamma) <= 0.0)
    {
        return lo;
    }
    double hi = 2.0 * lo;
    while (rescaling_objective(hi, r, k, p, gamma) > 0.0)
    {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
        {
            throw NumericalError("rescaling objective has no root");
        }
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it)
    {
        const double mid = 0.5 * (lo + hi);
        if (rescaling_objective(mid, r, k, p, gamma) > 0.0)
        {
            lo = mid;
        }
        else
        {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

RescaledSpectrum rescale_eigenvalues(const Eigen::Ref<const Eigen::VectorXd>& d_star, Eigen::Index p,
                                     Eigen::Index n, const RescaleOptions& options)
{
    if (p < 1 || n < 1)
    {
        throw DimensionError(fmt::format("invalid dimensions p={}, n={}", p, n));
    }
    if (d_star.size() == 0)
    {
        throw DimensionError("empty spectrum");
    }
    if (!(options.tol > 0.0) || options.max_iter < 1)
    {
        throw DomainError("rescaling needs tol > 0 and max_iter >= 1");
    }
    for (Eigen::Index v = 0; v < d_star.size(); ++v)
    {
        if (!(d_star(v) >= 0.0) || !std::isfinite(d_star(v)))
        {
            throw DomainError(fmt::format("eigenvalue {} is negative or non-finite", v));
        }
        if (v > 0 && d_star(v) > d_star(v - 1))
        {
            throw DomainError("spectrum must be sorted non-increasing");
        }
    }
    const double total = d_star.sum();
    if (!(total > 0.0))
    {
        throw DegenerateMatrix("spectrum sums to zero");
    }

    RescaledSpectrum out;
    out.p = p;
    out.gamma = options.gamma.value_or(static_cast<double>(p) / static_cast<double>(n));
    if (!(out.gamma > 0.0) || !std::isfinite(out.gamma))
    {
        throw DomainError(fmt::format("gamma must be positive and finite, got {}", out.gamma));
    }
    out.r = d_star / total;
    const double pd = static_cast<double>(p);
    const double edge = spike_detection_edge(out.gamma);

    Eigen::VectorXd d_hat = pd * out.r;
    double t_prev = pd;
    double inc_prev = 0.0;
    int alternations = 0;
    Eigen::Index k_l = 0;
    for (int l = 1; l <= options.max_iter; ++l)
    {
        double sum = 0.0;
        k_l = 0;
        while (k_l < d_hat.size() && d_hat(k_l) > edge)
        {
            sum += rho_inverse(d_hat(k_l), out.gamma);
            ++k_l;
        }
        const double t = sum + pd - static_cast<double>(k_l);
        d_hat = t * out.r;
        out.iterations = l;
        out.tau = t;

        const double inc = t - t_prev;
        if (std::abs(inc) <= options.tol * pd)
        {
            out.converged = true;
            break;
        }
        alternations = (inc_prev != 0.0 && (inc > 0.0) != (inc_prev > 0.0)) ? alternations + 1 : 0;
        if (alternations >= options.oscillation_window)
        {
            out.tau = solve_rescaling_root(out.r, k_l, pd, out.gamma);
            d_hat = out.tau * out.r;
            out.used_bisection = true;
            out.converged = true;
            break;
        }
        inc_prev = inc;
        t_prev = t;
    }

    out.d_hat = d_hat;
    out.lambda_hat = Eigen::VectorXd::Ones(d_hat.size());
    out.k = 0;
    while (out.k < d_hat.size() && d_hat(out.k) > edge)
    {
        out.lambda_hat(out.k) = rho_inverse(d_hat(out.k), out.gamma);
        ++out.k;
    }
    return out;
}

MpEdges mp_edges(double gamma)
{
    require_gamma(gamma);
    const double s = std::sqrt(gamma);
    return {(1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s)};
}

MpLaw mp_law(double gamma)
{
    const auto [a, b] = mp_edges(gamma);
    return {gamma, a, b, gamma > 1.0 ? 1.0 - 1.0 / gamma : 0.0};
}

double MpLaw::density(double x) const
{
    if (!(x > a && x < b) || gamma <= 0.0)
    {
        return 0.0;
    }
    return std::sqrt((b - x) * (x - a)) / (2.0 * boost::math::constants::pi<double>() * gamma * x);
}

double mp_integral(const std::function<double(double)>& f, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
    {
        throw DomainError(fmt::format("MP integral needs gamma > 0, got {}", gamma));
    }
    const auto [a, b] = mp_edges(gamma);
    const double width = b - a;
    const double pi = boost::math::constants::pi<double>();

    // x = a + (b - a) sin^2(t) removes the square-root behaviour at both edges:
    // sqrt((b-x)(x-a)) dx = 2 (b-a)^2 sin^2(t) cos^2(t) dt.
    auto integrand = [&](double t) {
        const double s = std::sin(t);
        const double c = std::cos(t);
        const double x = a + width * s * s;
        const double ss = s * s;
        // sin^2(t) / x stays finite as t -> 0 even when a == 0.
        const double ratio = a > 0.0 ? ss / x : 1.0 / width;
        return f(x) * width * width * ratio * c * c / (pi * gamma);
    };

    double error = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        integrand, 0.0, 0.5 * pi, 20, 1e-13, &error);
    if (!std::isfinite(value) || error > 1e-9)
    {
        throw NumericalError(fmt::format("MP quadrature did not converge (estimate {}, error {})", value, error));
    }
    return value;
}

}  // namespace spca
