#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>

namespace spca
{

// Closed-form limits under the spiked population model. `lambda` is a
// population eigenvalue on the unit-noise scale and `gamma` is p/n.

// Almost-sure limit of a spiked sample eigenvalue: x (1 + gamma / (x - 1)).
double rho(double lambda, double gamma);

// "+" root of the quadratic inverting rho; requires d >= (1 + sqrt(gamma))^2.
double rho_inverse(double d, double gamma);

// |<e_v, u_v>| limit; 0 at or below the phase-transition threshold 1 + sqrt(gamma).
double eigenvector_angle(double lambda, double gamma);

// Correlation between population and sample PC scores; 0 at or below threshold.
double score_angle(double lambda, double gamma);

// (lambda - 1) / (lambda + gamma - 1); only defined above threshold.
double shrinkage_factor(double lambda, double gamma);

// Multiplier that de-shrinks a predicted score, evaluated at rho_inverse(d_hat).
// Throws NotIdentifiable when d_hat <= (1 + sqrt(gamma))^2.
double adjustment_factor(double d_hat, double gamma);

double phase_threshold(double gamma);       // 1 + sqrt(gamma)
double spike_detection_edge(double gamma);  // (1 + sqrt(gamma))^2

struct RescaledSpectrum
{
    Eigen::VectorXd d_hat;       // tau * r_v, descending
    Eigen::VectorXd lambda_hat;  // rho_inverse(d_hat) for detected spikes, else 1
    Eigen::VectorXd r;           // d*_v / sum d*
    Eigen::Index k = 0;          // number of lambda_hat > 1
    double tau = 0.0;
    double gamma = 0.0;
    Eigen::Index p = 0;
    int iterations = 0;
    bool converged = false;
    bool used_bisection = false;
};

struct RescaleOptions
{
    double tol = 1e-10;  // on |T_l - T_{l-1}| / p
    int max_iter = 500;
    int oscillation_window = 10;
    // Replaces p / n, for spectra computed elsewhere.
    std::optional<double> gamma;
};

// Iteratively normalizes the sample spectrum so rho_inverse applies when
// the noise variance is an unknown multiple of one. `d_star` must be the
// full non-increasing spectrum (all min(p, n) values).
RescaledSpectrum rescale_eigenvalues(const Eigen::Ref<const Eigen::VectorXd>& d_star,
                                     Eigen::Index p,
                                     Eigen::Index n,
                                     const RescaleOptions& options = {});

// h(x) = sum_{v<k} rho_inverse(r_v x) + p - k - x. Its root on [p, inf) is
// the fixed point the rescaling iteration converges to.
double rescaling_objective(double x,
                           const Eigen::Ref<const Eigen::VectorXd>& r,
                           Eigen::Index k,
                           double p,
                           double gamma);

// Bisection on rescaling_objective; fallback when the iteration oscillates.
double solve_rescaling_root(const Eigen::Ref<const Eigen::VectorXd>& r,
                            Eigen::Index k,
                            double p,
                            double gamma);

// Marcenko-Pastur law with ratio gamma and unit variance.
struct MpLaw
{
    double gamma = 0.0;
    double a = 0.0;
    double b = 0.0;
    double point_mass_at_zero = 0.0;

    double density(double x) const;
};

MpLaw mp_law(double gamma);

struct MpEdges
{
    double a;
    double b;
};

MpEdges mp_edges(double gamma);

// Integral of f against the continuous part of the law on [a, b]. The atom
// at zero for gamma > 1 is ignored, which is exact when f(0) = 0.
double mp_integral(const std::function<double(double)>& f, double gamma);

}  // namespace spca
