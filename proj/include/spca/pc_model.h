#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "spca/eigen_core.h"
#include "spca/matrix_io.h"
#include "spca/spiked.h"

namespace spca
{

// Per-component estimates derived from the rescaled spectrum alone.
struct ComponentEstimate
{
    bool spike = false;           // lambda_hat > 1; otherwise NotIdentifiable
    double shrinkage = 1.0;       // (l - 1) / (l + gamma - 1)
    double adjustment = 1.0;      // 1 / shrinkage
    double eigvec_angle = 0.0;    // phi(lambda_hat)
    double score_angle = 0.0;     // sqrt(1 - gamma / (lambda_hat - 1)^2)
};

// Recomputes the estimate for component v (0-based) from the spectrum.
ComponentEstimate estimate_component(const RescaledSpectrum& spectrum, Eigen::Index v);

struct FittedPcModel
{
    Preprocessing prep;
    SampleEigen eig;
    RescaledSpectrum spectrum;
    Eigen::Index k_spikes = 0;
    std::vector<ComponentEstimate> components;  // one per retained eigenvector

    Eigen::Index p() const noexcept { return eig.p(); }
    Eigen::Index n() const noexcept { return eig.n; }
    Eigen::Index k() const noexcept { return eig.k(); }
    double gamma() const noexcept { return eig.gamma; }
};

struct FitOptions
{
    StandardizeMode mode = StandardizeMode::center;
    // Number of eigenvectors to retain; nullopt keeps max(k_spikes, 1).
    std::optional<Eigen::Index> k;
    RescaleOptions rescale;
};

FittedPcModel fit(const DataMatrix& x, const FitOptions& options = {});

struct PredictionScores
{
    Eigen::MatrixXd naive;     // k x m, q_v = u_v^T x
    Eigen::MatrixXd adjusted;  // k x m; equals naive on non-identifiable rows
    std::vector<bool> identifiable;
};

// x_new is p x m in raw (unpreprocessed) coordinates.
PredictionScores predict(const FittedPcModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x_new);

// Scores of the training columns, u_v^T X after the model's preprocessing.
Eigen::MatrixXd training_scores(const FittedPcModel& model, const DataMatrix& x);

struct JackknifeResult
{
    double shrinkage = 0.0;  // sqrt(mean q^2 / mean p^2)
    Eigen::Index used = 0;
    Eigen::Index excluded = 0;  // replicates where component v was not a spike
};

// Leave-one-out shrinkage estimate for component v (0-based). Each replicate
// refits, including preprocessing, on the remaining n - 1 columns.
JackknifeResult jackknife_shrinkage(const DataMatrix& x, StandardizeMode mode, Eigen::Index v,
                                    const RescaleOptions& rescale = {});

struct PcrCoefficients
{
    double intercept = 0.0;
    double slope = 0.0;
};

PcrCoefficients pcr_fit(const Eigen::Ref<const Eigen::VectorXd>& scores, const Eigen::Ref<const Eigen::VectorXd>& y);
Eigen::VectorXd pcr_predict(const PcrCoefficients& coeffs, const Eigen::Ref<const Eigen::VectorXd>& scores);
double mean_squared_error(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& y_hat);

}  // namespace spca
