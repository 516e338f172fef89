#include "spca/pc_model.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "spca/errors.h"
#include "spca/parallel.h"

namespace spca
{

ComponentEstimate estimate_component(const RescaledSpectrum& spectrum, Eigen::Index v)
{
    ComponentEstimate est;
    if (v >= spectrum.k)
    {
        return est;
    }
    const double lambda = spectrum.lambda_hat(v);
    const double gamma = spectrum.gamma;
    est.spike = true;
    est.shrinkage = shrinkage_factor(lambda, gamma);
    est.adjustment = adjustment_factor(spectrum.d_hat(v), gamma);
    est.eigvec_angle = eigenvector_angle(lambda, gamma);
    est.score_angle = score_angle(lambda, gamma);
    return est;
}

FittedPcModel fit(const DataMatrix& x, const FitOptions& options)
{
    if (x.n() < 3)
    {
        throw DimensionError(fmt::format("fit needs at least 3 samples, got {}", x.n()));
    }
    const Eigen::Index max_k = std::min(x.p(), x.n());
    if (options.k && (*options.k < 1 || *options.k > max_k))
    {
        throw DimensionError(fmt::format("requested {} components, valid range is 1..{}", *options.k, max_k));
    }

    auto [z, prep] = standardize(x, options.mode);

    FittedPcModel model;
    model.prep = std::move(prep);
    Eigen::Index k = 0;
    if (options.k)
    {
        k = *options.k;
        model.eig = sample_eigen(z, k);
        model.spectrum = rescale_eigenvalues(model.eig.d, z.p(), z.n(), options.rescale);
    }
    else
    {
        model.spectrum = rescale_eigenvalues(sample_eigenvalues(z), z.p(), z.n(), options.rescale);
        k = std::max<Eigen::Index>(model.spectrum.k, 1);
        model.eig = sample_eigen(z, k);
    }
    model.k_spikes = model.spectrum.k;
    model.components.reserve(static_cast<std::size_t>(model.eig.k()));
    for (Eigen::Index v = 0; v < model.eig.k(); ++v)
    {
        model.components.push_back(estimate_component(model.spectrum, v));
    }
    return model;
}

PredictionScores predict(const FittedPcModel& model, const Eigen::Ref<const Eigen::MatrixXd>& x_new)
{
    if (x_new.rows() != model.p())
    {
        throw DimensionError(fmt::format("new data has {} rows, model expects {}", x_new.rows(), model.p()));
    }
    PredictionScores out;
    out.naive = model.eig.u.transpose() * apply_preprocessing_columns(x_new, model.prep);
    out.adjusted = out.naive;
    out.identifiable.resize(model.components.size());
    for (std::size_t v = 0; v < model.components.size(); ++v)
    {
        const auto& c = model.components[v];
        out.identifiable[v] = c.spike;
        if (c.spike)
        {
            out.adjusted.row(static_cast<Eigen::Index>(v)) *= c.adjustment;
        }
    }
    return out;
}

Eigen::MatrixXd training_scores(const FittedPcModel& model, const DataMatrix& x)
{
    return predict(model, x.values()).naive;
}

JackknifeResult jackknife_shrinkage(const DataMatrix& x, StandardizeMode mode, Eigen::Index v,
                                    const RescaleOptions& rescale)
{
    if (x.n() < 4)
    {
        throw DimensionError(fmt::format("jackknife needs at least 4 samples, got {}", x.n()));
    }
    if (v < 0 || v >= std::min(x.p(), x.n() - 1))
    {
        throw DimensionError(fmt::format("component index {} out of range", v));
    }
    FitOptions options{mode, v + 1, rescale};
    const FittedPcModel full = fit(x, options);
    if (v >= full.k() || !full.components[static_cast<std::size_t>(v)].spike)
    {
        throw NotIdentifiable(fmt::format("component {} is not a detected spike in the full-data fit", v + 1));
    }
    const Eigen::VectorXd sample_scores = training_scores(full, x).row(v).transpose();

    const auto n = static_cast<std::size_t>(x.n());
    std::vector<double> predicted(n, 0.0);
    std::vector<char> usable(n, 0);
    parallel_for(n, [&](std::size_t j) {
        const auto col = static_cast<Eigen::Index>(j);
        const FittedPcModel rep = fit(x.without_column(col), options);
        if (v >= rep.k() || !rep.components[static_cast<std::size_t>(v)].spike)
        {
            return;
        }
        predicted[j] = predict(rep, x.values().col(col)).naive(v, 0);
        usable[j] = 1;
    });

    JackknifeResult out;
    double sum_q2 = 0.0;
    for (std::size_t j = 0; j < n; ++j)
    {
        if (usable[j])
        {
            sum_q2 += predicted[j] * predicted[j];
            ++out.used;
        }
        else
        {
            ++out.excluded;
        }
    }
    if (out.used == 0)
    {
        throw NotIdentifiable(fmt::format("component {} was not a spike in any leave-one-out replicate", v + 1));
    }
    const double mean_q2 = sum_q2 / static_cast<double>(out.used);
    const double mean_p2 = sample_scores.squaredNorm() / static_cast<double>(x.n());
    out.shrinkage = std::sqrt(mean_q2 / mean_p2);
    return out;
}

PcrCoefficients pcr_fit(const Eigen::Ref<const Eigen::VectorXd>& scores, const Eigen::Ref<const Eigen::VectorXd>& y)
{
    if (scores.size() != y.size())
    {
        throw DimensionError(fmt::format("{} scores but {} outcomes", scores.size(), y.size()));
    }
    if (scores.size() < 3)
    {
        throw DimensionError("PC regression needs at least 3 samples");
    }
    const double mx = scores.mean();
    const double my = y.mean();
    const Eigen::ArrayXd dx = scores.array() - mx;
    const double sxx = dx.square().sum();
    if (!(sxx > 0.0))
    {
        throw DegenerateRegressor("PC scores are constant");
    }
    const double sxy = (dx * (y.array() - my)).sum();
    PcrCoefficients c;
    c.slope = sxy / sxx;
    c.intercept = my - c.slope * mx;
    return c;
}

Eigen::VectorXd pcr_predict(const PcrCoefficients& coeffs, const Eigen::Ref<const Eigen::VectorXd>& scores)
{
    return (coeffs.intercept + coeffs.slope * scores.array()).matrix();
}

double mean_squared_error(const Eigen::Ref<const Eigen::VectorXd>& y, const Eigen::Ref<const Eigen::VectorXd>& y_hat)
{
    if (y.size() != y_hat.size() || y.size() == 0)
    {
        throw DimensionError("MSE needs two non-empty vectors of equal length");
    }
    return (y - y_hat).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace spca
