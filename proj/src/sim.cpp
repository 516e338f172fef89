#include "spca/sim.h"

#include <fmt/format.h>
#include <fmt/ostream.h>

#include <cmath>
#include <ostream>

#include "spca/errors.h"
#include "spca/parallel.h"
#include "spca/pc_model.h"
#include "spca/spiked.h"

namespace spca::sim
{

// ---------------------------------------------------------------------------
// Generators

IntroData gen_intro(std::uint64_t seed, std::uint64_t replicate, std::array<Eigen::Index, 3> n_per_stratum,
                    Eigen::Index p)
{
    if (p < 1)
    {
        throw DimensionError("intro design needs p >= 1");
    }
    Eigen::Index n = 0;
    for (auto s : n_per_stratum)
    {
        if (s < 1)
        {
            throw DimensionError("every stratum needs at least one sample");
        }
        n += s;
    }

    CounterRng mean_rng(seed, replicate, kMeanStream);
    static constexpr std::array<double, 3> kLevels = {-0.3, 0.0, 0.3};
    Eigen::MatrixXd means(p, 3);
    for (Eigen::Index k = 0; k < 3; ++k)
    {
        for (Eigen::Index i = 0; i < p; ++i)
        {
            means(i, k) = kLevels[mean_rng.next_u64() % 3];
        }
    }

    auto draw = [&](std::uint64_t stream, std::vector<int>& labels) {
        CounterRng rng(seed, replicate, stream);
        Eigen::MatrixXd x(p, n);
        rng.fill_normal(x, 2.0);
        Eigen::Index col = 0;
        for (int k = 0; k < 3; ++k)
        {
            for (Eigen::Index j = 0; j < n_per_stratum[static_cast<std::size_t>(k)]; ++j, ++col)
            {
                x.col(col) += means.col(k);
                labels.push_back(k);
            }
        }
        return DataMatrix(std::move(x));
    };

    std::vector<int> train_labels;
    std::vector<int> test_labels;
    DataMatrix train = draw(kTrainStream, train_labels);
    DataMatrix test = draw(kTestStream, test_labels);
    return {std::move(train), std::move(test), std::move(train_labels), std::move(test_labels), std::move(means)};
}

TwoSpikeDesign two_spike_design(Eigen::Index n, double gamma)
{
    if (!(gamma > 0.0) || !std::isfinite(gamma))
    {
        throw DomainError(fmt::format("two-spike design needs gamma > 0, got {}", gamma));
    }
    if (n < 4)
    {
        throw DimensionError(fmt::format("two-spike design needs n >= 4, got {}", n));
    }
    const auto p = static_cast<Eigen::Index>(std::llround(gamma * static_cast<double>(n)));
    if (p < 3)
    {
        throw DimensionError(fmt::format("two-spike design needs p >= 3, got {}", p));
    }
    const double t = 1.0 + std::sqrt(gamma);
    return {gamma, n, p, 4.0 * t, 2.0 * t};
}

DataMatrix gen_two_spike(const TwoSpikeDesign& design, CounterRng& rng)
{
    Eigen::MatrixXd x(design.p, design.n);
    rng.fill_normal(x, 2.0);
    x.row(0) *= std::sqrt(design.lambda1);
    x.row(1) *= std::sqrt(design.lambda2);
    return DataMatrix(std::move(x));
}

DataMatrix gen_two_spike(Eigen::Index n, double gamma, std::uint64_t seed)
{
    CounterRng rng(seed, 0, kTrainStream);
    return gen_two_spike(two_spike_design(n, gamma), rng);
}

PcrData gen_pcr(Eigen::Index n, Eigen::Index g, Eigen::Index p, CounterRng& x_rng, CounterRng& y_rng)
{
    if (n < 2 || n % 2 != 0)
    {
        throw DomainError(fmt::format("PC regression design needs an even n >= 2, got {}", n));
    }
    if (g < 1 || g >= p)
    {
        throw DomainError(fmt::format("PC regression design needs 1 <= g < p, got g={} p={}", g, p));
    }
    Eigen::MatrixXd x(p, n);
    x_rng.fill_normal(x, 2.0);
    const Eigen::Index half = n / 2;
    x.topLeftCorner(g, half).array() += 3.0;
    x.topRightCorner(g, n - half).array() += 4.0;
    x.bottomRows(p - g).array() += 3.5;

    Eigen::VectorXd y(n);
    const double scale = 2.0 / static_cast<double>(g);
    for (Eigen::Index j = 0; j < n; ++j)
    {
        y(j) = scale * x.col(j).head(g).sum() + y_rng.normal();
    }
    return {DataMatrix(std::move(x)), std::move(y)};
}

PcrData gen_pcr(Eigen::Index n, Eigen::Index g, std::uint64_t seed, Eigen::Index p)
{
    CounterRng x_rng(seed, 0, kTrainStream);
    CounterRng y_rng(seed, 0, kOutcomeTrainStream);
    return gen_pcr(n, g, p, x_rng, y_rng);
}

// ---------------------------------------------------------------------------
// Empirical estimators

double empirical_shrinkage(const Eigen::Ref<const Eigen::VectorXd>& train_scores,
                           const Eigen::Ref<const Eigen::VectorXd>& test_scores)
{
    if (train_scores.size() != test_scores.size())
    {
        throw DimensionError(fmt::format("{} training scores but {} test scores", train_scores.size(),
                                         test_scores.size()));
    }
    const double denom = train_scores.squaredNorm();
    if (!(denom > 0.0))
    {
        throw DegenerateInput("training scores are all zero");
    }
    return std::sqrt(test_scores.squaredNorm() / denom);
}

double empirical_angle(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& e)
{
    if (u.size() != e.size())
    {
        throw DimensionError("angle needs vectors of equal length");
    }
    const double nu = u.norm();
    const double ne = e.norm();
    if (!(nu > 0.0) || !(ne > 0.0))
    {
        throw DegenerateInput("angle with a zero vector");
    }
    return std::min(1.0, std::abs(u.dot(e)) / (nu * ne));
}

// ---------------------------------------------------------------------------
// Reports

const EstimatorSummary* ReportCell::find(std::string_view estimator, int pc) const
{
    for (const auto& r : rows)
    {
        if (r.estimator == estimator && r.pc == pc)
        {
            return &r;
        }
    }
    return nullptr;
}

EstimatorSummary summarize(std::string estimator, int pc, const std::vector<double>& values)
{
    EstimatorSummary s{std::move(estimator), pc, 0.0, 0.0, values.size()};
    if (values.empty())
    {
        s.mean = std::nan("");
        s.sd = std::nan("");
        return s;
    }
    double sum = 0.0;
    double carry = 0.0;
    for (double v : values)
    {
        const double y = v - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    s.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1)
    {
        double ss = 0.0;
        carry = 0.0;
        for (double v : values)
        {
            const double y = (v - s.mean) * (v - s.mean) - carry;
            const double t = ss + y;
            carry = (t - ss) - y;
            ss = t;
        }
        s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
    }
    return s;
}

void write_report_csv(std::ostream& out, const SimulationReport& report)
{
    out << "design,gamma,n,p,g,estimator,pc,mean,sd,count\n";
    for (const auto& c : report.cells)
    {
        for (const auto& r : c.rows)
        {
            fmt::print(out, "{},{:.17g},{},{},{},{},{},{:.17g},{:.17g},{}\n", report.design, c.gamma, c.n, c.p, c.g,
                       r.estimator, r.pc, r.mean, r.sd, r.count);
        }
    }
}

void write_report_text(std::ostream& out, const SimulationReport& report)
{
    fmt::print(out, "design {} | replicates {} | seed {}\n", report.design, report.replicates, report.seed);
    for (const auto& c : report.cells)
    {
        if (report.design == "table3")
        {
            fmt::print(out, "\nn = {}, g = {}, p = {}\n", c.n, c.g, c.p);
        }
        else
        {
            fmt::print(out, "\ngamma = {}, n = {}, p = {}\n", c.gamma, c.n, c.p);
        }
        fmt::print(out, "  {:<26} {:>3} {:>10} {:>10} {:>6}\n", "estimator", "pc", "mean", "sd", "count");
        for (const auto& r : c.rows)
        {
            fmt::print(out, "  {:<26} {:>3} {:>10.4f} {:>10.4f} {:>6}\n", r.estimator, r.pc, r.mean, r.sd, r.count);
        }
    }
}

// ---------------------------------------------------------------------------
// Experiment drivers

namespace
{

// Per-replicate values for named estimators; NaN marks "not available".
struct Collector
{
    struct Series
    {
        std::string estimator;
        int pc;
        std::vector<double> values;
    };
    std::vector<Series> series;
    std::size_t replicates;

    explicit Collector(std::size_t reps) : replicates(reps) {}

    std::size_t add(std::string estimator, int pc)
    {
        series.push_back({std::move(estimator), pc, std::vector<double>(replicates, std::nan(""))});
        return series.size() - 1;
    }

    void set(std::size_t id, std::size_t rep, double value) { series[id].values[rep] = value; }

    std::vector<EstimatorSummary> summaries() const
    {
        std::vector<EstimatorSummary> out;
        for (const auto& s : series)
        {
            std::vector<double> finite;
            for (double v : s.values)
            {
                if (!std::isnan(v))
                {
                    finite.push_back(v);
                }
            }
            out.push_back(summarize(s.estimator, s.pc, finite));
        }
        return out;
    }
};

double indicator(bool b)
{
    return b ? 1.0 : 0.0;
}

ReportCell run_table12_cell(double gamma, Eigen::Index n, std::size_t replicates, std::uint64_t seed,
                            std::uint64_t cell_index)
{
    const TwoSpikeDesign design = two_spike_design(n, gamma);
    const std::array<double, 2> lambdas = {design.lambda1, design.lambda2};

    Collector col(replicates);
    struct Ids
    {
        std::size_t evec_emp, evec_plug, score_emp, score_plug, shrink_emp, shrink_plug, lambda_hat, closer;
    };
    std::array<Ids, 2> ids{};
    for (int v = 0; v < 2; ++v)
    {
        ids[static_cast<std::size_t>(v)] = {col.add("evec_angle_empirical", v + 1),
                                            col.add("evec_angle_plugin", v + 1),
                                            col.add("score_angle_empirical", v + 1),
                                            col.add("score_angle_plugin", v + 1),
                                            col.add("shrinkage_empirical", v + 1),
                                            col.add("shrinkage_plugin", v + 1),
                                            col.add("lambda_hat", v + 1),
                                            col.add("adjusted_ratio_closer", v + 1)};
    }
    const std::size_t converged_id = col.add("converged", 0);
    const std::size_t iterations_id = col.add("iterations", 0);
    const std::size_t k_id = col.add("k_spikes", 0);

    // Replicate streams are keyed by (seed, cell * 2^32 + replicate).
    parallel_for(replicates, [&](std::size_t rep) {
        const std::uint64_t rep_key = (cell_index << 32) + rep;
        CounterRng train_rng(seed, rep_key, kTrainStream);
        CounterRng test_rng(seed, rep_key, kTestStream);
        const DataMatrix train = gen_two_spike(design, train_rng);
        const DataMatrix test = gen_two_spike(design, test_rng);

        const FittedPcModel model = fit(train, {StandardizeMode::none, Eigen::Index{2}, {}});
        const Eigen::MatrixXd p_scores = training_scores(model, train);
        const PredictionScores q_scores = predict(model, test.values());
        const auto nd = static_cast<double>(n);

        col.set(converged_id, rep, indicator(model.spectrum.converged));
        col.set(iterations_id, rep, model.spectrum.iterations);
        col.set(k_id, rep, static_cast<double>(model.k_spikes));
        for (Eigen::Index v = 0; v < std::min<Eigen::Index>(2, model.k()); ++v)
        {
            const auto& id = ids[static_cast<std::size_t>(v)];
            const auto& est = model.components[static_cast<std::size_t>(v)];

            col.set(id.evec_emp, rep, std::abs(model.eig.u(v, v)));
            const Eigen::VectorXd g = train.values().row(v).transpose() /
                                      std::sqrt(nd * 4.0 * lambdas[static_cast<std::size_t>(v)]);
            col.set(id.score_emp, rep, empirical_angle(g, p_scores.row(v).transpose()));
            const double ratio = empirical_shrinkage(p_scores.row(v).transpose(), q_scores.naive.row(v).transpose());
            col.set(id.shrink_emp, rep, ratio);
            col.set(id.lambda_hat, rep, model.spectrum.lambda_hat(v));
            if (est.spike)
            {
                col.set(id.evec_plug, rep, est.eigvec_angle);
                col.set(id.score_plug, rep, est.score_angle);
                col.set(id.shrink_plug, rep, est.shrinkage);
                const double adjusted = ratio * est.adjustment;
                col.set(id.closer, rep, indicator(std::abs(adjusted - 1.0) < std::abs(ratio - 1.0)));
            }
        }
    });

    ReportCell cell;
    cell.gamma = gamma;
    cell.n = n;
    cell.p = design.p;
    for (int v = 0; v < 2; ++v)
    {
        const double lambda = lambdas[static_cast<std::size_t>(v)];
        cell.rows.push_back({"lambda", v + 1, lambda, 0.0, 1});
        cell.rows.push_back({"evec_angle_theory", v + 1, eigenvector_angle(lambda, gamma), 0.0, 1});
        cell.rows.push_back({"score_angle_theory", v + 1, score_angle(lambda, gamma), 0.0, 1});
        cell.rows.push_back({"shrinkage_theory", v + 1, shrinkage_factor(lambda, gamma), 0.0, 1});
    }
    for (auto& s : col.summaries())
    {
        cell.rows.push_back(std::move(s));
    }
    return cell;
}

ReportCell run_table3_cell(const PcrCell& config, Eigen::Index p, std::size_t replicates, std::uint64_t seed,
                           std::uint64_t cell_index)
{
    Collector col(replicates);
    const std::size_t train_id = col.add("train_mse", 0);
    const std::size_t naive_id = col.add("test_mse_unadjusted", 0);
    const std::size_t adj_id = col.add("test_mse_adjusted", 0);
    const std::size_t better_id = col.add("adjusted_better", 0);
    const std::size_t shrink_id = col.add("shrinkage_plugin", 1);
    const std::size_t emp_id = col.add("shrinkage_empirical", 1);

    parallel_for(replicates, [&](std::size_t rep) {
        const std::uint64_t rep_key = (cell_index << 32) + rep;
        CounterRng x_train(seed, rep_key, kTrainStream);
        CounterRng y_train(seed, rep_key, kOutcomeTrainStream);
        CounterRng x_test(seed, rep_key, kTestStream);
        CounterRng y_test(seed, rep_key, kOutcomeTestStream);
        const PcrData train = gen_pcr(config.n, config.g, p, x_train, y_train);
        const PcrData test = gen_pcr(config.n, config.g, p, x_test, y_test);

        const FittedPcModel model = fit(train.x, {StandardizeMode::center, Eigen::Index{1}, {}});
        const Eigen::VectorXd p1 = training_scores(model, train.x).row(0).transpose();
        const PcrCoefficients coeffs = pcr_fit(p1, train.y);
        const PredictionScores q = predict(model, test.x.values());
        const Eigen::VectorXd q1 = q.naive.row(0).transpose();
        const Eigen::VectorXd q1_adj = q.adjusted.row(0).transpose();

        const double train_mse = mean_squared_error(train.y, pcr_predict(coeffs, p1));
        const double naive_mse = mean_squared_error(test.y, pcr_predict(coeffs, q1));
        const double adj_mse = mean_squared_error(test.y, pcr_predict(coeffs, q1_adj));
        col.set(train_id, rep, train_mse);
        col.set(naive_id, rep, naive_mse);
        col.set(adj_id, rep, adj_mse);
        col.set(better_id, rep, indicator(adj_mse < naive_mse));
        col.set(emp_id, rep, empirical_shrinkage(p1, q1));
        if (model.components[0].spike)
        {
            col.set(shrink_id, rep, model.components[0].shrinkage);
        }
    });

    ReportCell cell;
    cell.n = config.n;
    cell.g = config.g;
    cell.p = p;
    cell.gamma = static_cast<double>(p) / static_cast<double>(config.n);
    cell.rows = col.summaries();
    return cell;
}

}  // namespace

SimulationReport run_table12(const std::vector<double>& gammas, const std::vector<Eigen::Index>& ns,
                             std::size_t replicates, std::uint64_t seed)
{
    if (replicates < 1)
    {
        throw DomainError("replicates must be >= 1");
    }
    SimulationReport report{"table12", replicates, seed, {}};
    std::uint64_t cell_index = 0;
    for (double gamma : gammas)
    {
        for (Eigen::Index n : ns)
        {
            report.cells.push_back(run_table12_cell(gamma, n, replicates, seed, cell_index++));
        }
    }
    return report;
}

SimulationReport run_table3(const std::vector<PcrCell>& cells, std::size_t replicates, std::uint64_t seed,
                            Eigen::Index p)
{
    if (replicates < 1)
    {
        throw DomainError("replicates must be >= 1");
    }
    SimulationReport report{"table3", replicates, seed, {}};
    std::uint64_t cell_index = 0;
    for (const auto& c : cells)
    {
        report.cells.push_back(run_table3_cell(c, p, replicates, seed, cell_index++));
    }
    return report;
}

IntroResult run_intro(std::uint64_t seed, Eigen::Index p)
{
    const IntroData data = gen_intro(seed, 0, {50, 30, 20}, p);
    const FittedPcModel model = fit(data.train, {StandardizeMode::center, Eigen::Index{2}, {}});
    const Eigen::MatrixXd train_scores = training_scores(model, data.train);
    const PredictionScores test_scores = predict(model, data.test.values());

    IntroResult out;
    out.report.design = "intro";
    out.report.replicates = 1;
    out.report.seed = seed;
    ReportCell cell;
    cell.n = data.train.n();
    cell.p = p;
    cell.gamma = static_cast<double>(p) / static_cast<double>(cell.n);
    cell.rows.push_back({"k_spikes", 0, static_cast<double>(model.k_spikes), 0.0, 1});
    cell.rows.push_back({"converged", 0, indicator(model.spectrum.converged), 0.0, 1});
    for (Eigen::Index v = 0; v < model.k(); ++v)
    {
        const int pc = static_cast<int>(v) + 1;
        const auto& est = model.components[static_cast<std::size_t>(v)];
        const Eigen::VectorXd train_v = train_scores.row(v).transpose();
        cell.rows.push_back({"lambda_hat", pc, model.spectrum.lambda_hat(v), 0.0, 1});
        cell.rows.push_back({"rms_ratio_naive", pc,
                             empirical_shrinkage(train_v, test_scores.naive.row(v).transpose()), 0.0, 1});
        if (est.spike)
        {
            cell.rows.push_back({"shrinkage_plugin", pc, est.shrinkage, 0.0, 1});
            cell.rows.push_back({"score_angle_plugin", pc, est.score_angle, 0.0, 1});
            cell.rows.push_back({"rms_ratio_adjusted", pc,
                                 empirical_shrinkage(train_v, test_scores.adjusted.row(v).transpose()), 0.0, 1});
        }
    }
    out.report.cells.push_back(std::move(cell));

    const bool has_pc2 = model.k() > 1;
    for (Eigen::Index j = 0; j < data.train.n(); ++j)
    {
        const double pc2 = has_pc2 ? train_scores(1, j) : 0.0;
        out.scores.push_back({"train", data.train_labels[static_cast<std::size_t>(j)] + 1, train_scores(0, j), pc2,
                              train_scores(0, j), pc2});
    }
    for (Eigen::Index j = 0; j < data.test.n(); ++j)
    {
        out.scores.push_back({"test", data.test_labels[static_cast<std::size_t>(j)] + 1, test_scores.naive(0, j),
                              has_pc2 ? test_scores.naive(1, j) : 0.0, test_scores.adjusted(0, j),
                              has_pc2 ? test_scores.adjusted(1, j) : 0.0});
    }
    return out;
}

void write_intro_scores_csv(std::ostream& out, const std::vector<IntroScores>& scores)
{
    out << "set,stratum,pc1,pc2,pc1_adj,pc2_adj\n";
    for (const auto& s : scores)
    {
        fmt::print(out, "{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", s.set, s.stratum, s.pc1, s.pc2, s.pc1_adj,
                   s.pc2_adj);
    }
}

}  // namespace spca::sim
