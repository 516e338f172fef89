#pragma once

#include <Eigen/Dense>
#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "spca/matrix_io.h"
#include "spca/rng.h"

namespace spca::sim
{

// Stream ids within one replicate.
enum Stream : std::uint64_t
{
    kTrainStream = 0,
    kTestStream = 1,
    kMeanStream = 2,
    kOutcomeTrainStream = 3,
    kOutcomeTestStream = 4,
};

// ---------------------------------------------------------------------------
// Generators

struct IntroData
{
    DataMatrix train;
    DataMatrix test;
    std::vector<int> train_labels;  // 0-based stratum per column
    std::vector<int> test_labels;
    Eigen::MatrixXd stratum_means;  // p x 3, shared by train and test
};

// Three strata with mean entries drawn from {-0.3, 0, 0.3} and N(mu_k, 4 I)
// samples. Train and test have the same sizes and share the stratum means.
IntroData gen_intro(std::uint64_t seed,
                    std::uint64_t replicate = 0,
                    std::array<Eigen::Index, 3> n_per_stratum = {50, 30, 20},
                    Eigen::Index p = 5000);

struct TwoSpikeDesign
{
    double gamma;
    Eigen::Index n;
    Eigen::Index p;
    double lambda1;  // 4 (1 + sqrt(gamma))
    double lambda2;  // 2 (1 + sqrt(gamma))
};

TwoSpikeDesign two_spike_design(Eigen::Index n, double gamma);

// Rows 1 and 2 are 2 sqrt(lambda) z, the rest 2 z, so the covariance is
// 4 diag(lambda1, lambda2, 1, ..., 1).
DataMatrix gen_two_spike(const TwoSpikeDesign& design, CounterRng& rng);
DataMatrix gen_two_spike(Eigen::Index n, double gamma, std::uint64_t seed);

struct PcrData
{
    DataMatrix x;
    Eigen::VectorXd y;
};

// First g genes shift from 3 to 4 between the two halves of the samples,
// the rest sit at 3.5; noise N(0, 4). y_j = (2/g) sum_{i<g} x_ij + N(0, 1).
PcrData gen_pcr(Eigen::Index n, Eigen::Index g, Eigen::Index p, CounterRng& x_rng, CounterRng& y_rng);
PcrData gen_pcr(Eigen::Index n, Eigen::Index g, std::uint64_t seed, Eigen::Index p = 5000);

// ---------------------------------------------------------------------------
// Empirical estimators

// sqrt(sum q^2 / sum p^2): test scores q against training scores p.
double empirical_shrinkage(const Eigen::Ref<const Eigen::VectorXd>& train_scores,
                           const Eigen::Ref<const Eigen::VectorXd>& test_scores);

// |<u, e>| after normalizing both vectors.
double empirical_angle(const Eigen::Ref<const Eigen::VectorXd>& u, const Eigen::Ref<const Eigen::VectorXd>& e);

// ---------------------------------------------------------------------------
// Reports

struct EstimatorSummary
{
    std::string estimator;
    int pc = 0;  // 1-based component, 0 for component-free rows
    double mean = 0.0;
    double sd = 0.0;
    std::size_t count = 0;
};

struct ReportCell
{
    double gamma = 0.0;
    Eigen::Index n = 0;
    Eigen::Index p = 0;
    Eigen::Index g = 0;  // pcr design only
    std::vector<EstimatorSummary> rows;

    // nullptr when absent.
    const EstimatorSummary* find(std::string_view estimator, int pc) const;
};

struct SimulationReport
{
    std::string design;
    std::size_t replicates = 0;
    std::uint64_t seed = 0;
    std::vector<ReportCell> cells;
};

// Mean with Kahan summation in index order, sample SD (0 for one value).
EstimatorSummary summarize(std::string estimator, int pc, const std::vector<double>& values);

// design,gamma,n,p,g,estimator,pc,mean,sd,count
void write_report_csv(std::ostream& out, const SimulationReport& report);
void write_report_text(std::ostream& out, const SimulationReport& report);

// ---------------------------------------------------------------------------
// Experiment drivers

SimulationReport run_table12(const std::vector<double>& gammas,
                             const std::vector<Eigen::Index>& ns,
                             std::size_t replicates,
                             std::uint64_t seed);

struct PcrCell
{
    Eigen::Index n;
    Eigen::Index g;
};

SimulationReport run_table3(const std::vector<PcrCell>& cells,
                            std::size_t replicates,
                            std::uint64_t seed,
                            Eigen::Index p = 5000);

struct IntroScores
{
    std::string set;  // "train" or "test"
    int stratum;      // 1-based
    double pc1, pc2, pc1_adj, pc2_adj;
};

struct IntroResult
{
    SimulationReport report;
    std::vector<IntroScores> scores;
};

IntroResult run_intro(std::uint64_t seed, Eigen::Index p = 5000);

// set,stratum,pc1,pc2,pc1_adj,pc2_adj
void write_intro_scores_csv(std::ostream& out, const std::vector<IntroScores>& scores);

}  // namespace spca::sim
