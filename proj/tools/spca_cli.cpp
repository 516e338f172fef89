// spca: command-line front end.
//
// Exit codes: 0 success, 2 usage or input errors, 3 numerical failures.
// Data goes to stdout (or --out); diagnostics go to stderr.

#include <CLI11.hpp>
#include <fmt/core.h>
#include <fmt/ostream.h>

#include <charconv>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "spca/errors.h"
#include "spca/matrix_io.h"
#include "spca/model_io.h"
#include "spca/pc_model.h"
#include "spca/sim.h"
#include "spca/spiked.h"

namespace
{

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

// Output sink: a file when a path was given, otherwise stdout.
class Sink
{
   public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty())
        {
            file_.open(path, std::ios::binary);
            if (!file_)
            {
                throw spca::InputError(fmt::format("cannot open {} for writing", path));
            }
        }
    }
    std::ostream& stream() { return file_.is_open() ? static_cast<std::ostream&>(file_) : std::cout; }

   private:
    std::ofstream file_;
};

spca::Orientation orientation(bool samples_as_rows)
{
    return samples_as_rows ? spca::Orientation::rows_are_samples : spca::Orientation::rows_are_variables;
}

std::optional<Eigen::Index> parse_k(const std::string& k)
{
    if (k == "auto")
    {
        return std::nullopt;
    }
    long long value = 0;
    const auto [end, ec] = std::from_chars(k.data(), k.data() + k.size(), value);
    if (ec != std::errc{} || end != k.data() + k.size() || value < 1)
    {
        throw CLI::ValidationError("--k", "expected 'auto' or a positive integer, got '" + k + "'");
    }
    return static_cast<Eigen::Index>(value);
}

// Eigenvalues as one column or one row of a CSV file, optional header.
Eigen::VectorXd read_spectrum(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw spca::ParseError(fmt::format("cannot open {}", path), 0, 0);
    }
    std::vector<double> values;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line))
    {
        ++row;
        if (!line.empty() && line.back() == '\r')
        {
            line.pop_back();
        }
        if (line.empty())
        {
            continue;
        }
        std::stringstream cells(line);
        std::string cell;
        std::size_t col = 0;
        std::vector<double> parsed;
        bool numeric = true;
        while (std::getline(cells, cell, ','))
        {
            ++col;
            double v = 0.0;
            const auto [end, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (ec != std::errc{} || end != cell.data() + cell.size() || !std::isfinite(v))
            {
                if (row == 1 && values.empty() && col == 1)
                {
                    numeric = false;
                    break;
                }
                throw spca::ParseError(fmt::format("{}:{}:{}: not a number: '{}'", path, row, col, cell), row, col);
            }
            parsed.push_back(v);
        }
        if (numeric)
        {
            values.insert(values.end(), parsed.begin(), parsed.end());
        }
    }
    if (values.empty())
    {
        throw spca::EmptyInput(fmt::format("{} contains no eigenvalues", path));
    }
    return Eigen::Map<Eigen::VectorXd>(values.data(), static_cast<Eigen::Index>(values.size()));
}

std::vector<double> split_doubles(const std::string& list, const char* flag)
{
    std::vector<double> out;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        double v = 0.0;
        const auto [end, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc{} || end != item.data() + item.size())
        {
            throw CLI::ValidationError(flag, "bad number '" + item + "'");
        }
        out.push_back(v);
    }
    if (out.empty())
    {
        throw CLI::ValidationError(flag, "empty list");
    }
    return out;
}

std::vector<Eigen::Index> split_ints(const std::string& list, const char* flag)
{
    std::vector<Eigen::Index> out;
    for (double v : split_doubles(list, flag))
    {
        if (v != std::floor(v) || v < 1)
        {
            throw CLI::ValidationError(flag, fmt::format("expected positive integers, got {}", v));
        }
        out.push_back(static_cast<Eigen::Index>(v));
    }
    return out;
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

std::string cell_or_na(bool ok, double v) { return ok ? fmt::format("{:.17g}", v) : "na"; }

// ---------------------------------------------------------------------------

struct FitArgs
{
    std::string matrix;
    bool samples_as_rows = false;
    std::string mode = "center";
    std::string k = "auto";
    std::string out;
};

void run_fit(const FitArgs& a)
{
    const auto x = spca::read_matrix(a.matrix, orientation(a.samples_as_rows));
    spca::FitOptions options;
    options.mode = spca::parse_standardize_mode(a.mode);
    options.k = parse_k(a.k);
    const auto model = spca::fit(x, options);
    if (!a.out.empty())
    {
        spca::write_model(a.out, model);
    }
    auto& os = std::cout;
    os << "v,d,d_hat,lambda_hat,spike,shrinkage,score_angle,evec_angle\n";
    for (Eigen::Index v = 0; v < model.k(); ++v)
    {
        const auto& c = model.components[static_cast<std::size_t>(v)];
        fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{},{},{},{}\n", v + 1, model.eig.d(v), model.spectrum.d_hat(v),
                   model.spectrum.lambda_hat(v), yes_no(c.spike), cell_or_na(c.spike, c.shrinkage),
                   cell_or_na(c.spike, c.score_angle), cell_or_na(c.spike, c.eigvec_angle));
    }
    fmt::print(stderr, "p={} n={} gamma={:.17g} k_spikes={} iterations={} converged={}\n", model.p(), model.n(),
               model.gamma(), model.k_spikes, model.spectrum.iterations, yes_no(model.spectrum.converged));
}

struct PredictArgs
{
    std::string model;
    std::string matrix;
    bool samples_as_rows = false;
    std::string adjusted = "both";
    std::string out;
};

void run_predict(const PredictArgs& a)
{
    const auto model = spca::read_model(std::filesystem::path(a.model));
    const auto x = spca::read_matrix(a.matrix, orientation(a.samples_as_rows));
    const auto scores = spca::predict(model, x.values());
    const bool naive = a.adjusted != "on";
    const bool adjusted = a.adjusted != "off";

    Sink sink(a.out);
    auto& os = sink.stream();
    os << "sample,pc" << (naive ? ",naive" : "") << (adjusted ? ",adjusted" : "") << ",identifiable\n";
    for (Eigen::Index j = 0; j < scores.naive.cols(); ++j)
    {
        for (Eigen::Index v = 0; v < scores.naive.rows(); ++v)
        {
            fmt::print(os, "{},{}", j + 1, v + 1);
            if (naive)
            {
                fmt::print(os, ",{:.17g}", scores.naive(v, j));
            }
            if (adjusted)
            {
                fmt::print(os, ",{:.17g}", scores.adjusted(v, j));
            }
            fmt::print(os, ",{}\n", yes_no(scores.identifiable[static_cast<std::size_t>(v)]));
        }
    }
}

struct RescaleArgs
{
    std::string spectrum;
    Eigen::Index p = 0;
    Eigen::Index n = 0;
    std::optional<double> gamma;
    double tol = 1e-10;
    int max_iter = 500;
    std::string out;
};

void run_rescale(const RescaleArgs& a)
{
    const Eigen::VectorXd d = read_spectrum(a.spectrum);
    spca::RescaleOptions options;
    options.tol = a.tol;
    options.max_iter = a.max_iter;
    options.gamma = a.gamma;
    const auto rs = spca::rescale_eigenvalues(d, a.p, a.n, options);

    Sink sink(a.out);
    auto& os = sink.stream();
    os << "v,d,r,d_hat,lambda_hat,spike\n";
    for (Eigen::Index v = 0; v < d.size(); ++v)
    {
        fmt::print(os, "{},{:.17g},{:.17g},{:.17g},{:.17g},{}\n", v + 1, d(v), rs.r(v), rs.d_hat(v), rs.lambda_hat(v),
                   yes_no(v < rs.k));
    }
    fmt::print(stderr, "k={} tau={:.17g} gamma={:.17g} iterations={} converged={} bisection={}\n", rs.k, rs.tau,
               rs.gamma, rs.iterations, yes_no(rs.converged), yes_no(rs.used_bisection));
    if (!rs.converged)
    {
        throw spca::NumericalFailure(fmt::format("rescaling did not converge in {} iterations", a.max_iter));
    }
}

struct JackknifeArgs
{
    std::string matrix;
    bool samples_as_rows = false;
    std::string mode = "center";
    int pc = 1;
};

void run_jackknife(const JackknifeArgs& a)
{
    const auto x = spca::read_matrix(a.matrix, orientation(a.samples_as_rows));
    const auto mode = spca::parse_standardize_mode(a.mode);
    const auto v = static_cast<Eigen::Index>(a.pc - 1);
    const auto jk = spca::jackknife_shrinkage(x, mode, v);
    const auto model = spca::fit(x, {mode, v + 1, {}});
    std::cout << "pc,jackknife,plugin,used,excluded\n";
    fmt::print(std::cout, "{},{:.17g},{:.17g},{},{}\n", a.pc, jk.shrinkage,
               model.components[static_cast<std::size_t>(v)].shrinkage, jk.used, jk.excluded);
}

struct SimulateArgs
{
    std::string design;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicates;
    std::string gammas = "1,20,100";
    std::string ns;
    std::string gs = "150,300,500,1000";
    Eigen::Index p = 5000;
    std::string out;
    std::string text;
    std::string scores;
};

void run_simulate(const SimulateArgs& a)
{
    const std::uint64_t seed = *a.seed;
    spca::sim::SimulationReport report;
    std::vector<spca::sim::IntroScores> scores;
    if (a.design == "intro")
    {
        auto result = spca::sim::run_intro(seed, a.p);
        report = std::move(result.report);
        scores = std::move(result.scores);
    }
    else if (a.design == "table12")
    {
        const auto ns = split_ints(a.ns.empty() ? "100,200" : a.ns, "--n");
        report = spca::sim::run_table12(split_doubles(a.gammas, "--gamma"), ns, a.replicates.value_or(200), seed);
    }
    else
    {
        std::vector<spca::sim::PcrCell> cells;
        for (Eigen::Index n : split_ints(a.ns.empty() ? "100,200" : a.ns, "--n"))
        {
            for (Eigen::Index g : split_ints(a.gs, "--g"))
            {
                cells.push_back({n, g});
            }
        }
        report = spca::sim::run_table3(cells, a.replicates.value_or(100), seed, a.p);
    }

    {
        Sink sink(a.out);
        spca::sim::write_report_csv(sink.stream(), report);
    }
    if (!a.text.empty())
    {
        Sink sink(a.text);
        spca::sim::write_report_text(sink.stream(), report);
    }
    if (!a.scores.empty())
    {
        if (a.design != "intro")
        {
            throw spca::InputError("--scores is only available for the intro design");
        }
        Sink sink(a.scores);
        spca::sim::write_intro_scores_csv(sink.stream(), scores);
    }
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Spiked-covariance PCA: fit, predict and de-bias PC scores"};
    app.require_subcommand(1);

    const std::vector<std::string> modes = {"none", "center", "center-scale"};

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Fit a PC model and print per-component estimates");
    fit->add_option("matrix", fit_args.matrix, "CSV data matrix (rows are variables)")->required();
    fit->add_flag("--samples-as-rows", fit_args.samples_as_rows, "Rows of the CSV are samples");
    fit->add_option("--mode", fit_args.mode, "Standardization")->check(CLI::IsMember(modes))->capture_default_str();
    fit->add_option("--k", fit_args.k, "Components to retain: auto or N")->capture_default_str();
    fit->add_option("--out", fit_args.out, "Model file to write");

    PredictArgs predict_args;
    auto* predict = app.add_subcommand("predict", "Score new samples with a fitted model");
    predict->add_option("model", predict_args.model, "Model file from 'fit'")->required();
    predict->add_option("matrix", predict_args.matrix, "CSV of new samples (rows are variables)")->required();
    predict->add_flag("--samples-as-rows", predict_args.samples_as_rows, "Rows of the CSV are samples");
    predict->add_option("--adjusted", predict_args.adjusted, "Score columns to emit")
        ->check(CLI::IsMember({"on", "off", "both"}))
        ->capture_default_str();
    predict->add_option("--out", predict_args.out, "Output CSV (default stdout)");

    RescaleArgs rescale_args;
    auto* rescale = app.add_subcommand("rescale", "Rescale an externally computed sample spectrum");
    rescale->add_option("eigenvalues", rescale_args.spectrum, "CSV with all min(p,n) eigenvalues")->required();
    rescale->add_option("--p", rescale_args.p, "Number of variables")->required()->check(CLI::PositiveNumber);
    rescale->add_option("--n", rescale_args.n, "Number of samples")->required()->check(CLI::PositiveNumber);
    rescale->add_option("--gamma", rescale_args.gamma, "Override the aspect ratio p/n")
        ->check(CLI::PositiveNumber);
    rescale->add_option("--tol", rescale_args.tol, "Convergence tolerance relative to p")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rescale->add_option("--max-iter", rescale_args.max_iter, "Iteration limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    rescale->add_option("--out", rescale_args.out, "Output CSV (default stdout)");

    JackknifeArgs jk_args;
    auto* jackknife = app.add_subcommand("jackknife", "Leave-one-out shrinkage estimate for one component");
    jackknife->add_option("matrix", jk_args.matrix, "CSV data matrix (rows are variables)")->required();
    jackknife->add_flag("--samples-as-rows", jk_args.samples_as_rows, "Rows of the CSV are samples");
    jackknife->add_option("--mode", jk_args.mode, "Standardization")
        ->check(CLI::IsMember(modes))
        ->capture_default_str();
    jackknife->add_option("--pc", jk_args.pc, "Component, 1-based")->check(CLI::PositiveNumber)->capture_default_str();

    SimulateArgs sim_args;
    auto* simulate = app.add_subcommand("simulate", "Run a seeded simulation study");
    simulate->add_option("design", sim_args.design, "intro, table12 or table3")
        ->required()
        ->check(CLI::IsMember({"intro", "table12", "table3"}));
    simulate->add_option("--seed", sim_args.seed, "Master seed")->required();
    simulate->add_option("--replicates", sim_args.replicates, "Replicates per cell (200 table12, 100 table3)")
        ->check(CLI::PositiveNumber);
    simulate->add_option("--gamma", sim_args.gammas, "table12: comma-separated aspect ratios")->capture_default_str();
    simulate->add_option("--n", sim_args.ns, "table12/table3: comma-separated sample sizes (default 100,200)");
    simulate->add_option("--g", sim_args.gs, "table3: comma-separated signal gene counts")->capture_default_str();
    simulate->add_option("--p", sim_args.p, "intro/table3: number of variables")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    simulate->add_option("--out", sim_args.out, "Report CSV (default stdout)");
    simulate->add_option("--text", sim_args.text, "Human-readable summary file");
    simulate->add_option("--scores", sim_args.scores, "intro: score dump CSV");

    try
    {
        app.parse(argc, argv);
        if (fit->parsed())
        {
            run_fit(fit_args);
        }
        else if (predict->parsed())
        {
            run_predict(predict_args);
        }
        else if (rescale->parsed())
        {
            run_rescale(rescale_args);
        }
        else if (jackknife->parsed())
        {
            run_jackknife(jk_args);
        }
        else if (simulate->parsed())
        {
            run_simulate(sim_args);
        }
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }
    catch (const spca::InputError& e)
    {
        fmt::print(stderr, "spca: {}\n", e.what());
        return kExitUsage;
    }
    catch (const spca::NumericalFailure& e)
    {
        fmt::print(stderr, "spca: {}\n", e.what());
        return kExitNumerical;
    }
    catch (const std::exception& e)
    {
        fmt::print(stderr, "spca: internal error: {}\n", e.what());
        return 1;
    }
    std::cout.flush();
    return 0;
}
