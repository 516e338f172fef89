#include "spca/eigen_core.h"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "spca/errors.h"

namespace spca
{

namespace
{

constexpr double kRelativeRankFloor = 1e-12;

struct Decomposition
{
    Eigen::VectorXd d;        // descending, clamped
    Eigen::MatrixXd basis;    // eigenvectors of whichever matrix was decomposed
    bool gram = false;
};

// p <= n: eigen of X X^T / n (p x p). p > n: eigen of X^T X / n (n x n).
Decomposition decompose(const DataMatrix& x, bool with_vectors)
{
    const Eigen::MatrixXd& xv = x.values();
    const auto n = static_cast<double>(x.n());
    const bool gram = x.p() > x.n();
    const Eigen::Index m = gram ? x.n() : x.p();

    Eigen::MatrixXd cross = Eigen::MatrixXd::Zero(m, m);
    if (gram)
    {
        cross.selfadjointView<Eigen::Lower>().rankUpdate(xv.transpose(), 1.0 / n);
    }
    else
    {
        cross.selfadjointView<Eigen::Lower>().rankUpdate(xv, 1.0 / n);
    }

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(
        cross, with_vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
    {
        throw NumericalError("symmetric eigensolver did not converge");
    }

    Decomposition out;
    out.gram = gram;
    out.d = solver.eigenvalues().reverse();
    if (!(out.d(0) > 0.0))
    {
        throw DegenerateMatrix("data matrix is identically zero");
    }
    const double floor = kRelativeRankFloor * out.d(0);
    for (Eigen::Index v = 0; v < m; ++v)
    {
        if (out.d(v) < floor)
        {
            out.d(v) = 0.0;
        }
    }
    if (with_vectors)
    {
        out.basis = solver.eigenvectors().rowwise().reverse();
    }
    return out;
}

}  // namespace

void fix_sign(Eigen::Ref<Eigen::VectorXd> v)
{
    Eigen::Index best = 0;
    double best_abs = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i)
    {
        const double a = std::abs(v(i));
        if (a > best_abs)
        {
            best_abs = a;
            best = i;
        }
    }
    if (v(best) < 0.0)
    {
        v = -v;
    }
}

Eigen::VectorXd sample_eigenvalues(const DataMatrix& x)
{
    return decompose(x, false).d;
}

SampleEigen sample_eigen(const DataMatrix& x, Eigen::Index k)
{
    const Eigen::Index max_k = std::min(x.p(), x.n());
    if (k < 1 || k > max_k)
    {
        throw DimensionError(fmt::format("requested {} components, valid range is 1..{}", k, max_k));
    }
    Decomposition dec = decompose(x, true);

    Eigen::Index kept = 0;
    while (kept < k && dec.d(kept) > 0.0)
    {
        ++kept;
    }

    SampleEigen out;
    out.d = dec.d;
    out.gamma = static_cast<double>(x.p()) / static_cast<double>(x.n());
    out.n = x.n();
    if (dec.gram)
    {
        const auto n = static_cast<double>(x.n());
        out.u = x.values() * dec.basis.leftCols(kept);
        for (Eigen::Index v = 0; v < kept; ++v)
        {
            out.u.col(v) /= std::sqrt(n * dec.d(v));
        }
    }
    else
    {
        out.u = dec.basis.leftCols(kept);
    }
    for (Eigen::Index v = 0; v < kept; ++v)
    {
        fix_sign(out.u.col(v));
    }
    return out;
}

Eigen::MatrixXd pc_scores(const DataMatrix& x, const SampleEigen& eig, bool normalized)
{
    if (x.p() != eig.p())
    {
        throw DimensionError(fmt::format("data has {} variables, eigenvectors have {}", x.p(), eig.p()));
    }
    Eigen::MatrixXd scores = eig.u.transpose() * x.values();
    if (normalized)
    {
        const auto n = static_cast<double>(x.n());
        for (Eigen::Index v = 0; v < scores.rows(); ++v)
        {
            scores.row(v) /= std::sqrt(n * eig.d(v));
        }
    }
    return scores;
}

Eigen::VectorXd project_new(const Eigen::Ref<const Eigen::VectorXd>& x_new, const SampleEigen& eig)
{
    if (x_new.size() != eig.p())
    {
        throw DimensionError(fmt::format("sample has {} variables, eigenvectors have {}", x_new.size(), eig.p()));
    }
    return eig.u.transpose() * x_new;
}

}  // namespace spca
