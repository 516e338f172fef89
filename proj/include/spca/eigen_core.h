#pragma once

#include <Eigen/Dense>

#include "spca/matrix_io.h"

namespace spca
{

// Eigenpairs of S = X X^T / n.
struct SampleEigen
{
    // All min(p, n) eigenvalues, non-increasing; values below 1e-12 * d(0)
    // are clamped to zero.
    Eigen::VectorXd d;
    // p x k retained eigenvectors. Columns for clamped eigenvalues are never
    // returned, so k can be smaller than requested on rank-deficient input.
    Eigen::MatrixXd u;
    double gamma = 0.0;
    Eigen::Index n = 0;

    Eigen::Index p() const noexcept { return u.rows(); }
    Eigen::Index k() const noexcept { return u.cols(); }
};

// Decomposes through the n x n Gram matrix when p > n. Each retained
// eigenvector has its largest-magnitude entry positive (first index on ties).
SampleEigen sample_eigen(const DataMatrix& x, Eigen::Index k);

// Only the eigenvalues; cheaper when no eigenvectors are needed.
Eigen::VectorXd sample_eigenvalues(const DataMatrix& x);

// Row v is u_v^T X. With `normalized`, row v is divided by sqrt(n d_v).
Eigen::MatrixXd pc_scores(const DataMatrix& x, const SampleEigen& eig, bool normalized = false);

// q_v = u_v^T x_new for an already preprocessed sample.
Eigen::VectorXd project_new(const Eigen::Ref<const Eigen::VectorXd>& x_new, const SampleEigen& eig);

// Flips sign so the entry of largest absolute value is positive.
void fix_sign(Eigen::Ref<Eigen::VectorXd> v);

}  // namespace spca
