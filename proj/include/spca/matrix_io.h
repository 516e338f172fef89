#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string_view>
#include <utility>

namespace spca
{

// p x n matrix of finite reals; rows are variables, columns are samples.
class DataMatrix
{
   public:
    DataMatrix() = default;
    explicit DataMatrix(Eigen::MatrixXd values);

    Eigen::Index p() const noexcept { return values_.rows(); }
    Eigen::Index n() const noexcept { return values_.cols(); }
    const Eigen::MatrixXd& values() const noexcept { return values_; }

    // Copy without column j (leave-one-out helper).
    DataMatrix without_column(Eigen::Index j) const;

   private:
    Eigen::MatrixXd values_;
};

enum class Orientation
{
    rows_are_variables,
    rows_are_samples,
};

enum class HeaderMode
{
    detect,   // first line is a header iff none of its cells parse as numbers
    present,
    absent,
};

enum class StandardizeMode
{
    none,
    center,
    center_scale,
};

std::string_view to_string(StandardizeMode mode);
// Accepts "none", "center", "center_scale" and "center-scale".
StandardizeMode parse_standardize_mode(std::string_view text);

struct Preprocessing
{
    StandardizeMode mode = StandardizeMode::none;
    Eigen::VectorXd means;
    Eigen::VectorXd scales;

    static Preprocessing identity(Eigen::Index p);
    Eigen::Index p() const noexcept { return means.size(); }
};

DataMatrix read_matrix(const std::filesystem::path& path,
                       Orientation orientation = Orientation::rows_are_variables,
                       HeaderMode header = HeaderMode::detect);

// Row-major CSV at 17 significant digits, no header.
void write_matrix(const std::filesystem::path& path,
                  const Eigen::MatrixXd& values,
                  Orientation orientation = Orientation::rows_are_variables);

// Row statistics use divisor n, matching S = X X^T / n.
std::pair<DataMatrix, Preprocessing> standardize(const DataMatrix& x,
                                                 StandardizeMode mode);

Eigen::VectorXd apply_preprocessing(const Eigen::Ref<const Eigen::VectorXd>& x_new,
                                    const Preprocessing& prep);

Eigen::MatrixXd apply_preprocessing_columns(const Eigen::Ref<const Eigen::MatrixXd>& x_new,
                                            const Preprocessing& prep);

}  // namespace spca
