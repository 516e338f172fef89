#pragma once

#include <filesystem>
#include <iosfwd>

#include "spca/pc_model.h"

namespace spca
{

inline constexpr int kModelFormatVersion = 1;

// Line-oriented sections: [meta], [means], [scales], [eigenvalues]
// (d d_hat lambda_hat per line), one [eigenvectors] section per retained
// vector, and [adjustment] (shrinkage score_angle eigvec_angle, or "na" for
// components that are not identifiable). All reals use 17 significant digits
// so a read reproduces every double exactly.
void write_model(std::ostream& out, const FittedPcModel& model);
void write_model(const std::filesystem::path& path, const FittedPcModel& model);

FittedPcModel read_model(std::istream& in);
FittedPcModel read_model(const std::filesystem::path& path);

}  // namespace spca
