#include "spca/rng.h"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>

namespace spca
{

namespace
{
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x) noexcept
{
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream)
    : key_(mix64(mix64(mix64(seed + kGolden) + replicate) ^ (stream * kGolden + 0x632BE59BD9B4E019ULL)))
{
}

std::uint64_t CounterRng::next_u64() noexcept
{
    ++counter_;
    return mix64(key_ + counter_ * kGolden);
}

double CounterRng::uniform() noexcept
{
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::normal()
{
    return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * uniform());
}

void CounterRng::fill_normal(Eigen::Ref<Eigen::MatrixXd> out, double sd)
{
    for (Eigen::Index j = 0; j < out.cols(); ++j)
    {
        for (Eigen::Index i = 0; i < out.rows(); ++i)
        {
            out(i, j) = sd * normal();
        }
    }
}

}  // namespace spca
