#pragma once

#include <Eigen/Dense>
#include <cstdint>

namespace spca
{

// Counter-based generator: output i of a stream is a bijective mix of
// (key + i * golden), and the key is derived from (seed, replicate, stream).
// Streams are independent of execution order, so replicates can run in any
// order or in parallel and still produce identical draws.
class CounterRng
{
   public:
    CounterRng(std::uint64_t seed, std::uint64_t replicate, std::uint64_t stream);

    std::uint64_t next_u64() noexcept;
    // Uniform on the open interval (0, 1).
    double uniform() noexcept;
    // Standard normal by inverse CDF.
    double normal();

    void fill_normal(Eigen::Ref<Eigen::MatrixXd> out, double sd = 1.0);

    std::uint64_t key() const noexcept { return key_; }
    std::uint64_t counter() const noexcept { return counter_; }

   private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace spca
