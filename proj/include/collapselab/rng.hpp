#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <random>

namespace collapselab {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Derives an independent stream seed from (base, stream, index).
///
/// Every parallel unit of work (a Monte Carlo trial, a sampling chain, a
/// per-sample encoding) gets its own seed through this function, so results
/// never depend on how work is partitioned across threads.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream,
                                 std::uint64_t index = 0, std::uint64_t sub = 0) {
    std::uint64_t h = mix64(base ^ 0x243f6a8885a308d3ULL);
    h = mix64(h ^ stream);
    h = mix64(h ^ index);
    h = mix64(h ^ sub);
    return h;
}

/// Fixed stream tags for seed derivation.
namespace stream {
inline constexpr std::uint64_t kInitReal      = 0x01;
inline constexpr std::uint64_t kReference     = 0x02;
inline constexpr std::uint64_t kHeldOut       = 0x03;
inline constexpr std::uint64_t kSynth         = 0x04;
inline constexpr std::uint64_t kFreshReal     = 0x05;
inline constexpr std::uint64_t kEval          = 0x06;
inline constexpr std::uint64_t kSubset        = 0x07;
inline constexpr std::uint64_t kFilter        = 0x08;
inline constexpr std::uint64_t kScan          = 0x09;
inline constexpr std::uint64_t kTrial         = 0x0a;
inline constexpr std::uint64_t kChain         = 0x0b;
inline constexpr std::uint64_t kPair          = 0x0c;
inline constexpr std::uint64_t kKmeans        = 0x0d;
inline constexpr std::uint64_t kGroundTruth   = 0x0e;
inline constexpr std::uint64_t kEncode        = 0x0f;
inline constexpr std::uint64_t kProbe         = 0x10;
} // namespace stream

/// Seeded random source. One instance per independent unit of work.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }

    /// Uniform integer in [0, n).
    std::size_t index(std::size_t n) {
        return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
    }

    Vector gaussian_vector(Eigen::Index d) {
        Vector v(d);
        for (Eigen::Index i = 0; i < d; ++i) v[i] = gaussian();
        return v;
    }

    /// Column-by-column fill, so a d x n draw equals n consecutive vector draws.
    Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols) {
        Matrix m(rows, cols);
        for (Eigen::Index j = 0; j < cols; ++j)
            for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = gaussian();
        return m;
    }

    std::mt19937_64& engine() { return engine_; }

  private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace collapselab
