#pragma once

#include "collapselab/rng.hpp"

#include <cstdint>
#include <string>

namespace collapselab {

/// Zero-mean Gaussian with covariance U U^T + sigma^2 I: a rank-r subspace
/// plus isotropic noise. The ground-truth class model of the two-class theory.
struct NoisyLowRankGaussian {
    int d = 0;
    int r = 0;
    Matrix basis;  // d x r, orthonormal columns
    double sigma = 0.0;

    /// Throws InvalidInputError unless r < d, sigma > 0 and the basis is
    /// orthonormal within 1e-10.
    void validate() const;

    Matrix covariance() const { return basis * basis.transpose() + sigma * sigma * Matrix::Identity(d, d); }
};

/// Two class models over a shared ambient space with controlled geometry.
enum class PairConstruction { Angled, Equicosine };

struct SubspacePair {
    NoisyLowRankGaussian model0;
    NoisyLowRankGaussian model1;
    PairConstruction construction = PairConstruction::Angled;
    double parameter = 0.0;  // theta for Angled, c for Equicosine
};

/// Pair whose principal angles are all exactly theta:
/// v_i = cos(theta) u_i + sin(theta) w_i with {u_i} u {w_i} orthonormal.
/// Requires d >= 2r.
SubspacePair make_angled_pair(int d, int r, double theta, double sigma, std::uint64_t seed);

/// Pair with every entry of U0^T U1 equal to c (so the Theorem-1 cosine
/// range collapses to cos(theta~) = c with l = 1). U0 spans the first r
/// coordinates; the complement rows of U1 carry a factor of the Gram
/// system G = I - r c^2 J. Requires d >= 2r and 0 <= c <= 1/r.
SubspacePair make_equicosine_pair(int d, int r, double c, double sigma, std::uint64_t seed);

/// n columns h = U z + sigma * eps, z ~ N(0, I_r), eps ~ N(0, I_d).
Matrix sample(const NoisyLowRankGaussian& model, int n, std::uint64_t seed);

/// Log-likelihood ratio of class 1 over class 0 at h, in the closed
/// projection form g(h) = C3 (|P1 h|^2 - |P0 h|^2), C3 = 1/(2 sigma^2 (sigma^2+1)).
/// The determinant terms cancel because both covariances share a spectrum.
double loglik_ratio(const SubspacePair& pair, const Vector& h);

/// Posterior the Bayes classifier puts on class 1: sigmoid(g(h)).
double bayes_confidence(const SubspacePair& pair, const Vector& h);

struct MonteCarloEstimate {
    double mean = 0.0;
    double stderr_ = 0.0;
    int trials = 0;
};

/// Monte Carlo estimate of xi(theta) = E[sigmoid(g(h)) | y=1] over the
/// angled pair with the given geometry. Trials use per-index sub-seeds and
/// may be partitioned across workers without changing the result.
MonteCarloEstimate expected_confidence(int d, int r, double sigma, double theta,
                                       int trials, std::uint64_t seed, unsigned workers = 1);

} // namespace collapselab
