#include "collapselab/subspace.hpp"

#include "collapselab/errors.hpp"
#include "collapselab/numerics.hpp"
#include "collapselab/parallel.hpp"
#include "collapselab/stats.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <vector>

namespace collapselab {

void NoisyLowRankGaussian::validate() const {
    if (d < 2 || r < 1 || r >= d)
        throw InvalidInputError("NoisyLowRankGaussian: need 1 <= r < d");
    if (!(sigma > 0.0)) throw InvalidInputError("NoisyLowRankGaussian: sigma must be > 0");
    if (basis.rows() != d || basis.cols() != r)
        throw InvalidInputError("NoisyLowRankGaussian: basis shape mismatch");
    const Matrix gram = basis.transpose() * basis;
    if ((gram - Matrix::Identity(r, r)).cwiseAbs().maxCoeff() > 1e-10)
        throw InvalidInputError("NoisyLowRankGaussian: basis not orthonormal");
}

SubspacePair make_angled_pair(int d, int r, double theta, double sigma, std::uint64_t seed) {
    if (d < 2 * r) throw InvalidInputError("make_angled_pair: need d >= 2r");
    if (theta < 0.0 || theta > M_PI_2 + 1e-12)
        throw InvalidInputError("make_angled_pair: theta must lie in [0, pi/2]");
    const Matrix frame = random_orthonormal(d, 2 * r, derive_seed(seed, stream::kPair));
    const Matrix u = frame.leftCols(r);
    const Matrix w = frame.rightCols(r);
    SubspacePair pair;
    pair.construction = PairConstruction::Angled;
    pair.parameter = theta;
    pair.model0 = {d, r, u, sigma};
    pair.model1 = {d, r, std::cos(theta) * u + std::sin(theta) * w, sigma};
    pair.model0.validate();
    pair.model1.validate();
    return pair;
}

SubspacePair make_equicosine_pair(int d, int r, double c, double sigma, std::uint64_t seed) {
    if (d < 2 * r) throw InvalidInputError("make_equicosine_pair: need d >= 2r");
    if (c < 0.0) throw InvalidInputError("make_equicosine_pair: c must be >= 0");
    if (c > 1.0 / r + 1e-12)
        throw InfeasibleError("make_equicosine_pair: c > 1/r makes the Gram system indefinite");

    Matrix u0 = Matrix::Zero(d, r);
    u0.topRows(r).setIdentity();

    // U1 = [cJ; B] with B^T B = G = I - r c^2 J; G is PSD exactly when c <= 1/r.
    const Matrix ones = Matrix::Ones(r, r);
    const Matrix gram = Matrix::Identity(r, r) - (r * c * c) * ones;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
    Vector lam = eig.eigenvalues();
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -1e-12) throw InfeasibleError("make_equicosine_pair: Gram system not PSD");
        lam[i] = std::sqrt(std::max(0.0, lam[i]));
    }
    const Matrix gram_root = eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
    const Matrix q = random_orthonormal(d - r, r, derive_seed(seed, stream::kPair));

    Matrix u1 = Matrix::Zero(d, r);
    u1.topRows(r) = c * ones;
    u1.bottomRows(d - r) = q * gram_root;

    SubspacePair pair;
    pair.construction = PairConstruction::Equicosine;
    pair.parameter = c;
    pair.model0 = {d, r, u0, sigma};
    pair.model1 = {d, r, u1, sigma};
    pair.model0.validate();
    pair.model1.validate();
    return pair;
}

Matrix sample(const NoisyLowRankGaussian& model, int n, std::uint64_t seed) {
    if (n < 1) throw InvalidInputError("sample: need n >= 1");
    Rng rng(seed);
    const Matrix z = rng.gaussian_matrix(model.r, n);
    const Matrix eps = rng.gaussian_matrix(model.d, n);
    return model.basis * z + model.sigma * eps;
}

double loglik_ratio(const SubspacePair& pair, const Vector& h) {
    const double sigma = pair.model1.sigma;
    if (sigma == 0.0) throw InvalidInputError("loglik_ratio: sigma = 0 makes C3 undefined");
    const double c3 = 1.0 / (2.0 * sigma * sigma * (sigma * sigma + 1.0));
    const double p1 = (pair.model1.basis.transpose() * h).squaredNorm();
    const double p0 = (pair.model0.basis.transpose() * h).squaredNorm();
    return c3 * (p1 - p0);
}

double bayes_confidence(const SubspacePair& pair, const Vector& h) {
    return stable_sigmoid(loglik_ratio(pair, h));
}

MonteCarloEstimate expected_confidence(int d, int r, double sigma, double theta,
                                       int trials, std::uint64_t seed, unsigned workers) {
    if (trials < 100) throw InvalidInputError("expected_confidence: need trials >= 100");
    const SubspacePair pair = make_angled_pair(d, r, theta, sigma, seed);
    std::vector<double> values(static_cast<std::size_t>(trials));
    parallel_for(values.size(), workers, [&](std::size_t i) {
        Rng rng(derive_seed(seed, stream::kTrial, i));
        const Vector h = pair.model1.basis * rng.gaussian_vector(r) + sigma * rng.gaussian_vector(d);
        values[i] = bayes_confidence(pair, h);
    });
    MonteCarloEstimate est;
    est.mean = mean_of(values);
    est.stderr_ = standard_error(values);
    est.trials = trials;
    return est;
}

} // namespace collapselab
