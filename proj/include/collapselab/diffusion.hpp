#pragma once

#include "collapselab/rng.hpp"

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace collapselab {

/// DDPM forward/reverse process tables for timesteps t = 1..T, with the
/// alpha_bar(0) = 1 convention so t = 0 is the identity and the final
/// reverse step adds no noise.
class NoiseSchedule {
  public:
    NoiseSchedule() = default;
    NoiseSchedule(int steps, std::vector<double> beta, double beta_start, double beta_end);

    int steps() const { return steps_; }
    double beta_start() const { return beta_start_; }
    double beta_end() const { return beta_end_; }

    double beta(int t) const { return beta_.at(static_cast<std::size_t>(t - 1)); }
    double alpha(int t) const { return 1.0 - beta(t); }

    /// alpha_bar(t) = prod_{i<=t} alpha_i; alpha_bar(0) = 1.
    double alpha_bar(int t) const { return t == 0 ? 1.0 : alpha_bar_.at(static_cast<std::size_t>(t - 1)); }

    /// Reverse-step noise scale; sigma_q(1) = 0.
    double sigma_q(int t) const { return sigma_q_.at(static_cast<std::size_t>(t - 1)); }

  private:
    int steps_ = 0;
    double beta_start_ = 0.0, beta_end_ = 0.0;
    std::vector<double> beta_, alpha_bar_, sigma_q_;
};

/// Linear beta schedule over T steps. Requires 0 < beta_start <= beta_end < 1
/// and T >= 2.
NoiseSchedule build_schedule(int steps, double beta_start, double beta_end);

/// The Appendix-C reference range (1e-4, 0.02) at T = 1000, rescaled by
/// 1000/T for other step counts so the terminal signal-to-noise ratio is
/// preserved when the sampler runs short schedules.
std::pair<double, double> default_beta_range(int steps);

/// x_t = sqrt(alpha_bar_t) x0 + sqrt(1 - alpha_bar_t) eps. t = 0 returns x0.
Vector forward_noise(const Vector& x0, int t, const NoiseSchedule& schedule, std::uint64_t seed);

/// One mixture component stored as mean + low-rank-plus-isotropic
/// covariance: Sigma = U diag(lambda) U^T + iso * (I - U U^T).
struct GaussianComponent {
    double weight = 1.0;
    Vector mean;
    Matrix basis;    // d x q, orthonormal columns
    Vector lambda;   // q leading eigenvalues
    double iso = 0.0;  // residual variance off the leading subspace
};

/// Gaussian-mixture data model whose diffusion score is available in closed
/// form, standing in for a trained denoiser. Weights sum to 1.
struct GaussianScoreModel {
    std::vector<GaussianComponent> components;

    int dim() const { return components.empty() ? 0 : static_cast<int>(components.front().mean.size()); }
    void validate() const;
};

/// Score function handle: x_t, t -> grad_x log q_t(x_t).
using ScoreFn = std::function<Vector(const Vector&, int)>;

/// Exact score of the noised mixture at timestep t:
/// each component's marginal is N(sqrt(ab) mu_c, ab Sigma_c + (1-ab) I),
/// combined with log-space responsibilities. Solved through the low-rank
/// factors; no dense inversion.
Vector analytic_score(const GaussianScoreModel& model, const Vector& x_t, int t,
                      const NoiseSchedule& schedule);

/// log q_t(x_t) of the noised mixture (used by the score and by tests).
double log_marginal(const GaussianScoreModel& model, const Vector& x_t, int t,
                    const NoiseSchedule& schedule);

ScoreFn make_score_fn(const GaussianScoreModel& model, const NoiseSchedule& schedule);

/// Score extrapolation s = (1 + omega) * prev - omega * cur.
ScoreFn sims_score(ScoreFn prev, ScoreFn cur, double omega);

/// DDPM ancestral sampler: n chains from x_T ~ N(0, I) down to x_0, one
/// sub-seeded RNG per chain, so any partition over workers gives identical
/// output. Throws NumericalError naming the step if the score goes non-finite.
Matrix ancestral_sample(const ScoreFn& score, const NoiseSchedule& schedule, int n, int d,
                        std::uint64_t seed, unsigned workers = 1);

/// Frozen linear encoder: h = W^T forward_noise(x - center, t) with W the
/// top-p principal directions of the generation-0 real data. Fitted once,
/// never refitted.
struct FrozenEncoder {
    Matrix projection;  // d x p, orthonormal columns
    Vector center;
    NoiseSchedule schedule;

    int input_dim() const { return static_cast<int>(projection.rows()); }
    int latent_dim() const { return static_cast<int>(projection.cols()); }
};

FrozenEncoder fit_encoder(const Matrix& real_data, int p, const NoiseSchedule& schedule);

Vector encode(const FrozenEncoder& enc, const Vector& x, int t, std::uint64_t seed);

/// Columns of x encoded at timestep t, per-column sub-seeds from (seed, index).
Matrix encode_columns(const FrozenEncoder& enc, const Matrix& x, int t, std::uint64_t seed);

// LSFD persistence ("GSCM" / "ENCD" sections).
void write_score_model(const std::string& path, const GaussianScoreModel& model);
GaussianScoreModel read_score_model(const std::string& path);
void write_encoder(const std::string& path, const FrozenEncoder& enc);
FrozenEncoder read_encoder(const std::string& path);

} // namespace collapselab
