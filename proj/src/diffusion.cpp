#include "collapselab/diffusion.hpp"

#include "collapselab/errors.hpp"
#include "collapselab/numerics.hpp"
#include "collapselab/parallel.hpp"

#include "binio.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace collapselab {

NoiseSchedule::NoiseSchedule(int steps, std::vector<double> beta, double beta_start, double beta_end)
    : steps_(steps), beta_start_(beta_start), beta_end_(beta_end), beta_(std::move(beta)) {
    alpha_bar_.resize(beta_.size());
    sigma_q_.resize(beta_.size());
    double prod = 1.0;
    for (std::size_t i = 0; i < beta_.size(); ++i) {
        const double ab_prev = prod;
        prod *= 1.0 - beta_[i];
        alpha_bar_[i] = prod;
        sigma_q_[i] = std::sqrt(beta_[i] * (1.0 - ab_prev) / (1.0 - prod));
    }
}

NoiseSchedule build_schedule(int steps, double beta_start, double beta_end) {
    if (steps < 2) throw InvalidInputError("build_schedule: need T >= 2");
    if (!(beta_start > 0.0) || beta_start > beta_end || !(beta_end < 1.0))
        throw InvalidInputError("build_schedule: need 0 < beta_start <= beta_end < 1");
    std::vector<double> beta(static_cast<std::size_t>(steps));
    for (int t = 0; t < steps; ++t)
        beta[static_cast<std::size_t>(t)] =
            beta_start + (beta_end - beta_start) * static_cast<double>(t) / (steps - 1);
    return NoiseSchedule(steps, std::move(beta), beta_start, beta_end);
}

std::pair<double, double> default_beta_range(int steps) {
    const double scale = 1000.0 / static_cast<double>(steps);
    return {1e-4 * scale, std::min(0.999, 0.02 * scale)};
}

Vector forward_noise(const Vector& x0, int t, const NoiseSchedule& schedule, std::uint64_t seed) {
    if (t < 0 || t > schedule.steps())
        throw InvalidInputError("forward_noise: timestep out of range");
    if (t == 0) return x0;
    const double ab = schedule.alpha_bar(t);
    Rng rng(seed);
    return std::sqrt(ab) * x0 + std::sqrt(1.0 - ab) * rng.gaussian_vector(x0.size());
}

void GaussianScoreModel::validate() const {
    if (components.empty()) throw InvalidInputError("GaussianScoreModel: no components");
    double total = 0.0;
    for (const auto& c : components) {
        if (c.weight < 0.0) throw InvalidInputError("GaussianScoreModel: negative weight");
        if (c.mean.size() != components.front().mean.size())
            throw InvalidInputError("GaussianScoreModel: component dimensions differ");
        if (c.basis.cols() != c.lambda.size())
            throw InvalidInputError("GaussianScoreModel: basis/eigenvalue mismatch");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw InvalidInputError("GaussianScoreModel: weights must sum to 1");
}

namespace {

// Per-component quantities at timestep t. The noised marginal covariance is
// U diag(a) U^T + a0 (I - U U^T) with a_i = ab*lambda_i + (1-ab),
// a0 = ab*iso + (1-ab).
struct NoisedComponent {
    const GaussianComponent* comp;
    double sqrt_ab;
    Vector a;     // per leading direction
    double a0;
    double logdet;
};

NoisedComponent noise_component(const GaussianComponent& c, double ab, int d, int t) {
    NoisedComponent nc;
    nc.comp = &c;
    nc.sqrt_ab = std::sqrt(ab);
    nc.a = (ab * c.lambda.array() + (1.0 - ab)).matrix();
    nc.a0 = ab * c.iso + (1.0 - ab);
    if (nc.a0 <= 0.0 || (nc.a.size() > 0 && nc.a.minCoeff() <= 0.0))
        throw NumericalError("analytic_score: singular noised covariance at t=" + std::to_string(t));
    nc.logdet = static_cast<double>(d - c.basis.cols()) * std::log(nc.a0);
    for (Eigen::Index i = 0; i < nc.a.size(); ++i) nc.logdet += std::log(nc.a[i]);
    return nc;
}

// log N(x; sqrt_ab * mean, noised covariance), and optionally the score.
double component_log_density(const NoisedComponent& nc, const Vector& x, Vector* score_out) {
    const auto& c = *nc.comp;
    const Vector y = x - nc.sqrt_ab * c.mean;
    const Vector z = c.basis.transpose() * y;
    double quad = (y.squaredNorm() - z.squaredNorm()) / nc.a0;
    for (Eigen::Index i = 0; i < z.size(); ++i) quad += z[i] * z[i] / nc.a[i];
    if (score_out) {
        Vector zi(z.size());
        for (Eigen::Index i = 0; i < z.size(); ++i) zi[i] = (1.0 / nc.a[i] - 1.0 / nc.a0) * z[i];
        *score_out = -(y / nc.a0 + c.basis * zi);
    }
    const double d = static_cast<double>(x.size());
    return -0.5 * (d * std::log(2.0 * M_PI) + nc.logdet + quad);
}

} // namespace

Vector analytic_score(const GaussianScoreModel& model, const Vector& x_t, int t,
                      const NoiseSchedule& schedule) {
    if (t < 1 || t > schedule.steps())
        throw InvalidInputError("analytic_score: timestep out of range");
    const double ab = schedule.alpha_bar(t);
    const int d = static_cast<int>(x_t.size());

    if (model.components.size() == 1) {
        const NoisedComponent nc = noise_component(model.components.front(), ab, d, t);
        Vector score;
        component_log_density(nc, x_t, &score);
        return score;
    }

    // responsibility-weighted mixture score, log-space with max subtraction
    const std::size_t k = model.components.size();
    std::vector<Vector> scores(k);
    std::vector<double> logp(k);
    for (std::size_t c = 0; c < k; ++c) {
        const NoisedComponent nc = noise_component(model.components[c], ab, d, t);
        logp[c] = std::log(model.components[c].weight) + component_log_density(nc, x_t, &scores[c]);
    }
    const double mx = *std::max_element(logp.begin(), logp.end());
    double denom = 0.0;
    for (double lp : logp) denom += std::exp(lp - mx);
    Vector score = Vector::Zero(d);
    for (std::size_t c = 0; c < k; ++c) score += std::exp(logp[c] - mx) / denom * scores[c];
    return score;
}

double log_marginal(const GaussianScoreModel& model, const Vector& x_t, int t,
                    const NoiseSchedule& schedule) {
    const double ab = schedule.alpha_bar(t);
    const int d = static_cast<int>(x_t.size());
    double mx = -std::numeric_limits<double>::infinity();
    std::vector<double> logp(model.components.size());
    for (std::size_t c = 0; c < model.components.size(); ++c) {
        const NoisedComponent nc = noise_component(model.components[c], ab, d, t);
        logp[c] = std::log(model.components[c].weight) + component_log_density(nc, x_t, nullptr);
        mx = std::max(mx, logp[c]);
    }
    double acc = 0.0;
    for (double lp : logp) acc += std::exp(lp - mx);
    return mx + std::log(acc);
}

ScoreFn make_score_fn(const GaussianScoreModel& model, const NoiseSchedule& schedule) {
    return [model, schedule](const Vector& x, int t) { return analytic_score(model, x, t, schedule); };
}

ScoreFn sims_score(ScoreFn prev, ScoreFn cur, double omega) {
    if (omega == 0.0) return prev;
    return [prev = std::move(prev), cur = std::move(cur), omega](const Vector& x, int t) {
        return ((1.0 + omega) * prev(x, t) - omega * cur(x, t)).eval();
    };
}

Matrix ancestral_sample(const ScoreFn& score, const NoiseSchedule& schedule, int n, int d,
                        std::uint64_t seed, unsigned workers) {
    if (n < 1) throw InvalidInputError("ancestral_sample: need n >= 1");
    Matrix out(d, n);
    parallel_for(static_cast<std::size_t>(n), workers, [&](std::size_t chain) {
        Rng rng(derive_seed(seed, stream::kChain, chain));
        Vector x = rng.gaussian_vector(d);
        for (int t = schedule.steps(); t >= 1; --t) {
            const Vector s = score(x, t);
            if (!s.allFinite())
                throw NumericalError("ancestral_sample: non-finite score at step t=" + std::to_string(t));
            const double alpha = schedule.alpha(t);
            const double ab = schedule.alpha_bar(t);
            const Vector eps_hat = -std::sqrt(1.0 - ab) * s;
            x = (x - (1.0 - alpha) / std::sqrt(1.0 - ab) * eps_hat) / std::sqrt(alpha);
            const double sq = schedule.sigma_q(t);
            if (sq > 0.0) x += sq * rng.gaussian_vector(d);
        }
        out.col(static_cast<Eigen::Index>(chain)) = x;
    });
    return out;
}

FrozenEncoder fit_encoder(const Matrix& real_data, int p, const NoiseSchedule& schedule) {
    const int d = static_cast<int>(real_data.rows());
    if (p < 1 || p > d) throw InvalidInputError("fit_encoder: need 1 <= p <= d");
    if (real_data.cols() < 2) throw InvalidInputError("fit_encoder: need at least 2 samples");
    FrozenEncoder enc;
    enc.center = real_data.rowwise().mean();
    const Matrix centered = real_data.colwise() - enc.center;
    const Matrix cov = centered * centered.transpose() / static_cast<double>(real_data.cols());
    Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
    if (eig.info() != Eigen::Success) throw NumericalError("fit_encoder: eigendecomposition failed");
    // eigenvalues ascending; keep the top p, descending
    Matrix w(d, p);
    for (int j = 0; j < p; ++j) w.col(j) = eig.eigenvectors().col(d - 1 - j);
    fix_column_signs(w);
    enc.projection = w;
    enc.schedule = schedule;
    return enc;
}

Vector encode(const FrozenEncoder& enc, const Vector& x, int t, std::uint64_t seed) {
    return enc.projection.transpose() * forward_noise(x - enc.center, t, enc.schedule, seed);
}

Matrix encode_columns(const FrozenEncoder& enc, const Matrix& x, int t, std::uint64_t seed) {
    Matrix out(enc.latent_dim(), x.cols());
    for (Eigen::Index i = 0; i < x.cols(); ++i)
        out.col(i) = encode(enc, x.col(i), t, derive_seed(seed, stream::kEncode, static_cast<std::uint64_t>(i)));
    return out;
}

void write_score_model(const std::string& path, const GaussianScoreModel& model) {
    model.validate();
    auto out = binio::open_section_writer(path, "GSCM");
    binio::put(out, static_cast<std::uint32_t>(model.components.size()));
    binio::put(out, static_cast<std::uint64_t>(model.dim()));
    for (const auto& c : model.components) {
        binio::put(out, c.weight);
        for (Eigen::Index i = 0; i < c.mean.size(); ++i) binio::put(out, c.mean[i]);
        binio::put(out, static_cast<std::uint64_t>(c.lambda.size()));
        for (Eigen::Index i = 0; i < c.lambda.size(); ++i) binio::put(out, c.lambda[i]);
        binio::put_matrix(out, c.basis);
        binio::put(out, c.iso);
    }
    if (!out) throw IoError("LSFD: write failed: " + path);
}

GaussianScoreModel read_score_model(const std::string& path) {
    auto in = binio::open_section_reader(path, "GSCM");
    const auto ncomp = binio::get<std::uint32_t>(in, "component count");
    const auto d = binio::get<std::uint64_t>(in, "dimension");
    GaussianScoreModel model;
    for (std::uint32_t c = 0; c < ncomp; ++c) {
        GaussianComponent comp;
        comp.weight = binio::get<double>(in, "weight");
        comp.mean.resize(static_cast<Eigen::Index>(d));
        for (Eigen::Index i = 0; i < comp.mean.size(); ++i)
            comp.mean[i] = binio::get<double>(in, "mean");
        const auto q = binio::get<std::uint64_t>(in, "rank");
        comp.lambda.resize(static_cast<Eigen::Index>(q));
        for (Eigen::Index i = 0; i < comp.lambda.size(); ++i)
            comp.lambda[i] = binio::get<double>(in, "lambda");
        comp.basis = binio::get_matrix(in, "basis");
        comp.iso = binio::get<double>(in, "iso");
        model.components.push_back(std::move(comp));
    }
    model.validate();
    return model;
}

void write_encoder(const std::string& path, const FrozenEncoder& enc) {
    auto out = binio::open_section_writer(path, "ENCD");
    binio::put_matrix(out, enc.projection);
    binio::put_matrix(out, Matrix(enc.center));
    binio::put(out, static_cast<std::uint32_t>(enc.schedule.steps()));
    binio::put(out, enc.schedule.beta_start());
    binio::put(out, enc.schedule.beta_end());
    if (!out) throw IoError("LSFD: write failed: " + path);
}

FrozenEncoder read_encoder(const std::string& path) {
    auto in = binio::open_section_reader(path, "ENCD");
    FrozenEncoder enc;
    enc.projection = binio::get_matrix(in, "projection");
    enc.center = binio::get_matrix(in, "center");
    const auto steps = binio::get<std::uint32_t>(in, "schedule steps");
    const double bs = binio::get<double>(in, "beta_start");
    const double be = binio::get<double>(in, "beta_end");
    enc.schedule = build_schedule(static_cast<int>(steps), bs, be);
    return enc;
}

} // namespace collapselab
