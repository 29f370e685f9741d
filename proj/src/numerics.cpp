#include "collapselab/numerics.hpp"

#include "collapselab/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace collapselab {

namespace {

void require_finite(const Matrix& m, const char* op) {
    if (m.rows() < 1 || m.cols() < 1)
        throw InvalidInputError(std::string(op) + ": empty matrix");
    if (!m.allFinite())
        throw InvalidInputError(std::string(op) + ": non-finite entries");
}

} // namespace

std::vector<double> singular_values(const Matrix& m) {
    require_finite(m, "singular_values");
    Eigen::BDCSVD<Matrix> svd(m);
    const auto& sv = svd.singularValues();
    return {sv.data(), sv.data() + sv.size()};
}

NormTriple norms(const Matrix& m) {
    const std::vector<double> sv = singular_values(m);
    NormTriple out;
    double ss = 0.0;
    for (double s : sv) {
        out.nuclear += s;
        ss += s * s;
    }
    out.frobenius = std::sqrt(ss);
    out.operator_norm = sv.empty() ? 0.0 : sv.front();
    return out;
}

int numerical_rank(const Matrix& m) {
    const std::vector<double> sv = singular_values(m);
    if (sv.empty() || sv.front() == 0.0) return 0;
    const double thresh = 1e-10 * sv.front();
    return static_cast<int>(std::count_if(sv.begin(), sv.end(),
                                          [&](double s) { return s > thresh; }));
}

Matrix psd_sqrt(const Matrix& s) {
    require_finite(s, "psd_sqrt");
    if (s.rows() != s.cols()) throw InvalidInputError("psd_sqrt: matrix not square");
    const double scale = std::max(1.0, s.cwiseAbs().maxCoeff());
    if ((s - s.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw InvalidInputError("psd_sqrt: matrix not symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (s + s.transpose()));
    if (eig.info() != Eigen::Success) throw NumericalError("psd_sqrt: eigendecomposition failed");
    Vector lam = eig.eigenvalues();
    const double neg_tol = 1e-10 * scale;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam[i] < -neg_tol)
            throw InvalidInputError("psd_sqrt: eigenvalue " + std::to_string(lam[i]) +
                                    " is significantly negative");
        lam[i] = std::sqrt(std::max(0.0, lam[i]));
    }
    return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

double gamma_ratio(std::int64_t n) {
    if (n < 1) throw InvalidInputError("gamma_ratio: n must be >= 1");
    const double x = static_cast<double>(n);
    return std::sqrt(2.0) * std::exp(std::lgamma(0.5 * (x + 1.0)) - std::lgamma(0.5 * x));
}

void fix_column_signs(Matrix& u) {
    for (Eigen::Index j = 0; j < u.cols(); ++j) {
        Eigen::Index imax = 0;
        double best = -1.0;
        for (Eigen::Index i = 0; i < u.rows(); ++i) {
            const double a = std::abs(u(i, j));
            if (a > best) {
                best = a;
                imax = i;
            }
        }
        if (u(imax, j) < 0.0) u.col(j) = -u.col(j);
    }
}

Matrix random_orthonormal(int d, int r, std::uint64_t seed) {
    if (r < 1 || d < 1 || r > d)
        throw InvalidInputError("random_orthonormal: need 1 <= r <= d");
    Rng rng(seed);
    const Matrix g = rng.gaussian_matrix(d, r);
    Eigen::HouseholderQR<Matrix> qr(g);
    Matrix q = qr.householderQ() * Matrix::Identity(d, r);
    const Matrix rmat = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
    for (int j = 0; j < r; ++j)
        if (rmat(j, j) < 0.0) q.col(j) = -q.col(j);
    return q;
}

std::vector<double> principal_angles(const Matrix& u0, const Matrix& u1) {
    require_finite(u0, "principal_angles");
    require_finite(u1, "principal_angles");
    if (u0.rows() != u1.rows())
        throw InvalidInputError("principal_angles: ambient dimensions differ");
    auto check_orthonormal = [](const Matrix& u, const char* name) {
        const Matrix gram = u.transpose() * u;
        const Matrix eye = Matrix::Identity(u.cols(), u.cols());
        if ((gram - eye).cwiseAbs().maxCoeff() > 1e-8)
            throw InvalidInputError(std::string("principal_angles: ") + name +
                                    " does not have orthonormal columns");
    };
    check_orthonormal(u0, "first argument");
    check_orthonormal(u1, "second argument");
    std::vector<double> cosines = singular_values(u0.transpose() * u1);
    std::vector<double> angles;
    angles.reserve(cosines.size());
    for (double c : cosines) angles.push_back(std::acos(std::clamp(c, 0.0, 1.0)));
    std::sort(angles.begin(), angles.end());
    return angles;
}

KMeansResult kmeans(const Matrix& x, int k, std::uint64_t seed) {
    require_finite(x, "kmeans");
    const Eigen::Index n = x.cols();
    if (k < 1 || static_cast<Eigen::Index>(k) > n)
        throw InvalidInputError("kmeans: need 1 <= k <= number of samples");

    Rng rng(seed);
    Matrix centers(x.rows(), k);

    // k-means++ seeding
    centers.col(0) = x.col(rng.index(static_cast<std::size_t>(n)));
    Vector dist2 = (x.colwise() - centers.col(0)).colwise().squaredNorm().transpose();
    for (int c = 1; c < k; ++c) {
        const double total = dist2.sum();
        Eigen::Index pick = 0;
        if (total > 0.0) {
            double target = rng.uniform() * total;
            for (Eigen::Index i = 0; i < n; ++i) {
                target -= dist2[i];
                if (target <= 0.0) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<Eigen::Index>(rng.index(static_cast<std::size_t>(n)));
        }
        centers.col(c) = x.col(pick);
        dist2 = dist2.cwiseMin((x.colwise() - centers.col(c)).colwise().squaredNorm().transpose());
    }

    KMeansResult result;
    result.labels.assign(static_cast<std::size_t>(n), 0);
    constexpr int kMaxIterations = 100;
    for (int iter = 0; iter < kMaxIterations; ++iter) {
        result.iterations = iter + 1;
        bool changed = false;
        for (Eigen::Index i = 0; i < n; ++i) {
            int best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (int c = 0; c < k; ++c) {
                const double d = (x.col(i) - centers.col(c)).squaredNorm();
                if (d < best_d) {
                    best_d = d;
                    best = c;
                }
            }
            if (result.labels[static_cast<std::size_t>(i)] != best) {
                result.labels[static_cast<std::size_t>(i)] = best;
                changed = true;
            }
        }
        if (!changed && iter > 0) break;

        Matrix sums = Matrix::Zero(x.rows(), k);
        std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            const int c = result.labels[static_cast<std::size_t>(i)];
            sums.col(c) += x.col(i);
            ++counts[static_cast<std::size_t>(c)];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.col(c) = sums.col(c) / static_cast<double>(counts[static_cast<std::size_t>(c)]);
            } else {
                // re-seed an empty cluster with the point farthest from its center
                Eigen::Index worst = 0;
                double worst_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const int ci = result.labels[static_cast<std::size_t>(i)];
                    const double d = (x.col(i) - centers.col(ci)).squaredNorm();
                    if (d > worst_d) {
                        worst_d = d;
                        worst = i;
                    }
                }
                centers.col(c) = x.col(worst);
            }
        }
        if (!changed) break;
    }
    result.centers = centers;
    return result;
}

} // namespace collapselab
