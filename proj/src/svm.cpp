#include "respira/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace respira {

namespace {

constexpr double kTau = 1e-12;

double apply_kernel(const SvmParams& p, double dot, double sq_dist) {
    switch (p.kernel) {
    case SvmKernel::Rbf: return std::exp(-p.gamma * sq_dist);
    case SvmKernel::Poly: return std::pow(p.gamma * dot + 1.0, p.degree);
    case SvmKernel::Sigmoid: return std::tanh(p.gamma * dot + 1.0);
    }
    return 0.0;
}

Matrix kernel_matrix(const SvmParams& p, const Matrix& x) {
    const Matrix gram = x * x.transpose();
    const Eigen::Index n = x.rows();
    Matrix k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const double sq = std::max(0.0, gram(i, i) + gram(j, j) - 2.0 * gram(i, j));
            k(i, j) = k(j, i) = apply_kernel(p, gram(i, j), sq);
        }
    }
    return k;
}

} // namespace

double svm_kernel(const SvmParams& p, const double* u, const double* v, Eigen::Index d) {
    double dot = 0.0, sq = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
        dot += u[i] * v[i];
        const double diff = u[i] - v[i];
        sq += diff * diff;
    }
    return apply_kernel(p, dot, sq);
}

void SvmParams::validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw std::invalid_argument("SVM: C must be positive");
    }
    if (!(gamma > 0.0) || !std::isfinite(gamma)) {
        throw std::invalid_argument("SVM: gamma must be positive");
    }
    if (kernel == SvmKernel::Poly && degree < 1) {
        throw std::invalid_argument("SVM: polynomial degree must be at least 1");
    }
    if (!(tolerance > 0.0)) {
        throw std::invalid_argument("SVM: tolerance must be positive");
    }
}

SvmDual solve_svm_dual(const Matrix& x, const Labels& y, const SvmParams& p) {
    validate_training_data(x, y);
    p.validate();
    const std::size_t n = static_cast<std::size_t>(x.rows());
    const double c = p.C;
    const Matrix k = kernel_matrix(p, x);
    auto q = [&](std::size_t i, std::size_t j) {
        return static_cast<double>(y[i] * y[j]) * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    };

    SvmDual out;
    out.alpha.assign(n, 0.0);
    auto& alpha = out.alpha;
    std::vector<double> grad(n, -1.0);
    auto in_up = [&](std::size_t t) { return (y[t] == 1 && alpha[t] < c) || (y[t] == -1 && alpha[t] > 0.0); };
    auto in_low = [&](std::size_t t) { return (y[t] == 1 && alpha[t] > 0.0) || (y[t] == -1 && alpha[t] < c); };

    const std::size_t max_iter = 10 * n * n;
    while (out.iterations < max_iter) {
        double gmax = -std::numeric_limits<double>::infinity();
        std::size_t i = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * grad[t] > gmax) {
                gmax = -y[t] * grad[t];
                i = t;
            }
        }
        double gmax2 = -std::numeric_limits<double>::infinity();
        double best = std::numeric_limits<double>::infinity();
        std::size_t j = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (!in_low(t)) {
                continue;
            }
            const double yg = y[t] * grad[t];
            gmax2 = std::max(gmax2, yg);
            if (i == n) {
                continue;
            }
            const double b = gmax + yg;
            if (b > 0.0) {
                double a = k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) +
                           k(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(t)) -
                           2.0 * k(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t));
                if (a <= 0.0) {
                    a = kTau;
                }
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        if (i == n || j == n || gmax + gmax2 < p.tolerance) {
            out.converged = true;
            break;
        }
        ++out.iterations;

        const double old_i = alpha[i], old_j = alpha[j];
        const double qii = q(i, i), qjj = q(j, j), qij = q(i, j);
        if (y[i] != y[j]) {
            double quad = qii + qjj + 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = qii + qjj - 2.0 * qij;
            if (quad <= 0.0) {
                quad = kTau;
            }
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
        for (std::size_t t = 0; t < n; ++t) {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] == -1) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else if (alpha[t] <= 0.0) {
            if (y[t] == 1) {
                ub = std::min(ub, yg);
            } else {
                lb = std::max(lb, yg);
            }
        } else {
            ++n_free;
            sum_free += yg;
        }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    out.bias = -rho;
    return out;
}

TrainedModel train_svm(const Matrix& x, const Labels& y, const SvmParams& p, std::uint64_t seed) {
    const SvmDual dual = solve_svm_dual(x, y, p);
    SvmModel m;
    m.params = p;
    m.bias = dual.bias;
    std::vector<Eigen::Index> sv;
    for (std::size_t i = 0; i < dual.alpha.size(); ++i) {
        if (dual.alpha[i] > 0.0) {
            sv.push_back(static_cast<Eigen::Index>(i));
            m.dual_coef.push_back(dual.alpha[i] * y[i]);
        }
    }
    m.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), x.cols());
    for (std::size_t r = 0; r < sv.size(); ++r) {
        m.support_vectors.row(static_cast<Eigen::Index>(r)) = x.row(sv[r]);
    }
    TrainedModel t;
    t.model = std::move(m);
    t.n_features = static_cast<std::size_t>(x.cols());
    t.seed = seed;
    return t;
}

} // namespace respira
