#include "respira/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace respira {

namespace {

double log1pexp_neg(double m) {
    // log(1 + exp(-m)) without overflow
    return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct Problem {
    const Matrix& x;
    const Labels& y;
    const LogRegParams& p;
    Vector yv;

    Problem(const Matrix& x_, const Labels& y_, const LogRegParams& p_) : x(x_), y(y_), p(p_), yv(x_.rows()) {
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            yv(i) = y[static_cast<std::size_t>(i)];
        }
    }

    // Smooth part: data loss, plus the ridge term for l2.
    double smooth(const Vector& w, double b) const {
        const Vector margin = yv.cwiseProduct((x * w).array().matrix() + Vector::Constant(x.rows(), b));
        double loss = 0.0;
        for (Eigen::Index i = 0; i < margin.size(); ++i) {
            loss += log1pexp_neg(margin(i));
        }
        if (p.penalty == Penalty::L2) {
            loss += 0.5 * w.squaredNorm() / p.C;
        }
        return loss;
    }

    double nonsmooth(const Vector& w) const { return p.penalty == Penalty::L1 ? w.lpNorm<1>() / p.C : 0.0; }

    void gradient(const Vector& w, double b, Vector& gw, double& gb) const {
        const Vector margin = yv.cwiseProduct((x * w).array().matrix() + Vector::Constant(x.rows(), b));
        Vector coef(margin.size());
        for (Eigen::Index i = 0; i < margin.size(); ++i) {
            coef(i) = -yv(i) * sigmoid(-margin(i));
        }
        gw = x.transpose() * coef;
        gb = coef.sum();
        if (p.penalty == Penalty::L2) {
            gw += w / p.C;
        }
    }

    void prox(Vector& w, double step) const {
        if (p.penalty != Penalty::L1) {
            return;
        }
        const double thr = step / p.C;
        for (Eigen::Index j = 0; j < w.size(); ++j) {
            const double v = w(j);
            w(j) = v > thr ? v - thr : (v < -thr ? v + thr : 0.0);
        }
    }
};

} // namespace

void LogRegParams::validate() const {
    if (!(C > 0.0) || !std::isfinite(C)) {
        throw std::invalid_argument("LR: C must be positive");
    }
    if (max_iterations < 1) {
        throw std::invalid_argument("LR: max_iterations must be positive");
    }
}

double logreg_objective(const LogRegParams& p, const Vector& w, double b, const Matrix& x, const Labels& y) {
    Problem prob(x, y, p);
    return prob.smooth(w, b) + prob.nonsmooth(w);
}

TrainedModel train_logreg(const Matrix& x, const Labels& y, const LogRegParams& p, std::uint64_t seed,
                          LogRegTrace* trace) {
    validate_training_data(x, y);
    p.validate();
    const Problem prob(x, y, p);
    const Eigen::Index d = x.cols();

    Vector w = Vector::Zero(d);
    double b = 0.0;
    Vector gw;
    double gb = 0.0;
    prob.gradient(w, b, gw, gb);
    double f = prob.smooth(w, b);
    double obj = f + prob.nonsmooth(w);

    const double lipschitz = 0.25 * (x.squaredNorm() + static_cast<double>(x.rows())) +
                             (p.penalty == Penalty::L2 ? 1.0 / p.C : 0.0);
    double step = 1.0 / lipschitz;

    LogRegTrace local;
    local.objective.push_back(obj);
    std::size_t it = 0;
    double mapping_norm = std::numeric_limits<double>::infinity();
    for (; it < static_cast<std::size_t>(p.max_iterations); ++it) {
        Vector w_new;
        double b_new = 0.0, f_new = 0.0, obj_new = 0.0;
        double t = step;
        bool accepted = false;
        for (int bt = 0; bt < 100; ++bt) {
            w_new = w - t * gw;
            b_new = b - t * gb;
            prob.prox(w_new, t);
            const Vector dw = w_new - w;
            const double db = b_new - b;
            f_new = prob.smooth(w_new, b_new);
            const double model = f + gw.dot(dw) + gb * db + (dw.squaredNorm() + db * db) / (2.0 * t);
            obj_new = f_new + prob.nonsmooth(w_new);
            if (f_new <= model + 1e-12 * std::abs(f) && obj_new <= obj) {
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) {
            break;
        }
        const Vector s_w = w_new - w;
        const double s_b = b_new - b;
        mapping_norm = std::sqrt(s_w.squaredNorm() + s_b * s_b) / t;
        Vector gw_new;
        double gb_new = 0.0;
        prob.gradient(w_new, b_new, gw_new, gb_new);
        const double decrease = obj - obj_new;
        const double sr = s_w.dot(gw_new - gw) + s_b * (gb_new - gb);
        const double ss = s_w.squaredNorm() + s_b * s_b;

        w = std::move(w_new);
        b = b_new;
        gw = std::move(gw_new);
        gb = gb_new;
        f = f_new;
        obj = obj_new;
        local.objective.push_back(obj);

        step = sr > 0.0 ? ss / sr : t; // Barzilai-Borwein
        if (decrease < p.decrease_tolerance && mapping_norm <= p.gradient_tolerance) {
            ++it;
            break;
        }
    }
    // Report the gradient mapping at the final point with a unit-scale step.
    {
        const double t = 1.0 / lipschitz;
        Vector w_probe = w - t * gw;
        prob.prox(w_probe, t);
        const double b_probe = b - t * gb;
        mapping_norm = std::sqrt((w_probe - w).squaredNorm() + (b_probe - b) * (b_probe - b)) / t;
    }
    local.iterations = it;
    local.gradient_norm = mapping_norm;
    if (trace != nullptr) {
        *trace = std::move(local);
    }

    LogRegModel m;
    m.params = p;
    m.weights = std::move(w);
    m.bias = b;
    TrainedModel tm;
    tm.model = std::move(m);
    tm.n_features = static_cast<std::size_t>(d);
    tm.seed = seed;
    return tm;
}

} // namespace respira
