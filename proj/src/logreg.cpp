#include "vfdetect/logreg.hpp"

#include <cmath>
#include <stdexcept>

namespace vfd {

double sigmoid(double z) {
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    double e = std::exp(z);
    return e / (1.0 + e);
}

double LogisticModel::linear_score(std::span<const double> x) const {
    double z = bias;
    for (std::size_t i = 0; i < weights.size() && i < x.size(); ++i) {
        z += weights[i] * x[i];
    }
    return z;
}

double LogisticModel::predict(std::span<const double> x) const {
    return sigmoid(linear_score(x));
}

namespace {

// mean log loss + (l2/2)|w|^2, bias unpenalized
double objective(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                 const LogisticModel& m, double l2) {
    double loss = 0.0;
    for (std::size_t i = 0; i < X.size(); ++i) {
        double z = m.linear_score(X[i]);
        // log(1 + exp(-t)) with t = y ? z : -z, stable form
        double t = y[i] ? z : -z;
        loss += t >= 0.0 ? std::log1p(std::exp(-t)) : -t + std::log1p(std::exp(t));
    }
    loss /= static_cast<double>(X.size());
    double reg = 0.0;
    for (double w : m.weights) reg += w * w;
    return loss + 0.5 * l2 * reg;
}

}  // namespace

LogisticModel fit_logistic(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels,
                           const LogisticFitOptions& options) {
    if (features.empty() || features.size() != labels.size()) {
        throw std::invalid_argument("fit_logistic: empty or mismatched inputs");
    }
    const std::size_t n = features.size();
    const std::size_t dim = features[0].size();
    for (const auto& row : features) {
        if (row.size() != dim) {
            throw std::invalid_argument("fit_logistic: ragged feature rows");
        }
    }

    LogisticModel model;
    model.weights.assign(dim, 0.0);

    std::vector<double> grad_w(dim, 0.0);
    double grad_b = 0.0;
    double step = options.initial_step;
    double current = objective(features, labels, model, options.l2);

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        std::fill(grad_w.begin(), grad_w.end(), 0.0);
        grad_b = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double residual = sigmoid(model.linear_score(features[i])) -
                              static_cast<double>(labels[i]);
            for (std::size_t j = 0; j < dim; ++j) grad_w[j] += residual * features[i][j];
            grad_b += residual;
        }
        double inv_n = 1.0 / static_cast<double>(n);
        grad_b *= inv_n;
        double grad_norm = std::abs(grad_b);
        for (std::size_t j = 0; j < dim; ++j) {
            grad_w[j] = grad_w[j] * inv_n + options.l2 * model.weights[j];
            grad_norm = std::max(grad_norm, std::abs(grad_w[j]));
        }
        if (grad_norm < options.tolerance) break;

        // backtracking line search
        LogisticModel trial = model;
        bool accepted = false;
        for (int attempt = 0; attempt < 40; ++attempt) {
            for (std::size_t j = 0; j < dim; ++j) {
                trial.weights[j] = model.weights[j] - step * grad_w[j];
            }
            trial.bias = model.bias - step * grad_b;
            double candidate = objective(features, labels, trial, options.l2);
            if (candidate < current) {
                model = trial;
                current = candidate;
                accepted = true;
                step *= 1.25;  // cautiously regrow after a success
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;  // no descent direction progress at machine scale
    }
    return model;
}

}  // namespace vfd
