#pragma once

#include <span>
#include <vector>

namespace vfd {

double sigmoid(double z);

struct LogisticModel {
    std::vector<double> weights;
    double bias = 0.0;

    double linear_score(std::span<const double> x) const;
    double predict(std::span<const double> x) const;
};

struct LogisticFitOptions {
    double l2 = 1e-3;        // ridge on weights (bias unpenalized)
    int max_iterations = 2000;
    double tolerance = 1e-10;  // stop when gradient inf-norm falls below
    double initial_step = 1.0;
};

/// Full-batch gradient descent with backtracking line search on the
/// L2-regularized mean log loss. Deterministic: starts from zero.
LogisticModel fit_logistic(const std::vector<std::vector<double>>& features,
                           const std::vector<int>& labels,
                           const LogisticFitOptions& options = {});

}  // namespace vfd
