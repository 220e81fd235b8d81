// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_FITDATA_MODEL_HPP
#define EGSR_FITDATA_MODEL_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "egsr/expr/expr.hpp"
#include "egsr/fitdata/dataset.hpp"

namespace egsr::fitdata {

enum class LossKind : std::uint8_t {
    Mse,
    GaussianNll,
};

auto loss_name(LossKind kind) -> std::string_view;
auto parse_loss(std::string_view name) -> std::optional<LossKind>;

// Evaluation results of one expression. Fitness is maximized.
struct FitRecord {
    std::vector<double> params;
    double fitness { 0.0 };
    std::optional<double> dl;
    std::size_t size { 0 };
    std::size_t n_params { 0 };
    LossKind loss { LossKind::Mse };

    friend auto operator==(FitRecord const&, FitRecord const&) -> bool = default;
};

// Row-wise predictions. Non-finite rows are kept; count them with
// `count_nonfinite`. Throws DataError when a variable column is missing or
// `params` does not cover every parameter index.
auto evaluate(expr::Expr const& e, std::span<double const> params, Eigen::MatrixXd const& predictors) -> Eigen::ArrayXd;
auto evaluate(expr::Expr const& e, std::span<double const> params, Dataset const& data) -> Eigen::ArrayXd;

// Predictions and their Jacobian with respect to every parameter index
// (forward accumulation through the tree).
struct Evaluation {
    Eigen::ArrayXd value;
    Eigen::MatrixXd jacobian; // rows x params
};
auto evaluate_with_jacobian(expr::Expr const& e, std::span<double const> params, Eigen::MatrixXd const& predictors) -> Evaluation;

auto count_nonfinite(Eigen::ArrayXd const& values) -> Eigen::Index;

inline constexpr double kVarianceFloor = 1e-12;

struct Metrics {
    double mse { 0.0 };
    std::optional<double> r2; // undefined for a constant target
    double nll { 0.0 };
};

auto metrics(Eigen::ArrayXd const& prediction, Eigen::VectorXd const& target) -> Metrics;
auto metrics(expr::Expr const& e, std::span<double const> params, Dataset const& data) -> Metrics;

// Gaussian negative log-likelihood with the plug-in variance SSR/n.
auto gaussian_nll(double ssr, Eigen::Index n) -> double;

// -mse or -nll. Throws DataError when the predictions are not finite.
auto fitness(expr::Expr const& e, std::span<double const> params, Dataset const& data, LossKind loss) -> double;

// Loss (mse or nll, minimized) and its gradient in the parameters.
struct LossGradient {
    double loss { 0.0 };
    Eigen::VectorXd gradient;
};
auto loss_gradient(expr::Expr const& e, std::span<double const> params, Dataset const& data, LossKind loss) -> LossGradient;

struct FitOptions {
    LossKind loss { LossKind::Mse };
    int restarts { 1 };
    std::uint64_t seed { 0 };
    int max_iterations { 200 };
    // Starting point tried before the random restarts, when given.
    std::vector<double> initial;
};

struct FitResult {
    std::vector<double> params;
    double fitness { 0.0 };
    int successful_restarts { 0 };
};

// Levenberg-Marquardt on the squared residuals from `restarts` uniform(-2, 2)
// starting points; keeps the best. Throws DataError when no restart stays
// finite.
auto fit_params(expr::Expr const& e, Dataset const& data, FitOptions const& options) -> FitResult;

// Number of symbols a node can be drawn from: operators, the dataset's
// variables and one parameter symbol.
auto alphabet_size(Dataset const& data) -> std::size_t;

// NLL(theta) + k log|A| + sum_j [ log(I_jj)/2 + log|theta_j| ] - (p/2) log 3
// over the non-zero parameters, with I the Gauss-Newton observed information.
auto description_length(expr::Expr const& e, std::span<double const> params, Dataset const& data) -> double;

} // namespace egsr::fitdata

#endif
