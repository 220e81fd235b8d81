// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "egsr/fitdata/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <set>

#include <Eigen/Cholesky>
#include <fmt/format.h>

namespace egsr::fitdata {

using expr::Expr;
using expr::Op;

auto loss_name(LossKind kind) -> std::string_view
{
    return kind == LossKind::Mse ? "mse" : "gaussian";
}

auto parse_loss(std::string_view name) -> std::optional<LossKind>
{
    if (name == "mse" || name == "MSE") {
        return LossKind::Mse;
    }
    if (name == "gaussian" || name == "Gaussian" || name == "nll") {
        return LossKind::GaussianNll;
    }
    return std::nullopt;
}

namespace {

    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    auto protected_pow(Eigen::ArrayXd const& base, Eigen::ArrayXd const& exponent) -> Eigen::ArrayXd
    {
        Eigen::ArrayXd out(base.size());
        for (Eigen::Index i = 0; i < base.size(); ++i) {
            auto a = std::abs(base(i));
            auto b = exponent(i);
            if (a == 0.0) {
                out(i) = b > 0.0 ? 0.0 : kNaN;
            } else {
                out(i) = std::pow(a, b);
            }
        }
        return out;
    }

    auto sign(Eigen::ArrayXd const& a) -> Eigen::ArrayXd
    {
        return a.unaryExpr([](double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); });
    }

    void check_inputs(Expr const& e, std::span<double const> params, Eigen::MatrixXd const& predictors)
    {
        if (auto m = expr::max_variable_index(e); m >= predictors.cols()) {
            throw DataError(fmt::format("variable x{} has no column in the dataset ({} predictors)", m, predictors.cols()));
        }
        if (auto span = expr::parameter_span(e); span > params.size()) {
            throw DataError(fmt::format("expression uses t{} but only {} parameter value(s) were given", span - 1, params.size()));
        }
        if (expr::has_pattern_vars(e)) {
            throw DataError("cannot evaluate a pattern");
        }
    }

    auto eval(Expr const& e, std::span<double const> params, Eigen::MatrixXd const& x) -> Eigen::ArrayXd
    {
        auto const n = x.rows();
        switch (e.op) {
        case Op::Var: return x.col(e.index).array();
        case Op::Param: return Eigen::ArrayXd::Constant(n, params[e.index]);
        case Op::Const: return Eigen::ArrayXd::Constant(n, e.value);
        case Op::PatVar: break;
        case Op::Add: return eval(e.children[0], params, x) + eval(e.children[1], params, x);
        case Op::Sub: return eval(e.children[0], params, x) - eval(e.children[1], params, x);
        case Op::Mul: return eval(e.children[0], params, x) * eval(e.children[1], params, x);
        case Op::Div: return eval(e.children[0], params, x) / eval(e.children[1], params, x);
        case Op::Pow: return eval(e.children[0], params, x).pow(eval(e.children[1], params, x));
        case Op::PowAbs: return protected_pow(eval(e.children[0], params, x), eval(e.children[1], params, x));
        case Op::Sin: return eval(e.children[0], params, x).sin();
        case Op::Cos: return eval(e.children[0], params, x).cos();
        case Op::Exp: return eval(e.children[0], params, x).exp();
        case Op::Log: return eval(e.children[0], params, x).abs().log();
        case Op::Sqrt: return eval(e.children[0], params, x).abs().sqrt();
        case Op::Abs: return eval(e.children[0], params, x).abs();
        }
        throw DataError("cannot evaluate a pattern variable");
    }

    // Adds `scale * source` to `target` for the columns where source is not zero.
    void accumulate(Eigen::MatrixXd& target, Eigen::MatrixXd const& source, Eigen::ArrayXd const& scale)
    {
        for (Eigen::Index j = 0; j < source.cols(); ++j) {
            if (source.col(j).isZero(0.0)) {
                continue;
            }
            target.col(j).array() += scale * source.col(j).array();
        }
    }

    auto eval_jac(Expr const& e, std::span<double const> params, Eigen::MatrixXd const& x) -> Evaluation
    {
        auto const n = x.rows();
        auto const p = static_cast<Eigen::Index>(params.size());
        Evaluation out;
        out.jacobian = Eigen::MatrixXd::Zero(n, p);
        switch (e.op) {
        case Op::Var:
            out.value = x.col(e.index).array();
            return out;
        case Op::Param:
            out.value = Eigen::ArrayXd::Constant(n, params[e.index]);
            out.jacobian.col(e.index).setOnes();
            return out;
        case Op::Const:
            out.value = Eigen::ArrayXd::Constant(n, e.value);
            return out;
        default:
            break;
        }
        if (expr::is_unary(e.op)) {
            auto a = eval_jac(e.children[0], params, x);
            Eigen::ArrayXd d;
            switch (e.op) {
            case Op::Sin:
                out.value = a.value.sin();
                d = a.value.cos();
                break;
            case Op::Cos:
                out.value = a.value.cos();
                d = -a.value.sin();
                break;
            case Op::Exp:
                out.value = a.value.exp();
                d = out.value;
                break;
            case Op::Log:
                out.value = a.value.abs().log();
                d = a.value.inverse();
                break;
            case Op::Sqrt:
                out.value = a.value.abs().sqrt();
                d = sign(a.value) / (2.0 * out.value);
                break;
            case Op::Abs:
                out.value = a.value.abs();
                d = sign(a.value);
                break;
            default:
                throw DataError("unexpected operator");
            }
            accumulate(out.jacobian, a.jacobian, d);
            return out;
        }
        auto a = eval_jac(e.children[0], params, x);
        auto b = eval_jac(e.children[1], params, x);
        switch (e.op) {
        case Op::Add:
            out.value = a.value + b.value;
            out.jacobian = a.jacobian + b.jacobian;
            break;
        case Op::Sub:
            out.value = a.value - b.value;
            out.jacobian = a.jacobian - b.jacobian;
            break;
        case Op::Mul:
            out.value = a.value * b.value;
            accumulate(out.jacobian, a.jacobian, b.value);
            accumulate(out.jacobian, b.jacobian, a.value);
            break;
        case Op::Div:
            out.value = a.value / b.value;
            accumulate(out.jacobian, a.jacobian, b.value.inverse());
            accumulate(out.jacobian, b.jacobian, -a.value / b.value.square());
            break;
        case Op::Pow:
            out.value = a.value.pow(b.value);
            accumulate(out.jacobian, a.jacobian, b.value * a.value.pow(b.value - 1.0));
            accumulate(out.jacobian, b.jacobian, out.value * a.value.log());
            break;
        case Op::PowAbs: {
            out.value = protected_pow(a.value, b.value);
            Eigen::ArrayXd mag = a.value.abs();
            accumulate(out.jacobian, a.jacobian, b.value * protected_pow(a.value, b.value - 1.0) * sign(a.value));
            accumulate(out.jacobian, b.jacobian, out.value * mag.log());
            break;
        }
        default:
            throw DataError("unexpected operator");
        }
        return out;
    }

    auto ssr_of(Eigen::ArrayXd const& prediction, Eigen::VectorXd const& target) -> double
    {
        return (target.array() - prediction).square().sum();
    }

    auto fitness_from_ssr(double ssr, Eigen::Index n, LossKind loss) -> double
    {
        return loss == LossKind::Mse ? -ssr / static_cast<double>(n) : -gaussian_nll(ssr, n);
    }

    struct LocalFit {
        std::vector<double> params;
        double ssr { std::numeric_limits<double>::infinity() };
    };

    // Levenberg-Marquardt with Marquardt diagonal scaling.
    auto levenberg_marquardt(Expr const& e, std::vector<double> theta, Dataset const& data, int max_iterations) -> std::optional<LocalFit>
    {
        auto ev = eval_jac(e, theta, data.predictors);
        Eigen::VectorXd r = data.target - ev.value.matrix();
        if (!r.allFinite() || !ev.jacobian.allFinite()) {
            return std::nullopt;
        }
        double cost = r.squaredNorm();
        double lambda = 1e-3;
        auto const p = static_cast<Eigen::Index>(theta.size());
        for (int it = 0; it < max_iterations; ++it) {
            Eigen::MatrixXd const& jac = ev.jacobian;
            Eigen::MatrixXd a = jac.transpose() * jac;
            Eigen::VectorXd g = jac.transpose() * r;
            if (g.norm() <= 1e-15 * (1.0 + cost)) {
                break;
            }
            Eigen::VectorXd diag = a.diagonal().cwiseMax(1e-12 * (1.0 + a.diagonal().maxCoeff()));
            bool accepted = false;
            double step_norm = 0.0;
            double old_cost = cost;
            while (lambda < 1e16) {
                Eigen::MatrixXd m = a;
                m.diagonal() += lambda * diag;
                Eigen::VectorXd delta = m.ldlt().solve(g);
                if (!delta.allFinite()) {
                    lambda *= 4.0;
                    continue;
                }
                std::vector<double> trial(theta);
                for (Eigen::Index j = 0; j < p; ++j) {
                    trial[static_cast<std::size_t>(j)] += delta(j);
                }
                auto tev = eval_jac(e, trial, data.predictors);
                Eigen::VectorXd tr = data.target - tev.value.matrix();
                double tcost = tr.squaredNorm();
                if (tr.allFinite() && tev.jacobian.allFinite() && tcost < cost) {
                    theta = std::move(trial);
                    ev = std::move(tev);
                    r = std::move(tr);
                    cost = tcost;
                    lambda = std::max(lambda / 3.0, 1e-12);
                    step_norm = delta.norm();
                    accepted = true;
                    break;
                }
                lambda *= 4.0;
            }
            if (!accepted) {
                break;
            }
            double theta_norm = Eigen::Map<Eigen::VectorXd const>(theta.data(), p).norm();
            if (old_cost - cost <= 1e-15 * old_cost && step_norm <= 1e-10 * (theta_norm + 1e-10)) {
                break;
            }
        }
        return LocalFit { std::move(theta), cost };
    }

} // namespace

auto evaluate(Expr const& e, std::span<double const> params, Eigen::MatrixXd const& predictors) -> Eigen::ArrayXd
{
    check_inputs(e, params, predictors);
    return eval(e, params, predictors);
}

auto evaluate(Expr const& e, std::span<double const> params, Dataset const& data) -> Eigen::ArrayXd
{
    return evaluate(e, params, data.predictors);
}

auto evaluate_with_jacobian(Expr const& e, std::span<double const> params, Eigen::MatrixXd const& predictors) -> Evaluation
{
    check_inputs(e, params, predictors);
    return eval_jac(e, params, predictors);
}

auto count_nonfinite(Eigen::ArrayXd const& values) -> Eigen::Index
{
    return values.size() - values.isFinite().count();
}

auto gaussian_nll(double ssr, Eigen::Index n) -> double
{
    auto const nn = static_cast<double>(n);
    double var = std::max(ssr / nn, kVarianceFloor);
    return 0.5 * nn * std::log(2.0 * std::numbers::pi * var) + ssr / (2.0 * var);
}

auto metrics(Eigen::ArrayXd const& prediction, Eigen::VectorXd const& target) -> Metrics
{
    if (prediction.size() != target.size() || target.size() == 0) {
        throw DataError("prediction and target sizes differ or are empty");
    }
    Metrics m;
    auto const n = target.size();
    double ssr = ssr_of(prediction, target);
    m.mse = ssr / static_cast<double>(n);
    double sst = (target.array() - target.mean()).square().sum();
    if (sst > 0.0) {
        m.r2 = 1.0 - ssr / sst;
    }
    m.nll = gaussian_nll(ssr, n);
    return m;
}

auto metrics(Expr const& e, std::span<double const> params, Dataset const& data) -> Metrics
{
    return metrics(evaluate(e, params, data), data.target);
}

auto fitness(Expr const& e, std::span<double const> params, Dataset const& data, LossKind loss) -> double
{
    auto pred = evaluate(e, params, data);
    if (count_nonfinite(pred) > 0) {
        throw DataError(fmt::format("{} prediction(s) are not finite", count_nonfinite(pred)));
    }
    return fitness_from_ssr(ssr_of(pred, data.target), data.rows(), loss);
}

auto loss_gradient(Expr const& e, std::span<double const> params, Dataset const& data, LossKind loss) -> LossGradient
{
    auto ev = evaluate_with_jacobian(e, params, data.predictors);
    Eigen::VectorXd r = data.target - ev.value.matrix();
    double ssr = r.squaredNorm();
    auto const n = static_cast<double>(data.rows());
    Eigen::VectorXd jtr = ev.jacobian.transpose() * r;
    LossGradient out;
    if (loss == LossKind::Mse) {
        out.loss = ssr / n;
        out.gradient = -2.0 / n * jtr;
    } else {
        out.loss = gaussian_nll(ssr, data.rows());
        double var = ssr / n;
        out.gradient = var > kVarianceFloor ? Eigen::VectorXd(-n / ssr * jtr) : Eigen::VectorXd(-jtr / kVarianceFloor);
    }
    return out;
}

auto fit_params(Expr const& e, Dataset const& data, FitOptions const& options) -> FitResult
{
    if (data.empty()) {
        throw DataError("cannot fit on an empty dataset");
    }
    auto const span = expr::parameter_span(e);
    check_inputs(e, std::vector<double>(span, 0.0), data.predictors);
    if (span == 0) {
        return { {}, fitness(e, {}, data, options.loss), 1 };
    }

    std::vector<std::vector<double>> starts;
    if (!options.initial.empty()) {
        auto init = options.initial;
        init.resize(span, 1.0);
        starts.push_back(std::move(init));
    }
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> uniform(-2.0, 2.0);
    for (int r = 0; r < std::max(options.restarts, 1); ++r) {
        std::vector<double> theta(span);
        for (auto& t : theta) {
            t = uniform(rng);
        }
        starts.push_back(std::move(theta));
    }

    std::optional<LocalFit> best;
    int ok = 0;
    for (auto& start : starts) {
        auto fit = levenberg_marquardt(e, std::move(start), data, options.max_iterations);
        if (!fit) {
            continue;
        }
        ++ok;
        if (!best || fit->ssr < best->ssr) {
            best = std::move(fit);
        }
    }
    if (!best) {
        throw DataError(fmt::format("all {} restart(s) produced non-finite predictions", starts.size()));
    }
    return { std::move(best->params), fitness_from_ssr(best->ssr, data.rows(), options.loss), ok };
}

auto alphabet_size(Dataset const& data) -> std::size_t
{
    return static_cast<std::size_t>(expr::kOperatorAlphabetSize) + static_cast<std::size_t>(data.columns()) + 1;
}

auto description_length(Expr const& e, std::span<double const> params, Dataset const& data) -> double
{
    auto ev = evaluate_with_jacobian(e, params, data.predictors);
    Eigen::VectorXd r = data.target - ev.value.matrix();
    double ssr = r.squaredNorm();
    auto const n = data.rows();
    double var = std::max(ssr / static_cast<double>(n), kVarianceFloor);

    double dl = gaussian_nll(ssr, n);
    dl += static_cast<double>(expr::size_of(e)) * std::log(static_cast<double>(alphabet_size(data)));

    std::set<std::uint32_t> used;
    expr::for_each_subtree(e, [&](Expr const& node) {
        if (node.op == Op::Param) {
            used.insert(node.index);
        }
    });
    int p = 0;
    for (auto j : used) {
        double theta = params[j];
        if (theta == 0.0) {
            continue;
        }
        ++p;
        double info = std::max(ev.jacobian.col(j).squaredNorm() / var, kVarianceFloor);
        dl += 0.5 * std::log(info) + std::log(std::abs(theta));
    }
    dl -= 0.5 * p * std::log(3.0);
    return dl;
}

} // namespace egsr::fitdata
