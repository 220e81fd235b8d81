// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#include "fit_checks.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include <fmt/format.h>

#include "fixtures.hpp"
#include "oracles.hpp"

namespace egsr::oracle {

auto reference_loss(expr::Expr const& e, std::vector<double> const& theta, std::vector<std::vector<double>> const& x,
    std::vector<double> const& y, fitdata::LossKind loss) -> double
{
    double ssr = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        double r = y[i] - eval_point(e, x[i], theta);
        ssr += r * r;
    }
    auto n = static_cast<double>(y.size());
    if (loss == fitdata::LossKind::Mse) {
        return ssr / n;
    }
    double var = std::max(ssr / n, 1e-12);
    return 0.5 * n * std::log(2.0 * std::numbers::pi * var) + ssr / (2.0 * var);
}

auto gradient_check(std::uint64_t seed, std::size_t triples, fitdata::LossKind loss) -> GradientCheck
{
    Rng rng(seed);
    std::uniform_real_distribution<double> coef(0.5, 1.5);
    std::uniform_real_distribution<double> noise(-1.0, 1.0);
    GenOptions o;
    o.variables = 3;
    o.parameters = 3;
    GradientCheck out;
    for (int attempt = 0; attempt < 100000 && out.checked < triples; ++attempt) {
        auto e = random_expr(rng, 14, o);
        auto span = expr::parameter_span(e);
        if (span == 0) {
            continue;
        }
        auto data = synthetic(30, 3, rng(), [&](std::span<double const> v) { return v[0] - v[1] * v[2] + noise(rng); }, 0.5, 2.0);
        std::vector<double> theta(span);
        for (auto& t : theta) {
            t = coef(rng);
        }
        auto x = rows_of(data);
        auto y = target_of(data);
        double base = reference_loss(e, theta, x, y, loss);
        if (!std::isfinite(base) || std::fabs(base) > 1e8) {
            continue;
        }
        fitdata::LossGradient g;
        try {
            g = fitdata::loss_gradient(e, theta, data, loss);
        } catch (fitdata::DataError const&) {
            continue;
        }
        if (!g.gradient.allFinite()) {
            continue;
        }
        bool ok = true;
        std::string detail;
        bool usable = true;
        for (std::size_t j = 0; j < span && usable; ++j) {
            double h = 1e-6 * std::max(1.0, std::fabs(theta[j]));
            auto up = theta;
            auto down = theta;
            up[j] += h;
            down[j] -= h;
            double fd = (reference_loss(e, up, x, y, loss) - reference_loss(e, down, x, y, loss)) / (2.0 * h);
            if (!std::isfinite(fd)) {
                usable = false;
                break;
            }
            double a = g.gradient(static_cast<Eigen::Index>(j));
            if (std::fabs(a - fd) > std::max(1e-6, 1e-4 * std::fabs(a))) {
                ok = false;
                detail = fmt::format("{} d/dt{}: analytic {} vs central difference {}", expr::render(e), j, a, fd);
            }
        }
        if (!usable) {
            continue;
        }
        ++out.checked;
        if (!ok && out.failures++ == 0) {
            out.first_failure = detail;
        }
    }
    return out;
}

} // namespace egsr::oracle
