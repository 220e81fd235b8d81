// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_TESTS_FIT_CHECKS_HPP
#define EGSR_TESTS_FIT_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "egsr/fitdata/model.hpp"

namespace egsr::oracle {

struct GradientCheck {
    std::size_t checked { 0 };
    std::size_t failures { 0 };
    std::string first_failure;
};

// Compares loss_gradient with central differences of a loss recomputed by
// scalar evaluation, on `triples` random (expression, theta, data) triples
// with a finite loss. Tolerance: max(1e-6, 1e-4 |analytic|).
auto gradient_check(std::uint64_t seed, std::size_t triples, fitdata::LossKind loss) -> GradientCheck;

// Loss by scalar evaluation: mean squared error or Gaussian NLL with the
// variance floor.
auto reference_loss(expr::Expr const& e, std::vector<double> const& theta, std::vector<std::vector<double>> const& x,
    std::vector<double> const& y, fitdata::LossKind loss) -> double;

} // namespace egsr::oracle

#endif
