// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The egsr Authors

#ifndef EGSR_FITDATA_DATASET_HPP
#define EGSR_FITDATA_DATASET_HPP

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace egsr::fitdata {

class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Predictor columns are addressed as x0..x{d-1} in file order, skipping the
// target column.
struct Dataset {
    Eigen::MatrixXd predictors;
    Eigen::VectorXd target;
    std::vector<std::string> predictor_names;
    std::string target_name;

    [[nodiscard]] auto rows() const noexcept -> Eigen::Index { return target.size(); }
    [[nodiscard]] auto columns() const noexcept -> Eigen::Index { return predictors.cols(); }
    [[nodiscard]] auto empty() const noexcept -> bool { return target.size() == 0; }
};

// CSV with a header row. The target defaults to the last column.
auto load_csv(std::string const& path, std::optional<std::string> const& target = std::nullopt) -> Dataset;
auto parse_csv(std::string const& text, std::optional<std::string> const& target = std::nullopt) -> Dataset;

// Throws unless `test` has the same predictor columns as `train`.
void check_compatible(Dataset const& train, Dataset const& test);

} // namespace egsr::fitdata

#endif
