#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "shapesel/data.hpp"

namespace shapesel {

/// One length-fl forecast per window index 0..n-1.
class PredictionSet {
public:
    PredictionSet(std::vector<std::vector<double>> rows, std::size_t horizon, std::string source);

    std::size_t size() const noexcept { return rows_.size(); }
    std::size_t horizon() const noexcept { return horizon_; }
    const std::string& source() const noexcept { return source_; }
    std::span<const double> operator[](std::size_t i) const { return rows_[i]; }

private:
    std::vector<std::vector<double>> rows_;
    std::size_t horizon_;
    std::string source_;
};

/// Per-window MSE with its mean and population standard deviation.
struct ErrorVector {
    std::vector<double> errors;
    double mean = 0.0;
    double std = 0.0;

    std::size_t size() const noexcept { return errors.size(); }

    static ErrorVector from_errors(std::vector<double> errors);
};

/// Direct multi-output ridge regression from a full context to the whole
/// horizon. The intercept is left unpenalised (fit on centred data).
class BaselineModel {
public:
    BaselineModel(Eigen::MatrixXd weights, Eigen::VectorXd intercept);

    std::size_t context_length() const noexcept { return static_cast<std::size_t>(weights_.cols()); }
    std::size_t horizon() const noexcept { return static_cast<std::size_t>(weights_.rows()); }
    const Eigen::MatrixXd& weights() const noexcept { return weights_; }
    const Eigen::VectorXd& intercept() const noexcept { return intercept_; }

    std::vector<double> forecast(std::span<const double> context) const;

private:
    Eigen::MatrixXd weights_;    // fl x sl
    Eigen::VectorXd intercept_;  // fl
};

BaselineModel fit_baseline(const TimeSeries& train, std::size_t sl, std::size_t fl, double ridge = 1e-3);

PredictionSet predict(const BaselineModel& model, const WindowSet& windows);

/// Reads `window_index,v_1,...,v_fl` rows; the file must cover the window
/// set exactly once per index.
PredictionSet load_external_predictions(const std::filesystem::path& path, const WindowSet& windows,
                                        const std::string& name = "external");

void write_predictions(const std::filesystem::path& path, const PredictionSet& preds);

ErrorVector per_window_mse(const PredictionSet& preds, const WindowSet& windows);

}  // namespace shapesel
