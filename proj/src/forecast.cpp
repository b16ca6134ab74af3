#include "shapesel/forecast.hpp"

#include <cmath>
#include <numeric>

#include "shapesel/error.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

PredictionSet::PredictionSet(std::vector<std::vector<double>> rows, std::size_t horizon, std::string source)
    : rows_(std::move(rows)), horizon_(horizon), source_(std::move(source)) {
    for (std::size_t i = 0; i < rows_.size(); ++i) {
        if (rows_[i].size() != horizon_) {
            throw Error(ErrorKind::LengthMismatch, "prediction " + std::to_string(i) + " has " +
                                                       std::to_string(rows_[i].size()) + " values, expected " +
                                                       std::to_string(horizon_));
        }
        for (double v : rows_[i]) {
            if (!std::isfinite(v)) {
                throw Error(ErrorKind::NonFiniteInput, "prediction " + std::to_string(i) + " is not finite", i);
            }
        }
    }
}

ErrorVector ErrorVector::from_errors(std::vector<double> errors) {
    ErrorVector ev;
    ev.errors = std::move(errors);
    if (ev.errors.empty()) {
        return ev;
    }
    const double n = static_cast<double>(ev.errors.size());
    ev.mean = std::accumulate(ev.errors.begin(), ev.errors.end(), 0.0) / n;
    double ss = 0.0;
    for (double e : ev.errors) {
        ss += (e - ev.mean) * (e - ev.mean);
    }
    ev.std = std::sqrt(ss / n);
    return ev;
}

BaselineModel::BaselineModel(Eigen::MatrixXd weights, Eigen::VectorXd intercept)
    : weights_(std::move(weights)), intercept_(std::move(intercept)) {
    if (intercept_.size() != weights_.rows()) {
        throw Error(ErrorKind::ShapeMismatch, "intercept length must equal the horizon");
    }
}

std::vector<double> BaselineModel::forecast(std::span<const double> context) const {
    if (context.size() != context_length()) {
        throw Error(ErrorKind::GeometryMismatch, "context length " + std::to_string(context.size()) +
                                                     " does not match model context length " +
                                                     std::to_string(context_length()));
    }
    const Eigen::Map<const Eigen::VectorXd> x(context.data(), static_cast<Eigen::Index>(context.size()));
    const Eigen::VectorXd y = weights_ * x + intercept_;
    return {y.data(), y.data() + y.size()};
}

BaselineModel fit_baseline(const TimeSeries& train, std::size_t sl, std::size_t fl, double ridge) {
    if (sl == 0 || fl == 0) {
        throw Error(ErrorKind::InvalidArgument, "sl and fl must be positive");
    }
    if (!(ridge >= 0.0) || !std::isfinite(ridge)) {
        throw Error(ErrorKind::InvalidArgument, "ridge must be a finite non-negative number");
    }
    if (train.size() < sl + fl) {
        throw Error(ErrorKind::SeriesTooShort, "training series of length " + std::to_string(train.size()) +
                                                   " is shorter than sl + fl = " + std::to_string(sl + fl));
    }
    const WindowSet windows(train, sl, fl, 1);
    const auto n = static_cast<Eigen::Index>(windows.size());
    const auto p = static_cast<Eigen::Index>(sl);
    const auto h = static_cast<Eigen::Index>(fl);

    Eigen::MatrixXd X(n, p);
    Eigen::MatrixXd Y(n, h);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto ctx = windows.context(static_cast<std::size_t>(i));
        const auto tgt = windows.target(static_cast<std::size_t>(i));
        X.row(i) = Eigen::Map<const Eigen::RowVectorXd>(ctx.data(), p);
        Y.row(i) = Eigen::Map<const Eigen::RowVectorXd>(tgt.data(), h);
    }
    const Eigen::RowVectorXd x_mean = X.colwise().mean();
    const Eigen::RowVectorXd y_mean = Y.colwise().mean();
    X.rowwise() -= x_mean;
    Y.rowwise() -= y_mean;

    Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(p, p);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(X.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    gram.diagonal().array() += ridge;
    const Eigen::MatrixXd rhs = X.transpose() * Y;

    Eigen::LDLT<Eigen::MatrixXd> ldlt(gram);
    const double scale = std::max(gram.diagonal().cwiseAbs().maxCoeff(), 1.0);
    const bool degenerate = ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
                            ldlt.vectorD().cwiseAbs().minCoeff() <= 1e-12 * scale;
    if (degenerate) {
        throw Error(ErrorKind::SingularSystem,
                    "normal equations are rank-deficient; use a positive ridge penalty");
    }
    const Eigen::MatrixXd W = ldlt.solve(rhs);  // sl x fl

    Eigen::MatrixXd weights = W.transpose();
    Eigen::VectorXd intercept = y_mean.transpose() - weights * x_mean.transpose();
    return BaselineModel(std::move(weights), std::move(intercept));
}

PredictionSet predict(const BaselineModel& model, const WindowSet& windows) {
    if (windows.context_length() != model.context_length() || windows.horizon() != model.horizon()) {
        throw Error(ErrorKind::GeometryMismatch,
                    "window geometry (" + std::to_string(windows.context_length()) + ", " +
                        std::to_string(windows.horizon()) + ") does not match the model (" +
                        std::to_string(model.context_length()) + ", " + std::to_string(model.horizon()) + ")");
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(windows.size());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        rows.push_back(model.forecast(windows.context(i)));
    }
    return PredictionSet(std::move(rows), windows.horizon(), "baseline");
}

PredictionSet load_external_predictions(const std::filesystem::path& path, const WindowSet& windows,
                                        const std::string& name) {
    if (!std::filesystem::exists(path)) {
        throw Error(ErrorKind::FileNotFound, "no such prediction file '" + path.string() + "'");
    }
    const std::string contents = text::read_file(path);
    const auto rows = text::lines(contents);
    const std::size_t fl = windows.horizon();
    const std::size_t n = windows.size();

    std::vector<std::vector<double>> preds(n);
    std::vector<bool> seen(n, false);
    for (std::size_t r = 1; r < rows.size(); ++r) {
        const std::size_t data_row = r - 1;
        if (text::trim(rows[r]).empty()) {
            continue;
        }
        const auto fields = text::split(rows[r], ',');
        const auto idx = text::parse_int(fields.front());
        if (!idx) {
            throw Error(ErrorKind::ParseError, "row " + std::to_string(data_row) + " has no valid window_index",
                        data_row);
        }
        if (*idx < 0 || static_cast<std::size_t>(*idx) >= n) {
            throw Error(ErrorKind::IndexMismatch, "window index " + std::to_string(*idx) +
                                                      " is outside the window set of size " + std::to_string(n));
        }
        const auto i = static_cast<std::size_t>(*idx);
        if (seen[i]) {
            throw Error(ErrorKind::IndexMismatch, "duplicate window index " + std::to_string(i));
        }
        if (fields.size() - 1 != fl) {
            throw Error(ErrorKind::LengthMismatch, "row for window " + std::to_string(i) + " carries " +
                                                       std::to_string(fields.size() - 1) + " values, expected " +
                                                       std::to_string(fl));
        }
        std::vector<double> values;
        values.reserve(fl);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            const auto v = text::parse_double(fields[j]);
            if (!v) {
                throw Error(ErrorKind::ParseError,
                            "row " + std::to_string(data_row) + " field " + std::to_string(j) + " is not a number",
                            data_row);
            }
            values.push_back(*v);
        }
        preds[i] = std::move(values);
        seen[i] = true;
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!seen[i]) {
            throw Error(ErrorKind::IndexMismatch, "prediction file is missing window index " + std::to_string(i));
        }
    }
    return PredictionSet(std::move(preds), fl, "external:" + name);
}

void write_predictions(const std::filesystem::path& path, const PredictionSet& preds) {
    std::string out = "window_index";
    for (std::size_t j = 1; j <= preds.horizon(); ++j) {
        out += ",v_" + std::to_string(j);
    }
    out += '\n';
    for (std::size_t i = 0; i < preds.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        out += text::join(preds[i]);
        out += '\n';
    }
    text::write_file(path, out);
}

ErrorVector per_window_mse(const PredictionSet& preds, const WindowSet& windows) {
    if (preds.size() != windows.size() || preds.horizon() != windows.horizon()) {
        throw Error(ErrorKind::CoverageMismatch, "prediction set (" + std::to_string(preds.size()) + " x " +
                                                     std::to_string(preds.horizon()) +
                                                     ") does not cover the window set (" +
                                                     std::to_string(windows.size()) + " x " +
                                                     std::to_string(windows.horizon()) + ")");
    }
    std::vector<double> errors(windows.size());
    const double fl = static_cast<double>(windows.horizon());
    for (std::size_t i = 0; i < windows.size(); ++i) {
        const auto y = windows.target(i);
        const auto yhat = preds[i];
        double ss = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double d = yhat[j] - y[j];
            ss += d * d;
        }
        errors[i] = ss / fl;
    }
    return ErrorVector::from_errors(std::move(errors));
}

}  // namespace shapesel
