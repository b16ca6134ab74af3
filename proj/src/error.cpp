#include "shapesel/error.hpp"

namespace shapesel {

std::string_view to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::FileNotFound: return "FileNotFound";
        case ErrorKind::ColumnMissing: return "ColumnMissing";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::SplitTooSmall: return "SplitTooSmall";
        case ErrorKind::SeriesTooShort: return "SeriesTooShort";
        case ErrorKind::SingularSystem: return "SingularSystem";
        case ErrorKind::GeometryMismatch: return "GeometryMismatch";
        case ErrorKind::IndexMismatch: return "IndexMismatch";
        case ErrorKind::LengthMismatch: return "LengthMismatch";
        case ErrorKind::CoverageMismatch: return "CoverageMismatch";
        case ErrorKind::OffsetOutOfRange: return "OffsetOutOfRange";
        case ErrorKind::NonFiniteInput: return "NonFiniteInput";
        case ErrorKind::NonFiniteGradient: return "NonFiniteGradient";
        case ErrorKind::ShapeMismatch: return "ShapeMismatch";
        case ErrorKind::EmptySampleSet: return "EmptySampleSet";
        case ErrorKind::ConfigInvalid: return "ConfigInvalid";
        case ErrorKind::TooFewSamples: return "TooFewSamples";
        case ErrorKind::ShapeletTooLong: return "ShapeletTooLong";
        case ErrorKind::EmptyShapeletSet: return "EmptyShapeletSet";
        case ErrorKind::SpecInvalid: return "SpecInvalid";
        case ErrorKind::IoError: return "IoError";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

namespace {

std::string compose(ErrorKind kind, const std::string& stage, const std::string& message) {
    std::string out;
    if (!stage.empty()) {
        out += "[" + stage + "] ";
    }
    out += std::string(to_string(kind));
    out += ": ";
    out += message;
    return out;
}

}  // namespace

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> row)
    : std::runtime_error(compose(kind, {}, message)), kind_(kind), row_(row), detail_(message) {}

Error Error::with_stage(std::string stage) const {
    Error copy(kind_, detail_, row_);
    static_cast<std::runtime_error&>(copy) = std::runtime_error(compose(kind_, stage, detail_));
    copy.stage_ = std::move(stage);
    return copy;
}

}  // namespace shapesel
