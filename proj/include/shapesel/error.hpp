#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace shapesel {

enum class ErrorKind {
    FileNotFound,
    ColumnMissing,
    ParseError,
    SplitTooSmall,
    SeriesTooShort,
    SingularSystem,
    GeometryMismatch,
    IndexMismatch,
    LengthMismatch,
    CoverageMismatch,
    OffsetOutOfRange,
    NonFiniteInput,
    NonFiniteGradient,
    ShapeMismatch,
    EmptySampleSet,
    ConfigInvalid,
    TooFewSamples,
    ShapeletTooLong,
    EmptyShapeletSet,
    SpecInvalid,
    IoError,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. Carries a machine-checkable kind, an optional
/// row index for parse failures and an optional pipeline stage label.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> row = std::nullopt);

    ErrorKind kind() const noexcept { return kind_; }
    std::optional<std::size_t> row() const noexcept { return row_; }
    const std::string& stage() const noexcept { return stage_; }
    const std::string& detail() const noexcept { return detail_; }

    /// Copy of this error labelled with the pipeline stage it escaped from.
    Error with_stage(std::string stage) const;

private:
    ErrorKind kind_;
    std::optional<std::size_t> row_;
    std::string detail_;
    std::string stage_;
};

}  // namespace shapesel
