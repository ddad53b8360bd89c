#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ttf {

enum class ErrorKind {
    // validation
    EmptyEpoch,
    NonAlternating,
    NonPositiveDuration,
    SensorArityMismatch,
    MisplacedFail,
    MissingFail,
    NonFiniteSensor,
    // numerical
    DomainError,
    DegenerateInfo,
    AlignmentError,
    NoSensors,
    RankDeficient,
    NotConverged,
    // prediction
    MissingCovariate,
    EmptyList,
    LengthMismatch,
    // ingestion
    ParseError,
    DuplicateSeq,
    InvalidArgument,
};

std::string_view to_string(ErrorKind kind);

/// True for the kinds the CLI reports with exit code 2 (numerical failure).
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

} // namespace ttf
