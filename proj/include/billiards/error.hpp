#pragma once

#include <stdexcept>
#include <string>

namespace billiards {

enum class ErrorKind {
    DegenerateInput,
    ZeroNormal,
    OffPlane,
    ParallelLines,
    IntersectingLines,
    IdentityRotation,
    AxisNotUnique,
    UniquenessViolation,  // start-point system rank deficient; must be unreachable
    Unclassifiable,
    NotCornerPyramid,
    NotSymmetric,
    RightAngleBase,
    InvalidArgument,
};

inline const char* to_string(ErrorKind k) {
    switch (k) {
        case ErrorKind::DegenerateInput: return "degenerate input";
        case ErrorKind::ZeroNormal: return "zero normal";
        case ErrorKind::OffPlane: return "point off plane";
        case ErrorKind::ParallelLines: return "parallel lines";
        case ErrorKind::IntersectingLines: return "intersecting lines";
        case ErrorKind::IdentityRotation: return "identity rotation";
        case ErrorKind::AxisNotUnique: return "rotation axis not unique";
        case ErrorKind::UniquenessViolation: return "uniqueness violation";
        case ErrorKind::Unclassifiable: return "unclassifiable";
        case ErrorKind::NotCornerPyramid: return "not a corner pyramid";
        case ErrorKind::NotSymmetric: return "not a symmetric pyramid";
        case ErrorKind::RightAngleBase: return "right-angled base";
        case ErrorKind::InvalidArgument: return "invalid argument";
    }
    return "unknown";
}

class BilliardError : public std::runtime_error {
public:
    BilliardError(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace billiards
