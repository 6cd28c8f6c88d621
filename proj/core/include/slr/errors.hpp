#pragma once

#include <stdexcept>
#include <string>

namespace slr {

/// Base for all library errors. `code()` is a stable machine-readable
/// identifier; `what()` carries the human-readable detail.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

struct ZeroRadiusError : Error {
    explicit ZeroRadiusError(const std::string& msg = "point coincides with origin")
        : Error("ZeroRadius", msg) {}
};

struct NoGroundNearbyError : Error {
    explicit NoGroundNearbyError(const std::string& msg = "no ground points within radius")
        : Error("NoGroundNearby", msg) {}
};

struct EmptyCloudError : Error {
    explicit EmptyCloudError(const std::string& msg = "point cloud is empty")
        : Error("EmptyCloud", msg) {}
};

struct EmptyInputError : Error {
    explicit EmptyInputError(const std::string& msg = "input sequence is empty")
        : Error("EmptyInput", msg) {}
};

struct EmptyTargetError : Error {
    explicit EmptyTargetError(const std::string& msg = "target cloud is empty")
        : Error("EmptyTarget", msg) {}
};

struct NotEnoughCellsError : Error {
    explicit NotEnoughCellsError(const std::string& msg = "fewer candidate cells than requested positions")
        : Error("NotEnoughCells", msg) {}
};

struct NoPointsInRangeError : Error {
    explicit NoPointsInRangeError(const std::string& msg = "no points fall inside the histogram range")
        : Error("NoPointsInRange", msg) {}
};

struct IoError : Error {
    explicit IoError(const std::string& msg) : Error("Io", msg) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& msg) : Error("Config", msg) {}
};

}  // namespace slr
