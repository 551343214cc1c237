#pragma once

#include <stdexcept>
#include <string>

namespace qdlane {

// Not enough geometric evidence to continue (e.g. a lane half with no
// segments). The CLI maps this to exit code 3.
class insufficient_data : public std::runtime_error {
public:
    insufficient_data(std::string what_part, const std::string& message)
        : std::runtime_error(message), part_(std::move(what_part)) {}

    const std::string& part() const noexcept { return part_; }

private:
    std::string part_;
};

// An object was used before it was ready (e.g. an untrained centroid).
class invalid_state : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Least-squares fit over points that all share one x coordinate.
class vertical_line : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Wraps an error thrown inside a pipeline stage with the stage name.
class stage_error : public std::runtime_error {
public:
    stage_error(std::string stage, const std::string& message, bool insufficient)
        : std::runtime_error(stage + ": " + message),
          stage_(std::move(stage)),
          insufficient_(insufficient) {}

    const std::string& stage() const noexcept { return stage_; }
    bool insufficient() const noexcept { return insufficient_; }

private:
    std::string stage_;
    bool insufficient_;
};

} // namespace qdlane
