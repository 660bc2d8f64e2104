#pragma once

#include <stdexcept>
#include <string>

namespace eitscan {

// Error taxonomy shared by the library and the CLI. The CLI maps these to
// exit codes: config_error -> 2, numerical_error -> 3, io_error -> 4.

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace eitscan
