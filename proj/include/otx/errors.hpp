#pragma once

#include <stdexcept>
#include <string>

namespace otx {

// Bad configuration or flag combination; CLI exit code 1.
struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem / stream failure; CLI exit code 2.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& msg) : std::runtime_error(msg) {}
};

// External command (OCR) failed or timed out; CLI exit code 3.
struct command_error : std::runtime_error {
    explicit command_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace otx
