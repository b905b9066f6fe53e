#pragma once

#include <stdexcept>
#include <string>

namespace nsfilter {

// Bad or inconsistent configuration values (unknown key, failed validation).
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem problems: missing input file, unwritable output directory.
class IoError : public std::runtime_error {
public:
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

// Structurally broken data files (wrong column count, malformed numbers).
class SchemaError : public std::runtime_error {
public:
    explicit SchemaError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite state detected mid-integration; carries the offending step.
class BlowupError : public std::runtime_error {
public:
    BlowupError(const std::string& what, long step)
        : std::runtime_error(what), step_(step) {}
    long step() const { return step_; }

private:
    long step_;
};

} // namespace nsfilter
