#pragma once

#include <stdexcept>
#include <string>

namespace chomp {

// Error taxonomy shared across the pipeline. Each condition gets its own
// type so callers (and the CLI) can report the failing category by name.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* kind() const noexcept { return "Error"; }
};

#define CHOMP_DEFINE_ERROR(NAME)                                        \
    struct NAME : Error {                                               \
        explicit NAME(const std::string& msg) : Error(msg) {}           \
        const char* kind() const noexcept override { return #NAME; }    \
    }

CHOMP_DEFINE_ERROR(MissingChannel);
CHOMP_DEFINE_ERROR(FormatError);
CHOMP_DEFINE_ERROR(CorruptData);
CHOMP_DEFINE_ERROR(InsufficientData);
CHOMP_DEFINE_ERROR(ConfigError);
CHOMP_DEFINE_ERROR(DegenerateSignal);

#undef CHOMP_DEFINE_ERROR

}  // namespace chomp
