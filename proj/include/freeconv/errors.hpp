#pragma once

#include <stdexcept>
#include <string>

namespace freeconv {

// All engine errors derive from error; the CLI maps each subclass to a
// stable machine-readable code.
struct error : std::runtime_error {
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
    virtual const char* code() const { return "error"; }
};

struct capacity_error : error {
    using error::error;
    const char* code() const override { return "capacity"; }
};

struct argument_error : error {
    using error::error;
    const char* code() const override { return "argument"; }
};

struct parse_error : error {
    parse_error(const std::string& msg, std::size_t pos)
        : error(msg + " at position " + std::to_string(pos)), position(pos) {}
    std::size_t position;
    const char* code() const override { return "parse"; }
};

struct missing_moment_error : error {
    using error::error;
    const char* code() const override { return "missing-moment"; }
};

struct normalization_error : error {
    using error::error;
    const char* code() const override { return "normalization"; }
};

struct evaluation_error : error {
    using error::error;
    const char* code() const override { return "evaluation"; }
};

struct scope_error : error {
    using error::error;
    const char* code() const override { return "scope"; }
};

}  // namespace freeconv
