#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace zjsc {

/// Base class of every error raised by the toolchain.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input bytes are not valid UTF-8. `offset` is the first offending byte.
class EncodingError : public Error {
public:
    EncodingError(std::size_t offset, const std::string& what)
        : Error(what), m_offset(offset) {}
    std::size_t offset() const noexcept { return m_offset; }

private:
    std::size_t m_offset;
};

class LocatorError : public Error {
public:
    using Error::Error;
};

enum class FetchErrorKind { NotFound, Io, HttpStatus, Timeout };

const char* to_string(FetchErrorKind kind);

class FetchError : public Error {
public:
    FetchError(FetchErrorKind kind, std::string locator, std::string detail, int http_status = 0);

    FetchErrorKind kind() const noexcept { return m_kind; }
    int http_status() const noexcept { return m_http_status; }
    const std::string& locator() const noexcept { return m_locator; }
    const std::string& detail() const noexcept { return m_detail; }

    // Inclusion chain leading to the failed locator, outermost first. Filled
    // in by the composer when the error crosses an include boundary.
    const std::vector<std::string>& chain() const noexcept { return m_chain; }
    FetchError with_chain(std::vector<std::string> chain) const;

private:
    FetchErrorKind m_kind;
    std::string m_locator;
    std::string m_detail;
    int m_http_status;
    std::vector<std::string> m_chain;
};

/// An include cycle. `chain` starts and ends with the same locator.
class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> chain);
    const std::vector<std::string>& chain() const noexcept { return m_chain; }

private:
    std::vector<std::string> m_chain;
};

class DepthExceeded : public Error {
public:
    DepthExceeded(std::size_t max_depth, std::vector<std::string> chain);
    std::size_t max_depth() const noexcept { return m_max_depth; }
    const std::vector<std::string>& chain() const noexcept { return m_chain; }

private:
    std::size_t m_max_depth;
    std::vector<std::string> m_chain;
};

class ScenarioError : public Error {
public:
    ScenarioError(std::size_t step, const std::string& what)
        : Error(what), m_step(step) {}
    // Index of the offending step; npos when the error is not step-specific.
    std::size_t step() const noexcept { return m_step; }

private:
    std::size_t m_step;
};

class UnknownInstance : public Error {
public:
    using Error::Error;
};

enum class TargetErrorKind { TargetNotFound, NotAComponent, NoAncestorComponent };

const char* to_string(TargetErrorKind kind);

class TargetError : public Error {
public:
    TargetError(TargetErrorKind kind, const std::string& what)
        : Error(what), m_kind(kind) {}
    TargetErrorKind kind() const noexcept { return m_kind; }

private:
    TargetErrorKind m_kind;
};

/// Joins a chain of locators as `a -> b -> c`.
std::string join_chain(const std::vector<std::string>& chain);

} // namespace zjsc
