#pragma once

#include <stdexcept>
#include <string>

namespace archrecon {

/// Malformed input document. `where` is a line/column or a JSON field path.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& where, const std::string& what)
        : std::runtime_error(where.empty() ? what : where + ": " + what), where_(where) {}

    const std::string& where() const noexcept { return where_; }

private:
    std::string where_;
};

/// An edge endpoint or other id that does not exist.
class ReferenceError : public std::runtime_error {
public:
    ReferenceError(long long id, const std::string& what)
        : std::runtime_error(what), id_(id) {}

    long long id() const noexcept { return id_; }

private:
    long long id_;
};

/// A pin whose pattern resolves to nothing, or that cannot be realized.
class BindingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Two pins (or a pin and a frozen assignment) demand different targets.
class PinConflictError : public std::runtime_error {
public:
    PinConflictError(std::string first, std::string second, const std::string& what)
        : std::runtime_error(what), first_(std::move(first)), second_(std::move(second)) {}

    const std::string& first() const noexcept { return first_; }
    const std::string& second() const noexcept { return second_; }

private:
    std::string first_;
    std::string second_;
};

/// Caller broke a precondition (dimension mismatch, empty input, bad config).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class NotFoundError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The result store is unreadable or inconsistent.
class StoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace archrecon
