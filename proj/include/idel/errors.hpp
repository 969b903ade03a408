#pragma once

#include <stdexcept>
#include <string>

namespace idel {

/// Bad numeric input or out-of-range argument.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

/// Times or intervals not aligned to the grid.
class alignment_error : public std::runtime_error {
public:
    explicit alignment_error(const std::string& what) : std::runtime_error(what) {}
};

/// Configuration rejected before a run (lists every violation).
class validation_error : public std::runtime_error {
public:
    explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite data fed into or produced by an evaluation.
class data_error : public std::runtime_error {
public:
    explicit data_error(const std::string& what) : std::runtime_error(what) {}
};

/// Picard sweep failed to contract within the iteration budget.
class contraction_error : public std::runtime_error {
public:
    explicit contraction_error(const std::string& what) : std::runtime_error(what) {}
};

/// A supplied certificate is unusable (e.g. b not invertible where needed).
class certificate_error : public std::runtime_error {
public:
    explicit certificate_error(const std::string& what) : std::runtime_error(what) {}
};

/// Solution values crossed the blow-up threshold (finite escape signalled).
class escape_error : public std::runtime_error {
public:
    explicit escape_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace idel
