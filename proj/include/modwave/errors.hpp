#pragma once

#include <stdexcept>
#include <string>

namespace modwave {

struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct quadrature_failure : std::runtime_error {
    explicit quadrature_failure(const std::string& msg) : std::runtime_error(msg) {}
};

struct grid_mismatch : std::runtime_error {
    explicit grid_mismatch(const std::string& msg) : std::runtime_error(msg) {}
};

struct nonfinite_input : std::runtime_error {
    explicit nonfinite_input(const std::string& msg) : std::runtime_error(msg) {}
};

struct coverage_error : std::runtime_error {
    explicit coverage_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct ledger_too_short : std::runtime_error {
    explicit ledger_too_short(const std::string& msg) : std::runtime_error(msg) {}
};

struct parameter_error : std::runtime_error {
    explicit parameter_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct insufficient_data : std::runtime_error {
    explicit insufficient_data(const std::string& msg) : std::runtime_error(msg) {}
};

struct no_admissible_partner : std::runtime_error {
    explicit no_admissible_partner(const std::string& msg) : std::runtime_error(msg) {}
};

struct config_error : std::runtime_error {
    explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace modwave
