#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace gaborfio {

enum class ErrorKind {
    invalid_argument,
    not_grid_representable,
    incommensurate_lattice,
    not_a_frame,
    insufficient_range,
    extraction_radius,
    newton_divergence,
    size_guard,
    config,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind)
    {
    }

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Newton solve for the canonical map failed; carries the residual history.
class NewtonDivergence : public Error {
public:
    NewtonDivergence(const std::string& what, std::vector<double> residuals)
        : Error(ErrorKind::newton_divergence, what), residuals_(std::move(residuals))
    {
    }

    const std::vector<double>& residuals() const noexcept { return residuals_; }

private:
    std::vector<double> residuals_;
};

} // namespace gaborfio
