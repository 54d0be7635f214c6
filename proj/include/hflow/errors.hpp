#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hflow {

/// A node matrix failed the positivity check (det below floor or eigenvalue <= 0).
class SingularMetric : public std::runtime_error {
public:
    SingularMetric(std::size_t node, double det, const std::string& where)
        : std::runtime_error("singular metric at node " + std::to_string(node) +
                             " (det=" + std::to_string(det) + ") in " + where),
          node(node), det(det) {}
    std::size_t node;
    double det;
};

/// The time integration left the admissible class: SPD lost or non-finite values.
class BlowUpError : public std::runtime_error {
public:
    BlowUpError(double t, std::size_t node, const std::string& detail)
        : std::runtime_error("flow blow-up at t=" + std::to_string(t) +
                             ", node " + std::to_string(node) + ": " + detail),
          t(t), node(node), detail(detail) {}
    double t;
    std::size_t node;
    std::string detail;
};

/// Requested rough-metric parameters cannot satisfy the SPD / bi-Lipschitz bound.
class SpecInfeasible : public std::runtime_error {
public:
    explicit SpecInfeasible(const std::string& msg) : std::runtime_error(msg) {}
};

/// Mollifier scale below the resolvable limit (sigma < dx/2).
class KernelUnderresolved : public std::runtime_error {
public:
    explicit KernelUnderresolved(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad key, missing key, or out-of-range value in an experiment config.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace hflow
