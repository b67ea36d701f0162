#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace rpaf::prediction {

enum class PenaltyKind { kNone, kMse, kKl };

struct Penalty {
  PenaltyKind kind = PenaltyKind::kMse;
  double weight = 1.0;  // alpha
};

struct PenaltyValue {
  double value = 0.0;
  double derivative = 0.0;  // d value / d x_hat
};

/// Unweighted T(x_hat, x) and its slope in x_hat.
///   MSE: (x_hat - x)^2
///   KL:  -[x ln x_hat + (1 - x) ln(1 - x_hat)]
/// KL throws std::domain_error unless 0 < x_hat < 1. kNone is identically 0.
PenaltyValue penalty(PenaltyKind kind, double x_hat, double x);

/// alpha * T(x_hat, x).
PenaltyValue penalty(const Penalty& p, double x_hat, double x);

/// Target real-time ratio M / active_count, clamped to 1 when the budget
/// covers the demand. nullopt when there is no traffic.
std::optional<double> compute_m_t(std::size_t budget, std::size_t active_count);

/// Accepts "mse", "kl", "none"; throws std::invalid_argument otherwise.
PenaltyKind parse_penalty(std::string_view name);
std::string to_string(PenaltyKind kind);

}  // namespace rpaf::prediction
