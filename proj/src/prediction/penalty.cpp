#include "rpaf/prediction/penalty.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace rpaf::prediction {

PenaltyValue penalty(PenaltyKind kind, double x_hat, double x) {
  switch (kind) {
    case PenaltyKind::kNone:
      return {};
    case PenaltyKind::kMse: {
      const double diff = x_hat - x;
      return {diff * diff, 2.0 * diff};
    }
    case PenaltyKind::kKl:
      break;
  }
  if (!(x_hat > 0.0 && x_hat < 1.0)) {
    throw std::domain_error("KL penalty needs 0 < x_hat < 1");
  }
  // Skip the zero-weight term so x in {0, 1} stays finite.
  PenaltyValue out;
  if (x > 0.0) {
    out.value -= x * std::log(x_hat);
    out.derivative -= x / x_hat;
  }
  if (x < 1.0) {
    out.value -= (1.0 - x) * std::log1p(-x_hat);
    out.derivative += (1.0 - x) / (1.0 - x_hat);
  }
  return out;
}

PenaltyValue penalty(const Penalty& p, double x_hat, double x) {
  if (p.kind == PenaltyKind::kNone || p.weight == 0.0) return {};
  auto v = penalty(p.kind, x_hat, x);
  v.value *= p.weight;
  v.derivative *= p.weight;
  return v;
}

std::optional<double> compute_m_t(std::size_t budget, std::size_t active_count) {
  if (active_count == 0) return std::nullopt;
  return std::min(1.0, static_cast<double>(budget) / static_cast<double>(active_count));
}

PenaltyKind parse_penalty(std::string_view name) {
  if (name == "mse") return PenaltyKind::kMse;
  if (name == "kl") return PenaltyKind::kKl;
  if (name == "none") return PenaltyKind::kNone;
  throw std::invalid_argument("unknown penalty '" + std::string(name) + "'");
}

std::string to_string(PenaltyKind kind) {
  switch (kind) {
    case PenaltyKind::kMse:
      return "mse";
    case PenaltyKind::kKl:
      return "kl";
    case PenaltyKind::kNone:
      break;
  }
  return "none";
}

}  // namespace rpaf::prediction
