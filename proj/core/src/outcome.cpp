#include "newtonflow/outcome.hpp"

#include <cmath>
#include <stdexcept>

namespace newtonflow {

void SolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("tau must be positive");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw std::invalid_argument("eps must be positive");
  if (!(t_lower > 0.0 && t_lower < 1.0)) throw std::invalid_argument("t_lower must lie in (0, 1)");
  if (n_max == 0) throw std::invalid_argument("n_max must be positive");
  if (!(reduce_factor > 0.0 && reduce_factor < 1.0)) throw std::invalid_argument("reduce factor must lie in (0, 1)");
}

std::string_view to_string(SolveStatus status) noexcept {
  switch (status) {
    case SolveStatus::Converged: return "Converged";
    case SolveStatus::StepUnderflow: return "StepUnderflow";
    case SolveStatus::SingularJacobian: return "SingularJacobian";
    case SolveStatus::MaxIterations: return "MaxIterations";
    case SolveStatus::NonFinite: return "NonFinite";
  }
  return "Unknown";
}

}  // namespace newtonflow
