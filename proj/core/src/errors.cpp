#include "ubm/errors.hpp"

namespace ubm {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::invalid_dimension: return "invalid-dimension";
    case ErrorCode::invalid_input: return "invalid-input";
    case ErrorCode::invalid_grid: return "invalid-grid";
    case ErrorCode::contract_violation: return "contract-violation";
    case ErrorCode::numeric: return "numeric";
    case ErrorCode::cap_exceeded: return "cap-exceeded";
    case ErrorCode::invalid_quantile: return "invalid-quantile";
    case ErrorCode::invalid_order: return "invalid-order";
    case ErrorCode::precision_loss: return "precision-loss";
    case ErrorCode::domain: return "domain";
  }
  return "unknown";
}

}  // namespace ubm
