#pragma once

#include <optional>
#include <string>

#include "persuade/core.hpp"

namespace persuade::harness {

/// Closed-form letter-game report: value matrix quantities plus the optimal
/// policy and U_prof*. Six decimals throughout.
std::string letter_report(double p0);

/// p_min, p*, c_hat and the regime at share `c` for an arbitrary value matrix.
std::string contract_report(const ValueMatrix& vm, double c);

}  // namespace persuade::harness
