#pragma once

#include <stdexcept>
#include <string>

namespace bterm {

// Thrown when a requested accuracy budget cannot be met (series would need
// more than max_terms, quadrature fails to converge, value underflows past
// the absolute floor, ...).
class precision_error : public std::runtime_error {
 public:
  explicit precision_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace bterm
