// SPDX-License-Identifier: Apache-2.0
#include "sdon/tensor.hpp"

namespace sdon {

std::string shape_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += " x ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

}  // namespace sdon
