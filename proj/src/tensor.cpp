#include "aqtc/tensor.hpp"

#include <algorithm>

namespace aqtc {

void Matrix::set_zero() { std::fill(data.begin(), data.end(), 0.0); }

}  // namespace aqtc
