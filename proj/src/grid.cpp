#include "depthgaze/grid.hpp"

#include <algorithm>
#include <cmath>

namespace depthgaze {

std::size_t BinaryMask::count() const {
  const auto v = values();
  return static_cast<std::size_t>(std::count(v.begin(), v.end(), std::uint8_t{1}));
}

Heatmap::Heatmap(ImageSize size, std::vector<double> values) : Grid(size, std::move(values)) {
  for (double v : this->values()) {
    if (!std::isfinite(v)) throw InvalidInputError("heatmap value is not finite");
  }
}

Heatmap Heatmap::from_mask(const BinaryMask& mask) {
  Heatmap h(mask.size());
  auto out = h.values();
  const auto in = mask.values();
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] ? 1.0 : 0.0;
  return h;
}

}  // namespace depthgaze
