#include "nujam/sample_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace nujam {

const char* to_string(Unit u) {
  return u == Unit::pascal ? "pascal" : "digital_full_scale";
}

void validate_buffer(const SampleBuffer& b, const std::string& what) {
  if (!(b.sample_rate_hz > 0.0))
    throw std::invalid_argument(what + ": sample rate must be positive");
  for (double v : b.samples)
    if (!std::isfinite(v))
      throw std::invalid_argument(what + ": buffer contains non-finite samples");
}

double rms(const SampleBuffer& b) {
  if (b.samples.empty()) return 0.0;
  double acc = 0.0;
  for (double v : b.samples) acc += v * v;
  return std::sqrt(acc / static_cast<double>(b.samples.size()));
}

double peak(const SampleBuffer& b) {
  double p = 0.0;
  for (double v : b.samples) p = std::max(p, std::abs(v));
  return p;
}

}  // namespace nujam
