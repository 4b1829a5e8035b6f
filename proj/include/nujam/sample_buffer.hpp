#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace nujam {

// Samples are either calibrated acoustic pressure in pascal or a
// dimensionless digital signal whose nominal full scale is [-1, +1].
enum class Unit { pascal, digital_full_scale };

const char* to_string(Unit u);

// Uniformly sampled mono waveform. The struct is deliberately plain: every
// operation in the library is a pure function taking and returning buffers.
struct SampleBuffer {
  double sample_rate_hz = 0.0;
  std::vector<double> samples;
  Unit unit = Unit::digital_full_scale;

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }
  double duration_s() const {
    return sample_rate_hz > 0.0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

// Throws std::invalid_argument when the rate is non-positive or any sample
// is non-finite. `what` names the offending argument in the message.
void validate_buffer(const SampleBuffer& b, const std::string& what);

double rms(const SampleBuffer& b);   // 0 for an empty buffer
double peak(const SampleBuffer& b);  // max |sample|, 0 for an empty buffer

}  // namespace nujam
