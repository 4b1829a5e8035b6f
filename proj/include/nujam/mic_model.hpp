#pragma once

#include <cstdint>

#include "nujam/sample_buffer.hpp"

// MEMS microphone capture model. The diaphragm/amplifier chain is a
// second-order power series v = a1*p + a2*p^2; the square term is what folds
// near-ultrasonic content down into the audible band. Defaults put 60 dB SPL
// speech near -40 dB FS and make the demodulation product land well above
// the noise floor without clipping.
namespace nujam::mic_model {

struct MicModelParams {
  double a1 = 0.5;   // 1/Pa
  double a2 = 5.0;   // 1/Pa^2
  double adc_rate_hz = 16000.0;
  double antialias_cutoff_hz = 7200.0;  // 0.45 * adc rate
  double noise_floor_db_fs = -80.0;
  double clip_level = 1.0;
};

void validate(const MicModelParams& p);

// v = a1*p + a2*p^2, elementwise. Input must be pascal; output is
// digital_full_scale at the input rate (no filtering, no clipping).
SampleBuffer apply_nonlinearity(const SampleBuffer& pressure, const MicModelParams& params);

// Full capture pipeline: nonlinearity -> DC block (20 Hz one-pole high-pass)
// -> anti-alias low-pass at antialias_cutoff_hz -> resample to adc_rate_hz
// -> additive Gaussian noise floor (seeded) -> hard clip at +-clip_level.
SampleBuffer capture(const SampleBuffer& pressure, const MicModelParams& params,
                     std::uint64_t noise_seed);

}  // namespace nujam::mic_model
