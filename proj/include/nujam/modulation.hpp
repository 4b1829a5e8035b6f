#pragma once

#include <utility>

#include "nujam/sample_buffer.hpp"

// Single upper-sideband amplitude modulation (Hartley method) and the
// matching coherent demodulator, plus a general linear-phase band-pass.
// The modulator shifts a band-limited baseband up so its energy occupies
// [carrier_hz, carrier_hz + baseband_limit_hz].
namespace nujam::modulation {

struct SusbamParams {
  double carrier_hz = 16000.0;
  double baseband_limit_hz = 6000.0;
  double output_rate_hz = 96000.0;
};

// Throws std::invalid_argument unless carrier > 0, limit > 0 and
// carrier + limit <= output_rate / 2.
void validate(const SusbamParams& p);

// FFT-based analytic signal. Returns (real part, Hilbert transform); the
// real part reproduces the input to rounding. Accurate away from the first
// and last ~5 ms; requires at least 64 samples.
std::pair<SampleBuffer, SampleBuffer> analytic_signal(const SampleBuffer& b);

// y = x cos(2 pi f_c t) - H{x} sin(2 pi f_c t), applied after resampling the
// baseband to output_rate_hz and low-passing it at baseband_limit_hz
// (passband edge at the limit, transition band above it). The result is
// peak-normalized to 0.9. Baseband must be digital_full_scale.
SampleBuffer susbam_modulate(const SampleBuffer& baseband, const SusbamParams& params);

// Coherent product demodulation: multiply by a complex exponential at
// -carrier_hz, low-pass at baseband_limit_hz, take twice the real part.
// The buffer must already be at output_rate_hz.
SampleBuffer ssb_demodulate(const SampleBuffer& modulated, const SusbamParams& params);

// Linear-phase FIR band-pass (Kaiser design, 70 dB): passband [low, high]
// with <= 0.5 dB ripple, >= 60 dB rejection beyond a transition width of
// max(200 Hz, 5% of the respective edge). low == 0 drops the high-pass
// side, high >= Nyquist drops the low-pass side; both together return the
// input unchanged. Group delay is compensated (zero-phase overall).
// Requires 0 <= low < high.
SampleBuffer bandpass(const SampleBuffer& b, double low_hz, double high_hz);

}  // namespace nujam::modulation
