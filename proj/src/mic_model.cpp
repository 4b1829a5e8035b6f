#include "nujam/mic_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nujam/dsp.hpp"
#include "nujam/signals.hpp"

namespace nujam::mic_model {

namespace {

// One-pole DC blocker with its -3 dB corner near corner_hz.
std::vector<double> dc_block(const std::vector<double>& x, double corner_hz, double fs) {
  const double r = 1.0 - 2.0 * std::numbers::pi * corner_hz / fs;
  std::vector<double> y(x.size());
  double prev_x = 0.0, prev_y = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i] - prev_x + r * prev_y;
    prev_x = x[i];
    prev_y = v;
    y[i] = v;
  }
  return y;
}

}  // namespace

void validate(const MicModelParams& p) {
  if (!(p.a1 > 0.0)) throw std::invalid_argument("MicModelParams: a1 must be positive");
  if (!(p.a2 >= 0.0)) throw std::invalid_argument("MicModelParams: a2 must be non-negative");
  if (!(p.adc_rate_hz > 0.0))
    throw std::invalid_argument("MicModelParams: adc_rate_hz must be positive");
  if (!(p.antialias_cutoff_hz > 0.0 && p.antialias_cutoff_hz < p.adc_rate_hz / 2.0))
    throw std::invalid_argument("MicModelParams: antialias cutoff must lie below ADC Nyquist");
  if (!(p.clip_level > 0.0))
    throw std::invalid_argument("MicModelParams: clip_level must be positive");
  if (!std::isfinite(p.noise_floor_db_fs))
    throw std::invalid_argument("MicModelParams: noise floor must be finite");
}

SampleBuffer apply_nonlinearity(const SampleBuffer& pressure, const MicModelParams& params) {
  validate(params);
  validate_buffer(pressure, "apply_nonlinearity");
  if (pressure.unit != Unit::pascal)
    throw std::invalid_argument("apply_nonlinearity: input must be pascal");
  SampleBuffer out;
  out.sample_rate_hz = pressure.sample_rate_hz;
  out.unit = Unit::digital_full_scale;
  out.samples.resize(pressure.samples.size());
  for (std::size_t i = 0; i < pressure.samples.size(); ++i) {
    const double p = pressure.samples[i];
    out.samples[i] = params.a1 * p + params.a2 * p * p;
  }
  return out;
}

SampleBuffer capture(const SampleBuffer& pressure, const MicModelParams& params,
                     std::uint64_t noise_seed) {
  SampleBuffer v = apply_nonlinearity(pressure, params);
  const double fs = v.sample_rate_hz;

  v.samples = dc_block(v.samples, 20.0, fs);

  const double w = std::max(200.0, 0.05 * params.antialias_cutoff_hz);
  const auto fir = dsp::design_lowpass_fir(params.antialias_cutoff_hz,
                                           std::min(w, fs / 2.0 - params.antialias_cutoff_hz),
                                           fs, 70.0);
  v.samples = dsp::filter_zero_delay(v.samples, fir);

  SampleBuffer adc = signals::resample(v, params.adc_rate_hz);

  const double floor_rms = std::pow(10.0, params.noise_floor_db_fs / 20.0);
  dsp::GaussianRng rng(noise_seed);
  for (double& s : adc.samples) {
    s += floor_rms * rng.next();
    s = std::clamp(s, -params.clip_level, params.clip_level);
  }
  return adc;
}

}  // namespace nujam::mic_model
