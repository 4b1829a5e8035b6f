#include "nujam/modulation.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "nujam/dsp.hpp"
#include "nujam/signals.hpp"

namespace nujam::modulation {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFilterAttenDb = 70.0;  // >= 60 dB spec with design margin

double transition_for_edge(double edge_hz) {
  return std::max(200.0, 0.05 * edge_hz);
}

// Lowpass with passband edge exactly at `edge_hz`; the transition band
// extends above it, so content at or below the edge passes untouched.
std::vector<double> lowpass_at(const std::vector<double>& x, double edge_hz, double fs) {
  double w = transition_for_edge(edge_hz);
  const double nyq = fs / 2.0;
  if (edge_hz + w > nyq) w = std::max(50.0, nyq - edge_hz);
  const auto fir = dsp::design_lowpass_fir(edge_hz, w, fs, kFilterAttenDb);
  return dsp::filter_zero_delay(x, fir);
}

double carrier_phase(double carrier_hz, std::size_t n, double fs) {
  return 2.0 * kPi * std::fmod(carrier_hz * static_cast<double>(n), fs) / fs;
}

}  // namespace

void validate(const SusbamParams& p) {
  if (!(p.output_rate_hz > 0.0))
    throw std::invalid_argument("SusbamParams: output rate must be positive");
  if (!(p.carrier_hz > 0.0))
    throw std::invalid_argument("SusbamParams: carrier must be positive");
  if (!(p.baseband_limit_hz > 0.0))
    throw std::invalid_argument("SusbamParams: baseband limit must be positive");
  if (p.carrier_hz + p.baseband_limit_hz > p.output_rate_hz / 2.0)
    throw std::invalid_argument(
        "SusbamParams: carrier + baseband limit must not exceed Nyquist");
}

std::pair<SampleBuffer, SampleBuffer> analytic_signal(const SampleBuffer& b) {
  validate_buffer(b, "analytic_signal");
  const std::size_t n = b.samples.size();
  if (n < 64) throw std::invalid_argument("analytic_signal: need at least 64 samples");

  auto spec = dsp::fft_real(b.samples);
  // Zero the negative frequencies, double the positive ones; DC and Nyquist
  // keep unit weight. The imaginary part of the inverse is the Hilbert
  // transform of the input.
  for (std::size_t k = 1; k < n; ++k) {
    if (2 * k < n) spec[k] *= 2.0;
    else if (2 * k > n) spec[k] = 0.0;
  }
  dsp::fft(spec, true);

  SampleBuffer re{b.sample_rate_hz, std::vector<double>(n), b.unit};
  SampleBuffer im{b.sample_rate_hz, std::vector<double>(n), b.unit};
  for (std::size_t i = 0; i < n; ++i) {
    re.samples[i] = spec[i].real();
    im.samples[i] = spec[i].imag();
  }
  return {std::move(re), std::move(im)};
}

SampleBuffer susbam_modulate(const SampleBuffer& baseband, const SusbamParams& params) {
  validate(params);
  validate_buffer(baseband, "susbam_modulate");
  if (baseband.unit != Unit::digital_full_scale)
    throw std::invalid_argument("susbam_modulate: baseband must be digital_full_scale");
  if (baseband.empty()) throw std::invalid_argument("susbam_modulate: baseband is empty");

  SampleBuffer x = baseband.sample_rate_hz == params.output_rate_hz
                       ? baseband
                       : signals::resample(baseband, params.output_rate_hz);
  x.samples = lowpass_at(x.samples, params.baseband_limit_hz, params.output_rate_hz);

  auto [re, im] = analytic_signal(x);
  const double fs = params.output_rate_hz;
  const std::size_t n = re.samples.size();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double ph = carrier_phase(params.carrier_hz, i, fs);
    y[i] = re.samples[i] * std::cos(ph) - im.samples[i] * std::sin(ph);
  }

  double pk = 0.0;
  for (double v : y) pk = std::max(pk, std::abs(v));
  if (pk > 0.0) {
    const double g = 0.9 / pk;
    for (double& v : y) v *= g;
  }
  return SampleBuffer{fs, std::move(y), Unit::digital_full_scale};
}

SampleBuffer ssb_demodulate(const SampleBuffer& modulated, const SusbamParams& params) {
  validate(params);
  validate_buffer(modulated, "ssb_demodulate");
  if (modulated.sample_rate_hz != params.output_rate_hz)
    throw std::invalid_argument("ssb_demodulate: buffer must be at output_rate_hz");
  if (modulated.empty()) throw std::invalid_argument("ssb_demodulate: buffer is empty");

  // Re(LP(y e^{-j w_c t})) = LP(y cos(w_c t)); the imaginary leg never
  // reaches the output, so only the real product is filtered.
  const double fs = params.output_rate_hz;
  const std::size_t n = modulated.samples.size();
  std::vector<double> prod(n);
  for (std::size_t i = 0; i < n; ++i)
    prod[i] = modulated.samples[i] * std::cos(carrier_phase(params.carrier_hz, i, fs));
  auto base = lowpass_at(prod, params.baseband_limit_hz, fs);
  for (double& v : base) v *= 2.0;
  return SampleBuffer{fs, std::move(base), Unit::digital_full_scale};
}

SampleBuffer bandpass(const SampleBuffer& b, double low_hz, double high_hz) {
  validate_buffer(b, "bandpass");
  const double nyq = b.sample_rate_hz / 2.0;
  if (!(low_hz < high_hz)) throw std::invalid_argument("bandpass: need low < high");
  if (low_hz < 0.0 || low_hz > nyq)
    throw std::invalid_argument("bandpass: low edge must lie in [0, Nyquist]");
  if (b.empty()) return b;

  const bool want_hp = low_hz > 0.0;
  const bool want_lp = high_hz < nyq;
  if (!want_hp && !want_lp) return b;

  double w_low = transition_for_edge(low_hz), w_high = transition_for_edge(high_hz);
  if (want_hp && low_hz - w_low < 0.0) w_low = low_hz;  // keep the stopband real
  if (want_lp && high_hz + w_high > nyq) w_high = std::max(50.0, nyq - high_hz);

  // One symmetric kernel built as the difference of two lowpass prototypes
  // sharing a length, so the group delay cancels exactly in the trim.
  std::size_t taps = 5;
  if (want_lp)
    taps = std::max(taps, dsp::kaiser_tap_count(kFilterAttenDb, w_high, b.sample_rate_hz));
  if (want_hp)
    taps = std::max(taps, dsp::kaiser_tap_count(kFilterAttenDb, w_low, b.sample_rate_hz));
  if (taps % 2 == 0) ++taps;

  const double beta = dsp::kaiser_beta(kFilterAttenDb);
  const double i0b = dsp::bessel_i0(beta);
  const double m = static_cast<double>(taps - 1) / 2.0;
  // Cutoffs at transition centers: high side passband edge = high_hz,
  // low side passband edge = low_hz (transition extending below it).
  const double fc_hi = want_lp ? (high_hz + w_high / 2.0) / b.sample_rate_hz : 0.5;
  const double fc_lo = want_hp ? (low_hz - w_low / 2.0) / b.sample_rate_hz : 0.0;

  std::vector<double> h(taps);
  for (std::size_t i = 0; i < taps; ++i) {
    const double t = static_cast<double>(i) - m;
    const double u = t / (m > 0.0 ? m : 1.0);
    const double win = dsp::bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0b;
    auto sinc = [](double v) { return v == 0.0 ? 1.0 : std::sin(kPi * v) / (kPi * v); };
    const double hi = 2.0 * fc_hi * sinc(2.0 * fc_hi * t);
    const double lo = 2.0 * fc_lo * sinc(2.0 * fc_lo * t);
    h[i] = (hi - lo) * win;
  }

  SampleBuffer out = b;
  out.samples = dsp::filter_zero_delay(b.samples, h);
  return out;
}

}  // namespace nujam::modulation
