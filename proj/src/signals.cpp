#include "nujam/signals.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nujam/dsp.hpp"

namespace nujam::signals {

namespace {

constexpr double kPi = std::numbers::pi;

long long samples_for(double duration_s, double rate_hz) {
  return std::llround(duration_s * rate_hz);
}

void normalize_rms(std::vector<double>& x, double target) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  if (acc <= 0.0) return;
  const double g = target / std::sqrt(acc / static_cast<double>(x.size()));
  for (double& v : x) v *= g;
}

// ── segment renderers ──────────────────────────────────────────────────────

// Pulse train at the fundamental through a two-pole resonator at center_hz.
std::vector<double> render_vowel(std::size_t n, double fs, double f0, double center_hz) {
  std::vector<double> x(n, 0.0);
  const double period = fs / f0;
  for (double pos = 0.0; pos < static_cast<double>(n); pos += period) {
    const auto idx = static_cast<std::size_t>(std::llround(pos));
    if (idx < n) x[idx] = 1.0;
  }
  const double bw = std::max(60.0, 0.12 * center_hz);
  const double r = std::exp(-kPi * bw / fs);
  const double c = 2.0 * r * std::cos(2.0 * kPi * center_hz / fs);
  const double r2 = r * r;
  double y1 = 0.0, y2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double y = x[i] + c * y1 - r2 * y2;
    y2 = y1;
    y1 = y;
    x[i] = y;
  }
  normalize_rms(x, 0.25);
  return x;
}

// Noise band-passed around the frication centroid; the band floor is pinned
// at 3 kHz so fricative energy sits above it by construction.
std::vector<double> render_fricative(std::size_t n, double fs, double center_hz,
                                     std::uint64_t seed) {
  dsp::GaussianRng rng(seed);
  std::vector<double> x(n);
  for (double& v : x) v = rng.next();
  const double nyq = fs / 2.0;
  double low = std::max(3000.0, center_hz / std::numbers::sqrt2);
  double high = std::min(0.98 * nyq, center_hz * std::numbers::sqrt2);
  if (high <= low) high = std::min(0.98 * nyq, low * 1.5);
  x = dsp::brickwall_band(x, fs, low, high);
  normalize_rms(x, 0.08);
  return x;
}

// 10 ms closure silence, 20 ms broadband burst, silence for any remainder.
std::vector<double> render_stop(std::size_t n, double fs, std::uint64_t seed) {
  dsp::GaussianRng rng(seed);
  std::vector<double> x(n, 0.0);
  const auto gap = static_cast<std::size_t>(samples_for(0.010, fs));
  const auto burst = static_cast<std::size_t>(samples_for(0.020, fs));
  const std::size_t b0 = std::min(gap, n);
  const std::size_t b1 = std::min(b0 + burst, n);
  if (b1 > b0) {
    std::vector<double> noise(b1 - b0);
    for (double& v : noise) v = rng.next();
    normalize_rms(noise, 0.2);
    std::copy(noise.begin(), noise.end(), x.begin() + static_cast<long>(b0));
  }
  return x;
}

void validate_utterance(const UtteranceSpec& spec, double fs) {
  const double nyq = fs / 2.0;
  if (!(fs > 0.0)) throw std::invalid_argument("synth_utterance: sample rate must be positive");
  if (!(spec.fundamental_hz >= 30.0 && spec.fundamental_hz <= 1000.0))
    throw std::invalid_argument("synth_utterance: fundamental_hz out of range [30, 1000]");
  for (const Segment& s : spec.segments) {
    if (!(s.duration_s > 0.0))
      throw std::invalid_argument("synth_utterance: segment durations must be positive");
    if ((s.phoneme_class == PhonemeClass::vowel || s.phoneme_class == PhonemeClass::fricative) &&
        !(s.center_hz > 0.0 && s.center_hz < nyq))
      throw std::invalid_argument("synth_utterance: segment center_hz must lie in (0, Nyquist)");
  }
}

}  // namespace

NoiseColor noise_color_from_string(const std::string& s) {
  if (s == "white") return NoiseColor::white;
  if (s == "pink") return NoiseColor::pink;
  if (s == "brown") return NoiseColor::brown;
  if (s == "babble") return NoiseColor::babble;
  throw std::invalid_argument("unknown noise color '" + s + "'");
}

const char* to_string(NoiseColor c) {
  switch (c) {
    case NoiseColor::white: return "white";
    case NoiseColor::pink: return "pink";
    case NoiseColor::brown: return "brown";
    case NoiseColor::babble: return "babble";
  }
  return "?";
}

const char* to_string(PhonemeClass c) {
  switch (c) {
    case PhonemeClass::vowel: return "vowel";
    case PhonemeClass::fricative: return "fricative";
    case PhonemeClass::stop: return "stop";
    case PhonemeClass::silence: return "silence";
  }
  return "?";
}

SampleBuffer gen_noise(const NoiseSpec& spec) {
  const double nyq = spec.sample_rate_hz / 2.0;
  if (!(spec.sample_rate_hz > 0.0))
    throw std::invalid_argument("gen_noise: sample rate must be positive");
  if (!(spec.duration_s > 0.0))
    throw std::invalid_argument("gen_noise: duration must be positive");
  if (!(spec.band_low_hz >= 0.0 && spec.band_low_hz < spec.band_high_hz &&
        spec.band_high_hz <= nyq + 1e-9))
    throw std::invalid_argument("gen_noise: invalid bandwidth (need 0 <= low < high <= Nyquist)");

  const auto n = static_cast<std::size_t>(samples_for(spec.duration_s, spec.sample_rate_hz));
  std::vector<double> x;

  if (spec.color == NoiseColor::babble) {
    // At least eight overlapping voice-like streams, then band confinement.
    constexpr int kStreams = 8;
    x.assign(n, 0.0);
    for (int s = 0; s < kStreams; ++s) {
      const std::uint64_t sseed = dsp::mix_seed(spec.seed, 0xBABB1E00ULL + s);
      dsp::GaussianRng r(sseed);
      UtteranceSpec u;
      u.fundamental_hz = 90.0 + 130.0 * r.uniform();
      u.seed = dsp::mix_seed(sseed, 1);
      double total = 0.0;
      while (total < spec.duration_s + 0.2) {
        Segment seg;
        const double pick = r.uniform();
        if (pick < 0.42) {
          seg.phoneme_class = PhonemeClass::vowel;
          seg.center_hz = 300.0 + 600.0 * r.uniform();
          seg.duration_s = 0.08 + 0.17 * r.uniform();
        } else if (pick < 0.68) {
          seg.phoneme_class = PhonemeClass::fricative;
          seg.center_hz = 3500.0 + 3000.0 * r.uniform();
          seg.duration_s = 0.06 + 0.12 * r.uniform();
        } else if (pick < 0.82) {
          seg.phoneme_class = PhonemeClass::stop;
          seg.duration_s = 0.05 + 0.04 * r.uniform();
        } else {
          seg.phoneme_class = PhonemeClass::silence;
          seg.duration_s = 0.04 + 0.12 * r.uniform();
        }
        total += seg.duration_s;
        u.segments.push_back(seg);
      }
      SampleBuffer stream = synth_utterance(u, spec.sample_rate_hz);
      for (std::size_t i = 0; i < n && i < stream.samples.size(); ++i)
        x[i] += stream.samples[i];
    }
    x = dsp::brickwall_band(x, spec.sample_rate_hz, spec.band_low_hz, spec.band_high_hz);
  } else {
    // Spectral synthesis: i.i.d. complex Gaussian bins shaped per color, so
    // the slope is exact in expectation and band edges are brick walls.
    std::vector<std::complex<double>> spec_bins(n, {0.0, 0.0});
    dsp::GaussianRng rng(spec.seed);
    const std::size_t kmax = n / 2;
    for (std::size_t k = 1; k <= kmax; ++k) {
      const double f = static_cast<double>(k) * spec.sample_rate_hz / static_cast<double>(n);
      double shape = 1.0;
      if (spec.color == NoiseColor::pink) shape = 1.0 / std::sqrt(f);
      else if (spec.color == NoiseColor::brown) shape = 1.0 / f;
      const double a = rng.next(), b = rng.next();
      const bool in_band = f >= spec.band_low_hz - 1e-9 && f <= spec.band_high_hz + 1e-9;
      const double amp = in_band ? shape : 0.0;
      if (k == n - k) {
        spec_bins[k] = {amp * a, 0.0};  // Nyquist bin must stay real
      } else {
        spec_bins[k] = {amp * a, amp * b};
        spec_bins[n - k] = std::conj(spec_bins[k]);
      }
    }
    x = dsp::ifft_real(spec_bins);
  }

  normalize_rms(x, 0.1);
  return SampleBuffer{spec.sample_rate_hz, std::move(x), Unit::digital_full_scale};
}

SampleBuffer gen_tone(double freq_hz, double amplitude, double duration_s,
                      double sample_rate_hz, Unit unit) {
  if (!(sample_rate_hz > 0.0))
    throw std::invalid_argument("gen_tone: sample rate must be positive");
  if (!(duration_s > 0.0)) throw std::invalid_argument("gen_tone: duration must be positive");
  if (!(freq_hz >= 0.0 && freq_hz < sample_rate_hz / 2.0))
    throw std::invalid_argument("gen_tone: frequency must lie in [0, Nyquist)");
  if (!std::isfinite(amplitude)) throw std::invalid_argument("gen_tone: amplitude must be finite");

  const auto n = static_cast<std::size_t>(samples_for(duration_s, sample_rate_hz));
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) {
    // fmod keeps the phase argument small on long buffers.
    const double phase = std::fmod(freq_hz * static_cast<double>(i), sample_rate_hz);
    x[i] = amplitude * std::sin(2.0 * kPi * phase / sample_rate_hz);
  }
  return SampleBuffer{sample_rate_hz, std::move(x), unit};
}

SampleBuffer synth_utterance(const UtteranceSpec& spec, double sample_rate_hz) {
  validate_utterance(spec, sample_rate_hz);
  double total_s = 0.0;
  for (const Segment& s : spec.segments) total_s += s.duration_s;
  const auto n_total = static_cast<std::size_t>(samples_for(total_s, sample_rate_hz));
  std::vector<double> out(n_total, 0.0);
  if (n_total == 0)
    return SampleBuffer{sample_rate_hz, std::move(out), Unit::digital_full_scale};

  // 5 ms raised-cosine cross-fades straddle each junction by +-2.5 ms, so the
  // envelopes of adjacent segments sum to one and total duration is preserved.
  const auto hx = static_cast<long long>(samples_for(0.0025, sample_rate_hz));
  const auto nseg = spec.segments.size();
  double cum = 0.0;
  for (std::size_t si = 0; si < nseg; ++si) {
    const Segment& seg = spec.segments[si];
    const auto s = samples_for(cum, sample_rate_hz);
    cum += seg.duration_s;
    const auto e = samples_for(cum, sample_rate_hz);
    if (e <= s) continue;
    if (seg.phoneme_class == PhonemeClass::silence) continue;

    const long long rise0 = (si == 0) ? s : s - hx;
    const long long rise1 = (si == 0) ? std::min(e, s + hx) : s + hx;
    const long long fall0 = (si + 1 == nseg) ? std::max(s, e - hx) : e - hx;
    const long long fall1 = (si + 1 == nseg) ? e : e + hx;

    const long long r0 = std::max(0LL, rise0);
    const long long r1 = std::min(static_cast<long long>(n_total), fall1);
    if (r1 <= r0) continue;
    const auto m = static_cast<std::size_t>(r1 - r0);

    const std::uint64_t seg_seed = dsp::mix_seed(spec.seed, static_cast<std::uint64_t>(si));
    std::vector<double> body;
    switch (seg.phoneme_class) {
      case PhonemeClass::vowel:
        body = render_vowel(m, sample_rate_hz, spec.fundamental_hz, seg.center_hz);
        break;
      case PhonemeClass::fricative:
        body = render_fricative(m, sample_rate_hz, seg.center_hz, seg_seed);
        break;
      case PhonemeClass::stop:
        body = render_stop(m, sample_rate_hz, seg_seed);
        break;
      case PhonemeClass::silence:
        break;
    }

    for (std::size_t i = 0; i < m; ++i) {
      const long long t = r0 + static_cast<long long>(i);
      double env = 1.0;
      if (t < rise1 && rise1 > rise0)
        env *= 0.5 * (1.0 - std::cos(kPi * static_cast<double>(t - rise0) /
                                     static_cast<double>(rise1 - rise0)));
      if (t >= fall0 && fall1 > fall0)
        env *= 0.5 * (1.0 + std::cos(kPi * static_cast<double>(t - fall0) /
                                     static_cast<double>(fall1 - fall0)));
      out[static_cast<std::size_t>(t)] += env * body[i];
    }
  }

  double pk = 0.0;
  for (double v : out) pk = std::max(pk, std::abs(v));
  if (pk > 0.9) {
    const double g = 0.9 / pk;
    for (double& v : out) v *= g;
  }
  return SampleBuffer{sample_rate_hz, std::move(out), Unit::digital_full_scale};
}

SampleBuffer mix(const std::vector<SampleBuffer>& buffers, const std::vector<double>& gains) {
  if (buffers.empty()) throw std::invalid_argument("mix: buffer list must not be empty");
  if (buffers.size() != gains.size())
    throw std::invalid_argument("mix: buffers and gains must have equal length");
  const double rate = buffers.front().sample_rate_hz;
  const Unit unit = buffers.front().unit;
  std::size_t n = 0;
  for (const SampleBuffer& b : buffers) {
    validate_buffer(b, "mix");
    if (b.sample_rate_hz != rate) throw std::invalid_argument("mix: sample rates must match");
    if (b.unit != unit) throw std::invalid_argument("mix: units must match");
    n = std::max(n, b.samples.size());
  }
  std::vector<double> out(n, 0.0);
  for (std::size_t bi = 0; bi < buffers.size(); ++bi)
    for (std::size_t i = 0; i < buffers[bi].samples.size(); ++i)
      out[i] += gains[bi] * buffers[bi].samples[i];
  return SampleBuffer{rate, std::move(out), unit};
}

SampleBuffer scale_to_spl(const SampleBuffer& pressure, double target_db_spl) {
  validate_buffer(pressure, "scale_to_spl");
  if (pressure.unit != Unit::pascal)
    throw std::invalid_argument("scale_to_spl: buffer must be in pascal");
  const double r = rms(pressure);
  if (r <= 0.0) throw std::invalid_argument("scale_to_spl: cannot scale silence");
  const double target_rms = kPressureRefPa * std::pow(10.0, target_db_spl / 20.0);
  SampleBuffer out = pressure;
  const double g = target_rms / r;
  for (double& v : out.samples) v *= g;
  return out;
}

double measure_spl(const SampleBuffer& pressure) {
  validate_buffer(pressure, "measure_spl");
  if (pressure.unit != Unit::pascal)
    throw std::invalid_argument("measure_spl: buffer must be in pascal");
  if (pressure.empty()) throw std::invalid_argument("measure_spl: buffer must not be empty");
  const double r = rms(pressure);
  if (r <= 0.0) return -std::numeric_limits<double>::infinity();
  return 20.0 * std::log10(r / kPressureRefPa);
}

SampleBuffer resample(const SampleBuffer& b, double new_rate_hz) {
  validate_buffer(b, "resample");
  if (!(new_rate_hz > 0.0))
    throw std::invalid_argument("resample: target rate must be positive");
  if (new_rate_hz == b.sample_rate_hz) return b;
  SampleBuffer out;
  out.sample_rate_hz = new_rate_hz;
  out.unit = b.unit;
  out.samples = dsp::resample_sinc(b.samples, b.sample_rate_hz, new_rate_hz);
  return out;
}

}  // namespace nujam::signals
