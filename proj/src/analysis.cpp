#include "nujam/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "nujam/dsp.hpp"

namespace nujam::analysis {

namespace {

constexpr double kPi = std::numbers::pi;

bool power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

double band_energy_fft(const std::vector<double>& x, double fs, double low_hz, double high_hz) {
  auto spec = dsp::fft_real(x);
  const std::size_t n = x.size();
  double acc = 0.0;
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * fs / static_cast<double>(n);
    if (f < low_hz || f > high_hz) continue;
    const double w = (k == 0 || 2 * k == n) ? 1.0 : 2.0;  // fold negative bins
    acc += w * std::norm(spec[k]);
  }
  return acc / static_cast<double>(n);  // Parseval: equals sum of x^2 in band
}

}  // namespace

SpectrogramMatrix stft(const SampleBuffer& b, std::size_t window, std::size_t hop) {
  validate_buffer(b, "stft");
  if (!power_of_two(window) || window < 64)
    throw std::invalid_argument("stft: window must be a power of two >= 64");
  if (hop == 0 || hop > window) throw std::invalid_argument("stft: need 0 < hop <= window");
  if (b.samples.size() < window)
    throw std::invalid_argument("stft: buffer shorter than one window");

  const auto w = dsp::hann_window(window);
  double wsum = 0.0;
  for (double v : w) wsum += v;
  const double norm = 2.0 / wsum;  // full-scale sine -> ~0 dB at its bin

  SpectrogramMatrix m;
  m.window = window;
  m.hop = hop;
  m.sample_rate_hz = b.sample_rate_hz;
  m.n_bins = window / 2 + 1;
  m.n_frames = (b.samples.size() - window) / hop + 1;
  m.db.resize(m.n_frames * m.n_bins);

  std::vector<std::complex<double>> frame(window);
  for (std::size_t fi = 0; fi < m.n_frames; ++fi) {
    const std::size_t off = fi * hop;
    for (std::size_t i = 0; i < window; ++i) frame[i] = b.samples[off + i] * w[i];
    dsp::fft(frame, false);
    for (std::size_t k = 0; k < m.n_bins; ++k) {
      const double scale = (k == 0 || k == m.n_bins - 1) ? norm / 2.0 : norm;
      const double mag = std::abs(frame[k]) * scale;
      const double db = mag > 0.0 ? 20.0 * std::log10(mag) : kStftFloorDb;
      m.db[fi * m.n_bins + k] = std::max(db, kStftFloorDb);
    }
  }
  return m;
}

Image render_spectrogram(const SpectrogramMatrix& m, double db_min, double db_max) {
  if (!(db_min < db_max)) throw std::invalid_argument("render_spectrogram: need db_min < db_max");
  if (m.n_frames == 0 || m.n_bins == 0)
    throw std::invalid_argument("render_spectrogram: empty matrix");
  Image img;
  img.width = m.n_frames;
  img.height = m.n_bins;
  img.pixels.resize(img.width * img.height);
  const double span = db_max - db_min;
  for (std::size_t bin = 0; bin < m.n_bins; ++bin) {
    const std::size_t row = m.n_bins - 1 - bin;  // top row = highest frequency
    for (std::size_t fi = 0; fi < m.n_frames; ++fi) {
      const double v = (m.at(fi, bin) - db_min) / span;
      const long g = std::lround(255.0 * std::clamp(v, 0.0, 1.0));
      img.pixels[row * img.width + fi] = static_cast<std::uint8_t>(g);
    }
  }
  return img;
}

void write_pgm(const std::string& path, const Image& img) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_pgm: cannot open '" + path + "'");
  os << "P5\n" << img.width << " " << img.height << "\n255\n";
  os.write(reinterpret_cast<const char*>(img.pixels.data()),
           static_cast<std::streamsize>(img.pixels.size()));
  if (!os) throw std::runtime_error("write_pgm: short write to '" + path + "'");
}

std::string matrix_to_csv(const SpectrogramMatrix& m) {
  std::string out;
  out.reserve(m.db.size() * 8 + m.n_bins * 8);
  char buf[32];
  for (std::size_t k = 0; k < m.n_bins; ++k) {
    std::snprintf(buf, sizeof(buf), "%.2f", m.bin_freq_hz(k));
    if (k) out += ',';
    out += buf;
  }
  out += '\n';
  for (std::size_t fi = 0; fi < m.n_frames; ++fi) {
    for (std::size_t k = 0; k < m.n_bins; ++k) {
      std::snprintf(buf, sizeof(buf), "%.2f", m.at(fi, k));
      if (k) out += ',';
      out += buf;
    }
    out += '\n';
  }
  return out;
}

double band_snr(const SampleBuffer& signal_capture, const SampleBuffer& interference_capture,
                double low_hz, double high_hz) {
  validate_buffer(signal_capture, "band_snr signal");
  validate_buffer(interference_capture, "band_snr interference");
  if (signal_capture.sample_rate_hz != interference_capture.sample_rate_hz)
    throw std::invalid_argument("band_snr: sample rates must match");
  const double nyq = signal_capture.sample_rate_hz / 2.0;
  if (!(low_hz >= 0.0 && low_hz < high_hz && high_hz <= nyq))
    throw std::invalid_argument("band_snr: band must satisfy 0 <= low < high <= Nyquist");
  if (signal_capture.empty() || interference_capture.empty())
    throw std::invalid_argument("band_snr: buffers must not be empty");

  const double es =
      band_energy_fft(signal_capture.samples, signal_capture.sample_rate_hz, low_hz, high_hz);
  const double ei = band_energy_fft(interference_capture.samples,
                                    interference_capture.sample_rate_hz, low_hz, high_hz);
  if (ei <= 0.0) return std::numeric_limits<double>::infinity();
  if (es <= 0.0) return -std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(es / ei);
}

FeatureMatrix mfcc(const SampleBuffer& capture, std::size_t n_coeffs) {
  validate_buffer(capture, "mfcc");
  if (std::llround(capture.sample_rate_hz) != 16000)
    throw std::invalid_argument("mfcc: capture must be at 16 kHz");
  if (n_coeffs == 0 || n_coeffs > 26)
    throw std::invalid_argument("mfcc: n_coeffs must lie in [1, 26]");

  constexpr std::size_t kFrame = 400;  // 25 ms
  constexpr std::size_t kHop = 160;    // 10 ms
  constexpr std::size_t kNfft = 512;
  constexpr std::size_t kMel = 26;
  const double fs = 16000.0;

  if (capture.samples.size() < kFrame)
    throw std::invalid_argument("mfcc: capture shorter than one 25 ms frame");

  // Triangular mel filterbank 0-8 kHz over the kNfft/2+1 power bins.
  auto hz_to_mel = [](double f) { return 2595.0 * std::log10(1.0 + f / 700.0); };
  auto mel_to_hz = [](double m) { return 700.0 * (std::pow(10.0, m / 2595.0) - 1.0); };
  const double mel_max = hz_to_mel(fs / 2.0);
  std::vector<double> edges(kMel + 2);
  for (std::size_t i = 0; i < edges.size(); ++i)
    edges[i] = mel_to_hz(mel_max * static_cast<double>(i) / static_cast<double>(kMel + 1));

  const std::size_t n_bins = kNfft / 2 + 1;
  std::vector<std::vector<double>> bank(kMel, std::vector<double>(n_bins, 0.0));
  for (std::size_t m = 0; m < kMel; ++m) {
    const double lo = edges[m], mid = edges[m + 1], hi = edges[m + 2];
    for (std::size_t k = 0; k < n_bins; ++k) {
      const double f = static_cast<double>(k) * fs / kNfft;
      if (f <= lo || f >= hi) continue;
      bank[m][k] = f <= mid ? (f - lo) / (mid - lo) : (hi - f) / (hi - mid);
    }
  }

  const auto w = dsp::hann_window(kFrame);
  const std::size_t n_frames = (capture.samples.size() - kFrame) / kHop + 1;

  FeatureMatrix feat;
  feat.n_frames = n_frames;
  feat.n_coeffs = n_coeffs;
  feat.v.resize(n_frames * n_coeffs);

  std::vector<std::complex<double>> frame(kNfft);
  std::vector<double> logmel(kMel);
  for (std::size_t fi = 0; fi < n_frames; ++fi) {
    const std::size_t off = fi * kHop;
    for (std::size_t i = 0; i < kNfft; ++i)
      frame[i] = i < kFrame ? capture.samples[off + i] * w[i] : 0.0;
    dsp::fft(frame, false);
    for (std::size_t m = 0; m < kMel; ++m) {
      double e = 0.0;
      for (std::size_t k = 0; k < n_bins; ++k)
        if (bank[m][k] != 0.0) e += bank[m][k] * std::norm(frame[k]);
      logmel[m] = std::log(std::max(e, 1e-12));
    }
    for (std::size_t c = 0; c < n_coeffs; ++c) {
      double acc = 0.0;
      for (std::size_t m = 0; m < kMel; ++m)
        acc += logmel[m] * std::cos(kPi * static_cast<double>(c) *
                                    (static_cast<double>(m) + 0.5) / static_cast<double>(kMel));
      feat.v[fi * n_coeffs + c] = acc;
    }
  }

  // Cepstral mean subtraction over the utterance, c0 included: a pure gain
  // shifts c0 by a constant, so features are gain-invariant.
  for (std::size_t c = 0; c < n_coeffs; ++c) {
    double mean = 0.0;
    for (std::size_t fi = 0; fi < n_frames; ++fi) mean += feat.v[fi * n_coeffs + c];
    mean /= static_cast<double>(n_frames);
    for (std::size_t fi = 0; fi < n_frames; ++fi) feat.v[fi * n_coeffs + c] -= mean;
  }
  return feat;
}

double dtw_distance(const FeatureMatrix& a, const FeatureMatrix& b) {
  if (a.n_coeffs != b.n_coeffs)
    throw std::invalid_argument("dtw_distance: coefficient counts must match");
  if (a.n_frames == 0 || b.n_frames == 0)
    throw std::invalid_argument("dtw_distance: empty feature matrix");

  const std::size_t n = a.n_frames, m = b.n_frames, d = a.n_coeffs;
  auto cost = [&](std::size_t i, std::size_t j) {
    double acc = 0.0;
    for (std::size_t c = 0; c < d; ++c) {
      const double diff = a.v[i * d + c] - b.v[j * d + c];
      acc += diff * diff;
    }
    return std::sqrt(acc);
  };

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m, kInf), cur(m, kInf);
  for (std::size_t j = 0; j < m; ++j)
    prev[j] = j == 0 ? 2.0 * cost(0, 0) : prev[j - 1] + cost(0, j);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const double c = cost(i, j);
      double best = prev[j] + c;                              // vertical
      if (j > 0) best = std::min(best, cur[j - 1] + c);       // horizontal
      if (j > 0) best = std::min(best, prev[j - 1] + 2.0 * c);  // diagonal, symmetric weight
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m - 1] / static_cast<double>(n + m);
}

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::ack: return "ack";
    case Verdict::misheard: return "misheard";
    case Verdict::no_response: return "no_response";
  }
  return "?";
}

TrialOutcome keyword_spot(const SampleBuffer& capture, const std::vector<Template>& templates,
                          const std::string& ground_truth_id, double t_ack, double t_margin) {
  if (templates.empty()) throw std::invalid_argument("keyword_spot: template list is empty");
  if (!(t_ack > 0.0 && t_margin > 0.0))
    throw std::invalid_argument("keyword_spot: thresholds must be positive");

  TrialOutcome out;
  if (capture.samples.size() < 400) {
    out.verdict = Verdict::no_response;
    out.best_distance = std::numeric_limits<double>::infinity();
    out.note = "capture too short for feature extraction";
    return out;
  }

  const FeatureMatrix feat = mfcc(capture);
  double best = std::numeric_limits<double>::infinity();
  double second = std::numeric_limits<double>::infinity();
  for (const Template& t : templates) {
    const double dist = dtw_distance(feat, t.features);
    if (dist < best) {
      second = best;
      best = dist;
      out.best_command_id = t.command_id;
    } else if (dist < second) {
      second = dist;
    }
  }
  out.best_distance = best;
  out.margin = std::isinf(second) ? 0.0 : second - best;

  if (best > t_ack) out.verdict = Verdict::no_response;
  else if (out.best_command_id == ground_truth_id) out.verdict = Verdict::ack;
  else out.verdict = Verdict::misheard;
  return out;
}

std::vector<ClassDegradation> phoneme_class_degradation(const signals::UtteranceSpec& spec,
                                                        const SampleBuffer& clean,
                                                        const SampleBuffer& jammed) {
  validate_buffer(clean, "phoneme_class_degradation clean");
  validate_buffer(jammed, "phoneme_class_degradation jammed");
  if (clean.sample_rate_hz != jammed.sample_rate_hz)
    throw std::invalid_argument("phoneme_class_degradation: sample rates must match");
  const double fs = clean.sample_rate_hz;

  double total_s = 0.0;
  for (const auto& seg : spec.segments) total_s += seg.duration_s;
  const double tol_s = 0.025;  // one analysis frame
  if (std::abs(clean.duration_s() - total_s) > tol_s ||
      std::abs(jammed.duration_s() - total_s) > tol_s)
    throw std::invalid_argument(
        "phoneme_class_degradation: capture duration does not match the segment list");

  const double nyq = fs / 2.0;
  double drop_sum[2] = {0.0, 0.0};
  int count[2] = {0, 0};

  double cursor = 0.0;
  for (const auto& seg : spec.segments) {
    const double t0 = cursor;
    cursor += seg.duration_s;
    int slot;
    double lo, hi;
    if (seg.phoneme_class == signals::PhonemeClass::vowel) {
      slot = 0;
      lo = 100.0;
      hi = std::min(1500.0, 0.999 * nyq);
    } else if (seg.phoneme_class == signals::PhonemeClass::fricative) {
      slot = 1;
      lo = 3000.0;
      hi = std::min(7000.0, 0.999 * nyq);
    } else {
      continue;  // stops and silence have no dominant band defined
    }

    const auto i0 = static_cast<std::size_t>(std::llround(t0 * fs));
    const auto i1 = std::min({static_cast<std::size_t>(std::llround(cursor * fs)),
                              clean.samples.size(), jammed.samples.size()});
    if (i1 <= i0 + 16) continue;

    std::vector<double> c(clean.samples.begin() + static_cast<long>(i0),
                          clean.samples.begin() + static_cast<long>(i1));
    std::vector<double> j(jammed.samples.begin() + static_cast<long>(i0),
                          jammed.samples.begin() + static_cast<long>(i1));
    const double ec = band_energy_fft(c, fs, lo, hi);
    const double ej = band_energy_fft(j, fs, lo, hi);
    if (ec <= 0.0 || ej <= 0.0) continue;
    drop_sum[slot] += 10.0 * std::log10(ej / ec);
    ++count[slot];
  }

  std::vector<ClassDegradation> out;
  if (count[0] > 0)
    out.push_back({signals::PhonemeClass::vowel, drop_sum[0] / count[0], count[0]});
  if (count[1] > 0)
    out.push_back({signals::PhonemeClass::fricative, drop_sum[1] / count[1], count[1]});
  return out;
}

}  // namespace nujam::analysis
