#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nujam/sample_buffer.hpp"

// Deterministic test-signal synthesis: colored noise, calibrated tones,
// formant/frication utterance caricatures, mixing, SPL scaling and
// band-limited resampling. Every generator is a pure function of its spec
// and seed; identical calls return bit-identical buffers.
namespace nujam::signals {

enum class NoiseColor { white, pink, brown, babble };

NoiseColor noise_color_from_string(const std::string& s);
const char* to_string(NoiseColor c);

struct NoiseSpec {
  NoiseColor color = NoiseColor::white;
  double duration_s = 1.0;
  double sample_rate_hz = 96000.0;
  std::uint64_t seed = 1;
  // Energy is confined to [band_low_hz, band_high_hz] by FFT brickwall.
  double band_low_hz = 0.0;
  double band_high_hz = 48000.0;
};

// Output is digital_full_scale, RMS normalized to 0.1. Spectral shape per
// color: white flat, pink -3 dB/octave, brown -6 dB/octave, babble a mix of
// eight seeded synthetic voice-like streams.
SampleBuffer gen_noise(const NoiseSpec& spec);

// amplitude is peak amplitude, in the chosen unit. freq_hz must lie below
// Nyquist; at 0 Hz the sine degenerates to silence.
SampleBuffer gen_tone(double freq_hz, double amplitude, double duration_s,
                      double sample_rate_hz, Unit unit);

enum class PhonemeClass { vowel, fricative, stop, silence };

const char* to_string(PhonemeClass c);

struct Segment {
  PhonemeClass phoneme_class = PhonemeClass::silence;
  double center_hz = 0.0;  // formant center (vowel) or frication centroid (fricative)
  double duration_s = 0.1;
};

struct UtteranceSpec {
  std::vector<Segment> segments;
  double fundamental_hz = 120.0;
  std::uint64_t seed = 1;
};

// Renders the caricature at 96 kHz by default: vowels are a pulse train at
// the fundamental shaped by a resonator at center_hz, fricatives are
// band-passed noise at >= 3 kHz, stops are 10 ms silence plus a 20 ms
// broadband burst. Segments join through 5 ms raised-cosine cross-fades;
// total duration equals the sum of segment durations; peak <= 0.9.
SampleBuffer synth_utterance(const UtteranceSpec& spec, double sample_rate_hz = 96000.0);

// Samplewise weighted sum. Buffers must share rate and unit; shorter buffers
// are zero-padded to the longest.
SampleBuffer mix(const std::vector<SampleBuffer>& buffers, const std::vector<double>& gains);

// SPL reference is 20 micropascal; 94 dB SPL corresponds to 1 Pa RMS.
constexpr double kPressureRefPa = 20e-6;

// Rescales a pascal buffer so its RMS corresponds to target_db_spl.
SampleBuffer scale_to_spl(const SampleBuffer& pressure, double target_db_spl);

// Returns dB SPL of a pascal buffer; -infinity for all-zero content.
double measure_spl(const SampleBuffer& pressure);

// Windowed-sinc resampler (64-tap kernel, Kaiser beta = 12, >= 60 dB image
// rejection). Identical rates return the buffer unchanged.
SampleBuffer resample(const SampleBuffer& b, double new_rate_hz);

}  // namespace nujam::signals
