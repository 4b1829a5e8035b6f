#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nujam/sample_buffer.hpp"
#include "nujam/signals.hpp"

// Measurement side of the chain: spectrograms, band SNR, MFCC features, a
// DTW keyword spotter standing in for a fixed deployed ASR, and per-phoneme-
// class degradation between a clean and a jammed capture.
namespace nujam::analysis {

// Row-major grid: rows are analysis frames (time), columns are FFT bins.
struct SpectrogramMatrix {
  std::size_t n_frames = 0;
  std::size_t n_bins = 0;  // window/2 + 1
  double sample_rate_hz = 0.0;
  std::size_t window = 0;
  std::size_t hop = 0;
  std::vector<double> db;  // magnitude in dB re full scale, floored at -120

  double at(std::size_t frame, std::size_t bin) const { return db[frame * n_bins + bin]; }
  double bin_freq_hz(std::size_t bin) const {
    return static_cast<double>(bin) * sample_rate_hz / static_cast<double>(window);
  }
};

constexpr double kStftFloorDb = -120.0;

// Hann-windowed STFT magnitude. window must be a power of two >= 64;
// 0 < hop <= window; the buffer must hold at least one full window.
// Normalization: a full-scale sine reads ~0 dB at its peak bin.
SpectrogramMatrix stft(const SampleBuffer& b, std::size_t window, std::size_t hop);

struct Image {
  std::size_t width = 0;   // frames
  std::size_t height = 0;  // bins, top row = highest frequency
  std::vector<std::uint8_t> pixels;
};

// Linear dB -> gray mapping over [db_min, db_max], clamped. Defaults match
// the spectrogram artifact range.
Image render_spectrogram(const SpectrogramMatrix& m, double db_min = -100.0,
                         double db_max = -20.0);

void write_pgm(const std::string& path, const Image& img);

// CSV of the raw dB grid: header row of bin center frequencies, then one row
// per frame. Fixed two-decimal formatting keeps the bytes deterministic.
std::string matrix_to_csv(const SpectrogramMatrix& m);

// 10*log10(E_signal / E_interference) over [low, high] after band-passing
// both captures. Buffers must share a sample rate; returns +infinity when
// the interference band energy is zero.
double band_snr(const SampleBuffer& signal_capture, const SampleBuffer& interference_capture,
                double low_hz, double high_hz);

struct FeatureMatrix {
  std::size_t n_frames = 0;
  std::size_t n_coeffs = 0;
  std::vector<double> v;  // row-major

  double at(std::size_t f, std::size_t c) const { return v[f * n_coeffs + c]; }
};

// MFCC at 16 kHz only: 25 ms frames, 10 ms hop, 26 mel filters spanning
// 0-8 kHz, log energies, DCT-II, first n_coeffs coefficients, per-utterance
// cepstral mean subtraction (all coefficients, c0 included, so absolute gain
// cancels).
FeatureMatrix mfcc(const SampleBuffer& capture, std::size_t n_coeffs = 13);

// Path-length-normalized DTW distance between two feature matrices:
// per-frame Euclidean cost, symmetric step pattern (diagonal weight 2),
// normalized by n_frames_a + n_frames_b.
double dtw_distance(const FeatureMatrix& a, const FeatureMatrix& b);

enum class Verdict { ack, misheard, no_response };

const char* to_string(Verdict v);

struct Template {
  std::string command_id;
  FeatureMatrix features;
};

struct TrialOutcome {
  Verdict verdict = Verdict::no_response;
  std::string best_command_id;
  double best_distance = 0.0;
  double margin = 0.0;  // second-best distance minus best distance
  std::string note;     // diagnostic for degenerate inputs
};

// Nearest template by DTW. ack when the best distance clears t_ack and the
// best id matches ground truth; misheard when it clears t_ack with the wrong
// id; no_response otherwise. A capture too short for features yields
// no_response with a diagnostic note.
TrialOutcome keyword_spot(const SampleBuffer& capture, const std::vector<Template>& templates,
                          const std::string& ground_truth_id, double t_ack, double t_margin);

struct ClassDegradation {
  signals::PhonemeClass phoneme_class = signals::PhonemeClass::vowel;
  double mean_drop_db = 0.0;  // 10*log10(E_jammed / E_clean), averaged over segments
  int segment_count = 0;
};

// Per-segment in-band energy comparison between a clean and a jammed capture
// of the same utterance. Dominant bands: vowels 100 Hz-1.5 kHz, fricatives
// 3-7 kHz (clipped to Nyquist); stop and silence segments are skipped.
// Captures must share the rate and match the segment list's total duration
// within one 25 ms frame.
std::vector<ClassDegradation> phoneme_class_degradation(const signals::UtteranceSpec& spec,
                                                        const SampleBuffer& clean,
                                                        const SampleBuffer& jammed);

}  // namespace nujam::analysis
