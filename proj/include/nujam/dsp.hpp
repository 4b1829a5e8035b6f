#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

// Internal DSP toolbox shared by the public modules: FFT (FFTW-backed),
// window and FIR design, zero-delay filtering, band-limited resampling and a
// deterministic Gaussian stream. Nothing in here is part of the documented
// module surface; the public modules wrap these with their own contracts.
namespace nujam::dsp {

// In-place complex FFT, any length >= 1. The inverse transform includes the
// 1/N scaling. Plans are FFTW_ESTIMATE and cached per (size, direction), so
// results are bit-reproducible run to run.
void fft(std::vector<std::complex<double>>& data, bool inverse);

std::vector<std::complex<double>> fft_real(const std::vector<double>& x);
// Expects a conjugate-symmetric spectrum; imaginary residue is discarded.
std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum);

std::vector<double> hann_window(std::size_t n);  // periodic form

// Kaiser-window FIR design. Attenuation in dB governs both stopband depth
// and passband flatness; transition width is measured passband edge ->
// stopband edge.
double bessel_i0(double x);
double kaiser_beta(double atten_db);
std::size_t kaiser_tap_count(double atten_db, double transition_hz, double sample_rate_hz);
// Lowpass prototype with cutoff at the middle of the transition band.
std::vector<double> design_lowpass_fir(double passband_edge_hz, double transition_hz,
                                       double sample_rate_hz, double atten_db);

// Linear convolution with an odd-length symmetric FIR, group delay trimmed so
// the output aligns sample-for-sample with the input (zero-phase overall).
std::vector<double> filter_zero_delay(const std::vector<double>& x,
                                      const std::vector<double>& fir);

// Multiplies the spectrum by a real gain sampled per bin (zero phase).
std::vector<double> apply_spectral_gain(const std::vector<double>& x, double sample_rate_hz,
                                        const std::function<double(double)>& gain_at_hz);

// Zeroes every bin outside [low_hz, high_hz] (inclusive).
std::vector<double> brickwall_band(const std::vector<double>& x, double sample_rate_hz,
                                   double low_hz, double high_hz);

// Windowed-sinc resampler: 64-tap kernel per output sample (scaled by the
// rate ratio when decimating), Kaiser beta = 12, cutoff at the lower of the
// two Nyquist frequencies. Output length is round(n_in * out_rate / in_rate).
std::vector<double> resample_sinc(const std::vector<double>& x, double in_rate_hz,
                                  double out_rate_hz);

// Deterministic standard-normal stream: mt19937_64 (sequence fixed by the
// standard) plus an explicit Box-Muller, so outputs do not depend on the
// C++ library's distribution internals.
class GaussianRng {
 public:
  explicit GaussianRng(std::uint64_t seed) : gen_(seed) {}
  double uniform();  // [0, 1)
  double next();     // N(0, 1)

 private:
  std::mt19937_64 gen_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b);
std::uint64_t hash_string(std::string_view s);  // FNV-1a 64

}  // namespace nujam::dsp
