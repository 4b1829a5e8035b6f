#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "nujam/modulation.hpp"
#include "nujam/sample_buffer.hpp"
#include "nujam/signals.hpp"
#include "oracle.hpp"

using namespace nujam;
using modulation::analytic_signal;
using modulation::bandpass;
using modulation::ssb_demodulate;
using modulation::susbam_modulate;
using modulation::SusbamParams;

namespace {

SampleBuffer band_noise(double low_hz, double high_hz, double rate_hz, std::uint64_t seed,
                        double duration_s = 1.0) {
  signals::NoiseSpec spec;
  spec.color = signals::NoiseColor::white;
  spec.duration_s = duration_s;
  spec.sample_rate_hz = rate_hz;
  spec.seed = seed;
  spec.band_low_hz = low_hz;
  spec.band_high_hz = high_hz;
  return gen_noise(spec);
}

// Positive- vs negative-frequency energy of re + j*im, Hann-windowed after
// dropping edge_s seconds at both ends.
double negative_freq_rejection_db(const SampleBuffer& re, const SampleBuffer& im, double edge_s) {
  const auto skip = static_cast<std::size_t>(edge_s * re.sample_rate_hz);
  std::size_t n = 1;
  while (n * 2 <= re.size() - 2 * skip) n *= 2;
  const auto w = oracle::hann_periodic(n);
  std::vector<std::complex<double>> a(n);
  for (std::size_t i = 0; i < n; ++i)
    a[i] = std::complex<double>(re.samples[skip + i], im.samples[skip + i]) * w[i];
  oracle::fft_pow2(a, false);
  double pos = 0.0, neg = 0.0;
  for (std::size_t k = 1; k < n / 2; ++k) {
    pos += std::norm(a[k]);
    neg += std::norm(a[n - k]);
  }
  return oracle::db_power(neg / pos);
}

}  // namespace

TEST_CASE("analytic_signal reproduces the canonical Hilbert pair") {
  const double fs = 48000.0;
  const SampleBuffer c = signals::gen_tone(1000.0, 1.0, 0.5, fs, Unit::digital_full_scale);
  SampleBuffer cosine = c;
  for (std::size_t i = 0; i < cosine.size(); ++i)
    cosine.samples[i] = std::cos(2.0 * oracle::kPi * 1000.0 * static_cast<double>(i) / fs);

  const auto [re, im] = analytic_signal(cosine);
  REQUIRE(re.size() == cosine.size());
  REQUIRE(im.size() == cosine.size());

  const auto skip = static_cast<std::size_t>(0.005 * fs);
  double worst_re = 0.0, worst_im = 0.0;
  for (std::size_t i = skip; i + skip < cosine.size(); ++i) {
    const double expected_im = std::sin(2.0 * oracle::kPi * 1000.0 * static_cast<double>(i) / fs);
    worst_re = std::max(worst_re, std::abs(re.samples[i] - cosine.samples[i]));
    worst_im = std::max(worst_im, std::abs(im.samples[i] - expected_im));
  }
  CHECK(worst_re <= 1e-9);
  CHECK(worst_im <= 1e-3);
}

TEST_CASE("analytic_signal of a constant has no imaginary part") {
  SampleBuffer dc;
  dc.sample_rate_hz = 48000.0;
  dc.samples.assign(4800, 0.5);
  const auto [re, im] = analytic_signal(dc);
  CHECK(peak(im) <= 1e-3);
}

TEST_CASE("analytic_signal suppresses negative frequencies") {
  const SampleBuffer x = band_noise(500.0, 20000.0, 96000.0, 9);
  const auto [re, im] = analytic_signal(x);
  CHECK(negative_freq_rejection_db(re, im, 0.005) <= -60.0);
}

TEST_CASE("analytic_signal rejects too-short buffers") {
  SampleBuffer tiny;
  tiny.sample_rate_hz = 48000.0;
  tiny.samples.assign(63, 0.0);
  CHECK_THROWS_AS(analytic_signal(tiny), std::invalid_argument);
}

TEST_CASE("susbam_modulate shifts a tone up by the carrier") {
  const SampleBuffer tone = signals::gen_tone(1000.0, 0.5, 1.0, 96000.0, Unit::digital_full_scale);
  const SampleBuffer y = susbam_modulate(tone, SusbamParams{});

  REQUIRE(y.sample_rate_hz == 96000.0);
  CHECK(peak(y) == doctest::Approx(0.9).epsilon(1e-9));

  const auto sp = oracle::windowed_spectrum(y.samples, 96000.0, oracle::blackman_window(65536));
  const double f_peak = static_cast<double>(oracle::peak_bin(sp)) * sp.bin_hz;
  CHECK(std::abs(f_peak - 17000.0) <= sp.bin_hz);

  // The lower image sits at carrier - f; Hartley modulation cancels it.
  const auto bin_at = [&](double f) {
    return static_cast<std::size_t>(std::llround(f / sp.bin_hz));
  };
  const double image = sp.amp[bin_at(15000.0)];
  const double peak_amp = sp.amp[bin_at(17000.0)];
  CHECK(oracle::db(image / peak_amp) <= -40.0);
}

TEST_CASE("susbam_modulate frequency-shift property across the baseband") {
  for (double f : {500.0, 2500.0, 5500.0}) {
    const SampleBuffer tone = signals::gen_tone(f, 0.5, 0.5, 96000.0, Unit::digital_full_scale);
    const SampleBuffer y = susbam_modulate(tone, SusbamParams{});
    const auto sp = oracle::windowed_spectrum(y.samples, 96000.0, oracle::blackman_window(32768));
    const double f_peak = static_cast<double>(oracle::peak_bin(sp)) * sp.bin_hz;
    CHECK(std::abs(f_peak - (16000.0 + f)) <= sp.bin_hz);
  }
}

TEST_CASE("susbam_modulate confines the default jammer band") {
  const SampleBuffer noise = band_noise(0.0, 6000.0, 96000.0, 42);
  const SampleBuffer y = susbam_modulate(noise, SusbamParams{});
  CHECK(oracle::band_energy_fraction(y.samples, 96000.0, 16000.0, 22000.0) >= 0.99);
}

TEST_CASE("susbam_modulate sideband confinement holds for other carriers") {
  SusbamParams p;
  p.carrier_hz = 18000.0;
  p.baseband_limit_hz = 4000.0;
  const SampleBuffer noise = band_noise(0.0, 4000.0, 96000.0, 7);
  const SampleBuffer y = susbam_modulate(noise, p);
  // Out-of-band energy measured outside the transition-widened band.
  const double widen = std::max(200.0, 0.05 * (p.carrier_hz + p.baseband_limit_hz));
  CHECK(oracle::band_energy_fraction(y.samples, 96000.0, p.carrier_hz - widen,
                                     p.carrier_hz + p.baseband_limit_hz + widen) >= 0.99);
}

TEST_CASE("susbam_modulate normalization hides input scale") {
  const SampleBuffer noise = band_noise(0.0, 6000.0, 96000.0, 13, 0.5);
  SampleBuffer half = noise;
  for (double& v : half.samples) v *= 0.5;
  const SampleBuffer ya = susbam_modulate(noise, SusbamParams{});
  const SampleBuffer yb = susbam_modulate(half, SusbamParams{});
  REQUIRE(ya.size() == yb.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < ya.size(); ++i)
    worst = std::max(worst, std::abs(ya.samples[i] - yb.samples[i]));
  CHECK(worst <= 1e-9);
}

TEST_CASE("susbam_modulate validates params") {
  SusbamParams p;
  p.carrier_hz = 45000.0;
  p.baseband_limit_hz = 6000.0;  // 51 kHz > Nyquist
  const SampleBuffer noise = band_noise(0.0, 6000.0, 96000.0, 1, 0.1);
  CHECK_THROWS_AS(susbam_modulate(noise, p), std::invalid_argument);
  p = SusbamParams{};
  p.baseband_limit_hz = 0.0;
  CHECK_THROWS_AS(susbam_modulate(noise, p), std::invalid_argument);
}

TEST_CASE("round trip through modulate and demodulate") {
  const SampleBuffer noise = band_noise(0.0, 6000.0, 96000.0, 99);
  const SampleBuffer y = susbam_modulate(noise, SusbamParams{});
  const SampleBuffer back = ssb_demodulate(y, SusbamParams{});
  REQUIRE(back.sample_rate_hz == 96000.0);
  const auto skip = static_cast<std::size_t>(0.05 * 96000.0);
  CHECK(oracle::aligned_snr_db(noise.samples, back.samples, 256, skip) >= 40.0);
}

TEST_CASE("ssb_demodulate heterodynes a 17 kHz tone to 1 kHz") {
  const SampleBuffer tone = signals::gen_tone(17000.0, 0.5, 0.5, 96000.0, Unit::digital_full_scale);
  const SampleBuffer d = ssb_demodulate(tone, SusbamParams{});
  const auto sp = oracle::windowed_spectrum(d.samples, 96000.0, oracle::blackman_window(32768));
  const double f_peak = static_cast<double>(oracle::peak_bin(sp)) * sp.bin_hz;
  CHECK(std::abs(f_peak - 1000.0) <= sp.bin_hz);
}

TEST_CASE("ssb_demodulate of silence is silence") {
  SampleBuffer zero;
  zero.sample_rate_hz = 96000.0;
  zero.samples.assign(9600, 0.0);
  const SampleBuffer d = ssb_demodulate(zero, SusbamParams{});
  CHECK(peak(d) <= 1e-12);
}

TEST_CASE("bandpass selects the requested band") {
  SUBCASE("1 kHz tone through 16-22 kHz is rejected") {
    const SampleBuffer t = signals::gen_tone(1000.0, 0.5, 0.5, 96000.0, Unit::digital_full_scale);
    const SampleBuffer f = bandpass(t, 16000.0, 22000.0);
    CHECK(oracle::db(rms(f) / rms(t)) <= -60.0);
  }
  SUBCASE("18 kHz tone through 16-22 kHz is preserved") {
    const SampleBuffer t = signals::gen_tone(18000.0, 0.5, 0.5, 96000.0, Unit::digital_full_scale);
    const SampleBuffer f = bandpass(t, 16000.0, 22000.0);
    CHECK(std::abs(oracle::db(rms(f) / rms(t))) <= 0.5);
  }
  SUBCASE("full-band pass is the identity") {
    const SampleBuffer x = band_noise(0.0, 24000.0, 48000.0, 3, 0.25);
    const SampleBuffer f = bandpass(x, 0.0, 24000.0);
    REQUIRE(f.size() == x.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
      worst = std::max(worst, std::abs(f.samples[i] - x.samples[i]));
    CHECK(worst <= 1e-6);
  }
  SUBCASE("invalid band is rejected") {
    const SampleBuffer x = band_noise(0.0, 24000.0, 48000.0, 3, 0.1);
    CHECK_THROWS_AS(bandpass(x, 9000.0, 8000.0), std::invalid_argument);
    CHECK_THROWS_AS(bandpass(x, -100.0, 8000.0), std::invalid_argument);
  }
}
