#include "nujam/dsp.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace nujam::dsp {

namespace {

constexpr double kPi = std::numbers::pi;

// FFTW planning is not thread-safe; execution through the new-array
// interface is. Plans are created once per (size, direction) with
// FFTW_UNALIGNED so they apply to any buffer.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

fftw_plan plan_for(int n, int sign) {
  static std::map<std::pair<int, int>, fftw_plan> cache;
  std::lock_guard<std::mutex> lock(plan_mutex());
  auto key = std::make_pair(n, sign);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(n));
  fftw_complex* p = reinterpret_cast<fftw_complex*>(scratch.data());
  fftw_plan plan = fftw_plan_dft_1d(n, p, p, sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(key, plan);
  return plan;
}

double sinc(double u) {
  if (std::abs(u) < 1e-12) return 1.0;
  return std::sin(kPi * u) / (kPi * u);
}

}  // namespace

void fft(std::vector<std::complex<double>>& data, bool inverse) {
  const int n = static_cast<int>(data.size());
  if (n <= 1) return;
  fftw_plan plan = plan_for(n, inverse ? FFTW_BACKWARD : FFTW_FORWARD);
  fftw_complex* p = reinterpret_cast<fftw_complex*>(data.data());
  fftw_execute_dft(plan, p, p);
  if (inverse) {
    const double scale = 1.0 / n;
    for (auto& v : data) v *= scale;
  }
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
  std::vector<std::complex<double>> spec(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) spec[i] = x[i];
  fft(spec, false);
  return spec;
}

std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum) {
  std::vector<std::complex<double>> work = spectrum;
  fft(work, true);
  std::vector<double> out(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) out[i] = work[i].real();
  return out;
}

std::vector<double> hann_window(std::size_t n) {
  std::vector<double> w(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

double bessel_i0(double x) {
  const double half = x / 2.0;
  double sum = 1.0, term = 1.0;
  for (int k = 1; k < 80; ++k) {
    term *= (half / k) * (half / k);
    sum += term;
    if (term < sum * 1e-18) break;
  }
  return sum;
}

double kaiser_beta(double atten_db) {
  if (atten_db > 50.0) return 0.1102 * (atten_db - 8.7);
  if (atten_db >= 21.0)
    return 0.5842 * std::pow(atten_db - 21.0, 0.4) + 0.07886 * (atten_db - 21.0);
  return 0.0;
}

std::size_t kaiser_tap_count(double atten_db, double transition_hz, double sample_rate_hz) {
  const double delta_w = 2.0 * kPi * transition_hz / sample_rate_hz;
  std::size_t n = static_cast<std::size_t>(std::ceil((atten_db - 7.95) / (2.285 * delta_w))) + 1;
  if (n % 2 == 0) ++n;  // odd length -> integer group delay, exact zero-phase trim
  if (n < 5) n = 5;
  return n;
}

std::vector<double> design_lowpass_fir(double passband_edge_hz, double transition_hz,
                                       double sample_rate_hz, double atten_db) {
  const std::size_t n = kaiser_tap_count(atten_db, transition_hz, sample_rate_hz);
  const double beta = kaiser_beta(atten_db);
  const double i0b = bessel_i0(beta);
  const double fc = (passband_edge_hz + transition_hz / 2.0) / sample_rate_hz;  // cycles/sample
  const double m = static_cast<double>(n - 1) / 2.0;
  std::vector<double> h(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) - m;
    const double u = t / (m > 0.0 ? m : 1.0);
    const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0b;
    h[i] = 2.0 * fc * sinc(2.0 * fc * t) * w;
  }
  return h;
}

std::vector<double> filter_zero_delay(const std::vector<double>& x,
                                      const std::vector<double>& fir) {
  if (x.empty()) return {};
  if (fir.size() % 2 == 0) throw std::invalid_argument("filter_zero_delay: FIR length must be odd");
  const std::size_t nx = x.size(), nh = fir.size();
  const std::size_t nconv = nx + nh - 1;
  std::vector<std::complex<double>> a(nconv), b(nconv);
  for (std::size_t i = 0; i < nx; ++i) a[i] = x[i];
  for (std::size_t i = 0; i < nh; ++i) b[i] = fir[i];
  fft(a, false);
  fft(b, false);
  for (std::size_t i = 0; i < nconv; ++i) a[i] *= b[i];
  fft(a, true);
  const std::size_t delay = (nh - 1) / 2;
  std::vector<double> out(nx);
  for (std::size_t i = 0; i < nx; ++i) out[i] = a[i + delay].real();
  return out;
}

std::vector<double> apply_spectral_gain(const std::vector<double>& x, double sample_rate_hz,
                                        const std::function<double(double)>& gain_at_hz) {
  if (x.empty()) return {};
  const std::size_t n = x.size();
  auto spec = fft_real(x);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    const double f = static_cast<double>(k) * sample_rate_hz / static_cast<double>(n);
    const double g = gain_at_hz(f);
    spec[k] *= g;
    if (k > 0 && k < n - k) spec[n - k] = std::conj(spec[k]);
  }
  return ifft_real(spec);
}

std::vector<double> brickwall_band(const std::vector<double>& x, double sample_rate_hz,
                                   double low_hz, double high_hz) {
  return apply_spectral_gain(x, sample_rate_hz, [&](double f) {
    return (f >= low_hz - 1e-9 && f <= high_hz + 1e-9) ? 1.0 : 0.0;
  });
}

std::vector<double> resample_sinc(const std::vector<double>& x, double in_rate_hz,
                                  double out_rate_hz) {
  if (in_rate_hz <= 0.0 || out_rate_hz <= 0.0)
    throw std::invalid_argument("resample_sinc: rates must be positive");
  if (x.empty()) return {};
  if (in_rate_hz == out_rate_hz) return x;

  const double ratio = out_rate_hz / in_rate_hz;
  const double cutoff = std::min(1.0, ratio);  // relative to input Nyquist
  const double half_width = 32.0 / cutoff;     // 64 taps of the scaled sinc
  const double beta = 12.0;
  const double i0b = bessel_i0(beta);
  const auto n_in = static_cast<long long>(x.size());
  const auto n_out = static_cast<std::size_t>(
      std::llround(static_cast<double>(x.size()) * out_rate_hz / in_rate_hz));

  // The kernel depends only on the fractional part of the output position,
  // which cycles through a handful of values for rational rate ratios, so
  // tap weights are cached per phase. The Bessel evaluations would otherwise
  // dominate the whole conversion.
  struct Kernel {
    long long j0 = 0;
    std::vector<double> w;
  };
  std::map<double, Kernel> kernels;

  std::vector<double> out(n_out, 0.0);
  for (std::size_t m = 0; m < n_out; ++m) {
    const double center = static_cast<double>(m) / ratio;
    const double base_d = std::floor(center);
    const auto base = static_cast<long long>(base_d);
    const double frac = center - base_d;

    const Kernel* ker = nullptr;
    auto it = kernels.find(frac);
    if (it != kernels.end()) {
      ker = &it->second;
    } else if (kernels.size() < 64) {
      Kernel k;
      k.j0 = static_cast<long long>(std::ceil(frac - half_width));
      const auto j1 = static_cast<long long>(std::floor(frac + half_width));
      k.w.reserve(static_cast<std::size_t>(j1 - k.j0 + 1));
      for (long long j = k.j0; j <= j1; ++j) {
        const double t = static_cast<double>(j) - frac;
        const double u = t / half_width;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0b;
        k.w.push_back(cutoff * sinc(cutoff * t) * w);
      }
      ker = &kernels.emplace(frac, std::move(k)).first->second;
    }

    // The buffer is treated as one period of a periodic signal, the usual
    // convention for band-limited interpolation of finite sequences. Zero or
    // reflected extension would break the waveform at the edges and smear
    // broadband transient energy across the kernel's stopband.
    const auto sample_at = [&](long long idx) -> double {
      idx %= n_in;
      if (idx < 0) idx += n_in;
      return x[static_cast<std::size_t>(idx)];
    };

    double acc = 0.0;
    if (ker) {
      const long long first = base + ker->j0;
      const auto len = static_cast<long long>(ker->w.size());
      if (first >= 0 && first + len <= n_in) {
        const double* xs = x.data() + first;
        for (std::size_t wi = 0; wi < ker->w.size(); ++wi) acc += xs[wi] * ker->w[wi];
      } else {
        for (std::size_t wi = 0; wi < ker->w.size(); ++wi)
          acc += sample_at(first + static_cast<long long>(wi)) * ker->w[wi];
      }
    } else {
      // Irrational-ish ratio overflowing the cache: evaluate taps directly.
      const auto k0 = static_cast<long long>(std::ceil(center - half_width));
      const auto k1 = static_cast<long long>(std::floor(center + half_width));
      for (long long k = k0; k <= k1; ++k) {
        const double t = static_cast<double>(k) - center;
        const double u = t / half_width;
        const double w = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - u * u))) / i0b;
        acc += sample_at(k) * cutoff * sinc(cutoff * t) * w;
      }
    }
    out[m] = acc;
  }
  return out;
}

double GaussianRng::uniform() {
  return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
}

double GaussianRng::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = (static_cast<double>(gen_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  cached_ = r * std::sin(a);
  has_cached_ = true;
  return r * std::cos(a);
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  return splitmix64(a ^ splitmix64(b));
}

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace nujam::dsp
