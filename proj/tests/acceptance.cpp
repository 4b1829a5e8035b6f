// End-to-end acceptance checks for the jamming chain. Each criterion prints
// one PASS/FAIL line with its wall time; any failure makes the process exit
// nonzero. Tolerances are pinned next to each check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nujam/acoustics.hpp"
#include "nujam/analysis.hpp"
#include "nujam/harness.hpp"
#include "nujam/mic_model.hpp"
#include "nujam/modulation.hpp"
#include "nujam/signals.hpp"
#include "oracle.hpp"

using namespace nujam;

namespace {

namespace fs = std::filesystem;

const fs::path kArtifactDir = fs::temp_directory_path() / "nujam_acceptance";

template <typename... Args>
std::string format(const char* spec, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

void expect(bool ok, const std::string& detail) {
  if (!ok) throw std::runtime_error(detail);
}

double band_energy(const SampleBuffer& b, double low_hz, double high_hz) {
  double total = 0.0;
  for (double v : b.samples) total += v * v;
  return total * oracle::band_energy_fraction(b.samples, b.sample_rate_hz, low_hz, high_hz);
}

double mean_db_below(const analysis::SpectrogramMatrix& m, double high_hz) {
  double acc = 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < m.n_bins && m.bin_freq_hz(k) <= high_hz; ++k)
    for (std::size_t fi = 0; fi < m.n_frames; ++fi) acc += m.at(fi, k), ++n;
  return acc / static_cast<double>(n);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("missing file: " + path.string());
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// The level sweep shared by criteria 7 through 9: the full default grid at
// four jammer levels, with the per-cell captures kept at the default level.
struct GridBundle {
  std::vector<double> levels;
  std::map<double, std::vector<harness::TrialRecord>> records;
  std::vector<harness::CellCaptures> default_cells;
};

const GridBundle& bundle() {
  static const GridBundle b = [] {
    GridBundle out;
    out.levels = {45.0, 50.0, 55.0, 60.0};
    for (double level : out.levels) {
      harness::ExperimentConfig config;
      config.jammer_spl_db = level;
      if (level == 60.0) {
        out.records[level] = harness::run_grid(
            config, [&](const harness::CellCaptures& c) { out.default_cells.push_back(c); });
      } else {
        out.records[level] = harness::run_grid(config);
      }
    }
    return out;
  }();
  return b;
}

int count_acks(const std::vector<harness::TrialRecord>& records, bool jammer_on) {
  int n = 0;
  for (const auto& r : records)
    if (r.jammer_on == jammer_on && r.outcome == analysis::Verdict::ack) ++n;
  return n;
}

int count_trials(const std::vector<harness::TrialRecord>& records, bool jammer_on) {
  int n = 0;
  for (const auto& r : records)
    if (r.jammer_on == jammer_on) ++n;
  return n;
}

SampleBuffer modulated_white_jam(std::uint64_t seed, double duration_s = 1.0) {
  signals::NoiseSpec spec;
  spec.duration_s = duration_s;
  spec.seed = seed;
  spec.band_high_hz = 6000.0;
  return modulation::susbam_modulate(gen_noise(spec), modulation::SusbamParams{});
}

void criterion_band_confinement() {
  const SampleBuffer y = modulated_white_jam(11);
  const double frac = oracle::band_energy_fraction(y.samples, 96000.0, 16000.0, 22000.0);
  expect(frac >= 0.99, format("in-band fraction %.5f < 0.99", frac));
}

void criterion_image_rejection() {
  const SampleBuffer x =
      signals::gen_tone(1000.0, 0.5, 1.0, 96000.0, Unit::digital_full_scale);
  const SampleBuffer y = modulation::susbam_modulate(x, modulation::SusbamParams{});
  // Interior window of 0.85 s holds an integer cycle count for both probes.
  const double wanted = oracle::goertzel_amp(y.samples, 96000.0, 17000.0, 4800, 81600);
  const double image = oracle::goertzel_amp(y.samples, 96000.0, 15000.0, 4800, 81600);
  const double rejection_db = oracle::db(wanted / image);
  expect(rejection_db >= 40.0, format("image only %.2f dB below the sideband", rejection_db));
}

void criterion_round_trip() {
  signals::NoiseSpec spec;
  spec.band_low_hz = 300.0;
  spec.band_high_hz = 5800.0;
  spec.seed = 12;
  const SampleBuffer x = gen_noise(spec);
  const modulation::SusbamParams params;
  const SampleBuffer z =
      modulation::ssb_demodulate(modulation::susbam_modulate(x, params), params);
  const double snr_db = oracle::aligned_snr_db(x.samples, z.samples, 256, 4800);
  expect(snr_db >= 40.0, format("round-trip SNR %.2f dB < 40", snr_db));
}

void criterion_demodulation_audibility() {
  acoustics::SourceSpec src;
  src.waveform = modulated_white_jam(13);
  src.spl_db = 60.0;
  src.cal_distance_m = acoustics::ft_to_m(3.0);
  src.distance_m = 0.2;
  const SampleBuffer p =
      acoustics::propagate(src, acoustics::default_absorption_table(), 96000.0);

  mic_model::MicModelParams square_law;  // defaults carry a2 = 5
  mic_model::MicModelParams linear;
  linear.a2 = 0.0;
  const SampleBuffer with = mic_model::capture(p, square_law, 42);
  const SampleBuffer without = mic_model::capture(p, linear, 42);
  const double gain_db =
      oracle::db_power(band_energy(with, 300.0, 6000.0) / band_energy(without, 300.0, 6000.0));
  expect(gain_db >= 30.0, format("audible-band energy gain %.2f dB < 30", gain_db));
}

void criterion_two_tone_product() {
  const double a1_amp = 0.05, a2_amp = 0.05;
  const SampleBuffer p =
      signals::mix({signals::gen_tone(17000.0, a1_amp, 1.0, 96000.0, Unit::pascal),
                    signals::gen_tone(19000.0, a2_amp, 1.0, 96000.0, Unit::pascal)},
                   {1.0, 1.0});
  const mic_model::MicModelParams mic;
  const SampleBuffer v = mic_model::apply_nonlinearity(p, mic);
  const double measured = oracle::goertzel_amp(v.samples, 96000.0, 2000.0, 0, v.samples.size());
  const double predicted = mic.a2 * a1_amp * a2_amp;
  const double error_db = std::abs(oracle::db(measured / predicted));
  expect(error_db <= 1.0,
         format("difference tone off prediction by %.3f dB (measured %.6f, predicted %.6f)",
                error_db, measured, predicted));
}

void criterion_propagation_law() {
  const acoustics::AbsorptionTable none{{{1000.0, 0.0}, {22000.0, 0.0}}};
  signals::NoiseSpec nspec;
  nspec.seed = 14;
  nspec.duration_s = 0.5;
  acoustics::SourceSpec src;
  src.waveform = gen_noise(nspec);
  src.spl_db = 60.0;
  src.cal_distance_m = acoustics::ft_to_m(3.0);

  const auto level_at = [&](double dist_ft, const acoustics::AbsorptionTable& table) {
    acoustics::SourceSpec s = src;
    s.distance_m = acoustics::ft_to_m(dist_ft);
    return signals::measure_spl(acoustics::propagate(s, table, 96000.0));
  };
  const double d3 = level_at(3.0, none), d6 = level_at(6.0, none), d12 = level_at(12.0, none);
  expect(std::abs(d3 - d6 - 6.02) <= 0.05,
         format("first doubling lost %.3f dB, want 6.02 +- 0.05", d3 - d6));
  expect(std::abs(d6 - d12 - 6.02) <= 0.05,
         format("second doubling lost %.3f dB, want 6.02 +- 0.05", d6 - d12));
  const double at_cal = level_at(3.0, acoustics::default_absorption_table());
  expect(std::abs(at_cal - 60.0) <= 0.05,
         format("calibration point reads %.3f dB SPL, want 60 +- 0.05", at_cal));
}

void criterion_trial_grid() {
  const GridBundle& b = bundle();

  const auto& at_default = b.records.at(60.0);
  const int clean_total = count_trials(at_default, false);
  const int clean_acks = count_acks(at_default, false);
  expect(clean_acks * 10 >= clean_total * 9,
         format("clean ack rate %d/%d below 90%%", clean_acks, clean_total));

  int previous = std::numeric_limits<int>::max();
  std::string sweep;
  for (double level : b.levels) {
    const int acks = count_acks(b.records.at(level), true);
    sweep += format("%s%g dB: %d", sweep.empty() ? "" : ", ", level, acks);
    expect(acks <= previous, "jammed acks rose with jammer level (" + sweep + ")");
    previous = acks;
  }
  const int top_acks = count_acks(b.records.at(b.levels.back()), true);
  const int jam_total = count_trials(at_default, true);
  expect(top_acks * 5 <= jam_total,
         format("jammed ack rate %d/%d above 20%% at the top level", top_acks, jam_total));

  // The frozen thresholds must match what the calibration procedure yields.
  const harness::Thresholds t = harness::calibrate_thresholds(harness::ExperimentConfig{});
  expect(std::abs(t.t_ack - 27.8) <= 0.5 && std::abs(t.t_margin - 6.9) <= 0.5,
         format("calibration drifted to t_ack %.4f, t_margin %.4f", t.t_ack, t.t_margin));
}

void criterion_fricative_asymmetry() {
  const GridBundle& b = bundle();

  std::map<std::string, std::string> profile_of;
  for (const auto& cmd : harness::default_command_bank()) profile_of[cmd.id] = cmd.profile;

  std::map<std::string, std::array<int, 4>> tally;  // clean acks, clean n, jam acks, jam n
  for (const auto& r : b.records.at(60.0)) {
    auto& t = tally[profile_of.at(r.command_id)];
    const int base = r.jammer_on ? 2 : 0;
    t[base] += r.outcome == analysis::Verdict::ack ? 1 : 0;
    t[base + 1] += 1;
  }
  const auto drop = [&](const std::string& profile) {
    const auto& t = tally.at(profile);
    return static_cast<double>(t[0]) / t[1] - static_cast<double>(t[2]) / t[3];
  };
  expect(drop("fricative_heavy") >= drop("fricative_poor") - 1e-12,
         format("ack-rate drop %.3f (fricative_heavy) < %.3f (fricative_poor)",
                drop("fricative_heavy"), drop("fricative_poor")));

  // Direction of the band contamination, across 20 independent seedings of a
  // balanced command: fricative bands must suffer at least as much as vowel
  // bands in at least 90% of them.
  const harness::Command* balanced = nullptr;
  for (const auto& cmd : harness::default_command_bank())
    if (cmd.id == "cmd05") balanced = &cmd;
  const signals::UtteranceSpec spec = harness::utterance_for(*balanced, false);

  int fricative_hit_harder = 0;
  const int seeds = 20;
  for (int seed = 1; seed <= seeds; ++seed) {
    harness::ExperimentConfig config;
    config.command_ids = {"cmd05"};
    config.distances_ft = {3.0};
    config.master_seed = static_cast<std::uint64_t>(seed);

    SampleBuffer clean, jammed;
    harness::run_grid(config, [&](const harness::CellCaptures& c) {
      (c.jammer_on ? jammed : clean) = c.capture;
    });
    const auto rows = analysis::phoneme_class_degradation(spec, clean, jammed);
    expect(rows.size() == 2, "degradation rows missing a phoneme class");
    if (rows[1].mean_drop_db >= rows[0].mean_drop_db) ++fricative_hit_harder;
  }
  expect(fricative_hit_harder * 10 >= seeds * 9,
         format("fricative bands degraded at least as much as vowels in only %d/%d seedings",
                fricative_hit_harder, seeds));
}

void criterion_spectrogram_contrast() {
  const GridBundle& b = bundle();
  const harness::ExperimentConfig config;  // matches the level-60 bundle run

  std::map<std::pair<std::string, double>, std::pair<const SampleBuffer*, const SampleBuffer*>>
      pairs;
  for (const auto& cell : b.default_cells) {
    auto& slot = pairs[{cell.command_id, cell.distance_ft}];
    (cell.jammer_on ? slot.second : slot.first) = &cell.capture;
  }
  expect(pairs.size() == 30, format("expected 30 capture pairs, found %zu", pairs.size()));

  double worst_delta = std::numeric_limits<double>::infinity();
  std::pair<std::string, double> worst_key;
  for (const auto& [key, caps] : pairs) {
    expect(caps.first && caps.second, "a grid cell is missing its partner capture");
    const double clean_db =
        mean_db_below(analysis::stft(*caps.first, config.stft_window, config.stft_hop), 6000.0);
    const double jam_db =
        mean_db_below(analysis::stft(*caps.second, config.stft_window, config.stft_hop), 6000.0);
    if (jam_db - clean_db < worst_delta) {
      worst_delta = jam_db - clean_db;
      worst_key = key;
    }
  }
  expect(worst_delta >= 20.0,
         format("weakest audible-band lift is %.2f dB (%s at %g ft), want >= 20", worst_delta,
                worst_key.first.c_str(), worst_key.second));

  const fs::path dir = kArtifactDir / "spectrograms";
  harness::emit_spectrogram_pairs(config, b.default_cells, dir.string());
  for (const auto& [key, caps] : pairs) {
    for (const char* state : {"clean", "jammed"}) {
      const fs::path pgm =
          dir / format("%s_%gft_%s.pgm", key.first.c_str(), key.second, state);
      expect(fs::exists(pgm), "missing artifact " + pgm.string());
    }
  }
}

void criterion_determinism() {
  harness::ExperimentConfig config;  // the full default grid, both runs

  const fs::path dirs[2] = {kArtifactDir / "run_a", kArtifactDir / "run_b"};
  for (const fs::path& dir : dirs) {
    fs::remove_all(dir);
    config.output_dir = dir.string();
    harness::run_experiment(config);
  }

  expect(slurp(dirs[0] / "trials.csv") == slurp(dirs[1] / "trials.csv"),
         "trials.csv differs between identical runs");

  for (const char* sub : {"spectrograms", "captures"}) {
    std::set<std::string> names[2];
    for (int i = 0; i < 2; ++i)
      for (const auto& entry : fs::directory_iterator(dirs[i] / sub))
        names[i].insert(entry.path().filename().string());
    expect(names[0] == names[1], std::string(sub) + " listings differ between identical runs");
    expect(!names[0].empty(), std::string(sub) + " came out empty");
    for (const std::string& name : names[0])
      expect(slurp(dirs[0] / sub / name) == slurp(dirs[1] / sub / name),
             std::string(sub) + "/" + name + " differs between identical runs");
  }
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // 0 means no per-criterion wall budget
    void (*body)();
  };
  const Criterion criteria[] = {
      {1, "jammer energy confined to 16-22 kHz", 5.0, criterion_band_confinement},
      {2, "lower sideband suppressed by 40 dB", 1.0, criterion_image_rejection},
      {3, "modulate-demodulate round trip at 40 dB", 2.0, criterion_round_trip},
      {4, "square law folds the jam into the audible band", 5.0,
       criterion_demodulation_audibility},
      {5, "two-tone difference product matches a2*A1*A2", 0.0, criterion_two_tone_product},
      {6, "inverse distance law and calibration fixed point", 0.0, criterion_propagation_law},
      {7, "grid acks clean speech and loses it to the jammer", 60.0, criterion_trial_grid},
      {8, "fricative-led commands degrade first", 0.0, criterion_fricative_asymmetry},
      {9, "audible-band spectrogram lift of 20 dB everywhere", 0.0,
       criterion_spectrogram_contrast},
      {10, "repeated runs are bit-identical", 0.0, criterion_determinism},
  };

  fs::create_directories(kArtifactDir);
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (error.empty() && c.budget_s > 0.0 && elapsed > c.budget_s)
      error = format("took %.2f s, budget %.0f s", elapsed, c.budget_s);

    if (error.empty()) {
      std::printf("[PASS] criterion %d: %s (%.2f s)\n", c.id, c.name, elapsed);
    } else {
      std::printf("[FAIL] criterion %d: %s (%.2f s): %s\n", c.id, c.name, elapsed,
                  error.c_str());
      ++failures;
    }
    std::fflush(stdout);
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
