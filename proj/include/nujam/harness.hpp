#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "nujam/acoustics.hpp"
#include "nujam/analysis.hpp"
#include "nujam/mic_model.hpp"
#include "nujam/modulation.hpp"
#include "nujam/sample_buffer.hpp"
#include "nujam/signals.hpp"

// Experiment harness: a trial grid over command x distance x jammer state,
// with per-cell seeds derived from one master seed so every artifact is a
// pure function of (config text, master seed).
namespace nujam::harness {

// A voice command in the bank: a shared wake prefix plus a distinguishing
// body. The id is the ground-truth label; profile groups commands by how
// much of their identity rides on frication.
struct Command {
  std::string id;
  std::string profile;  // fricative_heavy | balanced | fricative_poor
  double fundamental_hz = 120.0;
  std::uint64_t seed = 1;
  std::vector<signals::Segment> wake_segments;
  std::vector<signals::Segment> body_segments;
};

// Ten built-in synthetic commands: four fricative-heavy, three balanced,
// three fricative-poor, all sharing the wake prefix.
const std::vector<Command>& default_command_bank();

// manual_trigger skips the wake prefix (the device was poked by hand).
signals::UtteranceSpec utterance_for(const Command& cmd, bool manual_trigger);

struct ExperimentConfig {
  std::vector<double> distances_ft = {1.0, 3.0, 6.0};
  int repeats = 1;
  bool manual_trigger = false;
  std::vector<std::string> command_ids;  // empty selects the whole bank

  double speech_spl_db = 65.0;
  double speech_cal_distance_ft = 1.0;

  signals::NoiseColor jammer_color = signals::NoiseColor::white;
  double jammer_spl_db = 60.0;
  double jammer_cal_distance_ft = 3.0;
  // The jammer sits next to the protected device; 20 cm keeps the
  // demodulation product well above the capture floor without driving the
  // front end into clipping at the calibrated level.
  double jammer_distance_ft = 0.2 / acoustics::kMetersPerFoot;

  modulation::SusbamParams susbam;
  mic_model::MicModelParams mic;

  // Acceptance threshold of the simulated recognizer. Calibrated once on
  // clean captures of the default bank (worst self-distance 23.1, plus 20%
  // headroom), frozen here since.
  double t_ack = 27.8;
  double t_margin = 6.9;

  std::uint64_t master_seed = 1;
  std::string output_dir = "nujam_out";
  double scene_rate_hz = 96000.0;
  std::size_t stft_window = 1024;
  std::size_t stft_hop = 256;
  acoustics::AbsorptionTable absorption = acoustics::default_absorption_table();
};

void validate(const ExperimentConfig& config);

// Line-oriented `key = value` text; `#` comments; unknown keys and type
// mismatches are hard errors carrying the line number. Every key has a
// default, so empty text yields the default experiment.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);

// Emits a config round-trippable through parse_config.
std::string serialize_config(const ExperimentConfig& config);

std::vector<const Command*> active_commands(const ExperimentConfig& config);

struct TrialRecord {
  std::string command_id;
  double distance_ft = 0.0;
  bool jammer_on = false;
  analysis::Verdict outcome = analysis::Verdict::no_response;
  double audible_band_snr_db = 0.0;  // speech vs interference, 300 Hz - 6 kHz
  double margin = 0.0;
  std::uint64_t seed_used = 0;
};

// Everything a grid cell captured, offered to the sink for file emission.
// `reference` is the speech-only capture and `interference` the jammer-only
// (or floor-only) capture backing the audible-band SNR.
struct CellCaptures {
  std::string command_id;
  double distance_ft = 0.0;
  bool jammer_on = false;
  int repeat = 0;
  SampleBuffer capture;
  SampleBuffer reference;
  SampleBuffer interference;
};

using CaptureSink = std::function<void(const CellCaptures&)>;

std::uint64_t cell_seed(std::uint64_t master, const std::string& command_id, double distance_ft,
                        bool jammer_on, int repeat);

std::vector<analysis::Template> build_templates(const ExperimentConfig& config);

// Runs the full cross product command x distance x {off, on} x repeats.
// Records come back sorted by (command, distance, jammer, seed).
std::vector<TrialRecord> run_grid(const ExperimentConfig& config, const CaptureSink& sink = {});

std::string table_to_csv(const std::vector<TrialRecord>& records);
void emit_table(const std::vector<TrialRecord>& records, const std::string& path);

// Writes `<cmd>_<dist>ft_clean.pgm` / `<cmd>_<dist>ft_jammed.pgm` (plus the
// dB grids as CSV) for every pair present in `cells`.
void emit_spectrogram_pairs(const ExperimentConfig& config,
                            const std::vector<CellCaptures>& cells, const std::string& dir);

// Full simulate run: trials.csv, captures/, spectrograms/ and
// config_used.cfg under config.output_dir.
std::vector<TrialRecord> run_experiment(const ExperimentConfig& config);

// Rebuilds trials.csv and the spectrogram pairs from a previous run
// directory (stored captures + config_used.cfg).
void regenerate_report(const std::string& out_dir);

struct Thresholds {
  double t_ack = 0.0;
  double t_margin = 0.0;
};

// One-time calibration procedure: run the clean grid, take the worst
// DTW self-distance, and set t_ack 20% above it. Used to pin the frozen
// defaults; production runs never call this.
Thresholds calibrate_thresholds(const ExperimentConfig& config);

}  // namespace nujam::harness
