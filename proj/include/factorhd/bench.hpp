#pragma once

// Experiment harness: samples ground-truth objects, encodes them, runs one
// of the factorization models and aggregates per-trial records.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "factorhd/factorizer.hpp"
#include "factorhd/rng.hpp"

namespace factorhd::bench {

enum class Model { factorhd, ci, resonator };
enum class CodebookMode { per_batch, per_trial, shared };

const char* to_string(Model model) noexcept;
const char* to_string(CodebookMode mode) noexcept;
Model parse_model(const std::string& name);
CodebookMode parse_codebook_mode(const std::string& name);

// Published IMC stochastic factorizer result, quoted for comparison only.
inline constexpr double kImcReferenceAccuracy = 0.9971;
inline constexpr double kImcReferenceIterations = 3312.0;
// Published FactorHD speedups over C-C models at problem sizes 1e6 and 1e9.
inline constexpr double kReferenceSpeedup1e6 = 18.5;
inline constexpr double kReferenceSpeedup1e9 = 5667.0;

struct ExperimentConfig {
  Model model = Model::factorhd;
  std::size_t dim = 1000;
  std::size_t num_classes = 3;
  std::vector<std::size_t> branching;
  std::size_t num_objects = 1;
  std::size_t trials = 1024;
  std::size_t batch_size = 512;
  ThresholdConfig threshold = ThresholdConfig::automatic();
  Seed seed{0};
  // FactorHD stores 2 bits per component, so comparisons against bipolar
  // baselines give it half the dimension.
  bool dimension_halving = false;
  CodebookMode codebook_mode = CodebookMode::per_batch;
  // Multi-object factorization (threshold + combination verification) even
  // for a single object; always on when num_objects > 1.
  bool multi = false;
  bool attach_object_hint = false;
  std::size_t max_objects = 16;
  Acceptance acceptance = Acceptance::rescan;
  std::size_t resonator_max_iterations = 200;
  // 0 = one worker per hardware thread.
  std::size_t threads = 0;

  [[nodiscard]] std::size_t effective_dim() const noexcept;
  [[nodiscard]] bool uses_multi() const noexcept { return multi || num_objects > 1; }
};

// Throws Error(unsupported_configuration / invalid_argument) on bad configs.
void validate(const ExperimentConfig& cfg);

struct TrialRecord {
  std::size_t trial_id = 0;
  bool correct = false;
  std::uint64_t similarity_measurements = 0;
  std::uint64_t combinations_tested = 0;
  double wall_time_s = 0.0;
  // Resonator sweeps, or factorizer loop iterations for multi-object runs.
  std::uint64_t iterations = 0;
  std::size_t objects_decoded = 0;
};

struct ResultTable {
  ExperimentConfig config;
  std::size_t trials = 0;
  std::size_t correct = 0;
  double accuracy = 0.0;
  double ci95 = 0.0;
  double mean_wall_time_s = 0.0;
  double median_wall_time_s = 0.0;
  double mean_similarity_measurements = 0.0;
  double mean_combinations = 0.0;
  double mean_iterations = 0.0;
  // Threshold used by the FactorHD multi-object path; 0 otherwise.
  double threshold = 0.0;
};

// 1.96 * sqrt(p (1 - p) / n).
double ci95_half_width(double p, std::size_t n);

ResultTable run_experiment(const ExperimentConfig& cfg, std::vector<TrialRecord>* records = nullptr);

struct SweepRow {
  double th = 0.0;
  ResultTable table;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  double best_th = 0.0;        // argmax accuracy, lowest th on ties
  double best_accuracy = 0.0;
  double predicted_th = 0.0;   // auto_threshold at the config's N, F, D, M
};

// Same seeds for every th, so rows differ only by the threshold.
SweepResult sweep_threshold(const ExperimentConfig& cfg, const std::vector<double>& th_values);

struct ScalingRow {
  std::size_t m = 0;
  ResultTable table;
  double cost = 0.0;  // mean similarity measurements per trial
};

struct ScalingResult {
  std::vector<ScalingRow> rows;
  double slope = 0.0;  // least-squares slope of log(cost) against log(M)
};

// Rep-1 runs over several codebook sizes; base_cfg.branching is replaced by {M}.
ScalingResult scaling_study(const ExperimentConfig& base_cfg, const std::vector<std::size_t>& m_values);

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Output. CSV and JSONL both open with a "# config" provenance line.
std::string config_json(const ExperimentConfig& cfg);
void write_csv(std::ostream& out, const std::vector<ResultTable>& rows);
void write_trials_jsonl(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<TrialRecord>& records);
void write_sweep_csv(std::ostream& out, const SweepResult& sweep);
void write_scaling_csv(std::ostream& out, const ScalingResult& scaling);

}  // namespace factorhd::bench
