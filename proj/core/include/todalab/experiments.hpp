#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "todalab/ensembles.hpp"
#include "todalab/flow.hpp"
#include "todalab/spectral.hpp"
#include "todalab/stats.hpp"

namespace todalab {

// One experiment's configuration; accepted as key=value text plus overrides.
struct ExperimentConfig {
  std::string experiment = "halt";
  EnsembleSpec ensemble;
  double eps = 1e-14;
  std::size_t trials = 100;
  double gamma = 0.0;
  double sigma = 0.5;          // scaling-region parameter
  std::optional<double> p;     // gap-condition parameter
  std::optional<double> s;     // rigidity parameter
  std::vector<std::size_t> n_list;    // table1 grid; empty -> {50,100,200}
  std::vector<std::string> ensembles; // table1 ensembles; empty -> {GUE,GOE}
  std::string out;
  unsigned workers = 1;

  void validate() const;
};

// Manifest lines echoed at the top of every output file ('#'-prefixed) and
// sufficient to re-run it bit-exactly. Wall-clock times go to the log stream,
// never into output files, so identical seeds give identical bytes.
std::vector<std::string> manifest_lines(const ExperimentConfig& cfg);

// Maps fn over trials 0..trials-1 on `workers` threads. Each trial derives its
// own stream from (master seed, trial), so the result vector is independent of
// the scheduling.
void parallel_trials(std::size_t trials, unsigned workers, const std::function<void(std::size_t)>& fn);

// halt: one HaltingRecord per trial.
std::vector<HaltingRecord> run_halt(const ExperimentConfig& cfg);

struct Table1Row {
  std::size_t n = 0;
  double margin = 0.0;  // log(1/eps)/log N - 5/3
  std::vector<double> ratios;  // per ensemble, <T^(1)>/sigma
};

struct Table1Result {
  std::vector<std::string> ensembles;
  std::vector<Table1Row> rows;
};

Table1Result run_table1(const ExperimentConfig& cfg);

struct KhatResult {
  std::map<std::size_t, std::size_t> counts;  // k_hat -> frequency
  std::size_t trials = 0;
  std::size_t failed = 0;  // trials with no crossing inside the cap
  double t_cap = 0.0;
};

KhatResult run_khat(const ExperimentConfig& cfg);

struct GapDistResult {
  std::vector<double> statistics;  // sorted gap statistics
  std::vector<double> raw_gaps;    // matching top gaps (sorted by statistic)
  std::size_t zero_gap_trials = 0;
};

GapDistResult run_gapdist(const ExperimentConfig& cfg);

struct CompareResult {
  double ks = 0.0;
  std::size_t count_a = 0;
  std::size_t count_b = 0;
  std::optional<double> bound;
  bool pass = true;
};

CompareResult run_compare(const std::vector<double>& a, const std::vector<double>& b,
                          std::optional<double> bound);

struct PropErrorResult {
  // Quantiles (0.5, 0.9, 0.95, 0.99) of eps^-1 |lambda_N - X11(T1)| and of
  // N^{2/3+0.1} |lambda_{N-1} - X11(T1)|.
  std::vector<double> err_quantiles;
  std::vector<double> divergence_quantiles;
  double frac_err_below_tenth = 0.0;
};

PropErrorResult run_prop_error(const ExperimentConfig& cfg);

// CSV helpers shared by the CLI and the tests.
void write_halt_csv(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<HaltingRecord>& records);
void write_table1_csv(const std::string& path, const ExperimentConfig& cfg, const Table1Result& table);
void write_khat_csv(const std::string& path, const ExperimentConfig& cfg, const KhatResult& result);
void write_ecdf_csv(const std::string& path, const ExperimentConfig& cfg,
                    const std::vector<double>& sorted_values, std::size_t excluded);
void write_deflation_csv(const std::string& path, const ExperimentConfig& cfg,
                         const std::vector<DeflationResult>& results);
void write_histogram_csv(const std::string& path, const std::vector<std::string>& manifest,
                         const Histogram& h);

// Reads one named column from a CSV written by this tool ('#' comments and a
// header row); empty cells are skipped.
std::vector<double> read_csv_column(const std::string& path, const std::string& column);

// Parses key=value lines (comments with '#') into the config.
void apply_config_line(ExperimentConfig& cfg, const std::string& key, const std::string& value);
ExperimentConfig load_config_file(const std::string& path);

double quantile_of(std::vector<double> v, double q);

}  // namespace todalab
