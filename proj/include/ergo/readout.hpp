#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergo/dynamics.hpp"
#include "ergo/gates.hpp"
#include "ergo/lattice.hpp"
#include "ergo/util.hpp"

namespace ergo {

enum class InitKind { Flat, Staircase };

struct ExperimentSpec {
  Dims dims;
  int m = 0;  ///< output region spans rows 1..m
  Circuit circuit;  ///< pre-flag circuit; flags are attached by the run
  std::vector<int> input_bits;
  std::optional<double> horizon;  ///< averaging time; absent = infinite
  long long shots = 0;
  std::uint64_t seed = 0;
  InitKind init = InitKind::Flat;
  double eps = 0.1;
  int winding_modulus = 2;
  bool record_shots = false;  ///< keep per-shot records (streamed to CSV, not JSON)

  void validate() const;
};

struct ShotRecord {
  int config = 0;
  int winding = 0;
  bool front_in_region = false;
  bool accepted = false;
  bool correct = false;
  std::vector<int> output_bits;
};

/// True when every column's front row lies in rows 1..m.
bool front_in_region(const ClockConfig& cfg, int m);

/// Grades l in [0, g) whose configurations all sit inside rows 1..m.
std::vector<int> full_in_region_levels(const Lattice& lat, int m);

/// Per-column data bits of the prepared register: input x, outputs and
/// ancillas 0, flip control 1.
std::vector<int> prepared_column_bits(const Circuit& flagged, const std::vector<int>& input_bits);

/// Reduced state at winding zero over the chosen wall, together with the
/// data bits laid at the front cells.
struct InitialState {
  Eigen::VectorXcd psi;
  std::vector<int> column_bits;
  int config_index = -1;
};
InitialState initial_state(const ReducedBasis& basis, const Circuit& flagged,
                           const std::vector<int>& input_bits, InitKind init);

/// Columns reported by the readout: declared outputs plus flag columns.
std::vector<int> output_columns(const Circuit& flagged);

Eigen::VectorXd diagonal_probabilities(const Eigen::MatrixXcd& rho);

/// Draws (configuration, winding) from the diagonal of the time-averaged
/// density.
std::pair<int, int> sample_shot(const ReducedBasis& basis, const Eigen::VectorXd& probs,
                                RngStream& rng);

struct ShotOutcome {
  bool accepted = false;
  std::vector<int> output_bits;
};

/// Measures the logical register carried by a front inside the output
/// region: the data is the prepared register with the circuit applied once
/// per completed wrap. Throws when the front is outside rows 1..m.
ShotOutcome logical_readout(const Circuit& flagged, const ClockConfig& cfg, int m,
                            const std::vector<int>& input_bits, int winding, RngStream& rng);

struct ExperimentReport {
  // geometry and spectra
  int h = 0, c = 0, m = 0, winding_modulus = 2;
  int period = 0;       // N
  int wrap_bricks = 0;  // g
  int reduced_dim = 0;
  double crosscheck_gram = -1.0;  ///< -1 when the instance exceeds full-mode size
  // measured quantities
  std::vector<double> grade_dist;  // W(l)
  double delta_meas = 0.0;
  double s_eps = 0.0;
  double eps = 0.0;
  // bounds
  double front_bound = 0.0;
  double success_bound = 0.0;
  int guaranteed_levels = 0;  // h(m-2h)/2
  // samples
  long long shots = 0;
  long long n_front = 0;
  long long n_accepted = 0;
  long long n_correct = 0;
  double success_estimate = 0.0;
  double success_ci_low = 0.0;
  double success_ci_high = 0.0;
  double front_rate = 0.0;
  // provenance
  std::uint64_t seed = 0;
  std::string init;
  std::string horizon;  // "inf" or the number
  int circuit_depth = 0;
  int flagged_depth = 0;
  std::vector<int> f_bits;
  std::vector<int> out_cols;
  std::vector<int> input_bits;
  std::vector<ShotRecord> shot_records;  // only when requested

  std::string to_json() const;
  std::string shots_csv() const;
  std::string grade_csv() const;  // rows (l, W(l))
};

ExperimentReport run_experiment(const ExperimentSpec& spec);

/// Wilson 95% interval for k successes out of n.
std::pair<double, double> wilson_interval(long long k, long long n);

}  // namespace ergo
