#include "ergo/readout.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergo {

void ExperimentSpec::validate() const {
  dims.validate();
  circuit.validate();
  if (circuit.qubits != dims.h) throw std::invalid_argument("experiment: circuit width differs from h");
  if (m <= 2 * dims.h) throw std::invalid_argument("experiment: output region must extend past row 2h");
  if (m >= dims.c) throw std::invalid_argument("experiment: output region exceeds the cylinder");
  if (shots < 1) throw std::invalid_argument("experiment: shots must be >= 1");
  if (static_cast<int>(input_bits.size()) != circuit.n_in)
    throw std::invalid_argument("experiment: input width differs from n_in");
  if (horizon && *horizon <= 0.0) throw std::invalid_argument("experiment: horizon must be positive");
  if (eps < 0.0) throw std::invalid_argument("experiment: eps must be nonnegative");
  if (winding_modulus < 1) throw std::invalid_argument("experiment: winding modulus must be >= 1");
}

bool front_in_region(const ClockConfig& cfg, int m) {
  for (int j : cfg.front)
    if (j < 1 || j > m) return false;
  return true;
}

std::vector<int> full_in_region_levels(const Lattice& lat, int m) {
  std::vector<char> all_in(lat.g(), 1);
  for (int i = 0; i < lat.size(); ++i)
    if (!front_in_region(lat.config(i), m)) all_in[lat.brick_count(i)] = 0;
  std::vector<int> out;
  for (int l = 0; l < lat.g(); ++l)
    if (all_in[l]) out.push_back(l);
  return out;
}

std::vector<int> prepared_column_bits(const Circuit& flagged, const std::vector<int>& input_bits) {
  if (static_cast<int>(input_bits.size()) != flagged.n_in)
    throw std::invalid_argument("prepared_column_bits: input width differs from n_in");
  std::vector<int> bits(flagged.qubits, 0);
  for (int k = 0; k < flagged.n_in; ++k) bits[k] = input_bits[k] ? 1 : 0;
  if (flagged.ctrl_col >= 0) bits[flagged.ctrl_col] = 1;
  return bits;
}

InitialState initial_state(const ReducedBasis& basis, const Circuit& flagged,
                           const std::vector<int>& input_bits, InitKind init) {
  InitialState out;
  out.column_bits = prepared_column_bits(flagged, input_bits);
  const Lattice& lat = *basis.lattice;
  out.config_index = init == InitKind::Flat ? lat.flat_index() : lat.staircase_index();
  out.psi = Eigen::VectorXcd::Zero(basis.dim());
  out.psi(basis.index(out.config_index, 0)) = 1.0;
  return out;
}

std::vector<int> output_columns(const Circuit& flagged) {
  std::vector<int> cols;
  for (int k = flagged.n_in; k < flagged.n_in + flagged.n_out; ++k) cols.push_back(k);
  for (int f : flagged.flag_cols)
    if (std::find(cols.begin(), cols.end(), f) == cols.end()) cols.push_back(f);
  std::sort(cols.begin(), cols.end());
  return cols;
}

Eigen::VectorXd diagonal_probabilities(const Eigen::MatrixXcd& rho) {
  Eigen::VectorXd p(rho.rows());
  for (int i = 0; i < rho.rows(); ++i) p(i) = std::max(0.0, rho(i, i).real());
  double sum = p.sum();
  if (std::abs(sum - 1.0) > 1e-9) throw std::runtime_error("diagonal_probabilities: trace deviates from 1");
  return p;
}

std::pair<int, int> sample_shot(const ReducedBasis& basis, const Eigen::VectorXd& probs,
                                RngStream& rng) {
  if (probs.size() != basis.dim()) throw std::invalid_argument("sample_shot: dimension mismatch");
  double u = rng.uniform();
  double acc = 0.0;
  int chosen = probs.size() - 1;
  for (int b = 0; b < probs.size(); ++b) {
    acc += probs(b);
    if (u < acc) {
      chosen = b;
      break;
    }
  }
  return {basis.config_of(chosen), basis.winding_of(chosen)};
}

namespace {

std::vector<int> measure_columns(const Eigen::VectorXcd& state, const std::vector<int>& cols,
                                 RngStream& rng) {
  // sample a basis outcome, then restrict to the requested columns
  double u = rng.uniform();
  double acc = 0.0;
  long long chosen = state.size() - 1;
  for (long long i = 0; i < state.size(); ++i) {
    acc += std::norm(state(i));
    if (u < acc) {
      chosen = i;
      break;
    }
  }
  std::vector<int> bits;
  bits.reserve(cols.size());
  for (int c : cols) bits.push_back(static_cast<int>((chosen >> c) & 1));
  return bits;
}

}  // namespace

ShotOutcome logical_readout(const Circuit& flagged, const ClockConfig& cfg, int m,
                            const std::vector<int>& input_bits, int winding, RngStream& rng) {
  if (!front_in_region(cfg, m))
    throw std::invalid_argument("logical_readout: front is not inside the output region");
  Eigen::VectorXcd state = prepared_register(flagged, input_bits);
  // the circuit is an involution on the prepared orbit, so only the parity
  // of the completed wraps matters
  if (winding % 2 == 1) state = apply_circuit(flagged, state);
  std::vector<int> cols = output_columns(flagged);
  ShotOutcome out;
  out.output_bits = measure_columns(state, cols, rng);
  int accept_col = flagged.flag_cols.empty() ? -1 : flagged.flag_cols.back();
  out.accepted = false;
  for (std::size_t i = 0; i < cols.size(); ++i)
    if (cols[i] == accept_col) out.accepted = out.output_bits[i] == 1;
  return out;
}

std::pair<double, double> wilson_interval(long long k, long long n) {
  if (n <= 0) return {0.0, 0.0};
  const double z = 1.959963984540054;
  double p = static_cast<double>(k) / n;
  double z2n = z * z / n;
  double denom = 1.0 + z2n;
  double center = (p + z2n / 2.0) / denom;
  double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / denom;
  return {std::max(0.0, center - half), std::min(1.0, center + half)};
}

namespace {

template <typename Fn>
auto stage(const char* name, Fn&& fn) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw std::runtime_error(std::string("stage ") + name + ": " + e.what());
  }
}

}  // namespace

ExperimentReport run_experiment(const ExperimentSpec& spec) {
  stage("spec", [&] { spec.validate(); return 0; });

  Circuit flagged = stage("flags", [&] { return attach_flags(spec.circuit); });
  Program program = stage("compile", [&] { return compile(flagged, spec.dims, spec.m); });

  ReducedBasis basis = stage("reduce", [&] { return make_reduced_basis(spec.dims, spec.winding_modulus); });
  const Lattice& lat = *basis.lattice;
  SparseMatrixXcd f = build_reduced_f(basis);

  InitialState init = initial_state(basis, flagged, spec.input_bits, spec.init);
  const std::vector<int>& col_bits = init.column_bits;
  int init_cfg = init.config_index;

  double crosscheck_dev = -1.0;
  if (spec.dims.c * spec.dims.h <= FullSimulator::kMaxDataQubits) {
    crosscheck_dev = stage("crosscheck", [&] {
      return crosscheck_reduced(basis, program, init_cfg, col_bits, 2 * basis.period()).gram_deviation;
    });
    if (crosscheck_dev > 1e-10)
      throw std::runtime_error("stage crosscheck: reduced model deviates from the full simulation");
  }

  SpectralData sd = stage("spectral", [&] { return spectral(f); });

  const Eigen::VectorXcd& psi0 = init.psi;

  Eigen::MatrixXcd rho = stage("average", [&] { return time_average(sd, psi0, spec.horizon); });
  Eigen::VectorXd w = grade_distribution(basis, rho);

  const int period = basis.period();
  double delta = 0.0;
  for (int l = 0; l < period; ++l) delta += std::abs(w(l) - 1.0 / period);
  delta *= 0.5;

  double s_eps = stage("mass", [&] { return spectral_mass(f_spectrum(f), psi0, spec.eps); });

  // the circuit must act as an involution on the prepared orbit for the
  // winding-parity readout to be exact
  stage("involution", [&] {
    Eigen::VectorXcd prep = prepared_register(flagged, spec.input_bits);
    Eigen::VectorXcd twice = apply_circuit(flagged, apply_circuit(flagged, prep));
    if ((twice - prep).norm() > 1e-9)
      throw std::runtime_error("flagged circuit does not square to the identity on the prepared state");
    return 0;
  });

  // classical value of the computed function: the post-circuit register must
  // be a basis state on the output columns
  std::vector<int> cols = output_columns(flagged);
  std::vector<int> f_bits = stage("oracle", [&] {
    Eigen::VectorXcd post = apply_circuit(flagged, prepared_register(flagged, spec.input_bits));
    long long best = 0;
    double best_p = 0.0;
    for (long long i = 0; i < post.size(); ++i) {
      double p = std::norm(post(i));
      if (p > best_p) {
        best_p = p;
        best = i;
      }
    }
    if (best_p < 1.0 - 1e-9)
      throw std::runtime_error("circuit does not compute a deterministic function of the input");
    std::vector<int> bits;
    for (int c : cols) bits.push_back(static_cast<int>((best >> c) & 1));
    return bits;
  });

  Eigen::VectorXd probs = diagonal_probabilities(rho);
  long long n_front = 0, n_accept = 0, n_correct = 0;
  std::vector<ShotRecord> records(spec.shots);
  parallel_chunks(static_cast<std::size_t>(spec.shots), [&](std::size_t b, std::size_t e) {
    for (std::size_t s = b; s < e; ++s) {
      RngStream rng(spec.seed, s);
      ShotRecord& rec = records[s];
      auto [cfg, winding] = sample_shot(basis, probs, rng);
      rec.config = cfg;
      rec.winding = winding;
      if (!front_in_region(lat.config(cfg), spec.m)) continue;
      rec.front_in_region = true;
      ShotOutcome shot = logical_readout(flagged, lat.config(cfg), spec.m, spec.input_bits, winding, rng);
      rec.output_bits = std::move(shot.output_bits);
      if (!shot.accepted) continue;
      rec.accepted = true;
      rec.correct = rec.output_bits == f_bits;
    }
  });
  for (const auto& rec : records) {
    n_front += rec.front_in_region ? 1 : 0;
    n_accept += rec.accepted ? 1 : 0;
    n_correct += rec.correct ? 1 : 0;
  }

  ExperimentReport rep;
  rep.h = spec.dims.h;
  rep.c = spec.dims.c;
  rep.m = spec.m;
  rep.winding_modulus = spec.winding_modulus;
  rep.period = period;
  rep.wrap_bricks = lat.g();
  rep.reduced_dim = basis.dim();
  rep.crosscheck_gram = crosscheck_dev;
  rep.grade_dist.assign(w.data(), w.data() + w.size());
  rep.delta_meas = delta;
  rep.s_eps = s_eps;
  rep.eps = spec.eps;
  rep.guaranteed_levels = spec.dims.h * (spec.m - 2 * spec.dims.h) / 2;
  rep.front_bound = 2.0 * rep.guaranteed_levels * (1.0 / period - 2.0 * delta) * s_eps;
  rep.success_bound = rep.guaranteed_levels * (1.0 / period - 2.0 * delta) * s_eps;
  rep.shots = spec.shots;
  rep.n_front = n_front;
  rep.n_accepted = n_accept;
  rep.n_correct = n_correct;
  rep.success_estimate = static_cast<double>(n_correct) / spec.shots;
  auto ci = wilson_interval(n_correct, spec.shots);
  rep.success_ci_low = ci.first;
  rep.success_ci_high = ci.second;
  rep.front_rate = static_cast<double>(n_front) / spec.shots;
  rep.seed = spec.seed;
  rep.init = spec.init == InitKind::Flat ? "flat" : "staircase";
  rep.horizon = spec.horizon ? format_double(*spec.horizon) : "inf";
  rep.f_bits = f_bits;
  rep.out_cols = cols;
  rep.input_bits = spec.input_bits;
  rep.circuit_depth = spec.circuit.depth();
  rep.flagged_depth = flagged.depth();
  if (spec.record_shots) rep.shot_records = std::move(records);
  return rep;
}

std::string ExperimentReport::grade_csv() const {
  std::string out = "l,W\n";
  for (std::size_t l = 0; l < grade_dist.size(); ++l)
    out += std::to_string(l) + "," + format_double(grade_dist[l]) + "\n";
  return out;
}

std::string ExperimentReport::shots_csv() const {
  std::string out = "shot,config,winding,front_in_region,accepted,correct,output_bits\n";
  for (std::size_t s = 0; s < shot_records.size(); ++s) {
    const ShotRecord& r = shot_records[s];
    out += std::to_string(s) + ',' + std::to_string(r.config) + ',' + std::to_string(r.winding) + ',' +
           (r.front_in_region ? '1' : '0') + ',';
    out += (r.accepted ? '1' : '0');
    out += ',';
    out += (r.correct ? '1' : '0');
    out += ',';
    for (int b : r.output_bits) out += static_cast<char>('0' + b);
    out += '\n';
  }
  return out;
}

std::string ExperimentReport::to_json() const {
  JsonWriter jw;
  jw.begin_object();
  jw.begin_object("spec");
  jw.field("h", h)
      .field("c", c)
      .field("m", m)
      .field("winding_modulus", winding_modulus)
      .field("horizon", horizon)
      .field("shots", static_cast<long long>(shots))
      .field("seed", static_cast<long long>(seed))
      .field("init", init)
      .field("eps", eps)
      .field("circuit_depth", circuit_depth)
      .field("flagged_depth", flagged_depth);
  jw.begin_array("input_bits");
  for (int b : input_bits) jw.element(static_cast<long long>(b));
  jw.end_array();
  jw.end_object();
  jw.field("period", period).field("wrap_bricks", wrap_bricks).field("reduced_dim", reduced_dim);
  jw.field("crosscheck_gram", crosscheck_gram);
  jw.field("delta_meas", delta_meas).field("s_eps", s_eps);
  jw.field("guaranteed_levels", guaranteed_levels);
  jw.field("front_bound", front_bound).field("success_bound", success_bound);
  jw.begin_object("counts");
  jw.field("front_in_region", static_cast<long long>(n_front))
      .field("accepted", static_cast<long long>(n_accepted))
      .field("correct", static_cast<long long>(n_correct));
  jw.end_object();
  jw.field("success_estimate", success_estimate);
  jw.begin_array("success_ci95");
  jw.element(success_ci_low).element(success_ci_high);
  jw.end_array();
  jw.field("front_rate", front_rate);
  jw.begin_array("f_bits");
  for (int b : f_bits) jw.element(static_cast<long long>(b));
  jw.end_array();
  jw.begin_array("output_columns");
  for (int c2 : out_cols) jw.element(static_cast<long long>(c2));
  jw.end_array();
  jw.begin_array("grade_distribution");
  for (double x : grade_dist) jw.element(x);
  jw.end_array();
  jw.end_object();
  std::string s = jw.str();
  s += "\n";
  return s;
}

}  // namespace ergo
