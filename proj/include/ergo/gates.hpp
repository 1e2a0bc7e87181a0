#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "ergo/lattice.hpp"
#include "ergo/util.hpp"

namespace ergo {

/// Two-bit gate selector lm: 00 identity, 01 Hadamard on the second qubit,
/// 10 Hadamard on the first, 11 controlled square root of Z.
struct GateCode {
  std::uint8_t bits = 0;

  bool operator==(const GateCode&) const = default;
  bool is_identity() const { return bits == 0; }
};

GateCode code_from_string(const std::string& s);
std::string code_to_string(GateCode c);

/// The two-qubit gate selected by `code`, on basis |b0 b1> with the first
/// pair qubit as the high bit.
Eigen::Matrix4cd gate_matrix(GateCode code);

using Matrix16cd = Eigen::Matrix<cd, 16, 16>;

/// Programmed brick action on the four data qubits
/// [(j,k),(j,k+1),(j+1,k),(j+1,k+1)]: the selected two-qubit gate on the
/// row-j pair followed by the swap of each column's pair of rows.
Matrix16cd vertex_gate(GateCode code);

/// Layered circuit: even layers hold gates on pairs (k,k+1) with even k,
/// odd layers with odd k. Unassigned pairs act as the identity.
struct Circuit {
  int qubits = 0;
  int n_in = 0;
  int n_out = 0;
  std::vector<std::map<int, GateCode>> layers;

  // flip bookkeeping, set by attach_flags
  int ctrl_col = -1;               ///< column prepared in |1>, never gated as target
  std::vector<int> flag_cols;      ///< output bits forced to 1 by the flips

  int depth() const { return static_cast<int>(layers.size()); }
  bool has_flags() const { return !flag_cols.empty(); }
  void validate() const;
};

Circuit parse_circuit(std::istream& in);
Circuit parse_circuit_file(const std::string& path);
std::string circuit_text(const Circuit& c);

/// Basis register |x, y=0...0, ancilla=0...0> with the flip-control column
/// (when present) prepared in |1>.
Eigen::VectorXcd prepared_register(const Circuit& c, const std::vector<int>& input_bits);

Eigen::VectorXcd apply_circuit(const Circuit& c, const Eigen::VectorXcd& state);

/// Prepends and appends controlled bit-flip gadgets (H, two controlled-phase
/// gates, H against an always-|1> control column) on designated flag
/// outputs. For qubits == 2 a single flip fits; wider circuits get one flip
/// at the start and one at the end. The incoming circuit must leave the
/// reserved columns alone and leading/trailing all-identity layers are
/// dropped before flagging.
Circuit attach_flags(const Circuit& c);

/// Gate codes at lattice vertices (j,k), defined where j and k share parity.
class Program {
 public:
  Program(Dims dims);

  const Dims& dims() const { return dims_; }
  GateCode code(int j, int k) const;
  void set_code(int j, int k, GateCode code);
  static bool vertex_exists(const Dims& d, int j, int k);
  const std::map<std::pair<int, int>, GateCode>& assigned() const { return assigned_; }

  std::string to_csv() const;

 private:
  Dims dims_;
  std::map<std::pair<int, int>, GateCode> assigned_;
};

/// Places circuit layers on consecutive rows starting at `base_row`
/// (shifted up one row when needed so layer parity matches row parity).
Program place_on_rows(const Circuit& c, const Dims& d, int base_row);

/// Output-region form: rows 1..m stay identity, the circuit occupies the
/// band above. Requires m > 2h and the band to fit below row c.
Program compile(const Circuit& c, const Dims& d, int m);

/// Reads the band back; inverse of compile for the same geometry.
Circuit decompile(const Program& p, int m, int depth, int n_in, int n_out);

/// First row of the compiled band for output-region extent m.
int band_base_row(int m);

}  // namespace ergo
