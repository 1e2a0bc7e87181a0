#include "ergo/gates.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ergo {

GateCode code_from_string(const std::string& s) {
  if (s.size() != 2 || (s[0] != '0' && s[0] != '1') || (s[1] != '0' && s[1] != '1'))
    throw std::invalid_argument("gate code must be two bits, got '" + s + "'");
  return GateCode{static_cast<std::uint8_t>((s[0] - '0') * 2 + (s[1] - '0'))};
}

std::string code_to_string(GateCode c) {
  return std::string(1, '0' + ((c.bits >> 1) & 1)) + std::string(1, '0' + (c.bits & 1));
}

Eigen::Matrix4cd gate_matrix(GateCode code) {
  const double s = 1.0 / std::sqrt(2.0);
  Eigen::Matrix4cd u = Eigen::Matrix4cd::Zero();
  switch (code.bits) {
    case 0:
      u.setIdentity();
      break;
    case 1:
      // identity (x) H
      u << s, s, 0, 0,
           s, -s, 0, 0,
           0, 0, s, s,
           0, 0, s, -s;
      break;
    case 2:
      // H (x) identity
      u << s, 0, s, 0,
           0, s, 0, s,
           s, 0, -s, 0,
           0, s, 0, -s;
      break;
    case 3:
      // controlled-S: phase i on |11>
      u.setIdentity();
      u(3, 3) = cd(0.0, 1.0);
      break;
    default:
      throw std::invalid_argument("gate code out of range");
  }
  return u;
}

Matrix16cd vertex_gate(GateCode code) {
  // local qubits b0..b3 = (j,k),(j,k+1),(j+1,k),(j+1,k+1); b0 is the high bit
  Eigen::Matrix4cd u = gate_matrix(code);
  Matrix16cd v = Matrix16cd::Zero();
  for (int in = 0; in < 16; ++in) {
    int b0 = (in >> 3) & 1, b1 = (in >> 2) & 1, b2 = (in >> 1) & 1, b3 = in & 1;
    int pair_in = (b0 << 1) | b1;
    for (int pair_out = 0; pair_out < 4; ++pair_out) {
      cd amp = u(pair_out, pair_in);
      if (amp == cd(0.0, 0.0)) continue;
      int n0 = (pair_out >> 1) & 1, n1 = pair_out & 1;
      // swap rows j and j+1 in both columns
      int out = (b2 << 3) | (b3 << 2) | (n0 << 1) | n1;
      v(out, in) += amp;
    }
  }
  return v;
}

void Circuit::validate() const {
  if (qubits < 2 || qubits % 2 != 0) throw std::invalid_argument("circuit: qubits must be even and >= 2");
  if (n_in < 0 || n_out < 0 || n_in + n_out > qubits)
    throw std::invalid_argument("circuit: register widths exceed qubit count");
  for (int t = 0; t < depth(); ++t) {
    for (const auto& [k, code] : layers[t]) {
      if (k < 0 || k + 1 >= qubits) throw std::invalid_argument("circuit: gate pair out of range");
      if (k % 2 != t % 2)
        throw std::invalid_argument("circuit: layer " + std::to_string(t) + " holds a gate on pair " +
                                    std::to_string(k) + " of the wrong parity");
      if (code.bits > 3) throw std::invalid_argument("circuit: bad gate code");
    }
  }
  for (int f : flag_cols)
    if (f < 0 || f >= qubits) throw std::invalid_argument("circuit: flag column out of range");
  if (ctrl_col >= qubits) throw std::invalid_argument("circuit: control column out of range");
}

Circuit parse_circuit(std::istream& in) {
  Circuit c;
  std::string line;
  bool have_header = false;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tok;
    if (!(ls >> tok)) continue;  // blank line
    if (tok == "#") continue;
    if (tok == "qubits") {
      std::string kw_in, kw_out;
      if (!(ls >> c.qubits >> kw_in >> c.n_in >> kw_out >> c.n_out) || kw_in != "in" || kw_out != "out")
        throw std::invalid_argument("circuit file line " + std::to_string(lineno) +
                                    ": expected 'qubits <h> in <n_in> out <n_out>'");
      have_header = true;
    } else if (tok == "layer") {
      int t, k;
      std::string kw_pair, kw_code, code;
      if (!(ls >> t >> kw_pair >> k >> kw_code >> code) || kw_pair != "pair" || kw_code != "code")
        throw std::invalid_argument("circuit file line " + std::to_string(lineno) +
                                    ": expected 'layer <t> pair <k> code <lm>'");
      if (t < 0) throw std::invalid_argument("circuit file: negative layer index");
      if (static_cast<int>(c.layers.size()) <= t) c.layers.resize(t + 1);
      c.layers[t][k] = code_from_string(code);
    } else {
      throw std::invalid_argument("circuit file line " + std::to_string(lineno) + ": unknown directive '" +
                                  tok + "'");
    }
  }
  if (!have_header) throw std::invalid_argument("circuit file: missing 'qubits' header");
  c.validate();
  return c;
}

Circuit parse_circuit_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open circuit file: " + path);
  return parse_circuit(in);
}

std::string circuit_text(const Circuit& c) {
  std::ostringstream os;
  os << "qubits " << c.qubits << " in " << c.n_in << " out " << c.n_out << "\n";
  for (int t = 0; t < c.depth(); ++t)
    for (const auto& [k, code] : c.layers[t])
      os << "layer " << t << " pair " << k << " code " << code_to_string(code) << "\n";
  return os.str();
}

Eigen::VectorXcd prepared_register(const Circuit& c, const std::vector<int>& input_bits) {
  if (static_cast<int>(input_bits.size()) != c.n_in)
    throw std::invalid_argument("prepared_register: input width mismatch");
  long long idx = 0;
  for (int k = 0; k < c.n_in; ++k)
    if (input_bits[k]) idx |= 1LL << k;
  if (c.ctrl_col >= 0) idx |= 1LL << c.ctrl_col;
  Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(1LL << c.qubits);
  psi(idx) = 1.0;
  return psi;
}

Eigen::VectorXcd apply_circuit(const Circuit& c, const Eigen::VectorXcd& state) {
  c.validate();
  if (c.qubits > 20) throw std::invalid_argument("apply_circuit: register too wide");
  if (state.size() != (1LL << c.qubits)) throw std::invalid_argument("apply_circuit: state width mismatch");
  Eigen::VectorXcd psi = state;
  for (const auto& layer : c.layers) {
    for (const auto& [k, code] : layer) {
      if (code.is_identity()) continue;
      Eigen::Matrix4cd u = gate_matrix(code);
      Eigen::VectorXcd next = Eigen::VectorXcd::Zero(psi.size());
      for (long long idx = 0; idx < psi.size(); ++idx) {
        cd amp = psi(idx);
        if (amp == cd(0.0, 0.0)) continue;
        int b0 = (idx >> k) & 1, b1 = (idx >> (k + 1)) & 1;
        int in = (b0 << 1) | b1;
        long long base = idx & ~((1LL << k) | (1LL << (k + 1)));
        for (int out = 0; out < 4; ++out) {
          cd g = u(out, in);
          if (g == cd(0.0, 0.0)) continue;
          long long tgt = base | (static_cast<long long>((out >> 1) & 1) << k) |
                          (static_cast<long long>(out & 1) << (k + 1));
          next(tgt) += g * amp;
        }
      }
      psi = std::move(next);
    }
  }
  return psi;
}

namespace {

bool layer_empty(const std::map<int, GateCode>& layer) {
  for (const auto& [k, code] : layer)
    if (!code.is_identity()) return false;
  return true;
}

// appends one gate as its own layer, padding with an empty layer when the
// pair parity does not match the next layer index
void push_gate(std::vector<std::map<int, GateCode>>& layers, int k, GateCode code) {
  int t = static_cast<int>(layers.size());
  if (t % 2 != k % 2) {
    layers.emplace_back();
    ++t;
  }
  layers.emplace_back();
  layers.back()[k] = code;
}

void push_flip_gadget(std::vector<std::map<int, GateCode>>& layers, int pair_k, bool flag_is_second) {
  GateCode had{static_cast<std::uint8_t>(flag_is_second ? 1 : 2)};
  GateCode cs{3};
  push_gate(layers, pair_k, had);
  push_gate(layers, pair_k, cs);
  push_gate(layers, pair_k, cs);
  push_gate(layers, pair_k, had);
}

}  // namespace

Circuit attach_flags(const Circuit& c) {
  c.validate();
  if (c.has_flags()) throw std::invalid_argument("attach_flags: circuit already carries flags");
  const int h = c.qubits;

  Circuit out;
  out.qubits = h;
  out.n_in = c.n_in;
  out.n_out = c.n_out;

  // trim all-identity layers at both ends; they carry no gates and would
  // only push the gadget out of the available rows
  int lo = 0, hi = c.depth();
  while (lo < hi && layer_empty(c.layers[lo])) ++lo;
  while (hi > lo && layer_empty(c.layers[hi - 1])) --hi;

  if (h == 2) {
    // two columns leave room for the control and a single flag; the lone
    // flip still forces a nonzero output
    if (hi != lo) throw std::invalid_argument("attach_flags: no spare columns for a two-qubit circuit");
    out.ctrl_col = 0;
    out.flag_cols = {1};
    if (c.n_in != 0) throw std::invalid_argument("attach_flags: both columns are reserved at width 2");
    push_flip_gadget(out.layers, 0, /*flag_is_second=*/true);
    out.validate();
    return out;
  }

  // reserved columns: flagA, ctrl, flagB at the top of the register
  const int flag_a = h - 3, ctrl = h - 2, flag_b = h - 1;
  for (int t = lo; t < hi; ++t) {
    for (const auto& [k, code] : c.layers[t]) {
      if (code.is_identity()) continue;
      if (k == ctrl || k + 1 == ctrl || k + 1 == flag_b || k == flag_b)
        throw std::invalid_argument("attach_flags: circuit touches a reserved column");
    }
  }
  if (c.n_in > flag_a) throw std::invalid_argument("attach_flags: no spare columns left of the input register");

  out.ctrl_col = ctrl;
  out.flag_cols = {flag_a, flag_b};

  // flip flagA first, run the circuit, flip flagB last
  push_flip_gadget(out.layers, flag_a, /*flag_is_second=*/false);
  int shift = static_cast<int>(out.layers.size());
  if (shift % 2 != 0) {
    out.layers.emplace_back();
    ++shift;
  }
  for (int t = lo; t < hi; ++t) {
    out.layers.emplace_back(c.layers[t]);
  }
  push_flip_gadget(out.layers, ctrl, /*flag_is_second=*/true);
  out.validate();
  return out;
}

Program::Program(Dims dims) : dims_(dims) { dims_.validate(); }

bool Program::vertex_exists(const Dims& d, int j, int k) {
  return j >= 0 && j < d.c && k >= 0 && k + 1 < d.h && (j % 2) == (k % 2);
}

GateCode Program::code(int j, int k) const {
  auto it = assigned_.find({j, k});
  return it == assigned_.end() ? GateCode{0} : it->second;
}

void Program::set_code(int j, int k, GateCode code) {
  if (!vertex_exists(dims_, j, k))
    throw std::invalid_argument("program: no vertex at row " + std::to_string(j) + ", pair " +
                                std::to_string(k));
  if (code.is_identity())
    assigned_.erase({j, k});
  else
    assigned_[{j, k}] = code;
}

std::string Program::to_csv() const {
  std::ostringstream os;
  os << "j,k,code\n";
  for (const auto& [jk, code] : assigned_) os << jk.first << ',' << jk.second << ',' << code_to_string(code) << '\n';
  return os.str();
}

Program place_on_rows(const Circuit& c, const Dims& d, int base_row) {
  c.validate();
  d.validate();
  if (c.qubits != d.h) throw std::invalid_argument("place_on_rows: circuit width differs from column count");
  if (base_row % 2 != 0) ++base_row;  // layer 0 is even-parity
  if (base_row + c.depth() > d.c)
    throw std::invalid_argument("place_on_rows: depth overflow, circuit needs rows beyond the cylinder");
  Program p(d);
  for (int t = 0; t < c.depth(); ++t)
    for (const auto& [k, code] : c.layers[t]) {
      if (code.is_identity()) continue;
      p.set_code(base_row + t, k, code);
    }
  return p;
}

int band_base_row(int m) { return (m + 1) % 2 == 0 ? m + 1 : m + 2; }

Program compile(const Circuit& c, const Dims& d, int m) {
  d.validate();
  if (m <= 2 * d.h) throw std::invalid_argument("compile: output region must extend past row 2h");
  int base = band_base_row(m);
  if (base + c.depth() > d.c) throw std::invalid_argument("compile: depth overflow, circuit does not fit above the output region");
  return place_on_rows(c, d, base);
}

Circuit decompile(const Program& p, int m, int depth, int n_in, int n_out) {
  Circuit c;
  c.qubits = p.dims().h;
  c.n_in = n_in;
  c.n_out = n_out;
  c.layers.resize(depth);
  int base = band_base_row(m);
  for (const auto& [jk, code] : p.assigned()) {
    int t = jk.first - base;
    if (t < 0 || t >= depth)
      throw std::invalid_argument("decompile: program carries a gate outside the band");
    c.layers[t][jk.second] = code;
  }
  c.validate();
  return c;
}

}  // namespace ergo
