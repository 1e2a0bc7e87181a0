#include "ergo/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ergo {

ReducedBasis make_reduced_basis(Dims dims, int winding_modulus) {
  dims.validate();
  if (winding_modulus < 1) throw std::invalid_argument("winding modulus must be >= 1");
  return ReducedBasis{std::make_shared<Lattice>(dims), winding_modulus};
}

SparseMatrixXcd build_reduced_f(const ReducedBasis& basis) {
  const Lattice& lat = *basis.lattice;
  const int M = basis.winding_modulus;
  const int g = lat.g();
  std::vector<Eigen::Triplet<cd>> trips;
  for (int i = 0; i < lat.size(); ++i) {
    bool wraps = lat.brick_count(i) == g - 1;
    for (const auto& e : lat.forward_edges(i)) {
      for (int w = 0; w < M; ++w) {
        int w2 = wraps ? (w + 1) % M : w;
        trips.emplace_back(basis.index(e.target, w2), basis.index(i, w), cd(e.move.weight(), 0.0));
      }
    }
  }
  SparseMatrixXcd f(basis.dim(), basis.dim());
  f.setFromTriplets(trips.begin(), trips.end());
  return f;
}

double normality_defect(const SparseMatrixXcd& f) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd(f);
  Eigen::MatrixXcd d = a.adjoint() * a - a * a.adjoint();
  return d.cwiseAbs().maxCoeff();
}

BlockStructure block_structure(const ReducedBasis& basis, const SparseMatrixXcd& f) {
  const int n = basis.dim();
  const int period = basis.period();
  std::vector<std::vector<int>> classes(period);
  for (int b = 0; b < n; ++b) classes[basis.grade(b)].push_back(b);

  Eigen::MatrixXcd a = Eigen::MatrixXcd(f);
  BlockStructure out;
  for (int col = 0; col < n; ++col) {
    int lc = basis.grade(col);
    for (int row = 0; row < n; ++row) {
      if (basis.grade(row) != (lc + 1) % period)
        out.off_block_max = std::max(out.off_block_max, std::abs(a(row, col)));
    }
  }
  auto block = [&](int l) {
    const auto& rows = classes[(l + 1) % period];
    const auto& cols = classes[l];
    Eigen::MatrixXcd b(rows.size(), cols.size());
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) b(r, c) = a(rows[r], cols[c]);
    return b;
  };
  for (int l = 0; l < period; ++l) {
    Eigen::MatrixXcd al = block(l);
    Eigen::MatrixXcd aln = block((l + 1) % period);
    Eigen::MatrixXcd diff = aln.adjoint() * aln - al * al.adjoint();
    if (diff.size() > 0) out.compare_max = std::max(out.compare_max, diff.cwiseAbs().maxCoeff());
  }
  return out;
}

SpectralData spectral(const SparseMatrixXcd& f) {
  Eigen::MatrixXcd h = Eigen::MatrixXcd(f);
  h += Eigen::MatrixXcd(f).adjoint().eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
  if (solver.info() != Eigen::Success) throw std::runtime_error("spectral: eigendecomposition failed");
  return SpectralData{solver.eigenvalues(), solver.eigenvectors()};
}

Eigen::VectorXcd evolve(const SpectralData& sd, const Eigen::VectorXcd& psi0, double t) {
  if (psi0.size() != sd.eigenvectors.rows()) throw std::invalid_argument("evolve: dimension mismatch");
  Eigen::VectorXcd coeffs = sd.eigenvectors.adjoint() * psi0;
  for (int i = 0; i < coeffs.size(); ++i)
    coeffs(i) *= std::exp(cd(0.0, -sd.eigenvalues(i) * t));
  return sd.eigenvectors * coeffs;
}

Eigen::MatrixXcd time_average(const SpectralData& sd, const Eigen::VectorXcd& psi0,
                              std::optional<double> T) {
  if (psi0.size() != sd.eigenvectors.rows()) throw std::invalid_argument("time_average: dimension mismatch");
  if (T && *T <= 0.0) throw std::invalid_argument("time_average: horizon must be positive");
  Eigen::VectorXcd coeffs = sd.eigenvectors.adjoint() * psi0;
  const int n = coeffs.size();
  Eigen::MatrixXcd rho = coeffs * coeffs.adjoint();
  const double scale = sd.eigenvalues.size() ? sd.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  const double degeneracy_tol = 1e-9 * (1.0 + scale);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double gap = sd.eigenvalues(i) - sd.eigenvalues(j);
      if (T) {
        if (std::abs(gap * *T) < 1e-12) continue;  // kernel value 1
        cd ix(0.0, gap * *T);
        rho(i, j) *= (1.0 - std::exp(-ix)) / ix;
      } else if (std::abs(gap) > degeneracy_tol) {
        rho(i, j) = 0.0;
      }
    }
  }
  return sd.eigenvectors * rho * sd.eigenvectors.adjoint();
}

Eigen::VectorXd grade_distribution(const ReducedBasis& basis, const Eigen::MatrixXcd& rho) {
  if (rho.rows() != basis.dim() || rho.cols() != basis.dim())
    throw std::invalid_argument("grade_distribution: dimension mismatch");
  Eigen::VectorXd w = Eigen::VectorXd::Zero(basis.period());
  for (int b = 0; b < basis.dim(); ++b) w(basis.grade(b)) += rho(b, b).real();
  return w;
}

FSpectrum f_spectrum(const SparseMatrixXcd& f) {
  Eigen::MatrixXcd a = Eigen::MatrixXcd(f);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(a.adjoint() * a);
  if (solver.info() != Eigen::Success) throw std::runtime_error("f_spectrum: eigendecomposition failed");
  return FSpectrum{solver.eigenvalues(), solver.eigenvectors()};
}

double spectral_mass(const FSpectrum& fs, const Eigen::VectorXcd& psi0, double eps) {
  if (eps < 0.0) throw std::invalid_argument("spectral_mass: eps must be nonnegative");
  if (psi0.size() != fs.ff_eigenvectors.rows())
    throw std::invalid_argument("spectral_mass: dimension mismatch");
  const double kernel_tol = 1e-10;
  const double threshold = std::max(eps * eps, kernel_tol);
  double mass = 0.0;
  for (int i = 0; i < fs.ff_eigenvalues.size(); ++i) {
    if (fs.ff_eigenvalues(i) >= threshold) mass += std::norm(fs.ff_eigenvectors.col(i).dot(psi0));
  }
  return mass;
}

double AngleBounds::mass_lower(double delta) const {
  if (delta <= 0.0 || delta >= length) throw std::invalid_argument("mass_lower: need 0 < delta < L");
  double ang = alpha - std::asin(delta / length);
  return std::cos(ang) * std::cos(ang);
}

double AngleBounds::mass_lower_corrected(double delta) const {
  if (delta <= 0.0 || delta >= length) throw std::invalid_argument("mass_lower_corrected: need 0 < delta < L");
  double ang = std::min(alpha + std::asin(delta / length), M_PI / 2.0);
  return std::cos(ang) * std::cos(ang);
}

AngleBounds angle_bounds(const Eigen::MatrixXcd& b, const Eigen::VectorXcd& psi) {
  if (b.rows() != b.cols() || b.rows() != psi.size())
    throw std::invalid_argument("angle_bounds: dimension mismatch");
  Eigen::MatrixXcd comm = b.adjoint() * b - b * b.adjoint();
  double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  if (comm.cwiseAbs().maxCoeff() > 1e-10 * scale * scale)
    throw std::invalid_argument("angle_bounds: operator is not normal");
  Eigen::VectorXcd unit = psi / psi.norm();
  Eigen::VectorXcd v = b * unit;
  double L = v.norm();
  if (L < 1e-14 * scale) throw std::invalid_argument("angle_bounds: B psi vanishes, angle undefined");
  double cosa = std::min(1.0, std::abs(unit.dot(v)) / L);
  AngleBounds out;
  out.alpha = std::acos(cosa);
  out.length = L;
  out.image_mass_lower = cosa * cosa;
  return out;
}

FullSimulator::FullSimulator(std::shared_ptr<const Lattice> lattice, Program program)
    : lattice_(std::move(lattice)), program_(std::move(program)) {
  const Dims& d = lattice_->dims();
  if (d.h != program_.dims().h || d.c != program_.dims().c)
    throw std::invalid_argument("full simulator: program dimensions differ from the lattice");
  if (d.c * d.h > kMaxDataQubits)
    throw std::invalid_argument("full simulator: refusing more than 16 data qubits");
}

FullState FullSimulator::initial_state(int cfg, const std::vector<int>& column_bits) const {
  const Dims& d = lattice_->dims();
  if (static_cast<int>(column_bits.size()) != d.h)
    throw std::invalid_argument("full simulator: one data bit per column required");
  std::uint64_t bits = 0;
  const ClockConfig& a = lattice_->config(cfg);
  for (int k = 0; k < d.h; ++k)
    if (column_bits[k]) bits |= 1ULL << bit_pos(a.front[k], k);
  FullState psi;
  psi[(static_cast<std::uint64_t>(cfg) << 32) | bits] = cd(1.0, 0.0);
  return psi;
}

namespace {

inline int key_cfg(std::uint64_t key) { return static_cast<int>(key >> 32); }
inline std::uint32_t key_bits(std::uint64_t key) { return static_cast<std::uint32_t>(key & 0xffffffffULL); }
inline std::uint64_t make_key(int cfg, std::uint32_t bits) {
  return (static_cast<std::uint64_t>(cfg) << 32) | bits;
}

inline std::uint32_t swap_bits(std::uint32_t bits, int p, int q) {
  std::uint32_t bp = (bits >> p) & 1u, bq = (bits >> q) & 1u;
  if (bp != bq) bits ^= (1u << p) | (1u << q);
  return bits;
}

}  // namespace

FullState FullSimulator::apply_f(const FullState& state) const {
  const Dims& d = lattice_->dims();
  FullState out;
  for (const auto& [key, amp] : state) {
    int cfg = key_cfg(key);
    std::uint32_t bits = key_bits(key);
    for (const auto& e : lattice_->forward_edges(cfg)) {
      const BrickMove& m = e.move;
      int jn = (m.row + 1) % d.c;
      if (m.kind != MoveKind::Full) {
        // boundary advance: the single data qubit rides along, no gate
        std::uint32_t nb = swap_bits(bits, bit_pos(m.row, m.col), bit_pos(jn, m.col));
        out[make_key(e.target, nb)] += amp * m.weight();
        continue;
      }
      Eigen::Matrix4cd u = gate_matrix(program_.code(m.row, m.col));
      int p0 = bit_pos(m.row, m.col), p1 = bit_pos(m.row, m.col + 1);
      int q0 = bit_pos(jn, m.col), q1 = bit_pos(jn, m.col + 1);
      int in = (((bits >> p0) & 1u) << 1) | ((bits >> p1) & 1u);
      for (int g = 0; g < 4; ++g) {
        cd gamp = u(g, in);
        if (gamp == cd(0.0, 0.0)) continue;
        std::uint32_t nb = bits & ~((1u << p0) | (1u << p1));
        if ((g >> 1) & 1) nb |= 1u << p0;
        if (g & 1) nb |= 1u << p1;
        nb = swap_bits(nb, p0, q0);
        nb = swap_bits(nb, p1, q1);
        out[make_key(e.target, nb)] += amp * gamp * m.weight();
      }
    }
  }
  return out;
}

FullState FullSimulator::apply_f_dagger(const FullState& state) const {
  const Dims& d = lattice_->dims();
  FullState out;
  for (const auto& [key, amp] : state) {
    int cfg = key_cfg(key);
    std::uint32_t bits = key_bits(key);
    for (const auto& e : lattice_->backward_edges(cfg)) {
      const BrickMove& m = e.move;
      int jn = (m.row + 1) % d.c;
      if (m.kind != MoveKind::Full) {
        std::uint32_t nb = swap_bits(bits, bit_pos(m.row, m.col), bit_pos(jn, m.col));
        out[make_key(e.target, nb)] += amp * m.weight();
        continue;
      }
      // undo the swap, then the adjoint gate on the row-j pair
      Eigen::Matrix4cd u = gate_matrix(program_.code(m.row, m.col));
      int p0 = bit_pos(m.row, m.col), p1 = bit_pos(m.row, m.col + 1);
      int q0 = bit_pos(jn, m.col), q1 = bit_pos(jn, m.col + 1);
      std::uint32_t ub = swap_bits(swap_bits(bits, p0, q0), p1, q1);
      int gout = (((ub >> p0) & 1u) << 1) | ((ub >> p1) & 1u);
      for (int gin = 0; gin < 4; ++gin) {
        cd gamp = std::conj(u(gout, gin));
        if (gamp == cd(0.0, 0.0)) continue;
        std::uint32_t nb = ub & ~((1u << p0) | (1u << p1));
        if ((gin >> 1) & 1) nb |= 1u << p0;
        if (gin & 1) nb |= 1u << p1;
        out[make_key(e.target, nb)] += amp * gamp * m.weight();
      }
    }
  }
  return out;
}

cd FullSimulator::dot(const FullState& a, const FullState& b) {
  const FullState& small = a.size() <= b.size() ? a : b;
  const FullState& large = a.size() <= b.size() ? b : a;
  cd sum = 0.0;
  for (const auto& [key, amp] : small) {
    auto it = large.find(key);
    if (it == large.end()) continue;
    sum += (&small == &a) ? std::conj(amp) * it->second : std::conj(it->second) * amp;
  }
  return sum;
}

CrosscheckResult crosscheck_reduced(const ReducedBasis& basis, const Program& program,
                                    int init_cfg, const std::vector<int>& column_bits, int steps) {
  FullSimulator sim(basis.lattice, program);

  std::vector<FullState> full(steps + 1);
  full[0] = sim.initial_state(init_cfg, column_bits);
  for (int j = 0; j < steps; ++j) full[j + 1] = sim.apply_f(full[j]);

  SparseMatrixXcd f = build_reduced_f(basis);
  std::vector<Eigen::VectorXcd> red(steps + 1);
  red[0] = Eigen::VectorXcd::Zero(basis.dim());
  red[0](basis.index(init_cfg, 0)) = 1.0;
  for (int j = 0; j < steps; ++j) red[j + 1] = f * red[j];

  CrosscheckResult out;
  out.steps = steps;
  const int period = basis.period();
  for (int j = 0; j <= steps; ++j) {
    for (int k = 0; k <= steps; ++k) {
      cd gf = FullSimulator::dot(full[j], full[k]);
      cd gr = red[j].dot(red[k]);
      out.gram_deviation = std::max(out.gram_deviation, std::abs(gf - gr));
      if ((j - k) % period != 0) out.orth_deviation = std::max(out.orth_deviation, std::abs(gf));
    }
  }
  return out;
}

}  // namespace ergo
