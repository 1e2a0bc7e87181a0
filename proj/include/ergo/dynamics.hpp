#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

#include "ergo/gates.hpp"
#include "ergo/lattice.hpp"
#include "ergo/util.hpp"

namespace ergo {

using SparseMatrixXcd = Eigen::SparseMatrix<cd>;

/// Basis of the reachable subspace: one state per (clock configuration,
/// winding class). The grade brick_count + g * winding labels the subspaces
/// the forward operator shifts through; N = M * g.
struct ReducedBasis {
  std::shared_ptr<const Lattice> lattice;
  int winding_modulus = 2;

  int dim() const { return lattice->size() * winding_modulus; }
  int index(int cfg, int w) const { return cfg * winding_modulus + w; }
  int config_of(int b) const { return b / winding_modulus; }
  int winding_of(int b) const { return b % winding_modulus; }
  int grade(int b) const {
    return lattice->brick_count(config_of(b)) + lattice->g() * winding_of(b);
  }
  int period() const { return lattice->g() * winding_modulus; }  // N
};

ReducedBasis make_reduced_basis(Dims dims, int winding_modulus);

/// Forward operator on the reduced basis: entry (b', b) is the brick weight
/// when b' follows from b by one move; the winding advances when the move
/// closes a wrap.
SparseMatrixXcd build_reduced_f(const ReducedBasis& basis);

/// max-norm of F F^dag - F^dag F.
double normality_defect(const SparseMatrixXcd& f);

/// Shift-block form in the grade ordering: offsets of entries outside the
/// grade l -> l+1 blocks, and the defect of A_{l+1}^dag A_{l+1} = A_l A_l^dag.
struct BlockStructure {
  double off_block_max = 0.0;
  double compare_max = 0.0;
};
BlockStructure block_structure(const ReducedBasis& basis, const SparseMatrixXcd& f);

/// Eigensystem of the Hermitian H = F + F^dag.
struct SpectralData {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXcd eigenvectors;
};
SpectralData spectral(const SparseMatrixXcd& f);

Eigen::VectorXcd evolve(const SpectralData& sd, const Eigen::VectorXcd& psi0, double t);

/// Time-averaged density of |psi0><psi0|: exact finite-horizon kernel, or the
/// eigenspace-diagonal (dephased) limit when T is absent.
Eigen::MatrixXcd time_average(const SpectralData& sd, const Eigen::VectorXcd& psi0,
                              std::optional<double> T);

/// W(l): probability mass per grade class l in [0, N).
Eigen::VectorXd grade_distribution(const ReducedBasis& basis, const Eigen::MatrixXcd& rho);

/// Eigensystem of F^dag F; |eigenvalue of F| = sqrt of these.
struct FSpectrum {
  Eigen::VectorXd ff_eigenvalues;
  Eigen::MatrixXcd ff_eigenvectors;
};
FSpectrum f_spectrum(const SparseMatrixXcd& f);

/// Squared overlap of psi0 with eigenspaces of F of eigenvalue modulus
/// >= eps. Eigenvalues of F^dag F below 1e-10 count as kernel.
double spectral_mass(const FSpectrum& fs, const Eigen::VectorXcd& psi0, double eps);

/// Angle data for a normal operator B and a unit vector psi: the kernel
/// bound cos^2(alpha) on the image mass, plus the delta-dependent bound in
/// both the quoted form (alpha - asin(delta/L)) and the provable form
/// (alpha + asin(delta/L)).
struct AngleBounds {
  double alpha = 0.0;
  double length = 0.0;
  double image_mass_lower = 0.0;
  double mass_lower(double delta) const;            // cos^2(alpha - asin(delta/L))
  double mass_lower_corrected(double delta) const;  // cos^2(alpha + asin(delta/L))
};
AngleBounds angle_bounds(const Eigen::MatrixXcd& b, const Eigen::VectorXcd& psi);

/// Sparse state of the whole cylinder: amplitudes keyed by (configuration
/// index, data bitstring). The program is a fixed classical assignment.
using FullState = std::unordered_map<std::uint64_t, cd>;

class FullSimulator {
 public:
  FullSimulator(std::shared_ptr<const Lattice> lattice, Program program);

  static constexpr int kMaxDataQubits = 16;

  const Lattice& lattice() const { return *lattice_; }

  /// Basis state: clock at `cfg`, column data bits placed at the front cells,
  /// every other data qubit 0.
  FullState initial_state(int cfg, const std::vector<int>& column_bits) const;

  FullState apply_f(const FullState& state) const;
  FullState apply_f_dagger(const FullState& state) const;

  static cd dot(const FullState& a, const FullState& b);

 private:
  int bit_pos(int j, int k) const { return j * lattice_->dims().h + k; }
  std::shared_ptr<const Lattice> lattice_;
  Program program_;
};

/// Gram matrices of the family {F^j psi} from the full simulation and from
/// the reduced model, compared entrywise; orth_deviation is the largest
/// full-model overlap between classes j != k mod N.
struct CrosscheckResult {
  double gram_deviation = 0.0;
  double orth_deviation = 0.0;
  int steps = 0;
};
CrosscheckResult crosscheck_reduced(const ReducedBasis& basis, const Program& program,
                                    int init_cfg, const std::vector<int>& column_bits, int steps);

}  // namespace ergo
