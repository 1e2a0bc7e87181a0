#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ergo/util.hpp"

namespace ergo {

/// Continuous-time walk on the N-cycle with Hamiltonian a S + conj(a) S^dag.
struct CycleWalk {
  int sites = 0;  // N, even
  cd hopping;     // a

  void validate() const;
};

/// Probabilities over the N sites.
struct Distribution {
  std::vector<double> p;

  int size() const { return static_cast<int>(p.size()); }
  void validate() const;
};

Distribution uniform_distribution(int n);

/// Eigenvalues 2 r cos(phi + 2 pi k / N), k = 0..N-1, with a = r e^{i phi}.
std::vector<double> walk_eigenvalues(const CycleWalk& w);

/// Site distribution of the time-averaged evolution from a point start;
/// exact finite-horizon kernel in the Fourier eigenbasis, dephased limit
/// when T is absent.
Distribution averaged_distribution(const CycleWalk& w, int start, std::optional<double> T);

/// Half L1 distance.
double tv_distance(const Distribution& a, const Distribution& b);

/// (1/4) sum_{m != 0} |R_hat(m)|^2 with R_hat(m) = sum_l R(l) e^{-2 pi i l m / N}.
/// Bounds the squared total variation distance to uniform.
double fourier_mixing_bound(const Distribution& r);

/// Horizon from the mixing estimate: T = 16 N / (Delta^2 delta eps) * ln(2N/Delta)
/// with Delta = sin((delta/7)^2).
double mixing_time(int n, double delta, double eps);

struct MixReport {
  int sites = 0;
  double horizon = 0.0;
  double tv_to_uniform = 0.0;
  double delta = 0.0;
  bool mixed = false;       ///< tv <= delta at the computed horizon
  bool degenerate = false;  ///< hopping too small to mix at all
};

/// Runs the walk to the mixing-time horizon and compares against uniform.
MixReport verify_mixing(const CycleWalk& w, double delta, double eps);

}  // namespace ergo
