#include "ergo/walk.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace ergo {

void CycleWalk::validate() const {
  if (sites < 2 || sites % 2 != 0) throw std::invalid_argument("cycle walk: N must be even and >= 2");
}

void Distribution::validate() const {
  double sum = 0.0;
  for (double x : p) {
    if (x < -1e-12) throw std::invalid_argument("distribution: negative probability");
    sum += x;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw std::invalid_argument("distribution: probabilities must sum to 1");
}

Distribution uniform_distribution(int n) {
  if (n <= 0) throw std::invalid_argument("uniform_distribution: empty support");
  return Distribution{std::vector<double>(n, 1.0 / n)};
}

std::vector<double> walk_eigenvalues(const CycleWalk& w) {
  w.validate();
  double r = std::abs(w.hopping);
  double phi = (r == 0.0) ? 0.0 : std::arg(w.hopping);
  std::vector<double> ev(w.sites);
  for (int k = 0; k < w.sites; ++k) ev[k] = 2.0 * r * std::cos(phi + 2.0 * M_PI * k / w.sites);
  return ev;
}

Distribution averaged_distribution(const CycleWalk& w, int start, std::optional<double> T) {
  w.validate();
  const int n = w.sites;
  if (start < 0 || start >= n) throw std::invalid_argument("averaged_distribution: start site out of range");
  if (T && *T <= 0.0) throw std::invalid_argument("averaged_distribution: horizon must be positive");

  std::vector<double> lambda = walk_eigenvalues(w);
  const double scale = std::abs(w.hopping);
  const double degeneracy_tol = 1e-12 * (1.0 + 2.0 * scale);

  // rho_T in the Fourier basis has entries kernel(lambda_k - lambda_k')/N;
  // site mass is a double Fourier sum over the kernel
  Distribution out;
  out.p.assign(n, 0.0);
  for (int l = 0; l < n; ++l) {
    cd acc = 0.0;
    for (int k = 0; k < n; ++k) {
      for (int kp = 0; kp < n; ++kp) {
        double gap = lambda[k] - lambda[kp];
        cd kern;
        if (T) {
          double xt = gap * *T;
          if (std::abs(xt) < 1e-12) {
            kern = 1.0;
          } else {
            cd ix(0.0, xt);
            kern = (1.0 - std::exp(-ix)) / ix;
          }
        } else {
          kern = std::abs(gap) <= degeneracy_tol ? 1.0 : 0.0;
        }
        if (kern == cd(0.0, 0.0)) continue;
        double ang = 2.0 * M_PI * ((k - kp) * (l - start)) / n;
        acc += kern * std::exp(cd(0.0, ang));
      }
    }
    double v = acc.real() / (n * n);
    out.p[l] = std::abs(v) < 1e-15 ? 0.0 : v;
  }
  out.validate();
  return out;
}

double tv_distance(const Distribution& a, const Distribution& b) {
  if (a.size() != b.size()) throw std::invalid_argument("tv_distance: size mismatch");
  double sum = 0.0;
  for (int i = 0; i < a.size(); ++i) sum += std::abs(a.p[i] - b.p[i]);
  return 0.5 * sum;
}

double fourier_mixing_bound(const Distribution& r) {
  r.validate();
  const int n = r.size();
  double sum = 0.0;
  for (int m = 1; m < n; ++m) {
    cd rm = 0.0;
    for (int l = 0; l < n; ++l) rm += r.p[l] * std::exp(cd(0.0, -2.0 * M_PI * l * m / n));
    sum += std::norm(rm);
  }
  return 0.25 * sum;
}

double mixing_time(int n, double delta, double eps) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("mixing_time: N must be even and >= 2");
  if (delta <= 0.0 || delta >= 1.0) throw std::invalid_argument("mixing_time: need 0 < delta < 1");
  if (eps <= 0.0 || eps > 0.5) throw std::invalid_argument("mixing_time: need 0 < eps <= 1/2");
  double big_delta = std::sin((delta / 7.0) * (delta / 7.0));
  return 16.0 * n / (big_delta * big_delta * delta * eps) * std::log(2.0 * n / big_delta);
}

MixReport verify_mixing(const CycleWalk& w, double delta, double eps) {
  w.validate();
  MixReport rep;
  rep.sites = w.sites;
  rep.delta = delta;
  if (std::abs(w.hopping) < eps) {
    // eigenvalue scale below the assumed floor; a point mass never spreads
    rep.degenerate = true;
    rep.horizon = mixing_time(w.sites, delta, eps);
    Distribution d = averaged_distribution(w, 0, rep.horizon);
    rep.tv_to_uniform = tv_distance(d, uniform_distribution(w.sites));
    rep.mixed = rep.tv_to_uniform <= delta;
    return rep;
  }
  rep.horizon = mixing_time(w.sites, delta, eps);
  Distribution d = averaged_distribution(w, 0, rep.horizon);
  rep.tv_to_uniform = tv_distance(d, uniform_distribution(w.sites));
  rep.mixed = rep.tv_to_uniform <= delta;
  return rep;
}

}  // namespace ergo
