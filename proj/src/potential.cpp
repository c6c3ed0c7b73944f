#include "phasenet/potential.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "phasenet/errors.hpp"

namespace phasenet {

std::vector<WellPoint> Potential::wells() const {
  std::vector<WellPoint> out;
  for (int i = 0; i < num_wells(); ++i) {
    auto w = well(i);
    out.emplace_back(w.begin(), w.end());
  }
  return out;
}

double Potential::value(std::span<const double> z) const {
  if (value_) return value_(z);
  double prod = scale_;
  const int N = num_wells();
  for (int i = 0; i < N; ++i) {
    double d = 0.0;
    for (int k = 0; k < m_; ++k) {
      double t = z[k] - wells_[i * m_ + k];
      d += t * t;
    }
    prod *= d;
  }
  return prod;
}

void Potential::gradient(std::span<const double> z, std::span<double> g) const {
  if (value_ && grad_) {
    grad_(z, g);
    return;
  }
  if (value_) {
    std::vector<double> zz(z.begin(), z.end());
    for (int k = 0; k < m_; ++k) {
      double step = 1e-6 * (1.0 + std::abs(z[k]));
      zz[k] = z[k] + step;
      double fp = value_(zz);
      zz[k] = z[k] - step;
      double fm = value_(zz);
      zz[k] = z[k];
      g[k] = (fp - fm) / (2.0 * step);
    }
    return;
  }
  const int N = num_wells();
  double d[16];
  double pre[17], suf[17];
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int k = 0; k < m_; ++k) {
      double t = z[k] - wells_[i * m_ + k];
      s += t * t;
    }
    d[i] = s;
  }
  pre[0] = 1.0;
  for (int i = 0; i < N; ++i) pre[i + 1] = pre[i] * d[i];
  suf[N] = 1.0;
  for (int i = N - 1; i >= 0; --i) suf[i] = suf[i + 1] * d[i];
  for (int k = 0; k < m_; ++k) g[k] = 0.0;
  for (int i = 0; i < N; ++i) {
    double others = 2.0 * scale_ * pre[i] * suf[i + 1];
    for (int k = 0; k < m_; ++k) g[k] += others * (z[k] - wells_[i * m_ + k]);
  }
}

void Potential::hessian(std::span<const double> z, std::span<double> H) const {
  const int m = m_;
  if (value_) {
    std::vector<double> zz(z.begin(), z.end()), gp(m), gm(m);
    for (int k = 0; k < m; ++k) {
      double step = 1e-4 * (1.0 + std::abs(z[k]));
      zz[k] = z[k] + step;
      gradient(zz, gp);
      zz[k] = z[k] - step;
      gradient(zz, gm);
      zz[k] = z[k];
      for (int r = 0; r < m; ++r) H[r * m + k] = (gp[r] - gm[r]) / (2.0 * step);
    }
    for (int r = 0; r < m; ++r)
      for (int c = r + 1; c < m; ++c) {
        double s = 0.5 * (H[r * m + c] + H[c * m + r]);
        H[r * m + c] = H[c * m + r] = s;
      }
    return;
  }
  const int N = num_wells();
  double d[16];
  for (int i = 0; i < N; ++i) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) {
      double t = z[k] - wells_[i * m + k];
      s += t * t;
    }
    d[i] = s;
  }
  auto prod_except = [&](int i, int j) {
    double p = 1.0;
    for (int l = 0; l < N; ++l)
      if (l != i && l != j) p *= d[l];
    return p;
  };
  for (int r = 0; r < m * m; ++r) H[r] = 0.0;
  for (int i = 0; i < N; ++i) {
    double pi = 2.0 * scale_ * prod_except(i, -1);
    for (int k = 0; k < m; ++k) H[k * m + k] += pi;
    for (int j = 0; j < N; ++j) {
      if (j == i) continue;
      double pij = 4.0 * scale_ * prod_except(i, j);
      for (int r = 0; r < m; ++r)
        for (int c = 0; c < m; ++c)
          H[r * m + c] += pij * (z[r] - wells_[i * m + r]) * (z[c] - wells_[j * m + c]);
    }
  }
}

double Potential::nearest_well(std::span<const double> z, int* which) const {
  double best = 1e300;
  int arg = -1;
  for (int i = 0; i < num_wells(); ++i) {
    double s = 0.0;
    for (int k = 0; k < m_; ++k) {
      double t = z[k] - wells_[i * m_ + k];
      s += t * t;
    }
    if (s < best) {
      best = s;
      arg = i;
    }
  }
  if (which) *which = arg;
  return std::sqrt(best);
}

double Potential::max_well_norm() const {
  double r = 0.0;
  for (int i = 0; i < num_wells(); ++i) {
    double s = 0.0;
    for (int k = 0; k < m_; ++k) s += wells_[i * m_ + k] * wells_[i * m_ + k];
    r = std::max(r, std::sqrt(s));
  }
  return r;
}

static void validate_wells(const std::vector<WellPoint>& wells) {
  if (wells.size() < 2) throw Error(Errc::InvalidArgument, "at least two wells required");
  if (wells.size() > 16) throw Error(Errc::InvalidArgument, "at most 16 wells supported");
  const size_t m = wells.front().size();
  if (m == 0) throw Error(Errc::DimensionMismatch, "wells must have positive dimension");
  for (const auto& w : wells) {
    if (w.size() != m) throw Error(Errc::DimensionMismatch, "wells have different dimensions");
    for (double c : w)
      if (!std::isfinite(c)) throw Error(Errc::InvalidArgument, "non-finite well coordinate");
  }
  for (size_t i = 0; i < wells.size(); ++i)
    for (size_t j = i + 1; j < wells.size(); ++j) {
      double s = 0.0;
      for (size_t k = 0; k < m; ++k) s += (wells[i][k] - wells[j][k]) * (wells[i][k] - wells[j][k]);
      if (std::sqrt(s) < 1e-12)
        throw Error(Errc::DuplicateWell, "wells " + std::to_string(i) + " and " + std::to_string(j) + " coincide");
    }
}

Potential make_product_potential(const std::vector<WellPoint>& wells, double scale) {
  validate_wells(wells);
  if (!(scale > 0.0)) throw Error(Errc::InvalidArgument, "scale must be positive");
  Potential p;
  p.m_ = static_cast<int>(wells.front().size());
  for (const auto& w : wells) p.wells_.insert(p.wells_.end(), w.begin(), w.end());
  p.scale_ = scale;
  p.name_ = "product";
  auto rep = check_invariants(p, 500);
  if (!rep.ok) throw Error(Errc::InvalidArgument, "product potential failed invariant: " + rep.failures.front());
  return p;
}

Potential make_double_well() {
  Potential p = make_product_potential({{-1.0}, {1.0}}, 0.25);
  p.name_ = "double_well";
  return p;
}

Potential make_custom_potential(const std::vector<WellPoint>& wells, Potential::ScalarFn W,
                                Potential::GradFn grad, std::string name) {
  validate_wells(wells);
  if (!W) throw Error(Errc::InvalidArgument, "custom potential needs W");
  Potential p;
  p.m_ = static_cast<int>(wells.front().size());
  for (const auto& w : wells) p.wells_.insert(p.wells_.end(), w.begin(), w.end());
  p.value_ = std::move(W);
  p.grad_ = std::move(grad);
  p.name_ = std::move(name);
  return p;
}

double min_hessian_eigenvalue(const Potential& p, int well) {
  const int m = p.dim();
  std::vector<double> H(m * m);
  p.hessian(p.well(well), H);
  Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(H.data(), m, m);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return es.eigenvalues().minCoeff();
}

InvariantReport check_invariants(const Potential& p, int samples, unsigned seed) {
  InvariantReport rep;
  const int m = p.dim();
  const double tol = p.analytic() ? 1e-10 : 1e-6;
  std::vector<double> g(m);
  rep.min_hessian_eig = 1e300;
  for (int i = 0; i < p.num_wells(); ++i) {
    auto a = p.well(i);
    if (std::abs(p.value(a)) > tol) {
      rep.ok = false;
      rep.failures.push_back("W(a) != 0 at well " + std::to_string(i));
    }
    p.gradient(a, g);
    double gn = 0.0;
    for (double v : g) gn = std::max(gn, std::abs(v));
    if (gn > tol) {
      rep.ok = false;
      rep.failures.push_back("W_z(a) != 0 at well " + std::to_string(i));
    }
    double e = min_hessian_eigenvalue(p, i);
    rep.min_hessian_eig = std::min(rep.min_hessian_eig, e);
    if (!(e > 1e-8)) {
      rep.ok = false;
      rep.failures.push_back("W_zz(a) not positive definite at well " + std::to_string(i));
    }
  }
  const double K = 2.0 * p.max_well_norm() + 1.0;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  std::uniform_real_distribution<double> ud(-K, K);
  std::vector<double> z(m);
  for (int s = 0; s < samples; ++s) {
    for (int k = 0; k < m; ++k) z[k] = ud(rng);
    if (p.value(z) < -1e-12) {
      rep.ok = false;
      rep.failures.push_back("W < 0 at a sampled point");
      break;
    }
  }
  for (int s = 0; s < samples; ++s) {
    double r = 0.0;
    for (int k = 0; k < m; ++k) {
      z[k] = nd(rng);
      r += z[k] * z[k];
    }
    r = std::sqrt(r);
    for (int k = 0; k < m; ++k) z[k] *= K / r;
    p.gradient(z, g);
    double dz = 0.0;
    for (int k = 0; k < m; ++k) dz += g[k] * z[k];
    if (!(dz > 0.0)) {
      rep.ok = false;
      rep.failures.push_back("coercivity W_z(z).z > 0 fails on |z| = K");
      break;
    }
  }
  return rep;
}

double WellConstants::min_W_outside(double delta) const {
  // sample_dist is sorted descending; find last index with dist >= delta
  auto it = std::partition_point(sample_dist.begin(), sample_dist.end(), [&](double d) { return d >= delta; });
  if (it == sample_dist.begin()) return 0.0;
  return suffix_min_W[static_cast<size_t>(it - sample_dist.begin()) - 1];
}

double WellConstants::cW(double delta) const {
  if (!(delta > 0.0)) throw Error(Errc::InvalidArgument, "cW needs delta > 0");
  return std::sqrt(2.0 * min_W_outside(delta) / (delta * delta));
}

static std::vector<std::vector<double>> sample_directions(int m, int count, unsigned seed) {
  std::vector<std::vector<double>> dirs;
  if (m == 1) return {{1.0}, {-1.0}};
  if (m == 2) {
    for (int i = 0; i < count; ++i) {
      double th = 2.0 * M_PI * i / count;
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    return dirs;
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int k = 0; k < m; ++k) {
    std::vector<double> e(m, 0.0), f(m, 0.0);
    e[k] = 1.0;
    f[k] = -1.0;
    dirs.push_back(e);
    dirs.push_back(f);
  }
  for (int i = 0; i < count * m; ++i) {
    std::vector<double> v(m);
    double r = 0.0;
    for (auto& x : v) {
      x = nd(rng);
      r += x * x;
    }
    for (auto& x : v) x /= std::sqrt(r);
    dirs.push_back(v);
  }
  return dirs;
}

WellConstants derive_constants(const Potential& p, double M_prime, const ConstantsOptions& opts) {
  if (!(M_prime > 0.0)) throw Error(Errc::InvalidArgument, "M_prime must be positive");
  const int m = p.dim();
  const int N = p.num_wells();
  WellConstants wc;
  wc.M_prime = M_prime;
  double dmin = 1e300;
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      double s = 0.0;
      for (int k = 0; k < m; ++k) s += std::pow(p.well(i)[k] - p.well(j)[k], 2);
      dmin = std::min(dmin, std::sqrt(s));
    }
  wc.d0 = 0.5 * dmin;

  for (int i = 0; i < N; ++i) {
    double e = min_hessian_eigenvalue(p, i);
    if (!(e > 1e-8)) throw Error(Errc::NotPositiveDefinite, "W_zz not positive definite at well " + std::to_string(i));
  }

  // radial monotonicity: first s > 0 where d/ds W(a + s nu) <= 0
  const double s_max = 2.0 * wc.d0;
  double first_bad = s_max;
  auto dirs = sample_directions(m, opts.directions, 11);
  std::vector<double> z(m), g(m);
  for (int i = 0; i < N; ++i) {
    auto a = p.well(i);
    for (const auto& nu : dirs) {
      for (int r = 1; r <= opts.radial_samples; ++r) {
        double s = s_max * r / opts.radial_samples;
        if (s >= first_bad) break;
        for (int k = 0; k < m; ++k) z[k] = a[k] + s * nu[k];
        p.gradient(z, g);
        double dd = 0.0;
        for (int k = 0; k < m; ++k) dd += g[k] * nu[k];
        if (!(dd > 0.0)) {
          first_bad = s;
          break;
        }
      }
    }
  }
  wc.delta0 = std::min(0.5 * first_bad, wc.d0);
  if (!(wc.delta0 >= 1e-6)) throw Error(Errc::MonotonicityFail, "no radial monotonicity radius above 1e-6");

  // dense sampling of W on the ball |z| <= M'
  int ppa = opts.points_per_axis;
  if (m >= 3) ppa = std::min(ppa, static_cast<int>(std::pow(4.0e6, 1.0 / m)));
  std::vector<std::pair<double, double>> samples;
  std::vector<int> idx(m, 0);
  long total = 1;
  for (int k = 0; k < m; ++k) total *= ppa;
  for (long n = 0; n < total; ++n) {
    long t = n;
    double r2 = 0.0;
    for (int k = 0; k < m; ++k) {
      int ik = static_cast<int>(t % ppa);
      t /= ppa;
      z[k] = -M_prime + 2.0 * M_prime * ik / (ppa - 1);
      r2 += z[k] * z[k];
    }
    if (r2 > M_prime * M_prime * (1.0 + 1e-12)) continue;
    samples.emplace_back(p.nearest_well(z), p.value(z));
  }
  std::sort(samples.begin(), samples.end(), [](auto& a, auto& b) { return a.first > b.first; });
  double running = 1e300;
  for (auto& [d, w] : samples) {
    running = std::min(running, w);
    wc.sample_dist.push_back(d);
    wc.suffix_min_W.push_back(running);
  }
  return wc;
}

}  // namespace phasenet
