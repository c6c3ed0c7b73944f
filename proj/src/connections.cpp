#include "phasenet/connections.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>

#include "phasenet/errors.hpp"
#include "phasenet/fit.hpp"

namespace phasenet {

double discrete_action(const Potential& p, std::span<const double> u, int m, double dt, double* kinetic,
                       double* potential) {
  const int n = static_cast<int>(u.size()) / m;
  double kin = 0.0, pot = 0.0;
  std::vector<double> mid(m);
  for (int i = 0; i + 1 < n; ++i) {
    double d2 = 0.0;
    for (int k = 0; k < m; ++k) {
      double d = u[(i + 1) * m + k] - u[i * m + k];
      d2 += d * d;
      mid[k] = 0.5 * (u[(i + 1) * m + k] + u[i * m + k]);
    }
    kin += d2 / (2.0 * dt);
    pot += dt * p.value(mid);
  }
  if (kinetic) *kinetic = kin;
  if (potential) *potential = pot;
  return kin + pot;
}

namespace {

void action_gradient(const Potential& p, const std::vector<double>& u, int m, double dt, std::vector<double>& g) {
  const int n = static_cast<int>(u.size()) / m;
  std::fill(g.begin(), g.end(), 0.0);
  std::vector<double> mid(m), gm(m);
  for (int i = 0; i + 1 < n; ++i) {
    for (int k = 0; k < m; ++k) mid[k] = 0.5 * (u[(i + 1) * m + k] + u[i * m + k]);
    p.gradient(mid, gm);
    for (int k = 0; k < m; ++k) {
      double d = (u[(i + 1) * m + k] - u[i * m + k]) / dt;
      g[i * m + k] += -d + 0.5 * dt * gm[k];
      g[(i + 1) * m + k] += d + 0.5 * dt * gm[k];
    }
  }
  for (int k = 0; k < m; ++k) {
    g[k] = 0.0;
    g[(n - 1) * m + k] = 0.0;
  }
}

struct BBResult {
  std::vector<double> u;
  double action = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Solves ((1/dt) tridiag(-1,2,-1) + dt I) x = r per component, with
// homogeneous values at both clamped ends.
void apply_preconditioner(const std::vector<double>& r, std::vector<double>& x, int m, double dt) {
  const int n = static_cast<int>(r.size()) / m;
  const int len = n - 2;
  std::fill(x.begin(), x.end(), 0.0);
  if (len <= 0) return;
  const double diag = 2.0 / dt + dt, off = -1.0 / dt;
  std::vector<double> c(len), d(len);
  for (int k = 0; k < m; ++k) {
    c[0] = off / diag;
    d[0] = r[1 * m + k] / diag;
    for (int q = 1; q < len; ++q) {
      double den = diag - off * c[q - 1];
      c[q] = off / den;
      d[q] = (r[(q + 1) * m + k] - off * d[q - 1]) / den;
    }
    x[len * m + k] = d[len - 1];
    for (int q = len - 2; q >= 0; --q) x[(q + 1) * m + k] = d[q] - c[q] * x[(q + 2) * m + k];
  }
}

BBResult bb_descent(const Potential& p, std::vector<double> u, int m, double dt, const ConnectionOptions& opts) {
  const size_t len = u.size();
  std::vector<double> g(len), gnew(len), unew(len), z(len), znew(len);
  action_gradient(p, u, m, dt, g);
  apply_preconditioner(g, z, m, dt);
  double f = discrete_action(p, u, m, dt);
  std::deque<double> history{f};
  double alpha = 1.0;
  BBResult res;
  for (int it = 0; it < opts.max_iter; ++it) {
    double gmax = 0.0, gz = 0.0;
    for (size_t q = 0; q < len; ++q) {
      gmax = std::max(gmax, std::abs(g[q]));
      gz += g[q] * z[q];
    }
    if (gmax / dt < opts.grad_tol) {
      res.converged = true;
      res.iterations = it;
      break;
    }
    double fref = *std::max_element(history.begin(), history.end());
    double step = alpha;
    double fnew = 0.0;
    for (int bt = 0; bt < 60; ++bt) {
      for (size_t q = 0; q < len; ++q) unew[q] = u[q] - step * z[q];
      fnew = discrete_action(p, unew, m, dt);
      if (fnew <= fref - 1e-4 * step * gz) break;
      step *= 0.5;
    }
    action_gradient(p, unew, m, dt, gnew);
    apply_preconditioner(gnew, znew, m, dt);
    // Barzilai-Borwein steps in the metric of the preconditioner
    double sy = 0.0, sPs = 0.0, yPy = 0.0;
    for (size_t q = 0; q < len; ++q) {
      double s = unew[q] - u[q], y = gnew[q] - g[q], Piy = znew[q] - z[q];
      sy += s * y;
      yPy += y * Piy;
    }
    for (size_t q = 0; q < len; ++q) sPs += step * step * z[q] * g[q];
    if (sy > 0.0) alpha = (it % 2 == 0) ? sPs / sy : sy / yPy;
    else alpha = 1.0;
    alpha = std::clamp(alpha, 1e-8, 1e8);
    u.swap(unew);
    g.swap(gnew);
    z.swap(znew);
    f = fnew;
    history.push_back(f);
    if (history.size() > 10) history.pop_front();
    res.iterations = it + 1;
  }
  res.u = std::move(u);
  res.action = f;
  return res;
}

double tail_fit(const std::vector<double>& u, int m, double dt, std::span<const double> well, double scale,
                bool forward) {
  const int n = static_cast<int>(u.size()) / m;
  std::vector<double> xs, ys;
  for (int i = 0; i < n; ++i) {
    double d2 = 0.0;
    for (int k = 0; k < m; ++k) d2 += std::pow(u[i * m + k] - well[k], 2);
    double d = std::sqrt(d2);
    if (d > 1e-9 * scale && d < 1e-2 * scale) {
      xs.push_back(forward ? i * dt : -i * dt);
      ys.push_back(std::log(d));
    }
  }
  if (xs.size() < 10) return 0.0;
  auto lf = linear_fit(xs, ys);
  return -lf.slope;
}

}  // namespace

void ConnectionProfile::eval(double t, std::span<double> out) const {
  const int n = n_pts();
  double x = (t + shift + T) / dt;
  if (x <= 0.0) {
    for (int k = 0; k < m; ++k) out[k] = samples[k];
    return;
  }
  if (x >= n - 1) {
    for (int k = 0; k < m; ++k) out[k] = samples[(n - 1) * m + k];
    return;
  }
  int i = static_cast<int>(x);
  double w = x - i;
  for (int k = 0; k < m; ++k) out[k] = (1.0 - w) * samples[i * m + k] + w * samples[(i + 1) * m + k];
}

ConnectionProfile solve_connection(const Potential& p, int i, int j, const ConnectionOptions& opts) {
  const int N = p.num_wells();
  if (i == j) throw Error(Errc::InvalidArgument, "connection needs two distinct wells");
  if (i < 0 || j < 0 || i >= N || j >= N) throw Error(Errc::InvalidArgument, "well index out of range");
  if (opts.n_pts < 11 || !(opts.T > 0.0)) throw Error(Errc::InvalidArgument, "bad connection grid");
  const int m = p.dim();
  const int n = opts.n_pts;
  const double dt = 2.0 * opts.T / (n - 1);
  auto a = p.well(i), b = p.well(j);
  double sep = 0.0;
  for (int k = 0; k < m; ++k) sep += (b[k] - a[k]) * (b[k] - a[k]);
  sep = std::sqrt(sep);

  std::vector<std::vector<double>> bump_dirs;
  if (m >= 2 && opts.bumps > 0) {
    std::vector<double> e(m);
    for (int k = 0; k < m; ++k) e[k] = (b[k] - a[k]) / sep;
    for (int axis = 0; axis < m && static_cast<int>(bump_dirs.size()) < m - 1; ++axis) {
      std::vector<double> v(m, 0.0);
      v[axis] = 1.0;
      auto project_out = [&](const std::vector<double>& w) {
        double c = 0.0;
        for (int k = 0; k < m; ++k) c += v[k] * w[k];
        for (int k = 0; k < m; ++k) v[k] -= c * w[k];
      };
      project_out(e);
      for (auto& w : bump_dirs) project_out(w);
      double r = 0.0;
      for (double x : v) r += x * x;
      if (r < 1e-6) continue;
      for (double& x : v) x /= std::sqrt(r);
      bump_dirs.push_back(v);
    }
  }
  std::vector<std::pair<std::vector<double>, double>> starts;  // (direction, amplitude)
  starts.push_back({std::vector<double>(m, 0.0), 0.0});
  for (const auto& d : bump_dirs)
    for (int q = 1; q <= opts.bumps / 2; ++q) {
      double amp = 0.6 * sep * q / std::max(1, opts.bumps / 2);
      starts.push_back({d, amp});
      starts.push_back({d, -amp});
    }

  BBResult best;
  best.action = 1e300;
  for (const auto& [dir, amp] : starts) {
    std::vector<double> u(n * m);
    for (int q = 0; q < n; ++q) {
      double s = static_cast<double>(q) / (n - 1);
      double bump = amp * std::sin(M_PI * s);
      for (int k = 0; k < m; ++k) u[q * m + k] = (1.0 - s) * a[k] + s * b[k] + bump * dir[k];
    }
    auto r = bb_descent(p, std::move(u), m, dt, opts);
    if (r.converged && r.action < best.action - 1e-12) best = std::move(r);
    else if (!best.converged && r.action < best.action) best = std::move(r);
  }
  if (!best.converged)
    throw Error(Errc::NoConvergence, "connection " + std::to_string(i) + "->" + std::to_string(j) +
                                         " did not converge in " + std::to_string(opts.max_iter) + " iterations");

  ConnectionProfile prof;
  prof.well_from = i;
  prof.well_to = j;
  prof.m = m;
  prof.T = opts.T;
  prof.dt = dt;
  prof.samples = std::move(best.u);
  prof.iterations = best.iterations;
  prof.action = discrete_action(p, prof.samples, m, dt, &prof.kinetic, &prof.potential);
  prof.energy = 2.0 * prof.kinetic;
  if (std::abs(prof.kinetic - prof.potential) > 0.02 * prof.energy)
    throw Error(Errc::NoConvergence, "equipartition violated for connection " + std::to_string(i) + "->" +
                                         std::to_string(j));

  double d0 = 0.5 * sep;
  for (int end : {1, n - 2}) {
    auto w = end == 1 ? a : b;
    double d2 = 0.0;
    for (int k = 0; k < m; ++k) d2 += std::pow(prof.samples[end * m + k] - w[k], 2);
    if (std::sqrt(d2) > 1e-3 * d0)
      throw Error(Errc::EndpointDrift, "profile does not settle at the wells within the window");
  }

  // recentre: t = 0 where the profile is equidistant from both wells
  double prev = 0.0;
  for (int q = 0; q < n; ++q) {
    double da = 0.0, db = 0.0;
    for (int k = 0; k < m; ++k) {
      da += std::pow(prof.samples[q * m + k] - a[k], 2);
      db += std::pow(prof.samples[q * m + k] - b[k], 2);
    }
    double f = std::sqrt(da) - std::sqrt(db);
    if (q > 0 && prev < 0.0 && f >= 0.0) {
      double w = -prev / (f - prev);
      prof.shift = -opts.T + (q - 1 + w) * dt;
      break;
    }
    prev = f;
  }

  double rate_b = tail_fit(prof.samples, m, dt, b, sep, true);
  std::vector<double> rev(prof.samples.size());
  for (int q = 0; q < n; ++q)
    for (int k = 0; k < m; ++k) rev[q * m + k] = prof.samples[(n - 1 - q) * m + k];
  double rate_a = tail_fit(rev, m, dt, a, sep, true);
  prof.tail_rate = std::min(rate_a, rate_b);
  return prof;
}

SurfaceTensionMatrix::SurfaceTensionMatrix(int n) : n_(n), s_(static_cast<size_t>(n) * n, 0.0) {}

void SurfaceTensionMatrix::set(int i, int j, double v) {
  s_[i * n_ + j] = v;
  s_[j * n_ + i] = v;
}

double SurfaceTensionMatrix::max_entry() const { return s_.empty() ? 0.0 : *std::max_element(s_.begin(), s_.end()); }

std::vector<std::array<int, 3>> SurfaceTensionMatrix::triangle_violations() const {
  std::vector<std::array<int, 3>> out;
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      for (int k = j + 1; k < n_; ++k) {
        if (i == j || i == k) continue;
        if (!((*this)(i, j) + (*this)(i, k) > (*this)(j, k))) out.push_back({i, j, k});
      }
  return out;
}

std::vector<std::vector<double>> SurfaceTensionMatrix::rows() const {
  std::vector<std::vector<double>> out(n_, std::vector<double>(n_));
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) out[i][j] = (*this)(i, j);
  return out;
}

void ProfileSet::add(ConnectionProfile prof) {
  auto key = std::make_pair(prof.well_from, prof.well_to);
  profiles_[key] = std::move(prof);
}

bool ProfileSet::has(int a, int b) const { return profiles_.count({a, b}) || profiles_.count({b, a}); }

const ConnectionProfile& ProfileSet::get(int a, int b) const {
  auto it = profiles_.find({a, b});
  if (it == profiles_.end()) it = profiles_.find({b, a});
  if (it == profiles_.end())
    throw Error(Errc::MissingSigma, "no profile for pair " + std::to_string(a) + "," + std::to_string(b));
  return it->second;
}

void ProfileSet::eval(int from, int to, double t, std::span<double> out) const {
  auto it = profiles_.find({from, to});
  if (it != profiles_.end()) {
    it->second.eval(t, out);
    return;
  }
  it = profiles_.find({to, from});
  if (it == profiles_.end())
    throw Error(Errc::MissingSigma, "no profile for pair " + std::to_string(from) + "," + std::to_string(to));
  it->second.eval(-t, out);
}

double ProfileSet::min_tail_rate() const {
  double r = 1e300;
  for (const auto& [k, prof] : profiles_) r = std::min(r, prof.tail_rate);
  return profiles_.empty() ? 0.0 : r;
}

SigmaAssembly assemble_sigma(const Potential& p, const ConnectionOptions& opts) {
  const int N = p.num_wells();
  SigmaAssembly out;
  out.sigma = SurfaceTensionMatrix(N);
  for (int i = 0; i < N; ++i)
    for (int j = i + 1; j < N; ++j) {
      auto prof = solve_connection(p, i, j, opts);
      out.sigma.set(i, j, prof.energy);
      out.profiles.add(std::move(prof));
    }
  auto v = out.sigma.triangle_violations();
  if (!v.empty())
    throw Error(Errc::TriangleViolation, "strict triangle inequality fails for triple (" + std::to_string(v[0][0]) +
                                             "," + std::to_string(v[0][1]) + "," + std::to_string(v[0][2]) + ")");
  return out;
}

ManualSigma set_sigma_manual(int n, const std::vector<std::vector<double>>& entries) {
  if (n < 2 || static_cast<int>(entries.size()) != n)
    throw Error(Errc::DimensionMismatch, "sigma table must be n x n");
  ManualSigma out;
  out.sigma = SurfaceTensionMatrix(n);
  for (int i = 0; i < n; ++i) {
    if (static_cast<int>(entries[i].size()) != n) throw Error(Errc::DimensionMismatch, "sigma table must be n x n");
    if (entries[i][i] != 0.0) throw Error(Errc::InvalidArgument, "sigma diagonal must be zero");
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double a = entries[i][j], b = entries[j][i];
      if (!std::isfinite(a) || !std::isfinite(b)) throw Error(Errc::InvalidArgument, "non-finite sigma entry");
      if (a <= 0.0 || b <= 0.0)
        throw Error(Errc::NegativeEntry, "sigma(" + std::to_string(i) + "," + std::to_string(j) + ") not positive");
      if (std::abs(a - b) > 1e-12 * std::max(a, b)) throw Error(Errc::InvalidArgument, "sigma table not symmetric");
      out.sigma.set(i, j, a);
    }
  for (auto& t : out.sigma.triangle_violations())
    out.warnings.push_back("triangle inequality fails: sigma(" + std::to_string(t[0]) + "," + std::to_string(t[1]) +
                           ") + sigma(" + std::to_string(t[0]) + "," + std::to_string(t[2]) + ") <= sigma(" +
                           std::to_string(t[1]) + "," + std::to_string(t[2]) + ")");
  return out;
}

SurfaceTensionMatrix equal_sigma(int n, double s) {
  SurfaceTensionMatrix m(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) m.set(i, j, s);
  return m;
}

}  // namespace phasenet
