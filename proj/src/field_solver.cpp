#include "phasenet/field_solver.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "phasenet/errors.hpp"

namespace phasenet {

namespace {

double dotv(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

std::vector<int> interior_list(const DomainGrid& g) {
  std::vector<int> out;
  out.reserve(g.n_interior);
  for (int c = 0; c < g.size(); ++c)
    if (g.kind[c] == CellKind::Interior) out.push_back(c);
  return out;
}

// y = eps * L_D x on interior cells, x zero outside the interior.
void apply_laplacian(const DomainGrid& g, const std::vector<int>& intr, int m, double eps,
                     const std::vector<double>& x, std::vector<double>& y) {
  for (int c : intr) {
    const auto& nb = g.nbr[c];
    for (int k = 0; k < m; ++k) {
      double s = 4.0 * x[c * m + k] - x[nb[0] * m + k] - x[nb[1] * m + k] - x[nb[2] * m + k] - x[nb[3] * m + k];
      y[c * m + k] = eps * s;
    }
  }
}

struct Workspace {
  std::vector<double> r, z, d, q;
  explicit Workspace(size_t n) : r(n, 0.0), z(n, 0.0), d(n, 0.0), q(n, 0.0) {}
};

// Solves (eps L_D + shift I) x = b on the interior by conjugate gradients.
int solve_shifted(const DomainGrid& g, const std::vector<int>& intr, int m, double eps, double shift,
                  const std::vector<double>& b, std::vector<double>& x, double rtol, int max_it, Workspace& w) {
  std::fill(x.begin(), x.end(), 0.0);
  w.r = b;
  double b2 = dotv(b, b);
  if (b2 == 0.0) return 0;
  w.d = w.r;
  double rr = b2;
  int it = 0;
  for (; it < max_it; ++it) {
    apply_laplacian(g, intr, m, eps, w.d, w.q);
    for (int c : intr)
      for (int k = 0; k < m; ++k) w.q[c * m + k] += shift * w.d[c * m + k];
    double dq = dotv(w.d, w.q);
    double alpha = rr / dq;
    for (int c : intr)
      for (int k = 0; k < m; ++k) {
        x[c * m + k] += alpha * w.d[c * m + k];
        w.r[c * m + k] -= alpha * w.q[c * m + k];
      }
    double rr_new = dotv(w.r, w.r);
    if (rr_new <= rtol * rtol * b2) {
      ++it;
      break;
    }
    double beta = rr_new / rr;
    rr = rr_new;
    for (int c : intr)
      for (int k = 0; k < m; ++k) w.d[c * m + k] = w.r[c * m + k] + beta * w.d[c * m + k];
  }
  return it;
}

double max_field_norm(const std::vector<double>& u, int m) {
  double M = 0.0;
  const size_t n = u.size() / m;
  for (size_t c = 0; c < n; ++c) {
    double s = 0.0;
    for (int k = 0; k < m; ++k) s += u[c * m + k] * u[c * m + k];
    M = std::max(M, s);
  }
  return std::sqrt(M);
}

}  // namespace

double energy_of(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps) {
  const int m = p.dim();
  const double wfac = g.h * g.h / eps;
  double E = 0.0;
  for (int c = 0; c < g.size(); ++c) {
    std::span<const double> uc(u.data() + c * m, static_cast<size_t>(m));
    double e = wfac * p.value(uc);
    for (int dir : {0, 2}) {
      int q = g.nbr[c][dir];
      if (q < 0) continue;
      double d2 = 0.0;
      for (int k = 0; k < m; ++k) {
        double d = u[c * m + k] - u[q * m + k];
        d2 += d * d;
      }
      e += 0.5 * eps * d2;
    }
    E += e;
  }
  return E;
}

std::vector<double> cell_energy(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps) {
  const int m = p.dim();
  const double wfac = g.h * g.h / eps;
  std::vector<double> out(g.size(), 0.0);
  for (int c = 0; c < g.size(); ++c) {
    std::span<const double> uc(u.data() + c * m, static_cast<size_t>(m));
    out[c] += wfac * p.value(uc);
    for (int dir : {0, 2}) {
      int q = g.nbr[c][dir];
      if (q < 0) continue;
      double d2 = 0.0;
      for (int k = 0; k < m; ++k) {
        double d = u[c * m + k] - u[q * m + k];
        d2 += d * d;
      }
      out[c] += 0.25 * eps * d2;
      out[q] += 0.25 * eps * d2;
    }
  }
  return out;
}

void energy_gradient(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps,
                     std::vector<double>& grad) {
  const int m = p.dim();
  const double wfac = g.h * g.h / eps;
  grad.assign(u.size(), 0.0);
  std::vector<double> wz(m);
  for (int c = 0; c < g.size(); ++c) {
    if (g.kind[c] != CellKind::Interior) continue;
    std::span<const double> uc(u.data() + c * m, static_cast<size_t>(m));
    p.gradient(uc, wz);
    const auto& nb = g.nbr[c];
    for (int k = 0; k < m; ++k) {
      double lap = 4.0 * u[c * m + k] - u[nb[0] * m + k] - u[nb[1] * m + k] - u[nb[2] * m + k] - u[nb[3] * m + k];
      grad[c * m + k] = eps * lap + wfac * wz[k];
    }
  }
}

double el_residual(const DomainGrid& g, const std::vector<double>& u, const Potential& p, double eps) {
  std::vector<double> grad;
  energy_gradient(g, u, p, eps, grad);
  return eps / (g.h * g.h) * max_abs(grad);
}

std::vector<double> projection_seed(const DomainGrid& g, const BoundaryDatum& datum, const Potential& p) {
  const int m = p.dim();
  std::vector<double> u(static_cast<size_t>(g.size()) * m, 0.0);
  const int nb = static_cast<int>(g.boundary_cells.size());
  for (int c = 0; c < g.size(); ++c) {
    int src = c;
    if (g.kind[c] == CellKind::Interior && nb > 0) {
      Vec2 x = g.center(c);
      double s = g.domain.param(g.domain.project_to_boundary(x));
      auto it = std::lower_bound(g.boundary_param.begin(), g.boundary_param.end(), s);
      int b1 = static_cast<int>(it - g.boundary_param.begin()) % nb;
      int b0 = (b1 + nb - 1) % nb;
      src = norm(g.center(g.boundary_cells[b0]) - x) < norm(g.center(g.boundary_cells[b1]) - x)
                ? g.boundary_cells[b0]
                : g.boundary_cells[b1];
    }
    int w = 0;
    p.nearest_well(datum.at(src), &w);
    auto a = p.well(w);
    for (int k = 0; k < m; ++k) u[c * m + k] = a[k];
  }
  for (int c : g.boundary_cells)
    for (int k = 0; k < m; ++k) u[c * m + k] = datum.values[c * m + k];
  return u;
}

PhaseField minimize(const DomainGrid& g, const BoundaryDatum& datum, const Potential& p, double eps,
                    const SolverOptions& opts, const std::vector<double>* init) {
  const int m = p.dim();
  if (datum.m != m) throw Error(Errc::DimensionMismatch, "datum and potential dimensions differ");
  if (!(eps >= 2.0 * g.h * (1.0 - 1e-12)))
    throw Error(Errc::InvalidArgument, "epsilon must be at least twice the grid spacing");
  const size_t n = static_cast<size_t>(g.size()) * m;
  const double tol = opts.tol > 0.0 ? opts.tol : 1e-6 / eps;
  const double h2 = g.h * g.h;
  const double wfac = h2 / eps;
  const double res_scale = eps / h2;
  const double blowup = 2.0 * (p.max_well_norm() + 1.0);

  PhaseField f;
  f.m = m;
  f.epsilon = eps;
  f.u = init ? *init : projection_seed(g, datum, p);
  if (f.u.size() != n) throw Error(Errc::DimensionMismatch, "initial field has wrong size");
  for (int c : g.boundary_cells)
    for (int k = 0; k < m; ++k) f.u[c * m + k] = datum.values[c * m + k];

  double S = opts.stab;
  if (!(S > 0.0)) {
    std::vector<double> H(m * m);
    for (int i = 0; i < p.num_wells(); ++i) {
      p.hessian(p.well(i), H);
      Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(H.data(), m, m);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
      S = std::max(S, es.eigenvalues().maxCoeff());
    }
  }

  const auto intr = interior_list(g);
  std::vector<double> grad(n), step(n), trial(n), hess(static_cast<size_t>(g.size()) * m * m, 0.0);
  std::vector<double> diag(n, 1.0);
  Workspace w(n);

  double E = energy_of(g, f.u, p, eps);
  energy_gradient(g, f.u, p, eps, grad);
  double res = res_scale * max_abs(grad);
  bool flow = true;
  int flow_steps = 0;
  int stalls = 0;
  auto log = [&](int it, const char* phase) {
    if (opts.log) f.log.push_back({it, phase, E, res});
  };
  log(0, "start");

  auto check_blowup = [&](const std::vector<double>& u) {
    double M = max_field_norm(u, m);
    if (!(M <= blowup)) throw Error(Errc::BlowUp, "field norm exceeded 2(max|a|+1)");
  };

  int it = 0;
  for (; it < opts.max_iter; ++it) {
    if (res < tol) {
      f.converged = true;
      break;
    }
    bool accepted = false;
    if (!flow && opts.newton) {
      // Newton step with truncated preconditioned CG (Steihaug)
      std::vector<double> H(m * m);
      for (int c : intr) {
        p.hessian(std::span<const double>(f.u.data() + c * m, static_cast<size_t>(m)),
                  std::span<double>(hess.data() + static_cast<size_t>(c) * m * m, static_cast<size_t>(m * m)));
        for (int k = 0; k < m; ++k)
          diag[c * m + k] = 4.0 * eps + wfac * std::max(hess[static_cast<size_t>(c) * m * m + k * m + k], 0.0);
      }
      auto hv = [&](const std::vector<double>& x, std::vector<double>& y) {
        apply_laplacian(g, intr, m, eps, x, y);
        for (int c : intr) {
          const double* Hc = hess.data() + static_cast<size_t>(c) * m * m;
          for (int r = 0; r < m; ++r) {
            double s = 0.0;
            for (int k = 0; k < m; ++k) s += Hc[r * m + k] * x[c * m + k];
            y[c * m + r] += wfac * s;
          }
        }
      };
      std::fill(step.begin(), step.end(), 0.0);
      for (int c : intr)
        for (int k = 0; k < m; ++k) {
          w.r[c * m + k] = -grad[c * m + k];
          w.z[c * m + k] = w.r[c * m + k] / diag[c * m + k];
        }
      w.d = w.z;
      double rz = dotv(w.r, w.z);
      const double r0 = std::sqrt(dotv(w.r, w.r));
      const double eta = std::min(0.1, std::sqrt(res / (res + 1.0)));
      for (int cg = 0; cg < opts.cg_max; ++cg) {
        hv(w.d, w.q);
        double dq = dotv(w.d, w.q);
        if (dq <= 0.0) {
          if (cg == 0) step = w.d;
          break;
        }
        double alpha = rz / dq;
        for (int c : intr)
          for (int k = 0; k < m; ++k) {
            step[c * m + k] += alpha * w.d[c * m + k];
            w.r[c * m + k] -= alpha * w.q[c * m + k];
          }
        if (std::sqrt(dotv(w.r, w.r)) <= eta * r0) break;
        for (int c : intr)
          for (int k = 0; k < m; ++k) w.z[c * m + k] = w.r[c * m + k] / diag[c * m + k];
        double rz_new = dotv(w.r, w.z);
        double beta = rz_new / rz;
        rz = rz_new;
        for (int c : intr)
          for (int k = 0; k < m; ++k) w.d[c * m + k] = w.z[c * m + k] + beta * w.d[c * m + k];
      }
      double slope = dotv(grad, step);
      if (slope < 0.0) {
        double t = 1.0;
        for (int ls = 0; ls < 40; ++ls) {
          for (size_t q = 0; q < n; ++q) trial[q] = f.u[q] + t * step[q];
          double Et = energy_of(g, trial, p, eps);
          if (Et <= E + 1e-4 * t * slope) {
            accepted = true;
            E = Et;
            break;
          }
          if (std::abs(Et - E) <= 1e-14 * std::max(1.0, std::abs(E))) {
            // roundoff plateau: accept if the residual improves
            std::vector<double> gt;
            energy_gradient(g, trial, p, eps, gt);
            if (res_scale * max_abs(gt) < res) {
              accepted = true;
              E = Et;
              break;
            }
          }
          t *= 0.5;
        }
      }
      if (accepted) {
        check_blowup(trial);
        f.u.swap(trial);
        energy_gradient(g, f.u, p, eps, grad);
        res = res_scale * max_abs(grad);
        log(it + 1, "newton");
        continue;
      }
      ++stalls;
      if (stalls > 50) break;
    }

    // convex-splitting step: (eps L_D + h^2 S / eps) delta = -grad
    for (size_t q = 0; q < n; ++q) trial[q] = -grad[q];
    bool ok = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      solve_shifted(g, intr, m, eps, wfac * S, trial, step, 1e-8, opts.cg_max, w);
      std::vector<double>& cand = w.q;
      for (size_t q = 0; q < n; ++q) cand[q] = f.u[q] + step[q];
      double Et = energy_of(g, cand, p, eps);
      if (Et <= E) {
        double rel = (E - Et) / std::max(std::abs(E), 1e-300);
        E = Et;
        check_blowup(cand);
        f.u.swap(cand);
        ok = true;
        ++flow_steps;
        if (rel < opts.flow_switch || flow_steps >= opts.max_flow_steps) flow = false;
        break;
      }
      S *= 2.0;
    }
    if (!ok) break;
    energy_gradient(g, f.u, p, eps, grad);
    res = res_scale * max_abs(grad);
    log(it + 1, "flow");
  }
  f.iterations = it;
  f.energy = E;
  f.residual = res;
  f.max_norm = max_field_norm(f.u, m);
  if (!f.converged)
    throw Error(Errc::NoConvergence, "residual " + std::to_string(res) + " above tolerance " + std::to_string(tol) +
                                         " after " + std::to_string(it) + " iterations");
  return f;
}

MultiStartResult minimize_multistart(const DomainGrid& g, const BoundaryDatum& datum, const Potential& p, double eps,
                                     const SolverOptions& opts,
                                     const std::vector<std::pair<std::string, std::vector<double>>>& seeds) {
  if (seeds.empty()) throw Error(Errc::InvalidArgument, "multi-start needs at least one seed");
  MultiStartResult out;
  bool have = false;
  for (const auto& [name, u0] : seeds) {
    PhaseField f = minimize(g, datum, p, eps, opts, &u0);
    f.seed = name;
    out.energies.emplace_back(name, f.energy);
    if (!have || f.energy < out.best.energy) {
      out.best = std::move(f);
      have = true;
    }
  }
  return out;
}

}  // namespace phasenet
