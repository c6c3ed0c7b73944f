#include "phasenet/optimizer.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "phasenet/errors.hpp"

namespace phasenet {

namespace {

enum class VarKind { Fixed, Slide, Free };

Vec2 outward_normal(const Domain& D, Vec2 p) {
  if (D.kind() == Domain::Kind::Disk) return unit(p - D.center());
  Vec2 lo = D.lo(), hi = D.hi();
  double d[4] = {p.x - lo.x, hi.x - p.x, p.y - lo.y, hi.y - p.y};
  int k = static_cast<int>(std::min_element(d, d + 4) - d);
  static const Vec2 n[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
  return n[k];
}

// Positions of node clusters as functions of a variable vector.
struct Model {
  const Domain* D = nullptr;
  std::vector<VarKind> kind;   // per cluster
  std::vector<int> offset;     // first variable of the cluster
  std::vector<Vec2> base;      // fixed position (Fixed clusters)
  struct Edge {
    int a, b;
    double sigma;
  };
  std::vector<Edge> edges;
  int nvar = 0;

  Vec2 pos(const Eigen::VectorXd& v, int c) const {
    switch (kind[c]) {
      case VarKind::Fixed: return base[c];
      case VarKind::Slide: return D->point_at(v[offset[c]]);
      default: return {v[offset[c]], v[offset[c] + 1]};
    }
  }

  // Smoothed weighted length sum sigma (sqrt(L^2 + eta^2) - eta).
  double eval(const Eigen::VectorXd& v, double eta, Eigen::VectorXd* g, Eigen::MatrixXd* H) const {
    int nc = static_cast<int>(kind.size());
    std::vector<Vec2> x(nc);
    for (int c = 0; c < nc; ++c) x[c] = pos(v, c);
    // Node-space gradient and Hessian blocks, then the chain rule.
    std::vector<Vec2> gx(nc, Vec2{});
    Eigen::MatrixXd Hx;
    if (H) Hx = Eigen::MatrixXd::Zero(2 * nc, 2 * nc);
    double F = 0.0;
    for (const auto& e : edges) {
      Vec2 d = x[e.a] - x[e.b];
      double L2 = dot(d, d) + eta * eta;
      double L = std::sqrt(L2);
      F += e.sigma * (L - eta);
      if (L <= 0) continue;
      Vec2 f = (e.sigma / L) * d;
      gx[e.a] = gx[e.a] + f;
      gx[e.b] = gx[e.b] - f;
      if (H) {
        double dd[2] = {d.x, d.y};
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) {
            double h = e.sigma * ((i == j ? 1.0 : 0.0) / L - dd[i] * dd[j] / (L2 * L));
            Hx(2 * e.a + i, 2 * e.a + j) += h;
            Hx(2 * e.b + i, 2 * e.b + j) += h;
            Hx(2 * e.a + i, 2 * e.b + j) -= h;
            Hx(2 * e.b + i, 2 * e.a + j) -= h;
          }
      }
    }
    if (!g && !H) return F;
    // Jacobian J (2nc x nvar) and curvature terms for sliding clusters.
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * nc, nvar);
    for (int c = 0; c < nc; ++c) {
      if (kind[c] == VarKind::Free) {
        J(2 * c, offset[c]) = 1;
        J(2 * c + 1, offset[c] + 1) = 1;
      } else if (kind[c] == VarKind::Slide) {
        Vec2 t = D->tangent_at(v[offset[c]]);
        J(2 * c, offset[c]) = t.x;
        J(2 * c + 1, offset[c]) = t.y;
      }
    }
    Eigen::VectorXd gxv(2 * nc);
    for (int c = 0; c < nc; ++c) {
      gxv[2 * c] = gx[c].x;
      gxv[2 * c + 1] = gx[c].y;
    }
    if (g) *g = J.transpose() * gxv;
    if (H) {
      *H = J.transpose() * Hx * J;
      for (int c = 0; c < nc; ++c)
        if (kind[c] == VarKind::Slide && D->kind() == Domain::Kind::Disk) {
          Vec2 curv = -(x[c] - D->center()) / (D->radius() * D->radius());
          (*H)(offset[c], offset[c]) += dot(gx[c], curv);
        }
    }
    return F;
  }

  // Keep free clusters inside the closed domain.
  void project(Eigen::VectorXd& v) const {
    for (size_t c = 0; c < kind.size(); ++c)
      if (kind[c] == VarKind::Free) {
        Vec2 p{v[offset[c]], v[offset[c] + 1]};
        if (!D->contains(p)) {
          p = D->clamp_inside(p);
          v[offset[c]] = p.x;
          v[offset[c] + 1] = p.y;
        }
      }
  }

  // Gradient with outward components removed at boundary-touching free clusters.
  double projected_norm(const Eigen::VectorXd& v, const Eigen::VectorXd& g) const {
    double m = 0.0;
    for (size_t c = 0; c < kind.size(); ++c) {
      if (kind[c] == VarKind::Fixed) continue;
      if (kind[c] == VarKind::Slide) {
        m = std::max(m, std::abs(g[offset[c]]));
        continue;
      }
      Vec2 gc{g[offset[c]], g[offset[c] + 1]};
      Vec2 p{v[offset[c]], v[offset[c] + 1]};
      if (D->boundary_distance(p) <= 1e-13 * D->scale()) {
        Vec2 out = outward_normal(*D, p);
        double gn = dot(gc, out);
        if (gn < 0) gc = gc - gn * out;  // descent would leave the domain
      }
      m = std::max(m, norm(gc));
    }
    return m;
  }

  Eigen::VectorXd initial(const std::vector<Vec2>& x) const {
    Eigen::VectorXd v(nvar);
    for (size_t c = 0; c < kind.size(); ++c) {
      if (kind[c] == VarKind::Free) {
        v[offset[c]] = x[c].x;
        v[offset[c] + 1] = x[c].y;
      } else if (kind[c] == VarKind::Slide) {
        v[offset[c]] = D->param(x[c]);
      }
    }
    return v;
  }
};

int find(std::vector<int>& p, int x) {
  while (p[x] != x) x = p[x] = p[p[x]];
  return x;
}

struct Clustering {
  std::vector<int> of_node;
  std::vector<std::vector<int>> members;
};

Clustering cluster_nodes(const Network& net, bool contract) {
  int n = static_cast<int>(net.nodes.size());
  std::vector<int> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  if (contract)
    for (const auto& a : net.arcs)
      if (a.degenerate) parent[find(parent, a.nodes[0])] = find(parent, a.nodes[1]);
  Clustering cl;
  cl.of_node.assign(n, -1);
  std::vector<int> id(n, -1);
  for (int v = 0; v < n; ++v) {
    int r = find(parent, v);
    if (id[r] < 0) {
      id[r] = static_cast<int>(cl.members.size());
      cl.members.emplace_back();
    }
    cl.of_node[v] = id[r];
    cl.members[id[r]].push_back(v);
  }
  return cl;
}

Model build_model(const Network& net, const SurfaceTensionMatrix& sigma, const Clustering& cl,
                  const std::vector<int>& sliding) {
  Model m;
  m.D = &net.domain;
  int nc = static_cast<int>(cl.members.size());
  m.kind.assign(nc, VarKind::Free);
  m.offset.assign(nc, -1);
  m.base.assign(nc, Vec2{});
  for (int c = 0; c < nc; ++c) {
    for (int v : cl.members[c])
      if (net.nodes[v].kind == NodeKind::End) {
        bool slides = std::find(sliding.begin(), sliding.end(), v) != sliding.end();
        if (m.kind[c] != VarKind::Fixed) m.kind[c] = slides ? VarKind::Slide : VarKind::Fixed;
        m.base[c] = net.nodes[v].pos;
      }
    if (m.kind[c] == VarKind::Free) {
      m.offset[c] = m.nvar;
      m.nvar += 2;
    } else if (m.kind[c] == VarKind::Slide) {
      m.offset[c] = m.nvar;
      m.nvar += 1;
    }
  }
  for (const auto& a : net.arcs) {
    int ca = cl.of_node[a.nodes[0]], cb = cl.of_node[a.nodes[1]];
    if (ca == cb) continue;
    m.edges.push_back({ca, cb, sigma(a.phases[0], a.phases[1])});
  }
  return m;
}

std::vector<Vec2> cluster_positions(const Network& net, const Clustering& cl) {
  std::vector<Vec2> x(cl.members.size());
  for (size_t c = 0; c < cl.members.size(); ++c) {
    Vec2 s{};
    bool end = false;
    for (int v : cl.members[c])
      if (net.nodes[v].kind == NodeKind::End) {
        x[c] = net.nodes[v].pos;
        end = true;
      } else {
        s = s + net.nodes[v].pos;
      }
    if (!end) x[c] = s / static_cast<double>(cl.members[c].size());
  }
  return x;
}

// Levenberg-Marquardt with a monotone acceptance test.
int lm_solve(const Model& m, Eigen::VectorXd& v, double eta, double gtol, int max_iter, double scale_hint) {
  if (m.nvar == 0) return 0;
  double lambda = 1e-6 * scale_hint;
  int it = 0;
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  double F = m.eval(v, eta, &g, &H);
  for (; it < max_iter; ++it) {
    if (m.projected_norm(v, g) < gtol) break;
    bool accepted = false;
    while (lambda < 1e30) {
      Eigen::MatrixXd A = H;
      A.diagonal().array() += lambda;
      Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
      Eigen::VectorXd step = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !step.allFinite() || ldlt.vectorD().minCoeff() <= 0) {
        lambda = std::max(lambda * 10, 1e-12);
        continue;
      }
      Eigen::VectorXd trial = v + step;
      m.project(trial);
      double Ft = m.eval(trial, eta, nullptr, nullptr);
      if (Ft < F) {
        v = trial;
        lambda = std::max(lambda / 5, 1e-14 * scale_hint);
        accepted = true;
        break;
      }
      lambda *= 5;
    }
    if (!accepted) break;
    F = m.eval(v, eta, &g, &H);
  }
  return it;
}

double sigma_max_of(const Network& net, const SurfaceTensionMatrix& sigma) {
  double s = 0.0;
  for (const auto& a : net.arcs) s = std::max(s, sigma(a.phases[0], a.phases[1]));
  return s > 0 ? s : 1.0;
}

void apply_positions(Network& net, const Clustering& cl, const Model& m, const Eigen::VectorXd& v) {
  for (size_t c = 0; c < cl.members.size(); ++c) {
    Vec2 p = m.pos(v, static_cast<int>(c));
    for (int n : cl.members[c]) net.nodes[n].pos = p;
  }
}

}  // namespace

ReducedModel reduced_model(const Network& net, const SurfaceTensionMatrix& sigma) {
  Clustering cl = cluster_nodes(net, true);
  Model m = build_model(net, sigma, cl, {});
  Eigen::VectorXd v = m.initial(cluster_positions(net, cl));
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  m.eval(v, 0.0, &g, &H);
  ReducedModel r;
  for (size_t c = 0; c < cl.members.size(); ++c)
    if (m.kind[c] == VarKind::Free) r.clusters.push_back(cl.members[c]);
  r.grad.assign(g.data(), g.data() + g.size());
  r.hessian.resize(static_cast<size_t>(m.nvar) * m.nvar);
  for (int i = 0; i < m.nvar; ++i)
    for (int j = 0; j < m.nvar; ++j) r.hessian[static_cast<size_t>(i) * m.nvar + j] = H(i, j);
  return r;
}

OptimizationResult local_minimize(const Network& init, const SurfaceTensionMatrix& sigma, const OptimizeOptions& opts) {
  const double R = init.domain.scale();
  Network net = init;
  net.straighten();
  double smax = sigma_max_of(net, sigma);
  OptimizationResult res;

  // Smoothed continuation on individual nodes.
  Clustering solo = cluster_nodes(net, false);
  Model m = build_model(net, sigma, solo, opts.sliding);
  Eigen::VectorXd v = m.initial(cluster_positions(net, solo));
  for (double eta = opts.eta_start; eta >= opts.eta_end * 0.999; eta /= 10) {
    double gtol = eta > opts.eta_end * 1.001 ? 1e-9 * smax : opts.tol * smax;
    res.iterations += lm_solve(m, v, eta * R, gtol, opts.max_iter, smax / R);
  }
  apply_positions(net, solo, m, v);

  // Merge arcs that collapsed.
  {
    int n = static_cast<int>(net.nodes.size());
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    for (const auto& a : net.arcs)
      if (norm(net.nodes[a.nodes[0]].pos - net.nodes[a.nodes[1]].pos) < opts.merge_tol * R) {
        parent[find(parent, a.nodes[0])] = find(parent, a.nodes[1]);
        res.collapsed = true;
      }
    std::vector<std::vector<int>> groups(n);
    for (int i = 0; i < n; ++i) groups[find(parent, i)].push_back(i);
    for (const auto& grp : groups) {
      if (grp.size() < 2) continue;
      Vec2 s{};
      int end = -1;
      for (int i : grp) {
        s = s + net.nodes[i].pos;
        if (net.nodes[i].kind == NodeKind::End) end = i;
      }
      Vec2 p = end >= 0 ? net.nodes[end].pos : s / static_cast<double>(grp.size());
      for (int i : grp) net.nodes[i].pos = p;
    }
    net.straighten();
  }

  // Polish the contracted problem without smoothing.
  Clustering cl = cluster_nodes(net, true);
  Model rm = build_model(net, sigma, cl, opts.sliding);
  Eigen::VectorXd rv = rm.initial(cluster_positions(net, cl));
  if (rm.nvar > 0) {
    res.iterations += lm_solve(rm, rv, 0.0, opts.tol * smax, 50, smax / R);
    apply_positions(net, cl, rm, rv);
    net.straighten();
  }
  Eigen::VectorXd g;
  Eigen::MatrixXd H;
  rm.eval(rv, 0.0, &g, &H);
  res.grad_norm = rm.nvar > 0 ? rm.projected_norm(rv, g) : 0.0;
  res.converged = res.grad_norm < opts.tol * smax * 10;
  if (rm.nvar > 0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    res.hessian_spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + rm.nvar);
    for (double ev : res.hessian_spectrum)
      if (ev < opts.flat_tol * smax / R) ++res.degenerate_directions;
  }
  res.net = net;
  res.F_value = energy_F(net, sigma);
  return res;
}

NondegeneracyCertificate nondegeneracy_probe(const Network& net0, const SurfaceTensionMatrix& sigma,
                                             const std::vector<double>& d_values, int samples, unsigned seed,
                                             double flat_tol) {
  NondegeneracyCertificate cert;
  Network net = net0;
  net.straighten();
  const double R = net.domain.scale();
  double smax = sigma_max_of(net, sigma);
  double F0 = energy_F(net, sigma);

  // Directions over every branch node individually; Hessian eigenvectors of
  // the contracted problem are lifted to their clusters.
  std::vector<int> branch;
  for (int i = 0; i < static_cast<int>(net.nodes.size()); ++i)
    if (net.nodes[i].kind == NodeKind::Branch) branch.push_back(i);
  int nb = static_cast<int>(branch.size());
  std::vector<int> slot(net.nodes.size(), -1);
  for (int k = 0; k < nb; ++k) slot[branch[k]] = k;

  ReducedModel rmod = reduced_model(net, sigma);
  std::vector<std::vector<double>> dirs;
  int nr = rmod.dim();
  if (nr > 0) {
    Eigen::MatrixXd H = Eigen::Map<Eigen::MatrixXd>(rmod.hessian.data(), nr, nr);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    cert.spectrum.assign(es.eigenvalues().data(), es.eigenvalues().data() + nr);
    for (int e = 0; e < nr; ++e) {
      std::vector<double> lifted(2 * nb, 0.0);
      for (size_t c = 0; c < rmod.clusters.size(); ++c)
        for (int n : rmod.clusters[c]) {
          lifted[2 * slot[n]] = es.eigenvectors()(2 * c, e);
          lifted[2 * slot[n] + 1] = es.eigenvectors()(2 * c + 1, e);
        }
      if (es.eigenvalues()[e] < flat_tol * smax / R) {
        ++cert.flat_directions;
        std::vector<double> ev(es.eigenvectors().col(e).data(), es.eigenvectors().col(e).data() + nr);
        cert.flat_vectors.push_back(ev);
      }
      dirs.push_back(lifted);
      std::vector<double> neg = lifted;
      for (auto& x : neg) x = -x;
      dirs.push_back(neg);
    }
  }
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int s = 0; s < samples && nb > 0; ++s) {
    std::vector<double> r(2 * nb);
    for (auto& x : r) x = nd(rng);
    dirs.push_back(r);
  }
  auto perturbed = [&](const std::vector<double>& dir, double t) {
    Network p = net;
    for (int k = 0; k < nb; ++k) {
      Vec2 q = p.nodes[branch[k]].pos + t * Vec2{dir[2 * k], dir[2 * k + 1]};
      p.nodes[branch[k]].pos = p.domain.clamp_inside(q);
    }
    p.straighten();
    return p;
  };
  std::vector<int> ident(net.arcs.size());
  std::iota(ident.begin(), ident.end(), 0);
  cert.c0 = std::numeric_limits<double>::infinity();
  for (double d : d_values) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& dir : dirs) {
      Network p1 = perturbed(dir, d);
      double d1 = distance(net, p1, ident);
      if (d1 <= 0) continue;
      // Distance is linear in the amplitude for straight arcs; rescale once.
      Network p = perturbed(dir, d * d / d1);
      double dd = distance(net, p, ident);
      if (dd <= 0) continue;
      best = std::min(best, (energy_F(p, sigma) - F0) / (dd * dd));
    }
    cert.c0_per_d.push_back(best);
    cert.c0 = std::min(cert.c0, best);
  }
  cert.pass = std::isfinite(cert.c0) && cert.c0 > flat_tol * smax / R;
  return cert;
}

}  // namespace phasenet
