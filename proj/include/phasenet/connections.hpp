#pragma once

#include <array>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "phasenet/potential.hpp"

namespace phasenet {

// Minimizing 1D connection from well_from (t = -T) to well_to (t = +T),
// recentred so that t = 0 is equidistant from both wells.
struct ConnectionProfile {
  int well_from = 0;
  int well_to = 1;
  int m = 1;
  double T = 20.0;
  double dt = 0.0;
  std::vector<double> samples;  // n_pts * m
  double energy = 0.0;          // sigma = 2 * kinetic
  double kinetic = 0.0;
  double potential = 0.0;
  double action = 0.0;
  double shift = 0.0;           // recentring offset applied to t
  double tail_rate = 0.0;       // min exponential rate at both ends
  int iterations = 0;

  int n_pts() const { return static_cast<int>(samples.size()) / m; }
  double t_at(int i) const { return -T + i * dt - shift; }
  // Linear interpolation in t; clamped to the wells outside the window.
  void eval(double t, std::span<double> out) const;
};

struct ConnectionOptions {
  double T = 20.0;
  int n_pts = 4001;
  int max_iter = 200000;
  double grad_tol = 1e-9;
  int bumps = 4;  // perpendicular multi-start amplitudes for m >= 2
};

ConnectionProfile solve_connection(const Potential& p, int i, int j, const ConnectionOptions& opts = {});

// Discrete action sum (|du/dt|^2/2 + W(midpoint)) dt of sampled values.
double discrete_action(const Potential& p, std::span<const double> samples, int m, double dt,
                       double* kinetic = nullptr, double* potential = nullptr);

class SurfaceTensionMatrix {
public:
  SurfaceTensionMatrix() = default;
  explicit SurfaceTensionMatrix(int n);
  int n() const { return n_; }
  double operator()(int i, int j) const { return s_[i * n_ + j]; }
  void set(int i, int j, double v);
  double max_entry() const;
  // Triples (i,j,k) with sigma_ij + sigma_ik <= sigma_jk.
  std::vector<std::array<int, 3>> triangle_violations() const;
  std::vector<std::vector<double>> rows() const;

private:
  int n_ = 0;
  std::vector<double> s_;
};

class ProfileSet {
public:
  void add(ConnectionProfile prof);
  bool has(int a, int b) const;
  // u_{from,to}(t): from at -inf, to at +inf.
  void eval(int from, int to, double t, std::span<double> out) const;
  const ConnectionProfile& get(int a, int b) const;
  double min_tail_rate() const;
  const std::map<std::pair<int, int>, ConnectionProfile>& all() const { return profiles_; }

private:
  std::map<std::pair<int, int>, ConnectionProfile> profiles_;
};

struct SigmaAssembly {
  SurfaceTensionMatrix sigma;
  ProfileSet profiles;
};

// Solves every pair; throws TriangleViolation when the strict triangle
// inequality fails.
SigmaAssembly assemble_sigma(const Potential& p, const ConnectionOptions& opts = {});

struct ManualSigma {
  SurfaceTensionMatrix sigma;
  std::vector<std::string> warnings;
};

ManualSigma set_sigma_manual(int n, const std::vector<std::vector<double>>& entries);

// Convenience: all off-diagonal entries equal to s.
SurfaceTensionMatrix equal_sigma(int n, double s);

}  // namespace phasenet
