#pragma once

#include <string>
#include <vector>

#include "phasenet/network.hpp"

namespace phasenet {

struct OptimizeOptions {
  double tol = 1e-10;        // gradient norm at convergence, relative to sigma_max
  double merge_tol = 1e-7;   // arcs shorter than merge_tol * R collapse
  double eta_start = 1e-2;   // smoothing continuation, relative to R
  double eta_end = 1e-13;
  int max_iter = 400;        // Newton iterations per continuation stage
  double flat_tol = 1e-6;    // flat Hessian eigenvalue threshold, times sigma_max / R
  // End nodes listed here slide along the boundary; all others are pinned.
  std::vector<int> sliding;
};

struct OptimizationResult {
  Network net;
  double F_value = 0.0;
  bool converged = false;
  bool collapsed = false;  // some arcs merged into degenerate ones
  double grad_norm = 0.0;
  int iterations = 0;
  std::vector<double> hessian_spectrum;  // ascending
  int degenerate_directions = 0;
};

// Minimizes F over node positions with the topology of `init`. Arcs are
// straightened; branch nodes stay in the closed domain.
OptimizationResult local_minimize(const Network& init, const SurfaceTensionMatrix& sigma,
                                  const OptimizeOptions& opts = {});

// Gradient and Hessian of F over the free (non-end) node clusters of a
// straight network, degenerate arcs contracted.
struct ReducedModel {
  std::vector<std::vector<int>> clusters;  // free clusters: node lists
  std::vector<double> grad;
  std::vector<double> hessian;  // row-major, 2 per cluster
  int dim() const { return static_cast<int>(grad.size()); }
};
ReducedModel reduced_model(const Network& net, const SurfaceTensionMatrix& sigma);

struct NondegeneracyCertificate {
  bool pass = false;
  double c0 = 0.0;                  // min over d of the per-d minimum
  std::vector<double> c0_per_d;
  int flat_directions = 0;
  std::vector<std::vector<double>> flat_vectors;  // in reduced coordinates
  std::vector<double> spectrum;
};

// Samples perturbations of the free nodes (end points fixed) at network
// distance d and reports min (F' - F) / d^2.
NondegeneracyCertificate nondegeneracy_probe(const Network& net, const SurfaceTensionMatrix& sigma,
                                             const std::vector<double>& d_values, int samples = 64,
                                             unsigned seed = 11, double flat_tol = 1e-6);

}  // namespace phasenet
