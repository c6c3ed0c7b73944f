#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace phasenet {

using WellPoint = std::vector<double>;

// Multi-well potential W: R^m -> R with a finite zero set.
class Potential {
public:
  using ScalarFn = std::function<double(std::span<const double>)>;
  using GradFn = std::function<void(std::span<const double>, std::span<double>)>;

  Potential() = default;

  int dim() const { return m_; }
  int num_wells() const { return static_cast<int>(wells_.size()) / std::max(m_, 1); }
  std::span<const double> well(int i) const { return {wells_.data() + i * m_, static_cast<size_t>(m_)}; }
  std::vector<WellPoint> wells() const;
  const std::string& name() const { return name_; }
  bool analytic() const { return !grad_; }

  double value(std::span<const double> z) const;
  void gradient(std::span<const double> z, std::span<double> g) const;
  // Row-major m x m.
  void hessian(std::span<const double> z, std::span<double> H) const;

  // Index of the nearest well and the distance to it.
  double nearest_well(std::span<const double> z, int* which = nullptr) const;
  double max_well_norm() const;

  friend Potential make_product_potential(const std::vector<WellPoint>&, double);
  friend Potential make_double_well();
  friend Potential make_custom_potential(const std::vector<WellPoint>&, ScalarFn, GradFn, std::string);

private:
  int m_ = 0;
  std::vector<double> wells_;
  double scale_ = 1.0;
  ScalarFn value_;
  GradFn grad_;
  std::string name_;
};

// W(z) = scale * prod_a |z - a|^2 with analytic derivatives.
Potential make_product_potential(const std::vector<WellPoint>& wells, double scale = 1.0);

// W(u) = (1 - u^2)^2 / 4, the product potential with wells -1, 1 and scale 1/4.
Potential make_double_well();

// User-supplied W; gradient by central differences when grad is empty.
Potential make_custom_potential(const std::vector<WellPoint>& wells, Potential::ScalarFn W,
                                Potential::GradFn grad = {}, std::string name = "custom");

struct InvariantReport {
  bool ok = true;
  std::vector<std::string> failures;
  double min_hessian_eig = 0.0;
};

InvariantReport check_invariants(const Potential& p, int samples = 2000, unsigned seed = 7);

struct WellConstants {
  double d0 = 0.0;
  double delta0 = 0.0;
  double M_prime = 0.0;
  // Minimum of W over sampled z with |z| <= M' and distance to A at least delta.
  double min_W_outside(double delta) const;
  // Largest c with W >= c^2 delta^2 / 2 on the sampled admissible set.
  double cW(double delta) const;

  std::vector<double> sample_dist;  // sorted descending
  std::vector<double> suffix_min_W;  // min W over samples with dist >= sample_dist[i]
};

struct ConstantsOptions {
  int points_per_axis = 201;
  int directions = 64;
  int radial_samples = 4000;
};

WellConstants derive_constants(const Potential& p, double M_prime, const ConstantsOptions& opts = {});

double min_hessian_eigenvalue(const Potential& p, int well);

}  // namespace phasenet
