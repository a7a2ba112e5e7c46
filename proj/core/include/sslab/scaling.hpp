#pragma once

#include <memory>
#include <vector>

#include "sslab/geometry.hpp"
#include "sslab/words.hpp"

namespace sslab {

// H(x,r) = H_0(x, r/Rbar), where H_0 interpolates zeta_{omega(n)} linearly
// on [theta_{omega(n)}, theta_{omega(n-1)}) and equals r^{a_*} for r >= 1.
class ScalingFunction {
 public:
  ScalingFunction(Tuple theta, Tuple zeta, double diameter = 1.0, std::shared_ptr<const FractalSystem> sys = nullptr);

  const Tuple& theta() const { return theta_; }
  const Tuple& zeta() const { return zeta_; }
  double diameter() const { return diameter_; }
  const Exponents& exponents() const { return exp_; }
  const FractalSystem* system() const { return sys_.get(); }
  std::shared_ptr<const FractalSystem> system_handle() const { return sys_; }

  double h0(const AddressStream& omega, double r) const;
  double h0_inverse(const AddressStream& omega, double t) const;
  double operator()(const PointOnFractal& x, double r) const { return h0(x.address, r / diameter_); }
  double inverse(const PointOnFractal& x, double t) const { return diameter_ * h0_inverse(x.address, t); }

 private:
  Tuple theta_, zeta_;
  double diameter_;
  Exponents exp_;
  std::shared_ptr<const FractalSystem> sys_;
};

double h0_eval(const ScalingFunction& sf, const AddressStream& omega, double r);
double h_eval(const ScalingFunction& sf, const PointOnFractal& x, double r);
double h_inverse(const ScalingFunction& sf, const PointOnFractal& x, double t);

// Step-3 and Step-4 constants of the construction.
double theory_c1(const Tuple& theta, const Tuple& zeta);
double theory_c2(const Tuple& theta, const Tuple& zeta, double c_av, double l2, double c_cp);

struct EnvelopeSample {
  PointOnFractal x, y;
  double r = 0.0, R = 0.0;  // normalised radii, r <= R, d(x,y) <= Rbar R
};

struct EnvelopeResult {
  double c1_empirical = 1.0;  // worst factor in C1^{-1}(R/r)^{a_*} <= H0(x,R)/H0(x,r) <= C1 (R/r)^{a^*}
  double c2_empirical = 1.0;  // worst max(H0(x,R)/H0(y,R), inverse)
  double c1_theory = 0.0;
  double c2_theory = 0.0;
  Exponents exponents;
};

EnvelopeResult scaling_envelope(const ScalingFunction& sf, const std::vector<EnvelopeSample>& samples, double c_av,
                                double l2, double c_cp);

struct WalkExponents {
  double beta1 = 0.0, beta4 = 0.0, beta_lower = 0.0, beta_upper = 0.0;
};

// beta_i = ln psi_i / ln rho_i with psi = (p1 b, p1 b, p1 b, p4 s).
WalkExponents walk_exponents(double lambda, double s, double b, double p1, double p4);

// The K_lambda scaling function W with zeta = psi and theta = rho.
struct WFunction {
  ScalingFunction w;
  Tuple psi;
  WalkExponents beta;
};

WFunction build_w(double lambda, double s, double b, const Tuple& p);

struct InhomogeneityReport {
  double slope_q1 = 0.0, slope_q4 = 0.0;
  double expected_q1 = 0.0, expected_q4 = 0.0;
  bool diverging = false;  // slopes differ by more than 1%
};

// Least-squares slopes of log W vs log r at the fixed points of F_1 and F_4.
InhomogeneityReport inhomogeneity_report(const WFunction& w, const std::vector<double>& r_ladder);

// Slope of log H(x,r) against log r over a ladder.
double fitted_slope(const ScalingFunction& sf, const PointOnFractal& x, const std::vector<double>& r_ladder);


}  // namespace sslab
