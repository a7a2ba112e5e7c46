#include "sslab/scaling.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "sslab/errors.hpp"
#include "sslab/fit.hpp"

namespace sslab {

ScalingFunction::ScalingFunction(Tuple theta, Tuple zeta, double diameter, std::shared_ptr<const FractalSystem> sys)
    : theta_(std::move(theta)), zeta_(std::move(zeta)), diameter_(diameter), sys_(std::move(sys)) {
  if (theta_.size() != zeta_.size()) throw DomainError("scaling function: theta and zeta differ in length");
  if (!(diameter_ > 0)) throw DomainError("scaling function: diameter must be positive");
  exp_ = sslab::exponents(theta_, zeta_);
}

double ScalingFunction::h0(const AddressStream& omega, double r) const {
  if (r <= 0) return 0.0;
  if (r >= 1) return std::pow(r, exp_.lower);
  double tp = 1.0, zp = 1.0;
  for (std::size_t n = 1;; ++n) {
    const Digit d = omega.digit(n);
    const double t = tp * theta_(d), z = zp * zeta_(d);
    if (t <= r) return z + (zp - z) * (r - t) / (tp - t);
    tp = t;
    zp = z;
  }
}

double ScalingFunction::h0_inverse(const AddressStream& omega, double t) const {
  if (t <= 0) return 0.0;
  if (t >= 1) return std::pow(t, 1.0 / exp_.lower);
  double tp = 1.0, zp = 1.0;
  for (std::size_t n = 1;; ++n) {
    const Digit d = omega.digit(n);
    const double th = tp * theta_(d), z = zp * zeta_(d);
    if (z <= t) return th + (tp - th) * (t - z) / (zp - z);
    tp = th;
    zp = z;
  }
}

double h0_eval(const ScalingFunction& sf, const AddressStream& omega, double r) { return sf.h0(omega, r); }
double h_eval(const ScalingFunction& sf, const PointOnFractal& x, double r) { return sf(x, r); }
double h_inverse(const ScalingFunction& sf, const PointOnFractal& x, double t) { return sf.inverse(x, t); }

double theory_c1(const Tuple& theta, const Tuple& zeta) {
  const auto e = exponents(theta, zeta);
  return std::pow(theta.min(), -e.upper) / zeta.min();
}

double theory_c2(const Tuple& theta, const Tuple& zeta, double c_av, double l2, double c_cp) {
  const auto e = exponents(theta, zeta);
  return std::pow(zeta.min(), -4) * std::pow(theta.min(), -2 * e.upper) * std::pow(c_av, l2 - 1) *
         std::pow(c_cp / 2, e.lower - e.upper);
}

EnvelopeResult scaling_envelope(const ScalingFunction& sf, const std::vector<EnvelopeSample>& samples, double c_av,
                                double l2, double c_cp) {
  EnvelopeResult res;
  res.exponents = sf.exponents();
  res.c1_theory = theory_c1(sf.theta(), sf.zeta());
  res.c2_theory = theory_c2(sf.theta(), sf.zeta(), c_av, l2, c_cp);
  const double lo = res.exponents.lower, hi = res.exponents.upper;
  for (const auto& s : samples) {
    if (!(s.r > 0 && s.r <= s.R)) throw DomainError("scaling_envelope: need 0 < r <= R");
    const double q = sf.h0(s.x.address, s.R) / sf.h0(s.x.address, s.r);
    const double ratio = s.R / s.r;
    res.c1_empirical = std::max({res.c1_empirical, std::pow(ratio, lo) / q, q / std::pow(ratio, hi)});
    const double c = sf.h0(s.x.address, s.R) / sf.h0(s.y.address, s.R);
    res.c2_empirical = std::max({res.c2_empirical, c, 1.0 / c});
  }
  return res;
}

WalkExponents walk_exponents(double lambda, double s, double b, double p1, double p4) {
  const double rho1 = 0.5, rho4 = lambda_star(lambda) / 2;
  WalkExponents e;
  e.beta1 = std::log(p1 * b) / std::log(rho1);
  e.beta4 = std::log(p4 * s) / std::log(rho4);
  e.beta_lower = std::min(e.beta1, e.beta4);
  e.beta_upper = std::max(e.beta1, e.beta4);
  return e;
}

WFunction build_w(double lambda, double s, double b, const Tuple& p) {
  if (p.size() != 4 || !p.is_probability()) throw DomainError("build_w: p must be a probability 4-tuple");
  if (p.at(0) != p.at(1) || p.at(0) != p.at(2))
    throw DomainError(fmt::format("build_w: p1=p2=p3 required for doubling, got {}", p.str()));
  if (!(b >= 0.6 && b < 1)) throw DomainError(fmt::format("build_w: b={} outside [3/5,1)", b));
  if (!(s > 0 && s < 1)) throw DomainError(fmt::format("build_w: s={} outside (0,1)", s));
  auto sys = std::make_shared<const FractalSystem>(build_system(SystemKind::KLambda, {.lambda = lambda}));
  const double p1 = p.at(0), p4 = p.at(3);
  Tuple psi{p1 * b, p1 * b, p1 * b, p4 * s};
  ScalingFunction w(sys->ratios, psi, sys->diameter, sys);
  return WFunction{std::move(w), psi, walk_exponents(lambda, s, b, p1, p4)};
}

double fitted_slope(const ScalingFunction& sf, const PointOnFractal& x, const std::vector<double>& r_ladder) {
  std::vector<double> lx, ly;
  for (double r : r_ladder) {
    lx.push_back(std::log(r));
    ly.push_back(std::log(sf(x, r)));
  }
  return fit_line(lx, ly).slope;
}

InhomogeneityReport inhomogeneity_report(const WFunction& w, const std::vector<double>& r_ladder) {
  if (r_ladder.size() < 8) throw DomainError("inhomogeneity_report: need at least 8 rungs");
  const FractalSystem& sys = *w.w.system();
  const PointOnFractal x1 = canonical_point(sys, AddressStream::constant(1));
  const PointOnFractal x4 = canonical_point(sys, AddressStream::constant(4));
  InhomogeneityReport rep;
  rep.slope_q1 = fitted_slope(w.w, x1, r_ladder);
  rep.slope_q4 = fitted_slope(w.w, x4, r_ladder);
  rep.expected_q1 = w.beta.beta1;
  rep.expected_q4 = w.beta.beta4;
  rep.diverging = std::abs(rep.slope_q1 - rep.slope_q4) > 0.01 * std::max(rep.slope_q1, rep.slope_q4);
  return rep;
}

}  // namespace sslab
