#include "sslab/heat.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <map>
#include <numeric>
#include <random>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>
#include <lapacke.h>

#include "sslab/errors.hpp"

namespace sslab {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// exp(-t A) v for symmetric positive semidefinite A, all t at once. Lanczos
// with full reorthogonalization; stops when the smallest Ritz pair has
// converged and the a posteriori error estimate beta_m |e_m^T exp(-t T_m) e_1|
// falls below tol for every t. Without the first test, large t looks
// converged before the low end of the spectrum is resolved.
std::vector<Eigen::VectorXd> lanczos_exp(const SpMat& A, const Eigen::VectorXd& v, const std::vector<double>& ts,
                                         double tol, std::size_t max_iter) {
  const auto n = v.size();
  const double beta0 = v.norm();
  std::vector<Eigen::VectorXd> out(ts.size(), Eigen::VectorXd::Zero(n));
  if (beta0 == 0) return out;
  const auto cap = static_cast<Eigen::Index>(std::min<std::size_t>(max_iter, static_cast<std::size_t>(n)));
  Eigen::MatrixXd V(n, cap);
  std::vector<double> alpha, beta;
  V.col(0) = v / beta0;
  double scale = 0;
  for (Eigen::Index k = 0;; ++k) {
    Eigen::VectorXd w = A * V.col(k);
    const double a = V.col(k).dot(w);
    w -= a * V.col(k);
    if (k > 0) w -= beta.back() * V.col(k - 1);
    for (int pass = 0; pass < 2; ++pass) w -= V.leftCols(k + 1) * (V.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    alpha.push_back(a);
    scale = std::max(scale, std::abs(a) + b);
    const Eigen::Index m = k + 1;
    const bool exhausted = b <= 1e-13 * scale || m == cap;
    if (exhausted || m % 8 == 0) {
      Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
      for (Eigen::Index i = 0; i < m; ++i) {
        T(i, i) = alpha[static_cast<std::size_t>(i)];
        if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
      if (es.info() != Eigen::Success) throw ConsistencyError("Krylov exponential: tridiagonal eigensolve failed");
      const Eigen::MatrixXd& S = es.eigenvectors();
      const Eigen::VectorXd& theta = es.eigenvalues();
      bool done = b * std::abs(S(m - 1, 0)) <= 1e-7 * std::max(theta[0], 1e-12 * scale);
      std::vector<Eigen::VectorXd> ys;
      for (double t : ts) {
        const Eigen::VectorXd e = (-t * theta.array().max(0.0)).exp();
        Eigen::VectorXd y = S * (e.array() * S.row(0).transpose().array()).matrix();
        if (!exhausted && b * std::abs(y[m - 1]) > tol * std::max(y.norm(), 1e-300)) done = false;
        ys.push_back(std::move(y));
      }
      if (done || exhausted) {
        if (!done && m == cap && b > 1e-13 * scale)
          throw ResourceError(fmt::format("Krylov exponential did not converge in {} steps", m));
        for (std::size_t i = 0; i < ts.size(); ++i) out[i] = beta0 * (V.leftCols(m) * ys[i]);
        return out;
      }
    }
    beta.push_back(b);
    V.col(k + 1) = w / b;
  }
}

double mesh_size(const FractalSystem& sys, std::size_t level) {
  return sys.diameter * std::pow(sys.ratios.max(), static_cast<double>(level));
}

struct Support {
  double slope = NAN, intercept = NAN;
};

// Supporting line of the upper (or lower) hull of the points at abscissa z_ref.
Support support_line(std::vector<std::pair<double, double>> p, bool upper, double z_ref) {
  Support s;
  if (p.size() < 2) return s;
  std::sort(p.begin(), p.end());
  std::vector<std::pair<double, double>> h;
  auto cross = [](const auto& o, const auto& a, const auto& b) {
    return (a.first - o.first) * (b.second - o.second) - (a.second - o.second) * (b.first - o.first);
  };
  for (const auto& q : p) {
    while (h.size() >= 2 && (upper ? cross(h[h.size() - 2], h.back(), q) >= 0 : cross(h[h.size() - 2], h.back(), q) <= 0))
      h.pop_back();
    if (!h.empty() && h.back().first == q.first) {
      if (upper ? q.second > h.back().second : q.second < h.back().second) h.back() = q;
      continue;
    }
    h.push_back(q);
  }
  if (h.size() < 2) return s;
  std::size_t k = 0;
  while (k + 2 < h.size() && h[k + 1].first < z_ref) ++k;
  const auto& a = h[k];
  const auto& b = h[k + 1];
  s.slope = (b.second - a.second) / (b.first - a.first);
  s.intercept = a.second - s.slope * a.first;
  return s;
}

const SelfSimilarMeasure& need_measure(const HeatSemigroup& hs) {
  if (!hs.self_similar_measure()) throw DomainError("this check needs a semigroup built from a self-similar measure");
  return *hs.self_similar_measure();
}

Eigen::VectorXd unit(std::size_t n, std::size_t x) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  e[static_cast<Eigen::Index>(x)] = 1;
  return e;
}

}  // namespace

Eigen::VectorXd vertex_measure(const ResistanceNetwork& net, const SelfSimilarMeasure& mu) {
  if (net.cells.empty()) throw DomainError("vertex_measure needs a network built from cells");
  std::vector<std::size_t> count(net.cells.size(), 0);
  for (const auto& vc : net.vertex_cells)
    for (auto k : vc) ++count[k];
  Eigen::VectorXd m = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(net.size()));
  for (std::size_t v = 0; v < net.size(); ++v)
    for (auto k : net.vertex_cells[v]) m[static_cast<Eigen::Index>(v)] += mu.weight(net.cells[k]) / static_cast<double>(count[k]);
  return m;
}

struct HeatSemigroup::Block {
  std::vector<std::size_t> ids;
  Eigen::VectorXd sqrt_m;
  bool dense = true;
  Eigen::VectorXd evals;
  Eigen::MatrixXd evecs;
  SpMat A;
  std::vector<Eigen::VectorXd> kernel;  // orthonormal null vectors, Krylov path on the full domain
};

HeatSemigroup::HeatSemigroup(ResistanceNetwork net, Eigen::VectorXd m, HeatOptions opt)
    : net_(std::move(net)), m_(std::move(m)), opt_(opt) {
  if (m_.size() != static_cast<Eigen::Index>(net_.size())) throw DomainError("heat semigroup: measure size mismatch");
  if (!(m_.array() > 0).all()) throw DomainError("heat semigroup: vertex measure must be positive");
}

HeatSemigroup::HeatSemigroup(ResistanceNetwork net, std::shared_ptr<const SelfSimilarMeasure> mu, HeatOptions opt)
    : HeatSemigroup(net, vertex_measure(net, *mu), opt) {
  mu_ = std::move(mu);
}

std::shared_ptr<const HeatSemigroup::Block> HeatSemigroup::block(const std::vector<bool>& domain) const {
  const bool full = std::all_of(domain.begin(), domain.end(), [](bool b) { return b; });
  std::lock_guard lock(*mutex_);
  if (full && full_) return full_;
  if (!full && last_.second && last_.first == domain) return last_.second;

  auto b = std::make_shared<Block>();
  std::vector<Eigen::Index> idx(size(), -1);
  for (std::size_t v = 0; v < size(); ++v)
    if (domain[v]) idx[v] = static_cast<Eigen::Index>(b->ids.size()), b->ids.push_back(v);
  if (b->ids.empty()) throw DomainError("heat: empty domain");
  const auto n = static_cast<Eigen::Index>(b->ids.size());
  b->sqrt_m.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) b->sqrt_m[i] = std::sqrt(m_[static_cast<Eigen::Index>(b->ids[static_cast<std::size_t>(i)])]);
  std::vector<Eigen::Triplet<double>> t;
  for (const auto& e : net_.edges) {
    const auto a = idx[e.i], c = idx[e.j];
    if (a >= 0) t.emplace_back(a, a, e.conductance / (b->sqrt_m[a] * b->sqrt_m[a]));
    if (c >= 0) t.emplace_back(c, c, e.conductance / (b->sqrt_m[c] * b->sqrt_m[c]));
    if (a >= 0 && c >= 0) {
      const double o = -e.conductance / (b->sqrt_m[a] * b->sqrt_m[c]);
      t.emplace_back(a, c, o);
      t.emplace_back(c, a, o);
    }
  }
  b->A.resize(n, n);
  b->A.setFromTriplets(t.begin(), t.end());
  b->dense = static_cast<std::size_t>(n) <= opt_.dense_cap;
  if (b->dense) {
    b->evecs = Eigen::MatrixXd(b->A);
    b->evals.resize(n);
    const auto info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'V', 'L', static_cast<lapack_int>(n), b->evecs.data(),
                                     static_cast<lapack_int>(n), b->evals.data());
    if (info != 0) throw ConsistencyError(fmt::format("heat: eigendecomposition failed (info {})", info));
    b->evals = b->evals.cwiseMax(0.0);
  }
  if (full && !b->dense) {
    std::size_t nc = 0;
    const auto label = components(net_, &nc);
    b->kernel.assign(nc, Eigen::VectorXd::Zero(n));
    for (Eigen::Index i = 0; i < n; ++i) b->kernel[label[static_cast<std::size_t>(i)]][i] = b->sqrt_m[i];
    for (auto& q : b->kernel) q.normalize();
  }
  if (full) full_ = b;
  else last_ = {domain, b};
  return b;
}

const Eigen::VectorXd& HeatSemigroup::eigenvalues() const {
  if (!dense()) throw ResourceError(fmt::format("full spectrum needs the dense path ({} vertices > {})", size(), opt_.dense_cap));
  return block(std::vector<bool>(size(), true))->evals;
}

std::vector<Eigen::VectorXd> HeatSemigroup::block_apply(const Block& b, const std::vector<double>& ts,
                                                        const Eigen::VectorXd& f) const {
  for (double t : ts)
    if (!(t > 0)) throw DomainError(fmt::format("heat: time {} must be positive", t));
  if (f.size() != static_cast<Eigen::Index>(size())) throw DomainError("heat: function size mismatch");
  const auto n = static_cast<Eigen::Index>(b.ids.size());
  Eigen::VectorXd g(n);
  for (Eigen::Index i = 0; i < n; ++i) g[i] = b.sqrt_m[i] * f[static_cast<Eigen::Index>(b.ids[static_cast<std::size_t>(i)])];
  std::vector<Eigen::VectorXd> local;
  if (!b.dense && !b.kernel.empty()) {
    // Null vectors of the Neumann operator are kept exactly.
    Eigen::VectorXd keep = Eigen::VectorXd::Zero(n);
    for (const auto& q : b.kernel) {
      const double c = q.dot(g);
      keep += c * q;
      g -= c * q;
    }
    local = lanczos_exp(b.A, g, ts, opt_.krylov_tol, opt_.krylov_max);
    for (auto& l : local) l += keep;
  } else if (b.dense) {
    const Eigen::VectorXd c = b.evecs.transpose() * g;
    for (double t : ts) local.push_back(b.evecs * ((-t * b.evals.array()).exp() * c.array()).matrix());
  } else {
    local = lanczos_exp(b.A, g, ts, opt_.krylov_tol, opt_.krylov_max);
  }
  std::vector<Eigen::VectorXd> out;
  for (const auto& l : local) {
    Eigen::VectorXd u = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(size()));
    for (Eigen::Index i = 0; i < n; ++i) u[static_cast<Eigen::Index>(b.ids[static_cast<std::size_t>(i)])] = l[i] / b.sqrt_m[i];
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Eigen::VectorXd> HeatSemigroup::apply(const std::vector<double>& ts, const Eigen::VectorXd& f) const {
  return block_apply(*block(std::vector<bool>(size(), true)), ts, f);
}

Eigen::VectorXd HeatSemigroup::apply(double t, const Eigen::VectorXd& f) const { return apply(std::vector{t}, f)[0]; }

Eigen::VectorXd HeatSemigroup::kernel_row(double t, std::size_t x) const {
  if (x >= size()) throw DomainError("heat: vertex out of range");
  return apply(t, unit(size(), x)) / m_[static_cast<Eigen::Index>(x)];
}

double HeatSemigroup::kernel(double t, std::size_t x, std::size_t y) const {
  if (y >= size()) throw DomainError("heat: vertex out of range");
  return kernel_row(t, x)[static_cast<Eigen::Index>(y)];
}

std::vector<Eigen::VectorXd> HeatSemigroup::dirichlet_apply(const std::vector<bool>& domain,
                                                            const std::vector<double>& ts,
                                                            const Eigen::VectorXd& f) const {
  if (domain.size() != size()) throw DomainError("heat: domain mask size mismatch");
  return block_apply(*block(domain), ts, f);
}

Eigen::VectorXd HeatSemigroup::dirichlet_row(const std::vector<bool>& domain, double t, std::size_t x) const {
  if (x >= size() || domain.size() != size() || !domain[x]) throw DomainError("heat: x must lie in the domain");
  return dirichlet_apply(domain, {t}, unit(size(), x))[0] / m_[static_cast<Eigen::Index>(x)];
}

double HeatSemigroup::dirichlet_eigenvalue(const std::vector<bool>& domain) const {
  if (domain.size() != size()) throw DomainError("heat: domain mask size mismatch");
  const auto b = block(domain);
  if (b->dense) return b->evals[0];
  // Inverse iteration on the scaled operator.
  Eigen::SimplicialLDLT<SpMat> ldlt(b->A);
  if (ldlt.info() != Eigen::Success) return 0.0;
  Eigen::VectorXd x = b->sqrt_m.normalized();
  double lambda = 0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd y = ldlt.solve(x);
    const double next = 1.0 / y.norm();
    x = y * next;
    if (std::abs(next - lambda) <= 1e-12 * next) return next;
    lambda = next;
  }
  return lambda;
}

std::vector<bool> HeatSemigroup::ball(std::size_t center, double r) const {
  std::vector<bool> in(size(), false);
  const Vec2 c = net_.coords.at(center);
  for (std::size_t v = 0; v < size(); ++v) in[v] = (net_.coords[v] - c).norm() < r;
  return in;
}

double HeatSemigroup::mass(const std::vector<bool>& set) const {
  double s = 0;
  for (std::size_t v = 0; v < size(); ++v)
    if (set[v]) s += m_[static_cast<Eigen::Index>(v)];
  return s;
}

double heat_kernel(const HeatSemigroup& hs, double t, std::size_t x, std::size_t y) { return hs.kernel(t, x, y); }

double dirichlet_kernel(const HeatSemigroup& hs, const std::vector<bool>& domain, double t, std::size_t x,
                        std::size_t y) {
  if (y >= hs.size() || !domain.at(y)) throw DomainError("dirichlet_kernel: y must lie in the domain");
  return hs.dirichlet_row(domain, t, x)[static_cast<Eigen::Index>(y)];
}

double volume_hat(const SelfSimilarMeasure& mu, const Vec2& x, double r) {
  const auto v = ball_volume(mu, x, r);
  return 0.5 * (v.lower + v.upper);
}

std::vector<double> log_ladder(double lo, double hi, std::size_t count) {
  if (!(lo > 0 && hi > lo) || count < 2) throw DomainError("log_ladder: need 0 < lo < hi and two points");
  std::vector<double> t(count);
  for (std::size_t i = 0; i < count; ++i)
    t[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * static_cast<double>(i) / static_cast<double>(count - 1));
  return t;
}

std::vector<HeatBall> heat_balls(const HeatSemigroup& hs, std::size_t count, int k_lo, int k_hi, std::uint64_t seed,
                                 std::size_t base_level) {
  const auto& sys = need_measure(hs).system();
  if (hs.network().level < base_level) throw DomainError("heat_balls: network coarser than the base level");
  const auto ids = locate_vertices(sys, hs.network(), level_vertices(sys, base_level));
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> pick(0, ids.size() - 1);
  std::vector<HeatBall> out;
  for (int k = k_lo; k <= k_hi; ++k)
    for (std::size_t i = 0; i < count; ++i) out.push_back({ids[pick(gen)], std::ldexp(1.0, -k)});
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> heat_pairs(const HeatSemigroup& hs, std::size_t xs, std::size_t per_x,
                                                            std::uint64_t seed, std::size_t base_level) {
  const auto& sys = need_measure(hs).system();
  if (hs.network().level < base_level + 1) throw DomainError("heat_pairs: network coarser than the base level");
  const auto xi = locate_vertices(sys, hs.network(), level_vertices(sys, base_level));
  const auto yi = locate_vertices(sys, hs.network(), level_vertices(sys, base_level + 1));
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<std::size_t> px(0, xi.size() - 1), py(0, yi.size() - 1);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < xs; ++i) {
    const auto x = xi[px(gen)];
    out.emplace_back(x, x);
    for (std::size_t j = 0; j < per_x; ++j) out.emplace_back(x, yi[py(gen)]);
  }
  return out;
}

EstimateReport check_due(const HeatSemigroup& hs, const ScalingFunction& w, const std::vector<std::size_t>& xs,
                         const std::vector<double>& t_ladder, const HeatWindow& window) {
  const auto& mu = need_measure(hs);
  const auto& sys = mu.system();
  std::vector<double> ts = t_ladder;
  std::sort(ts.rbegin(), ts.rend());
  EstimateReport rep;
  rep.condition = Condition::DUE;
  std::vector<double> rung_max(ts.size(), 0.0);
  std::vector<bool> rung_used(ts.size(), false);
  double lo = INFINITY, hi = 0;
  std::size_t outside = 0;
  for (auto x : xs) {
    const Vec2 c = hs.network().coords.at(x);
    const auto px = canonical_point(sys, c);
    const double floor_t = window.floor_factor * w(px, mesh_size(sys, hs.network().level));
    const auto rows = hs.apply(ts, unit(hs.size(), x));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double p = rows[k][static_cast<Eigen::Index>(x)] / hs.measure()[static_cast<Eigen::Index>(x)];
      const double r = w.inverse(px, ts[k]);
      const double prod = p * volume_hat(mu, c, r);
      const bool in = ts[k] >= floor_t && ts[k] <= window.t_max;
      rep.samples.push_back({fmt::format("x={} t={:.6g}{}", x, ts[k], in ? "" : " outside window"), {ts[k], r, c.x(), c.y()}, prod});
      if (!in) {
        ++outside;
        continue;
      }
      rung_used[k] = true;
      rung_max[k] = std::max(rung_max[k], prod);
      lo = std::min(lo, prod);
      hi = std::max(hi, prod);
    }
  }
  std::vector<double> series;
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (rung_used[k]) series.push_back(rung_max[k]);
  rep.set("C", hi);
  rep.set("min_product", lo);
  rep.set("band", hi / lo);
  rep.set("samples_outside_window", static_cast<double>(outside));
  rep.witnessed_constant = hi;
  if (series.size() < 5) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("fewer than 5 ladder rungs inside the valid time window");
  } else if (classify_trend(series, {.stabilization = 1.0, .growth = 1.5, .rungs = 4}) == Verdict::Fail) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("on-diagonal product grows at least 1.5x per rung over the last 4 rungs, up to {:.4g}", series.back());
  } else {
    rep.verdict = Verdict::Pass;
  }
  return rep;
}

EstimateReport check_two_sided(const HeatSemigroup& hs, const ScalingFunction& w, double beta,
                               const std::vector<std::pair<std::size_t, std::size_t>>& pairs,
                               const std::vector<double>& t_ladder, const TwoSidedOptions& opt) {
  if (!(beta > 1)) throw DomainError(fmt::format("two-sided estimate needs beta > 1, got {}", beta));
  const auto& mu = need_measure(hs);
  const auto& sys = mu.system();
  EstimateReport rep;
  rep.condition = Condition::TwoSided;
  std::vector<std::size_t> xs;
  for (const auto& pr : pairs)
    if (std::find(xs.begin(), xs.end(), pr.first) == xs.end()) xs.push_back(pr.first);
  std::vector<std::pair<double, double>> pts;
  std::size_t floored = 0, outside = 0;
  double nle = INFINITY;
  const double e = 1.0 / (beta - 1);
  for (auto x : xs) {
    const Vec2 c = hs.network().coords[x];
    const auto px = canonical_point(sys, c);
    const double floor_t = opt.window.floor_factor * w(px, mesh_size(sys, hs.network().level));
    std::vector<double> ts;
    for (double t : t_ladder)
      if (t >= floor_t && t <= opt.window.t_max) ts.push_back(t);
      else ++outside;
    if (ts.empty()) continue;
    const auto rows = hs.apply(ts, unit(hs.size(), x));
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const double V = volume_hat(mu, c, w.inverse(px, ts[k]));
      for (const auto& [a, y] : pairs) {
        if (a != x) continue;
        const double d = (hs.network().coords[y] - c).norm();
        const double z = d > 0 ? std::pow(w(px, d) / ts[k], e) : 0.0;
        const double val = rows[k][static_cast<Eigen::Index>(y)] / hs.measure()[static_cast<Eigen::Index>(x)] * V;
        if (!(val > opt.value_floor)) {
          ++floored;
          continue;
        }
        pts.emplace_back(z, std::log(val));
        if (z <= 1) nle = std::min(nle, val);
        rep.samples.push_back({fmt::format("x={} y={} t={:.6g}", x, y, ts[k]), {z, ts[k], d}, std::log(val)});
      }
    }
  }
  rep.set("points", static_cast<double>(pts.size()));
  rep.set("below_floor", static_cast<double>(floored));
  rep.set("outside_window", static_cast<double>(outside));
  if (pts.size() < 10) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("fewer than 10 usable samples");
    return rep;
  }
  double zbar = 0;
  for (const auto& p : pts) zbar += p.first;
  zbar /= static_cast<double>(pts.size());
  const auto up = support_line(pts, true, zbar), low = support_line(pts, false, zbar);
  const double c_plus = -up.slope, c_minus = -low.slope;
  rep.set("c_plus", c_plus);
  rep.set("C_plus", up.intercept);
  rep.set("c_minus", c_minus);
  rep.set("C_minus", -low.intercept);
  rep.set("decay_ratio", c_minus / c_plus);
  rep.set("nle_constant", nle);
  rep.set("eta", 1.0);
  rep.set("z_mean", zbar);
  rep.witnessed_constant = c_minus / c_plus;
  if (c_plus > 0 && c_minus > 0 && std::isfinite(c_minus / c_plus)) {
    rep.verdict = Verdict::Pass;
  } else {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("envelope decay constants c+={:.4g}, c-={:.4g} are not both positive", c_plus, c_minus);
  }
  return rep;
}

EstimateReport check_survival(const HeatSemigroup& hs, const ScalingFunction& w, const std::vector<HeatBall>& balls,
                              const std::vector<double>& tau_ladder, const SurvivalOptions& opt) {
  const auto& sys = need_measure(hs).system();
  EstimateReport rep;
  rep.condition = Condition::S;
  std::vector<double> taus = tau_ladder;
  std::sort(taus.begin(), taus.end());
  const auto read = static_cast<std::size_t>(
      std::upper_bound(taus.begin(), taus.end(), opt.time * (1 + 1e-12)) - taus.begin());
  if (read == 0) throw DomainError("check_survival: ladder has no tau at or below the read time");
  std::map<double, double> eps_by_radius;
  std::vector<std::pair<double, double>> pts;
  bool monotone = true;
  double eps = INFINITY;
  for (const auto& b : balls) {
    if (b.radius >= sys.diameter) throw DomainError("check_survival: ball radius must be below the diameter");
    const auto B = hs.ball(b.center, b.radius), inner = hs.ball(b.center, opt.inner * b.radius);
    const Vec2 c = hs.network().coords[b.center];
    const double WB = w(canonical_point(sys, c), b.radius);
    std::vector<double> ts;
    for (double tau : taus) ts.push_back(tau * WB);
    const auto u = hs.dirichlet_apply(B, ts, Eigen::VectorXd::Ones(static_cast<Eigen::Index>(hs.size())));
    double prev = INFINITY;
    for (std::size_t k = 0; k < taus.size(); ++k) {
      double s = INFINITY;
      for (std::size_t v = 0; v < hs.size(); ++v)
        if (inner[v]) s = std::min(s, u[k][static_cast<Eigen::Index>(v)]);
      if (s > prev + 1e-12) monotone = false;
      prev = s;
      pts.emplace_back(taus[k], s);
      rep.samples.push_back({fmt::format("ball x={} r={:.6g} tau={:.4g}", b.center, b.radius, taus[k]), {taus[k], b.radius, c.x(), c.y()}, s});
      if (k + 1 == read) {
        eps = std::min(eps, s);
        auto [it, fresh] = eps_by_radius.emplace(b.radius, s);
        if (!fresh) it->second = std::min(it->second, s);
      }
    }
  }
  const auto line = support_line(pts, false, 0.5 * (taus.front() + taus.back()));
  rep.set("epsilon", eps);
  rep.set("delta", taus[read - 1]);
  rep.set("delta_S", opt.inner);
  rep.set("splus_c", line.intercept);
  rep.set("splus_C", -line.slope);
  rep.witnessed_constant = eps;
  std::vector<double> inv;  // coarse radius to fine
  for (auto it = eps_by_radius.rbegin(); it != eps_by_radius.rend(); ++it) inv.push_back(1.0 / it->second);
  if (!monotone) rep.notes.push_back("survival not monotone in t on some ball");
  if (!(eps > 0) || !monotone) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("survival floor {:.4g}", eps);
  } else if (inv.size() > opt.trend.rungs && classify_trend(inv, opt.trend) == Verdict::Fail) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = "survival floor decays across radii";
  } else {
    rep.verdict = Verdict::Pass;
  }
  return rep;
}

EstimateReport check_fk(const HeatSemigroup& hs, const ScalingFunction& w, const std::vector<HeatBall>& balls,
                        const std::vector<double>& sub_fractions) {
  const auto& sys = need_measure(hs).system();
  EstimateReport rep;
  rep.condition = Condition::FK;
  std::vector<double> lx, ly;
  std::map<double, double> lw_by_radius;
  bool monotone = true;
  for (const auto& b : balls) {
    const Vec2 c = hs.network().coords[b.center];
    const double WB = w(canonical_point(sys, c), b.radius);
    const auto B = hs.ball(b.center, b.radius);
    const double mB = hs.mass(B);
    double prev = 0;
    for (double f : sub_fractions) {
      const auto U = hs.ball(b.center, f * b.radius);
      const double lam = hs.dirichlet_eigenvalue(U);
      if (!(lam > 0)) continue;
      if (lam < prev * (1 - 1e-10)) monotone = false;
      prev = lam;
      const double ratio = mB / hs.mass(U);
      lx.push_back(std::log(ratio));
      ly.push_back(std::log(lam * WB));
      rep.samples.push_back({fmt::format("ball x={} r={:.6g} U={:.3g}r", b.center, b.radius, f), {b.radius, f, ratio}, lam * WB});
      if (f == 1.0) {
        auto [it, fresh] = lw_by_radius.emplace(b.radius, lam * WB);
        if (!fresh) it->second = std::min(it->second, lam * WB);
      }
    }
  }
  if (lx.size() < 3) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("too few subsets");
    return rep;
  }
  const auto fit = fit_line(lx, ly);
  double resid = 0;
  for (std::size_t i = 0; i < lx.size(); ++i)
    resid = std::max(resid, std::abs(ly[i] - fit.slope * lx[i] - fit.intercept));
  double lw_min = INFINITY;
  std::vector<double> inv;
  for (auto it = lw_by_radius.rbegin(); it != lw_by_radius.rend(); ++it) {
    inv.push_back(1.0 / it->second);
    lw_min = std::min(lw_min, it->second);
  }
  rep.set("kappa", fit.slope);
  rep.set("C", std::exp(-fit.intercept));
  rep.set("max_residual", resid);
  rep.set("min_lambda1_W", lw_min);
  rep.witnessed_constant = fit.slope;
  if (!monotone) rep.notes.push_back("lambda_1 not monotone under shrinking U");
  const bool decaying = inv.size() > 4 && classify_trend(inv) == Verdict::Fail;
  if (fit.slope > 0 && monotone && !decaying) {
    rep.verdict = Verdict::Pass;
  } else {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("kappa={:.4g}, monotone={}, lambda_1 W decaying={}", fit.slope, monotone, decaying);
  }
  return rep;
}

EstimateReport check_tail(const HeatSemigroup& hs, const ScalingFunction& w, double beta,
                          const std::vector<HeatBall>& balls, const std::vector<double>& tau_ladder,
                          double value_floor) {
  if (!(beta > 1)) throw DomainError(fmt::format("tail estimate needs beta > 1, got {}", beta));
  const auto& sys = need_measure(hs).system();
  EstimateReport rep;
  rep.condition = Condition::T_exp;
  std::vector<std::pair<double, double>> pts;
  double worst = 0;
  std::size_t floored = 0;
  for (const auto& b : balls) {
    const Vec2 c = hs.network().coords[b.center];
    const double WB = w(canonical_point(sys, c), b.radius);
    const auto B = hs.ball(b.center, b.radius), half = hs.ball(b.center, 0.5 * b.radius);
    Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(hs.size()));
    for (std::size_t v = 0; v < hs.size(); ++v)
      if (!B[v]) out[static_cast<Eigen::Index>(v)] = 1;
    if (out.sum() == 0) continue;
    std::vector<double> ts;
    for (double tau : tau_ladder) ts.push_back(tau * WB);
    const auto u = hs.apply(ts, out);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      double s = 0;
      for (std::size_t v = 0; v < hs.size(); ++v)
        if (half[v]) s = std::max(s, u[k][static_cast<Eigen::Index>(v)]);
      worst = std::max(worst, s);
      const double z = std::pow(1.0 / tau_ladder[k], 1.0 / (beta - 1));
      rep.samples.push_back({fmt::format("ball x={} r={:.6g} tau={:.4g}", b.center, b.radius, tau_ladder[k]), {z, b.radius}, s});
      if (s > value_floor) pts.emplace_back(z, std::log(s));
      else ++floored;
    }
  }
  rep.set("max_tail", worst);
  rep.set("below_floor", static_cast<double>(floored));
  if (pts.size() < 5) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes.push_back("fewer than 5 usable samples");
    return rep;
  }
  double zbar = 0;
  for (const auto& p : pts) zbar += p.first;
  zbar /= static_cast<double>(pts.size());
  const auto up = support_line(pts, true, zbar);
  rep.set("c", -up.slope);
  rep.set("C", std::exp(up.intercept));
  rep.witnessed_constant = -up.slope;
  if (worst > 1 + 1e-9) {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("tail probability {:.6g} exceeds 1", worst);
  } else if (-up.slope > 0) {
    rep.verdict = Verdict::Pass;
  } else {
    rep.verdict = Verdict::Fail;
    rep.failure_witness = fmt::format("tail envelope decay {:.4g} not positive", -up.slope);
  }
  return rep;
}

ChainResult minimax_chain_cost(const ResistanceNetwork& g, const FractalSystem& sys, const ScalingFunction& w,
                               std::size_t x, std::size_t y, std::size_t hop_cap) {
  const std::size_t n = g.size();
  if (x >= n || y >= n) throw DomainError("minimax_chain_cost: vertex out of range");
  if (hop_cap < 1) throw DomainError("minimax_chain_cost: hop cap must be at least 1");
  ChainResult res;
  if (x == y) {
    res.reachable = true;
    res.chain = {x};
    res.points = {g.coords[x]};
    return res;
  }
  if (g.vertex_corner.size() != n) throw DomainError("minimax_chain_cost needs a network built from cells");
  std::vector<PointOnFractal> pts;
  pts.reserve(n);
  for (std::size_t v = 0; v < n; ++v) {
    const auto [k, c] = g.vertex_corner[v];
    pts.push_back({g.coords[v], AddressStream(g.cells[k], Word{sys.hull_fixed_map[c]})});
  }
  // Directed adjacency in CSR form with per-arc cost.
  std::vector<std::size_t> start(n + 1, 0);
  for (const auto& e : g.edges) ++start[e.i + 1], ++start[e.j + 1];
  for (std::size_t v = 0; v < n; ++v) start[v + 1] += start[v];
  std::vector<std::size_t> to(start.back()), fill(start.begin(), start.end() - 1);
  std::vector<double> cost(start.back());
  for (const auto& e : g.edges) {
    const double d = (g.coords[e.i] - g.coords[e.j]).norm();
    to[fill[e.i]] = e.j, cost[fill[e.i]++] = w(pts[e.i], d);
    to[fill[e.j]] = e.i, cost[fill[e.j]++] = w(pts[e.j], d);
  }
  std::vector<std::size_t> hops(n), parent(n);
  const std::size_t none = static_cast<std::size_t>(-1);
  auto bfs = [&](double threshold) {
    std::fill(hops.begin(), hops.end(), none);
    std::deque<std::size_t> q{x};
    hops[x] = 0;
    while (!q.empty()) {
      const auto v = q.front();
      q.pop_front();
      if (v == y) return true;
      if (hops[v] == hop_cap) continue;
      for (std::size_t a = start[v]; a < start[v + 1]; ++a)
        if (cost[a] <= threshold && hops[to[a]] == none) {
          hops[to[a]] = hops[v] + 1;
          parent[to[a]] = v;
          q.push_back(to[a]);
        }
    }
    return false;
  };
  std::vector<double> levels = cost;
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  if (!bfs(levels.back())) return res;
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const auto mid = (lo + hi) / 2;
    if (bfs(levels[mid])) hi = mid;
    else lo = mid + 1;
  }
  bfs(levels[lo]);
  res.reachable = true;
  res.cost = levels[lo];
  for (auto v = y; v != x; v = parent[v]) res.chain.push_back(v);
  res.chain.push_back(x);
  std::reverse(res.chain.begin(), res.chain.end());
  for (auto v : res.chain) res.points.push_back(g.coords[v]);
  return res;
}

ChainResult minimax_chain_cost(const FractalSystem& sys, const ScalingFunction& w, std::size_t n, std::size_t x,
                               std::size_t y, std::size_t hop_cap) {
  const auto g = build_network(sys, Tuple(std::vector<double>(sys.size(), 0.5)), n, {.level_cap = 12});
  return minimax_chain_cost(g, sys, w, x, y, hop_cap);
}

WalkDimensionFit fit_walk_dimension(const HeatSemigroup& hs, const std::vector<std::size_t>& xs,
                                    const std::vector<double>& t_ladder, double alpha) {
  WalkDimensionFit fit;
  fit.alpha = alpha;
  fit.points = t_ladder.size();
  if (t_ladder.size() < 6 || xs.empty()) return fit;
  std::vector<double> lt, lp(t_ladder.size(), 0.0);
  for (double t : t_ladder) lt.push_back(std::log(t));
  for (auto x : xs) {
    const auto rows = hs.apply(t_ladder, unit(hs.size(), x));
    for (std::size_t k = 0; k < t_ladder.size(); ++k)
      lp[k] += std::log(rows[k][static_cast<Eigen::Index>(x)] / hs.measure()[static_cast<Eigen::Index>(x)]) /
               static_cast<double>(xs.size());
  }
  const auto line = fit_line(lt, lp);
  fit.slope = line.slope;
  fit.r2 = line.r2;
  fit.beta = -alpha / line.slope;
  fit.verdict = std::isfinite(fit.beta) && fit.beta > 0 ? Verdict::Pass : Verdict::Fail;
  return fit;
}

}  // namespace sslab
