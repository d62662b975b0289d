#include "psiest/comparison.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "psiest/error.hpp"
#include "psiest/format.hpp"

namespace psiest {

namespace {

constexpr double kHullMargin = 1e-6;
constexpr double kEvalSlack = 1e-10;
constexpr double kTheta1Agreement = 1e-8;
constexpr double kDerivFloor = 1e-8;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double eval_slack(double lhs, double rhs) {
  return kEvalSlack * std::max({std::abs(lhs), std::abs(rhs), 1.0});
}

double estimator_slack(double a, double b, const SolverConfig& cfg) {
  return 10.0 * cfg.width_tol(std::max(std::abs(a), std::abs(b)));
}

std::vector<double> theta1_all(const PsiKernel& k, const std::vector<double>& xs,
                               const SolverConfig& cfg) {
  std::vector<double> out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(theta1(k, x, cfg));
  return out;
}

GridInfo grid_info(const WitnessSet& ws) {
  GridInfo g;
  g.witnesses = ws.observations.size();
  g.grid_points = ws.parameter_grid.size();
  g.seed = ws.seed;
  g.hull_lo = ws.hull_lo;
  g.hull_hi = ws.hull_hi;
  return g;
}

struct Solved {
  bool ok = false;
  double psi = 0.0;
  double phi = 0.0;
};

Solved solve_both(const PsiKernel& psi, const PsiKernel& phi,
                  const WeightedSample& s, const SolverConfig& cfg) {
  const auto a = solve_sign_change(psi, s, cfg);
  const auto b = solve_sign_change(phi, s, cfg);
  return {a.converged() && b.converged(), a.theta, b.theta};
}

Witness sample_witness(WitnessKind kind, const WeightedSample& s) {
  Witness w;
  w.kind = kind;
  w.xs.assign(s.xs().begin(), s.xs().end());
  w.weights.assign(s.weights().begin(), s.weights().end());
  w.x = w.y = w.t = kNaN;
  return w;
}

ComparisonVerdict inconclusive(ComparisonVerdict v, const WeightedSample& s,
                               std::string note) {
  v.status = Verdict::kInconclusive;
  v.witness = sample_witness(WitnessKind::kEstimator, s);
  v.note = std::move(note);
  return v;
}

// Samples of size 1..max_n drawn with replacement, singletons first.
template <typename Visit>
bool for_each_sample(const WitnessSet& ws, int max_n, int trials, Visit visit) {
  for (double x : ws.observations) {
    if (!visit(WeightedSample::uniform({x}))) return false;
  }
  if (ws.observations.empty() || max_n < 1) return true;
  std::mt19937_64 rng(ws.seed);
  std::uniform_int_distribution<int> size_dist(1, max_n);
  std::uniform_int_distribution<std::size_t> pick(0, ws.observations.size() - 1);
  for (int trial = 0; trial < trials; ++trial) {
    const int n = size_dist(rng);
    std::vector<double> xs;
    xs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) xs.push_back(ws.observations[pick(rng)]);
    if (!visit(WeightedSample::uniform(std::move(xs)))) return false;
  }
  return true;
}

// Closed-form d2 when available, else a central difference.
double partial_t(const PsiKernel& k, double x, double t, double fd_step) {
  if (k.d2) return (*k.d2)(x, t);
  double h = fd_step > 0.0 ? fd_step : 1e-6 * std::max(1.0, std::abs(t));
  while (h > 0.0 && !(k.theta.contains(t - h) && k.theta.contains(t + h))) {
    h *= 0.5;
  }
  return (k.eval(x, t + h) - k.eval(x, t - h)) / (2.0 * h);
}

double derivative_quotient(const PsiKernel& k, double x, double y, double s,
                           double fd_step) {
  const double d = partial_t(k, x, s, fd_step);
  if (!(std::abs(d) >= kDerivFloor)) {
    throw Error(Errc::kDegenerateDerivative,
                k.name + ": |d2 psi(" + shortest_repr(x) + ", " +
                    shortest_repr(s) + ")| = " + shortest_repr(d));
  }
  return -k.eval(y, s) / d;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kNoCounterexample: return "NoCounterexample";
    case Verdict::kCounterexample: return "Counterexample";
    case Verdict::kInconclusive: return "Inconclusive";
  }
  return "?";
}

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::kDirect: return "direct";
    case Condition::kTwoPoint: return "two-point";
    case Condition::kRatio: return "ratio";
    case Condition::kMultiplier: return "multiplier";
    case Condition::kDerivative: return "derivative";
    case Condition::kEquality: return "equality";
  }
  return "?";
}

std::string_view witness_kind_name(WitnessKind k) {
  switch (k) {
    case WitnessKind::kEstimator: return "estimator";
    case WitnessKind::kTheta1: return "theta1";
    case WitnessKind::kCross: return "cross";
    case WitnessKind::kSandwich: return "sandwich";
    case WitnessKind::kDerivative: return "derivative";
    case WitnessKind::kSign: return "sign";
    case WitnessKind::kEqual: return "equal";
  }
  return "?";
}

WitnessSet make_witness_set(const PsiKernel& reference,
                            std::vector<double> observations, std::uint64_t seed,
                            std::size_t grid_equi, std::size_t grid_random,
                            const SolverConfig& cfg) {
  if (observations.empty()) {
    throw Error(Errc::kInvalidArgument, "witness set needs observations");
  }
  WitnessSet ws;
  ws.seed = seed;
  const auto t1 = theta1_all(reference, observations, cfg);
  ws.observations = std::move(observations);
  const auto [lo_it, hi_it] = std::minmax_element(t1.begin(), t1.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(lo < hi)) {
    ws.hull_lo = ws.hull_hi = kNaN;
    return ws;
  }
  ws.hull_lo = lo;
  ws.hull_hi = hi;
  const double margin = kHullMargin * (hi - lo);
  const double a = lo + margin;
  const double b = hi - margin;
  if (grid_equi == 1) {
    ws.parameter_grid.push_back(0.5 * (a + b));
  } else {
    for (std::size_t i = 0; i < grid_equi; ++i) {
      ws.parameter_grid.push_back(a + (b - a) * static_cast<double>(i) /
                                          static_cast<double>(grid_equi - 1));
    }
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(a, b);
  for (std::size_t i = 0; i < grid_random; ++i) ws.parameter_grid.push_back(unit(rng));
  std::sort(ws.parameter_grid.begin(), ws.parameter_grid.end());
  return ws;
}

ComparisonVerdict check_direct(const PsiKernel& psi, const PsiKernel& phi,
                               const WitnessSet& ws, int max_n, int trials,
                               const SolverConfig& cfg) {
  ComparisonVerdict v;
  v.condition = Condition::kDirect;
  v.grid = grid_info(ws);
  v.grid.max_n = max_n;
  v.max_violation = -kInf;
  for_each_sample(ws, max_n, trials, [&](const WeightedSample& s) {
    ++v.grid.samples_tested;
    const Solved r = solve_both(psi, phi, s, cfg);
    if (!r.ok) {
      v = inconclusive(std::move(v), s, "solver did not converge");
      return false;
    }
    const double slack = estimator_slack(r.psi, r.phi, cfg);
    v.max_violation = std::max(v.max_violation, r.psi - r.phi);
    if (r.psi > r.phi + slack) {
      v.status = Verdict::kCounterexample;
      Witness w = sample_witness(WitnessKind::kEstimator, s);
      w.lhs = r.psi;
      w.rhs = r.phi;
      w.slack = slack;
      v.witness = std::move(w);
      return false;
    }
    return true;
  });
  return v;
}

ComparisonVerdict check_two_point(const PsiKernel& psi, const PsiKernel& phi,
                                  double x, double y, int max_km,
                                  const SolverConfig& cfg) {
  ComparisonVerdict v;
  v.condition = Condition::kTwoPoint;
  v.grid.witnesses = 2;
  v.grid.max_km = max_km;
  v.grid.hull_lo = v.grid.hull_hi = kNaN;
  v.max_violation = -kInf;
  std::vector<std::pair<int, int>> weights = {{1, 0}, {0, 1}};
  for (int total = 2; total <= max_km; ++total) {
    for (int k = 1; k < total; ++k) weights.emplace_back(k, total - k);
  }
  for (const auto& [k, m] : weights) {
    const WeightedSample s({x, y}, {static_cast<double>(k), static_cast<double>(m)});
    ++v.grid.samples_tested;
    const Solved r = solve_both(psi, phi, s, cfg);
    if (!r.ok) return inconclusive(std::move(v), s, "solver did not converge");
    const double slack = estimator_slack(r.psi, r.phi, cfg);
    v.max_violation = std::max(v.max_violation, r.psi - r.phi);
    if (r.psi > r.phi + slack) {
      v.status = Verdict::kCounterexample;
      Witness w = sample_witness(WitnessKind::kEstimator, s);
      w.lhs = r.psi;
      w.rhs = r.phi;
      w.slack = slack;
      v.witness = std::move(w);
      return v;
    }
  }
  return v;
}

ComparisonVerdict check_two_point_all(const PsiKernel& psi, const PsiKernel& phi,
                                      const WitnessSet& ws, int max_km,
                                      const SolverConfig& cfg) {
  ComparisonVerdict total;
  total.condition = Condition::kTwoPoint;
  total.grid = grid_info(ws);
  total.grid.max_km = max_km;
  total.max_violation = -kInf;
  const auto& obs = ws.observations;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = i + 1; j < obs.size(); ++j) {
      if (obs[i] == obs[j]) continue;
      ComparisonVerdict v = check_two_point(psi, phi, obs[i], obs[j], max_km, cfg);
      ++total.grid.pairs_tested;
      total.grid.samples_tested += v.grid.samples_tested;
      total.max_violation = std::max(total.max_violation, v.max_violation);
      if (v.status != Verdict::kNoCounterexample) {
        total.status = v.status;
        total.witness = std::move(v.witness);
        total.note = std::move(v.note);
        return total;
      }
    }
  }
  // Singletons cover the case of a single distinct witness.
  if (total.grid.pairs_tested == 0) {
    for (double x : obs) {
      ComparisonVerdict v = check_two_point(psi, phi, x, x, 1, cfg);
      total.grid.samples_tested += v.grid.samples_tested;
      total.max_violation = std::max(total.max_violation, v.max_violation);
      if (v.status != Verdict::kNoCounterexample) {
        total.status = v.status;
        total.witness = std::move(v.witness);
        total.note = std::move(v.note);
        return total;
      }
    }
  }
  return total;
}

namespace {

// Shared first stage of (iii) and (iv).
bool theta1_stage(const PsiKernel& psi, const WitnessSet& ws, const std::vector<double>& t1_phi,
                  const SolverConfig& cfg, ComparisonVerdict& v) {
  for (std::size_t i = 0; i < ws.observations.size(); ++i) {
    const double x = ws.observations[i];
    const double a = theta1(psi, x, cfg);
    const double b = t1_phi[i];
    const double slack = estimator_slack(a, b, cfg);
    v.max_violation = std::max(v.max_violation, a - b);
    if (a > b + slack) {
      Witness w;
      w.kind = WitnessKind::kTheta1;
      w.x = w.y = x;
      w.t = kNaN;
      w.lhs = a;
      w.rhs = b;
      w.slack = slack;
      v.status = Verdict::kCounterexample;
      v.witness = std::move(w);
      return false;
    }
  }
  return true;
}

}  // namespace

ComparisonVerdict check_ratio_condition(const PsiKernel& psi,
                                        const PsiKernel& phi,
                                        const WitnessSet& ws,
                                        const SolverConfig& cfg) {
  ComparisonVerdict v;
  v.condition = Condition::kRatio;
  v.grid = grid_info(ws);
  v.max_violation = -kInf;
  const auto t1_phi = theta1_all(phi, ws.observations, cfg);
  if (!theta1_stage(psi, ws, t1_phi, cfg, v)) return v;

  const auto& obs = ws.observations;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    for (std::size_t j = 0; j < obs.size(); ++j) {
      if (!(t1_phi[i] < t1_phi[j])) continue;
      ++v.grid.pairs_tested;
      const double x = obs[i];
      const double y = obs[j];
      for (double t : ws.parameter_grid) {
        if (!(t1_phi[i] < t && t < t1_phi[j])) continue;
        const double lhs = psi.eval(x, t) * phi.eval(y, t);
        const double rhs = psi.eval(y, t) * phi.eval(x, t);
        const double slack = eval_slack(lhs, rhs);
        v.max_violation = std::max(v.max_violation, lhs - rhs);
        if (lhs > rhs + slack) {
          Witness w;
          w.kind = WitnessKind::kCross;
          w.x = x;
          w.y = y;
          w.t = t;
          w.lhs = lhs;
          w.rhs = rhs;
          w.slack = slack;
          v.status = Verdict::kCounterexample;
          v.witness = std::move(w);
          return v;
        }
      }
    }
  }
  return v;
}

double construct_multiplier(const PsiKernel& psi, const PsiKernel& phi,
                            const WitnessSet& ws, double t,
                            const SolverConfig& cfg) {
  double p = kInf;
  for (double x : ws.observations) {
    if (!(theta1(phi, x, cfg) < t)) continue;
    p = std::min(p, psi.eval(x, t) / phi.eval(x, t));
  }
  if (p == kInf) {
    throw Error(Errc::kEmptyLowerSet,
                "no witness has theta1_phi(x) < " + shortest_repr(t));
  }
  return p;
}

ComparisonVerdict validate_multiplier(const PsiKernel& psi, const PsiKernel& phi,
                                      const WitnessSet& ws,
                                      const SolverConfig& cfg) {
  ComparisonVerdict v;
  v.condition = Condition::kMultiplier;
  v.grid = grid_info(ws);
  v.max_violation = -kInf;
  const auto t1_phi = theta1_all(phi, ws.observations, cfg);
  if (!theta1_stage(psi, ws, t1_phi, cfg, v)) return v;

  for (double t : ws.parameter_grid) {
    double p = kInf;
    for (std::size_t i = 0; i < ws.observations.size(); ++i) {
      if (!(t1_phi[i] < t)) continue;
      const double x = ws.observations[i];
      p = std::min(p, psi.eval(x, t) / phi.eval(x, t));
    }
    if (p == kInf) continue;
    for (double z : ws.observations) {
      ++v.grid.pairs_tested;
      const double lhs = psi.eval(z, t);
      const double rhs = p * phi.eval(z, t);
      const double slack = eval_slack(lhs, rhs);
      v.max_violation = std::max(v.max_violation, lhs - rhs);
      if (lhs > rhs + slack || p < 0.0) {
        Witness w;
        w.kind = WitnessKind::kSandwich;
        w.x = z;
        w.y = kNaN;
        w.t = t;
        w.multiplier = p;
        w.lhs = lhs;
        w.rhs = rhs;
        w.slack = slack;
        v.status = Verdict::kCounterexample;
        v.witness = std::move(w);
        return v;
      }
    }
  }
  return v;
}

ComparisonVerdict check_derivative_condition(const PsiKernel& psi,
                                             const PsiKernel& phi,
                                             const WitnessSet& ws,
                                             double fd_step,
                                             const SolverConfig& cfg) {
  ComparisonVerdict v;
  v.condition = Condition::kDerivative;
  v.grid = grid_info(ws);
  v.max_violation = -kInf;
  const auto t1_psi = theta1_all(psi, ws.observations, cfg);
  const auto t1_phi = theta1_all(phi, ws.observations, cfg);
  for (std::size_t i = 0; i < t1_psi.size(); ++i) {
    const double gap = std::abs(t1_psi[i] - t1_phi[i]);
    if (gap > kTheta1Agreement * std::max(1.0, std::abs(t1_phi[i]))) {
      v.status = Verdict::kInconclusive;
      v.note = "theta1 differs at x = " + shortest_repr(ws.observations[i]) +
               "; derivative condition does not apply";
      return v;
    }
  }
  const auto& obs = ws.observations;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const double s = t1_phi[i];
    for (std::size_t j = 0; j < obs.size(); ++j) {
      if (i == j) continue;
      ++v.grid.pairs_tested;
      const double lhs = derivative_quotient(psi, obs[i], obs[j], s, fd_step);
      const double rhs = derivative_quotient(phi, obs[i], obs[j], s, fd_step);
      const double slack = eval_slack(lhs, rhs);
      v.max_violation = std::max(v.max_violation, lhs - rhs);
      if (lhs > rhs + slack) {
        Witness w;
        w.kind = WitnessKind::kDerivative;
        w.x = obs[i];
        w.y = obs[j];
        w.t = s;
        w.fd_step = fd_step;
        w.lhs = lhs;
        w.rhs = rhs;
        w.slack = slack;
        v.status = Verdict::kCounterexample;
        v.witness = std::move(w);
        return v;
      }
    }
  }
  return v;
}

ComparisonVerdict check_equality(const PsiKernel& psi, const PsiKernel& phi,
                                 const WitnessSet& ws, int max_n, int trials,
                                 const SolverConfig& cfg) {
  ComparisonVerdict v;
  v.condition = Condition::kEquality;
  v.grid = grid_info(ws);
  v.grid.max_n = max_n;
  v.max_violation = -kInf;
  for_each_sample(ws, max_n, trials, [&](const WeightedSample& s) {
    ++v.grid.samples_tested;
    const Solved r = solve_both(psi, phi, s, cfg);
    if (!r.ok) {
      v = inconclusive(std::move(v), s, "solver did not converge");
      return false;
    }
    const double slack = estimator_slack(r.psi, r.phi, cfg);
    const double gap = std::abs(r.psi - r.phi);
    v.max_violation = std::max(v.max_violation, gap);
    if (gap > slack) {
      v.status = Verdict::kCounterexample;
      Witness w = sample_witness(WitnessKind::kEqual, s);
      w.lhs = r.psi;
      w.rhs = r.phi;
      w.slack = slack;
      v.witness = std::move(w);
      return false;
    }
    const double lo = std::min(r.psi, r.phi);
    const double hi = std::max(r.psi, r.phi);
    const double away = slack + 1e-8 * std::max(1.0, std::abs(lo));
    for (double t : ws.parameter_grid) {
      if (t > lo - away && t < hi + away) continue;
      if (!psi.theta.contains(t) || !phi.theta.contains(t)) continue;
      const double a = weighted_sum(psi, s, t);
      const double b = weighted_sum(phi, s, t);
      if (sign_of(a) != sign_of(b)) {
        v.status = Verdict::kCounterexample;
        Witness w = sample_witness(WitnessKind::kSign, s);
        w.t = t;
        w.lhs = a;
        w.rhs = b;
        v.witness = std::move(w);
        return false;
      }
    }
    return true;
  });
  return v;
}

bool reverify(const Witness& w, const PsiKernel& psi, const PsiKernel& phi,
              const SolverConfig& cfg) {
  double lhs = 0.0;
  double rhs = 0.0;
  switch (w.kind) {
    case WitnessKind::kEstimator:
    case WitnessKind::kEqual:
    case WitnessKind::kSign: {
      const WeightedSample s(w.xs, w.weights);
      if (w.kind == WitnessKind::kSign) {
        lhs = weighted_sum(psi, s, w.t);
        rhs = weighted_sum(phi, s, w.t);
      } else {
        const Solved r = solve_both(psi, phi, s, cfg);
        if (!r.ok) return false;
        lhs = r.psi;
        rhs = r.phi;
      }
      break;
    }
    case WitnessKind::kTheta1:
      lhs = theta1(psi, w.x, cfg);
      rhs = theta1(phi, w.x, cfg);
      break;
    case WitnessKind::kCross:
      lhs = psi.eval(w.x, w.t) * phi.eval(w.y, w.t);
      rhs = psi.eval(w.y, w.t) * phi.eval(w.x, w.t);
      break;
    case WitnessKind::kSandwich:
      lhs = psi.eval(w.x, w.t);
      rhs = w.multiplier * phi.eval(w.x, w.t);
      break;
    case WitnessKind::kDerivative:
      lhs = derivative_quotient(psi, w.x, w.y, w.t, w.fd_step);
      rhs = derivative_quotient(phi, w.x, w.y, w.t, w.fd_step);
      break;
  }
  const auto close = [](double a, double b) {
    return std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(b));
  };
  if (!close(lhs, w.lhs) || !close(rhs, w.rhs)) return false;
  switch (w.kind) {
    case WitnessKind::kSign: return sign_of(lhs) != sign_of(rhs);
    case WitnessKind::kEqual: return std::abs(lhs - rhs) > w.slack;
    case WitnessKind::kSandwich: return lhs > rhs + w.slack || w.multiplier < 0.0;
    default: return lhs > rhs + w.slack;
  }
}

}  // namespace psiest
