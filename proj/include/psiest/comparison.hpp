#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "psiest/kernel.hpp"
#include "psiest/solver.hpp"

namespace psiest {

/// Finite stand-in for the observation space and for the interior of the
/// theta1 hull of the reference kernel.
struct WitnessSet {
  std::vector<double> observations;
  std::vector<double> parameter_grid;  // sorted, strictly inside the hull
  std::uint64_t seed = 0;
  double hull_lo = 0.0;  // NaN when the hull is empty
  double hull_hi = 0.0;
};

/// grid_equi equispaced points over the theta1 hull of `reference` shrunk by a
/// relative margin of 1e-6, plus grid_random seeded uniform points. An empty
/// hull gives an empty grid.
WitnessSet make_witness_set(const PsiKernel& reference,
                            std::vector<double> observations, std::uint64_t seed,
                            std::size_t grid_equi = 257,
                            std::size_t grid_random = 256,
                            const SolverConfig& cfg = {});

enum class Verdict { kNoCounterexample, kCounterexample, kInconclusive };
enum class Condition { kDirect, kTwoPoint, kRatio, kMultiplier, kDerivative, kEquality };

std::string_view verdict_name(Verdict v);
std::string_view condition_name(Condition c);

/// What a witness claims was violated.
enum class WitnessKind {
  kEstimator,   // theta_psi(sample) <= theta_phi(sample)        lhs, rhs = thetas
  kTheta1,      // theta1_psi(x) <= theta1_phi(x)                 lhs, rhs = theta1s
  kCross,       // psi(x,t) phi(y,t) <= psi(y,t) phi(x,t)
  kSandwich,    // psi(x,t) <= p(t) phi(x,t)                      y unused
  kDerivative,  // -psi(y,s)/d2psi(x,s) <= -phi(y,s)/d2phi(x,s)   t = s = theta1(x)
  kSign,        // sign sum psi(sample,t) == sign sum phi(sample,t)
  kEqual,       // |theta_psi(sample) - theta_phi(sample)| <= 10 tol
};

std::string_view witness_kind_name(WitnessKind k);

struct Witness {
  WitnessKind kind = WitnessKind::kEstimator;
  std::vector<double> xs;       // sample for estimator-type witnesses
  std::vector<double> weights;
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  double multiplier = 0.0;      // kSandwich only
  double fd_step = 0.0;         // kDerivative only; 0 when d2 is closed-form
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;           // violation means lhs > rhs + slack
};

struct GridInfo {
  std::size_t witnesses = 0;
  std::size_t grid_points = 0;
  std::size_t samples_tested = 0;
  std::size_t pairs_tested = 0;
  std::uint64_t seed = 0;
  double hull_lo = 0.0;
  double hull_hi = 0.0;
  int max_n = 0;
  int max_km = 0;
};

struct ComparisonVerdict {
  Verdict status = Verdict::kNoCounterexample;
  Condition condition = Condition::kDirect;
  std::optional<Witness> witness;
  GridInfo grid;
  double max_violation = 0.0;  // largest lhs - rhs seen over all checks
  std::string note;
};

/// theta_psi <= theta_phi on every singleton, then on `trials` random samples
/// of size 1..max_n drawn with replacement from the witnesses.
ComparisonVerdict check_direct(const PsiKernel& psi, const PsiKernel& phi,
                               const WitnessSet& ws, int max_n, int trials = 200,
                               const SolverConfig& cfg = {});

/// Weights (k, m) on the sample (x, y), k + m <= max_km, including (1,0), (0,1).
ComparisonVerdict check_two_point(const PsiKernel& psi, const PsiKernel& phi,
                                  double x, double y, int max_km,
                                  const SolverConfig& cfg = {});

/// check_two_point over every ordered pair of distinct witnesses.
ComparisonVerdict check_two_point_all(const PsiKernel& psi, const PsiKernel& phi,
                                      const WitnessSet& ws, int max_km,
                                      const SolverConfig& cfg = {});

ComparisonVerdict check_ratio_condition(const PsiKernel& psi,
                                        const PsiKernel& phi,
                                        const WitnessSet& ws,
                                        const SolverConfig& cfg = {});

/// inf { psi(x,t)/phi(x,t) : theta1_phi(x) < t } over the witnesses. Throws
/// Error(kEmptyLowerSet) when no witness qualifies.
double construct_multiplier(const PsiKernel& psi, const PsiKernel& phi,
                            const WitnessSet& ws, double t,
                            const SolverConfig& cfg = {});

/// theta1 ordering, then psi(z,t) <= p(t) phi(z,t) over witnesses x grid.
ComparisonVerdict validate_multiplier(const PsiKernel& psi, const PsiKernel& phi,
                                      const WitnessSet& ws,
                                      const SolverConfig& cfg = {});

/// Needs theta1_psi = theta1_phi on the witnesses (within 1e-8); otherwise
/// the verdict is Inconclusive. fd_step <= 0 picks 1e-6 max(1, |t|) for
/// kernels without a closed-form derivative.
ComparisonVerdict check_derivative_condition(const PsiKernel& psi,
                                             const PsiKernel& phi,
                                             const WitnessSet& ws,
                                             double fd_step = 0.0,
                                             const SolverConfig& cfg = {});

/// |theta_psi - theta_phi| <= 10 tol on singletons and random samples, plus
/// sign agreement of the two sums on the grid away from the estimates.
ComparisonVerdict check_equality(const PsiKernel& psi, const PsiKernel& phi,
                                 const WitnessSet& ws, int max_n,
                                 int trials = 200, const SolverConfig& cfg = {});

/// Recomputes the witness from the kernels. True when the recomputed lhs/rhs
/// match the stored ones within 1e-12 relative and still violate.
bool reverify(const Witness& w, const PsiKernel& psi, const PsiKernel& phi,
              const SolverConfig& cfg = {});

}  // namespace psiest
