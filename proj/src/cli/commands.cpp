#include <CLI11.hpp>

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <random>

#include "psiest/bajraktarevic.hpp"
#include "psiest/cli.hpp"
#include "psiest/comparison.hpp"
#include "psiest/error.hpp"
#include "psiest/expr.hpp"
#include "psiest/families.hpp"
#include "psiest/solver.hpp"

namespace psiest::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 1;

// Thrown for bad flags or flag combinations; exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kDomainError:
    case Errc::kSolverFailure:
    case Errc::kOutOfRange:
    case Errc::kSignViolation:
    case Errc::kDegenerateDerivative:
    case Errc::kDegenerateProbes:
    case Errc::kEmptyLowerSet:
    case Errc::kMissingClosedForm:
      return 2;
    default:
      return 1;
  }
}

double parse_double(std::string_view s, const std::string& what) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    throw UsageError("bad number '" + std::string(s) + "' for " + what);
  }
  return v;
}

OpenInterval parse_theta(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) {
    throw UsageError("--theta expects lo,hi (got '" + text + "')");
  }
  const double lo = parse_double(std::string_view(text).substr(0, comma), "--theta");
  const double hi = parse_double(std::string_view(text).substr(comma + 1), "--theta");
  return OpenInterval(lo, hi);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("PSIEST_SEED"); env && *env) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size()) {
      throw UsageError("PSIEST_SEED must be an unsigned integer");
    }
    return v;
  }
  return kDefaultSeed;
}

Json interval_json(const OpenInterval& i) { return Json::array({i.lo(), i.hi()}); }

Json sample_json(const WeightedSample& s) {
  Json j;
  j["n"] = s.size();
  j["weighted"] = !s.is_uniform();
  j["total_weight"] = s.total_weight();
  return j;
}

struct KernelChoice {
  PsiKernel kernel;
  std::optional<FamilySpec> family;
  Json echo;
};

KernelChoice build_kernel(const std::string& id_or_expr,
                          const std::vector<std::string>& params,
                          const std::string& f_expr,
                          const std::optional<std::string>& theta_text,
                          const std::string& flag) {
  if (const auto fam = parse_family(id_or_expr)) {
    FamilySpec spec;
    spec.family = *fam;
    Json echo;
    echo["family"] = std::string(family_id(*fam));
    Json pj = Json::object();
    for (const auto& kv : params) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        throw UsageError(flag + "-param expects name=value (got '" + kv + "')");
      }
      const std::string key = kv.substr(0, eq);
      const double value = parse_double(std::string_view(kv).substr(eq + 1), key);
      spec.params[key] = value;
      pj[key] = value;
    }
    echo["params"] = pj;
    if (*fam == Family::kMathieu) {
      if (f_expr.empty()) throw UsageError("mathieu needs " + flag + "-f <expr in t>");
      const Expr e = Expr::parse(f_expr);
      spec.mathieu_f = function_of_t(e);
      spec.mathieu_label = e.to_string();
      echo["f"] = e.to_string();
    } else if (!f_expr.empty()) {
      throw UsageError(flag + "-f only applies to mathieu");
    }
    KernelChoice out{make_kernel(spec), spec, echo};
    return out;
  }
  if (!params.empty()) {
    throw UsageError(flag + "-param only applies to a family kernel");
  }
  Expr e = [&] {
    try {
      return Expr::parse(id_or_expr);
    } catch (const SyntaxError& err) {
      throw UsageError("'" + id_or_expr +
                       "' is neither a family id nor a valid expression: " +
                       err.what());
    }
  }();
  if (!theta_text) throw UsageError("expression kernels need --theta lo,hi");
  const OpenInterval theta = parse_theta(*theta_text);
  PsiKernel k{"psi(x,t) = " + e.to_string(), theta,
              [e](double x, double t) { return e.eval(x, t); }, std::nullopt,
              std::nullopt, nullptr};
  Json echo;
  echo["expr"] = e.to_string();
  echo["theta"] = interval_json(theta);
  return {k, std::nullopt, echo};
}

SolverConfig solver_config(const std::optional<double>& tol) {
  SolverConfig cfg;
  if (tol) {
    cfg.abs_tol = *tol;
    cfg.rel_tol = *tol;
  }
  cfg.validate();
  return cfg;
}

Json tolerance_json(const SolverConfig& cfg) {
  Json j;
  j["abs"] = cfg.abs_tol;
  j["rel"] = cfg.rel_tol;
  return j;
}

// estimate ------------------------------------------------------------------

struct EstimateArgs {
  std::string family;
  std::string psi;
  std::vector<std::string> params;
  std::string f;
  std::optional<std::string> theta;
  std::string data;
  std::string weights;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  bool closed_form = false;
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  if (a.family.empty() == a.psi.empty()) {
    throw UsageError("estimate needs exactly one of --family or --psi");
  }
  if (!a.family.empty() && !parse_family(a.family)) {
    throw UsageError("unknown family '" + a.family + "'");
  }
  const KernelChoice kc =
      build_kernel(a.family.empty() ? a.psi : a.family, a.params, a.f, a.theta, "-");
  WeightedSample sample = read_data(a.data);
  if (!a.weights.empty()) {
    const WeightedSample w = read_data(a.weights);
    if (w.size() != sample.size()) {
      throw UsageError("--weights has " + std::to_string(w.size()) +
                       " entries for " + std::to_string(sample.size()) +
                       " observations");
    }
    sample = WeightedSample({sample.xs().begin(), sample.xs().end()},
                            {w.xs().begin(), w.xs().end()});
  }
  const SolverConfig cfg = solver_config(a.tol);

  std::optional<ClosedFormEstimate> closed;
  if (kc.family) closed = closed_form_estimate(*kc.family, sample);
  if (a.closed_form && !closed) {
    throw Error(Errc::kMissingClosedForm,
                kc.kernel.name + " has no closed-form estimator");
  }
  const SignChangeResult r = solve_sign_change(kc.kernel, sample, cfg);

  Json j;
  j["command"] = "estimate";
  j["kernel"] = kc.echo;
  j["kernel"]["name"] = kc.kernel.name;
  j["sample"] = sample_json(sample);
  j["tolerance"] = tolerance_json(cfg);
  j["seed"] = resolve_seed(a.seed);
  j["method"] = a.closed_form ? "closed_form" : "solver";
  j["status"] = std::string(status_name(r.status));
  if (a.closed_form) {
    j["theta"] = closed->value;
  } else if (r.converged()) {
    j["theta"] = r.theta;
  } else {
    j["theta"] = nullptr;
  }
  j["bracket"] = Json::array({r.bracket_lo, r.bracket_hi});
  j["iterations"] = r.iterations;
  j["residual"] = r.residual;
  if (closed) {
    Json c;
    c["value"] = closed->value;
    c["weighted_extension"] = closed->weighted_extension;
    j["closed_form"] = c;
  } else {
    j["closed_form"] = nullptr;
  }
  out << to_json_text(j);
  return r.converged() ? 0 : 2;
}

// compare -------------------------------------------------------------------

struct CompareArgs {
  std::string psi;
  std::string phi;
  std::vector<std::string> psi_params;
  std::vector<std::string> phi_params;
  std::string psi_f;
  std::string phi_f;
  std::optional<std::string> theta;
  std::string data;
  std::string condition = "direct";
  std::size_t grid = 257;
  int trials = 200;
  int max_n = 6;
  int max_km = 20;
  double fd_step = 0.0;
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
};

Json witness_json(const Witness& w, bool reverified) {
  Json j;
  j["kind"] = std::string(witness_kind_name(w.kind));
  if (!w.xs.empty()) {
    j["xs"] = w.xs;
    j["weights"] = w.weights;
  } else {
    j["xs"] = nullptr;
    j["weights"] = nullptr;
  }
  j["x"] = w.x;
  j["y"] = w.y;
  j["t"] = w.t;
  j["multiplier"] = w.kind == WitnessKind::kSandwich ? Json(w.multiplier) : Json(nullptr);
  j["fd_step"] = w.kind == WitnessKind::kDerivative ? Json(w.fd_step) : Json(nullptr);
  j["lhs"] = w.lhs;
  j["rhs"] = w.rhs;
  j["slack"] = w.slack;
  j["reverified"] = reverified;
  return j;
}

Json verdict_json(const ComparisonVerdict& v, const PsiKernel& psi,
                  const PsiKernel& phi, const SolverConfig& cfg) {
  Json j;
  j["condition"] = std::string(condition_name(v.condition));
  j["status"] = std::string(verdict_name(v.status));
  j["max_violation"] = v.max_violation;
  j["note"] = v.note;
  if (v.witness) {
    const bool ok = v.status == Verdict::kCounterexample &&
                    reverify(*v.witness, psi, phi, cfg);
    j["witness"] = witness_json(*v.witness, ok);
  } else {
    j["witness"] = nullptr;
  }
  Json g;
  g["witnesses"] = v.grid.witnesses;
  g["grid_points"] = v.grid.grid_points;
  g["samples_tested"] = v.grid.samples_tested;
  g["pairs_tested"] = v.grid.pairs_tested;
  g["seed"] = v.grid.seed;
  g["hull"] = Json::array({v.grid.hull_lo, v.grid.hull_hi});
  g["max_n"] = v.grid.max_n;
  g["max_km"] = v.grid.max_km;
  j["grid"] = g;
  return j;
}

int cmd_compare(const CompareArgs& a, std::ostream& out) {
  static const std::vector<std::string> kConditions = {
      "direct", "two-point", "ratio", "multiplier", "derivative", "equality", "all"};
  if (std::find(kConditions.begin(), kConditions.end(), a.condition) ==
      kConditions.end()) {
    throw UsageError("unknown --condition '" + a.condition + "'");
  }
  if (a.grid < 2) throw UsageError("--grid must be >= 2");
  if (a.max_n < 1 || a.max_km < 1 || a.trials < 0) {
    throw UsageError("--max-n and --max-km must be >= 1, --trials >= 0");
  }
  const KernelChoice kpsi = build_kernel(a.psi, a.psi_params, a.psi_f, a.theta, "--psi");
  const KernelChoice kphi = build_kernel(a.phi, a.phi_params, a.phi_f, a.theta, "--phi");
  const WeightedSample data = read_data(a.data);
  const SolverConfig cfg = solver_config(a.tol);
  const std::uint64_t seed = resolve_seed(a.seed);
  const std::vector<double> obs(data.xs().begin(), data.xs().end());
  const WitnessSet ws = make_witness_set(kphi.kernel, obs, seed, a.grid, a.grid - 1, cfg);

  const auto run_one = [&](Condition c) {
    try {
      switch (c) {
        case Condition::kDirect:
          return check_direct(kpsi.kernel, kphi.kernel, ws, a.max_n, a.trials, cfg);
        case Condition::kTwoPoint:
          return check_two_point_all(kpsi.kernel, kphi.kernel, ws, a.max_km, cfg);
        case Condition::kRatio:
          return check_ratio_condition(kpsi.kernel, kphi.kernel, ws, cfg);
        case Condition::kMultiplier:
          return validate_multiplier(kpsi.kernel, kphi.kernel, ws, cfg);
        case Condition::kDerivative:
          return check_derivative_condition(kpsi.kernel, kphi.kernel, ws, a.fd_step, cfg);
        case Condition::kEquality:
          return check_equality(kpsi.kernel, kphi.kernel, ws, a.max_n, a.trials, cfg);
      }
    } catch (const Error& e) {
      if (exit_code_for(e.code()) != 2) throw;
      ComparisonVerdict v;
      v.condition = c;
      v.status = Verdict::kInconclusive;
      v.note = e.what();
      return v;
    }
    return ComparisonVerdict{};
  };

  std::vector<Condition> conditions;
  if (a.condition == "all") {
    conditions = {Condition::kDirect, Condition::kTwoPoint, Condition::kRatio,
                  Condition::kMultiplier, Condition::kDerivative};
  } else {
    for (Condition c : {Condition::kDirect, Condition::kTwoPoint, Condition::kRatio,
                        Condition::kMultiplier, Condition::kDerivative,
                        Condition::kEquality}) {
      if (condition_name(c) == a.condition) conditions.push_back(c);
    }
  }

  Json verdicts = Json::array();
  bool any_counter = false;
  bool any_inconclusive = false;
  for (Condition c : conditions) {
    const ComparisonVerdict v = run_one(c);
    if (v.status == Verdict::kCounterexample) any_counter = true;
    // In "all" mode a derivative check whose hypotheses fail does not taint
    // the overall verdict.
    if (v.status == Verdict::kInconclusive &&
        !(conditions.size() > 1 && c == Condition::kDerivative)) {
      any_inconclusive = true;
    }
    verdicts.push_back(verdict_json(v, kpsi.kernel, kphi.kernel, cfg));
  }
  const Verdict overall = any_counter        ? Verdict::kCounterexample
                          : any_inconclusive ? Verdict::kInconclusive
                                             : Verdict::kNoCounterexample;

  Json j;
  j["command"] = "compare";
  j["psi"] = kpsi.echo;
  j["psi"]["name"] = kpsi.kernel.name;
  j["phi"] = kphi.echo;
  j["phi"]["name"] = kphi.kernel.name;
  j["witnesses"] = obs;
  j["seed"] = seed;
  j["tolerance"] = tolerance_json(cfg);
  j["condition"] = a.condition;
  j["status"] = std::string(verdict_name(overall));
  j["verdicts"] = verdicts;
  out << to_json_text(j);
  switch (overall) {
    case Verdict::kNoCounterexample: return 0;
    case Verdict::kCounterexample: return 3;
    case Verdict::kInconclusive: return 2;
  }
  return 2;
}

// mobius-test ---------------------------------------------------------------

struct MobiusArgs {
  std::string f;
  std::string g;
  std::string theta;
  std::size_t probes = 16;
  int quadruples = 100;
  std::optional<std::uint64_t> seed;
};

int cmd_mobius_test(const MobiusArgs& a, std::ostream& out) {
  if (a.probes < 4) throw UsageError("--probes must be >= 4");
  if (a.quadruples < 1) throw UsageError("--quadruples must be >= 1");
  const Expr fe = Expr::parse(a.f);
  const Expr ge = Expr::parse(a.g);
  if (fe.uses_x() || ge.uses_x()) throw UsageError("--f and --g are functions of t");
  const OpenInterval theta = parse_theta(a.theta);
  const std::uint64_t seed = resolve_seed(a.seed);
  const RealFn f = function_of_t(fe);
  const RealFn g = function_of_t(ge);

  const auto ts = theta.interior_grid(a.probes);
  std::vector<double> fv;
  std::vector<double> gv;
  for (double t : ts) {
    fv.push_back(f(t));
    gv.push_back(g(t));
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> idx(ts.size());
  double max_abs = 0.0;
  double max_rel = 0.0;
  Json worst = nullptr;
  for (int q = 0; q < a.quadruples; ++q) {
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    // Partial Fisher-Yates for four distinct probes.
    for (std::size_t i = 0; i < 4; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, idx.size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
    }
    std::array<std::size_t, 4> chosen{idx[0], idx[1], idx[2], idx[3]};
    std::sort(chosen.begin(), chosen.end());
    std::array<double, 4> fq{};
    std::array<double, 4> gq{};
    for (int i = 0; i < 4; ++i) {
      fq[i] = fv[chosen[i]];
      gq[i] = gv[chosen[i]];
    }
    const double det = determinant_test(fq, gq);
    const double scale = determinant_scale(fq, gq);
    const double rel = scale > 0.0 ? std::abs(det) / scale : std::abs(det);
    max_abs = std::max(max_abs, std::abs(det));
    if (worst.is_null() || rel > max_rel) {
      max_rel = rel;
      worst = Json::object();
      worst["t"] = Json::array({ts[chosen[0]], ts[chosen[1]], ts[chosen[2]], ts[chosen[3]]});
      worst["det"] = det;
      worst["scale"] = scale;
    }
  }

  double s_max = 0.0;
  std::size_t s_points = 0;
  for (double t : ts) {
    double step = std::max(1e-2, 1e-2 * std::abs(t));
    const double room = std::min(t - theta.lo(), theta.hi() - t) / 3.0;
    step = std::min(step, room);
    if (!(step > 0.0)) continue;
    s_max = std::max(s_max, std::abs(relative_schwarzian(f, g, t, step)));
    ++s_points;
  }

  const auto fit = mobius_fit(fv, gv);

  Json j;
  j["command"] = "mobius-test";
  j["f"] = fe.to_string();
  j["g"] = ge.to_string();
  j["theta"] = interval_json(theta);
  j["seed"] = seed;
  j["probes"] = ts;
  Json d;
  d["quadruples"] = a.quadruples;
  d["max_abs"] = max_abs;
  d["max_relative"] = max_rel;
  d["worst"] = worst;
  j["determinant"] = d;
  Json s;
  s["points"] = s_points;
  s["max_abs"] = s_max;
  j["schwarzian"] = s;
  j["status"] = fit ? "Fit" : "NoFit";
  if (fit) {
    Json c;
    c["a"] = fit->coeffs.a;
    c["b"] = fit->coeffs.b;
    c["c"] = fit->coeffs.c;
    c["d"] = fit->coeffs.d;
    c["ad_minus_bc"] = fit->coeffs.det();
    c["max_residual"] = fit->max_residual;
    c["scale"] = fit->scale;
    j["fit"] = c;
  } else {
    j["fit"] = nullptr;
  }
  out << to_json_text(j);
  return 0;
}

// bounds --------------------------------------------------------------------

struct BoundsArgs {
  double alpha = 0.0;
  std::string data;
  std::optional<double> tol;
};

int cmd_bounds(const BoundsArgs& a, std::ostream& out) {
  const WeightedSample sample = read_data(a.data);
  const SolverConfig cfg = solver_config(a.tol);
  const FamilySpec spec = families::beta_beta(a.alpha);
  const PsiKernel k = make_kernel(spec);
  const BetaBounds b = beta_alpha_bounds(a.alpha, sample);
  const SignChangeResult r = solve_sign_change(k, sample, cfg);
  const double slack = 10.0 * cfg.width_tol(r.theta);
  const bool inside = r.converged() && b.lower - slack <= r.theta &&
                      r.theta <= b.upper + slack;

  Json j;
  j["command"] = "bounds";
  j["alpha"] = a.alpha;
  j["sample"] = sample_json(sample);
  j["tolerance"] = tolerance_json(cfg);
  j["lower"] = b.lower;
  j["upper"] = b.upper;
  j["status"] = std::string(status_name(r.status));
  j["estimate"] = r.theta;
  j["iterations"] = r.iterations;
  j["inside"] = inside;
  out << to_json_text(j);
  return r.converged() ? 0 : 2;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generalized psi-estimators: estimation, comparison and Mobius tests",
               "psiest"};
  app.require_subcommand(1);

  EstimateArgs ea;
  auto* est = app.add_subcommand("estimate", "Solve for the point of sign change");
  est->add_option("--family", ea.family, "Catalog family id");
  est->add_option("--psi", ea.psi, "Kernel expression in x and t");
  est->add_option("--param", ea.params, "Family parameter name=value");
  est->add_option("--f", ea.f, "Mathieu function f(t)");
  est->add_option("--theta", ea.theta, "Parameter interval lo,hi for --psi");
  est->add_option("--data", ea.data, "Data file or inline [a,b,...]")->required();
  est->add_option("--weights", ea.weights, "Weights file or inline list");
  est->add_option("--tol", ea.tol, "Absolute and relative tolerance");
  est->add_option("--seed", ea.seed, "Seed (echoed)");
  est->add_flag("--closed-form", ea.closed_form, "Report the closed-form estimator");

  CompareArgs ca;
  auto* cmp = app.add_subcommand("compare", "Check comparison conditions");
  cmp->add_option("--psi", ca.psi, "Family id or expression")->required();
  cmp->add_option("--phi", ca.phi, "Family id or expression")->required();
  cmp->add_option("--psi-param", ca.psi_params, "name=value for psi");
  cmp->add_option("--phi-param", ca.phi_params, "name=value for phi");
  cmp->add_option("--psi-f", ca.psi_f, "Mathieu f(t) for psi");
  cmp->add_option("--phi-f", ca.phi_f, "Mathieu f(t) for phi");
  cmp->add_option("--theta", ca.theta, "Parameter interval lo,hi for expressions");
  cmp->add_option("--data", ca.data, "Witness observations")->required();
  cmp->add_option("--condition", ca.condition,
                  "direct|two-point|ratio|multiplier|derivative|equality|all");
  cmp->add_option("--grid", ca.grid, "Equispaced grid size (random points: grid-1)");
  cmp->add_option("--trials", ca.trials, "Random samples per check");
  cmp->add_option("--max-n", ca.max_n, "Largest random sample size");
  cmp->add_option("--max-km", ca.max_km, "Largest k+m for two-point samples");
  cmp->add_option("--fd-step", ca.fd_step, "Finite-difference step (0: automatic)");
  cmp->add_option("--tol", ca.tol, "Absolute and relative solver tolerance");
  cmp->add_option("--seed", ca.seed, "Random seed (default: $PSIEST_SEED or 1)");

  MobiusArgs ma;
  auto* mob = app.add_subcommand("mobius-test", "Test whether g is a Mobius transform of f");
  mob->add_option("--f", ma.f, "f(t)")->required();
  mob->add_option("--g", ma.g, "g(t)")->required();
  mob->add_option("--theta", ma.theta, "Interval lo,hi")->required();
  mob->add_option("--probes", ma.probes, "Number of probe points");
  mob->add_option("--quadruples", ma.quadruples, "Random determinant quadruples");
  mob->add_option("--seed", ma.seed, "Random seed (default: $PSIEST_SEED or 1)");

  BoundsArgs ba;
  auto* bnd = app.add_subcommand("bounds", "Beta shape estimate and its bounds");
  bnd->add_option("--alpha", ba.alpha, "Known alpha > 0")->required();
  bnd->add_option("--data", ba.data, "Observations in (0,1)")->required();
  bnd->add_option("--tol", ba.tol, "Absolute and relative solver tolerance");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  std::string command = "psiest";
  try {
    if (est->parsed()) {
      command = "estimate";
      return cmd_estimate(ea, out);
    }
    if (cmp->parsed()) {
      command = "compare";
      return cmd_compare(ca, out);
    }
    if (mob->parsed()) {
      command = "mobius-test";
      return cmd_mobius_test(ma, out);
    }
    command = "bounds";
    return cmd_bounds(ba, out);
  } catch (const UsageError& e) {
    err << "psiest " << command << ": " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    const int code = exit_code_for(e.code());
    if (code == 2) {
      Json j;
      j["command"] = command;
      j["error"] = {{"code", std::string(errc_name(e.code()))}, {"message", e.what()}};
      out << to_json_text(j);
    }
    err << "psiest " << command << ": " << e.what() << "\n";
    return code;
  }
}

}  // namespace psiest::cli
