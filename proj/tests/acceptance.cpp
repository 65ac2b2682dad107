// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
// failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dgdlab/bounds.hpp"
#include "dgdlab/config.hpp"
#include "dgdlab/error.hpp"
#include "dgdlab/experiments.hpp"
#include "dgdlab/lifted.hpp"
#include "dgdlab/simulator.hpp"
#include "helpers.hpp"

using namespace dgdlab;
namespace dt = dgdlab::testing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

MixingMatrix experiment_mixing() { return validate(dt::experiment_w()); }

// m=3, n=2 recipe ensembles with at least one indefinite local cost.
std::vector<QuadraticEnsemble> indefinite_instances(std::size_t count, std::uint64_t first_seed) {
  return dt::seeded_instances(count, 3, 2, 1.0, {.require_indefinite_local = true}, first_seed);
}

bool agrees(const TrajectoryRecord& rec, const OracleVerdict& o) {
  if (rec.verdict == Verdict::undecided) return false;
  return (rec.verdict == Verdict::bounded) == o.bounded;
}

Outcome paper_numbers() {
  const double ck = ck_bound(1.0, 10.0, 0.1);
  const double yly = yly_bound(0.25, 7.2615);
  const double lm = experiment_mixing().spectral().lambda_min;
  Outcome o;
  o.pass = std::abs(ck - 0.0075) <= 1e-4 && std::abs(yly - 0.1721) <= 1e-3 && std::abs(lm - 0.25) <= 1e-10;
  o.detail = fmt("ck_bound=%.6f yly_bound=%.6f lambda_min=%.12f", ck, yly, lm);
  return o;
}

Outcome stepsize_sweep() {
  const auto instances = indefinite_instances(20, 1);
  const MixingMatrix w = experiment_mixing();
  int found = 0, below_ok = 0, below_total = 0, above_ok = 0, above_total = 0, critical = 0;
  std::vector<std::string> problems;
  RunOptions opt;
  opt.horizon = 10000;
  for (const auto& e : instances) {
    const LiftedObjective obj(e, w);
    AlphaThreshold t;
    try {
      t = obj.find_alpha_A();
    } catch (const Error&) {
      continue;
    }
    if (t.unbounded) continue;
    ++found;
    const double alpha_l = yly_bound(w.spectral().lambda_min, e.smoothness_L());
    const double base = std::min(t.alpha_A, alpha_l);
    for (double k : {0.5, 0.95, 0.99}) {
      const auto rec = run(e, w, StepsizeSchedule::constant(k * base), Vector(6, 0.0), opt);
      ++below_total;
      if (rec.verdict == Verdict::bounded) ++below_ok;
      else problems.push_back(fmt("%.2f*min: %s", k, std::string(to_string(rec.verdict)).c_str()));
    }
    for (double k : {1.01, 1.02}) {
      const OracleVerdict oracle = boundedness_oracle(e, w, k * t.alpha_A);
      if (oracle.critical) {
        ++critical;
        continue;
      }
      const auto rec = run(e, w, StepsizeSchedule::constant(k * t.alpha_A), Vector(6, 0.0), opt);
      ++above_total;
      if (agrees(rec, oracle)) ++above_ok;
      else problems.push_back(fmt("%.2f*alpha_A: sim %s, rho=%.9f", k, std::string(to_string(rec.verdict)).c_str(),
                                  oracle.spectral_radius));
    }
  }
  Outcome o;
  o.pass = found == 20 && below_ok == below_total && above_ok == above_total && above_total > 0;
  o.detail = fmt("%d/20 alpha_A found; bounded below %d/%d; oracle agreement above %d/%d (%d critical skipped)",
                 found, below_ok, below_total, above_ok, above_total, critical);
  for (const auto& p : problems) o.detail += "; " + p;
  return o;
}

Outcome oracle_equivalence() {
  const MixingMatrix w = experiment_mixing();
  std::mt19937_64 gen(2024);
  std::uniform_real_distribution<double> log_multiple(std::log(0.3), std::log(3.0));
  struct Pair {
    QuadraticEnsemble e;
    double alpha;
    OracleVerdict oracle;
  };
  std::vector<Pair> pairs;
  int skipped_critical = 0;
  for (const auto& e : indefinite_instances(60, 5000)) {
    const LiftedObjective obj(e, w);
    const double alpha_a = obj.find_alpha_A().alpha_A;
    for (int j = 0; j < 4 && pairs.size() < 200; ++j) {
      const double alpha = alpha_a * std::exp(log_multiple(gen));
      OracleVerdict v = boundedness_oracle(e, w, alpha);
      v.matrix = SymMatrix();
      if (std::abs(v.spectral_radius - 1.0) <= 1e-6) {
        ++skipped_critical;
        continue;
      }
      pairs.push_back({e, alpha, v});
    }
    if (pairs.size() == 200) break;
  }
  std::vector<int> agree(pairs.size(), 0);
  std::vector<std::string> verdicts(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t i) {
    const auto rec = run(pairs[i].e, w, StepsizeSchedule::constant(pairs[i].alpha), Vector(6, 0.0), {});
    agree[i] = agrees(rec, pairs[i].oracle);
    verdicts[i] = std::string(to_string(rec.verdict));
  });
  int ok = 0, bounded = 0;
  std::string misses;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    ok += agree[i];
    bounded += pairs[i].oracle.bounded;
    if (!agree[i]) misses += fmt("; miss rho=%.9f sim=%s", pairs[i].oracle.spectral_radius, verdicts[i].c_str());
  }
  Outcome o;
  o.pass = pairs.size() == 200 && ok == 200;
  o.detail = fmt("%d/%zu agree (%d oracle-bounded, %d diverging, %d critical skipped)", ok, pairs.size(), bounded,
                 static_cast<int>(pairs.size()) - bounded, skipped_critical) +
             misses;
  return o;
}

struct CertifiedPair {
  const QuadraticEnsemble* e;
  double alpha;
  ScCertificate cert;
};

Outcome monotonicity(const std::vector<QuadraticEnsemble>& instances) {
  const MixingMatrix w = experiment_mixing();
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int pairs = 0, checks = 0, ok = 0;
  double worst = INFINITY;
  for (const auto& e : instances) {
    const LiftedObjective obj(e, w);
    const double top = obj.find_alpha_A().certified_alpha();
    const double alpha = top * (1.0 - u(gen));
    const ScCertificate ca = obj.certify(alpha);
    if (!ca.is_strongly_convex) continue;
    ++pairs;
    for (int j = 0; j < 5; ++j) {
      const double beta = alpha * (1.0 - u(gen));
      if (!(beta > 0.0)) continue;
      const ScCertificate cb = obj.certify(beta);
      const double margin = cb.min_hessian_eig - (beta / alpha * ca.modulus - 1e-9);
      worst = std::min(worst, margin);
      ++checks;
      if (cb.is_strongly_convex && margin >= 0.0) ++ok;
    }
    if (pairs == 100) break;
  }
  Outcome o;
  o.pass = pairs == 100 && checks == 500 && ok == 500;
  o.detail = fmt("%d pairs, %d/%d beta checks hold, smallest margin %.3g", pairs, ok, checks, worst);
  return o;
}

Outcome aggregate_convexity(const std::vector<QuadraticEnsemble>& instances) {
  const MixingMatrix w = experiment_mixing();
  int total = 0, weak = 0, strong = 0;
  double worst_ratio = INFINITY;
  for (const auto& e : instances) {
    const LiftedObjective obj(e, w);
    const double top = obj.find_alpha_A().certified_alpha();
    const double agg = dt::min_eig_oracle(e.aggregate_hessian());
    for (double f : {0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0}) {
      const ScCertificate c = obj.certify(f * top);
      if (!c.is_strongly_convex) continue;
      ++total;
      if (agg >= c.modulus / (2.0 * c.alpha) - 1e-9) ++weak;
      if (agg >= c.modulus / c.alpha - 1e-9) ++strong;
      worst_ratio = std::min(worst_ratio, agg / (c.modulus / c.alpha));
    }
  }
  Outcome o;
  o.pass = total > 0 && weak == total;
  o.detail = fmt("weak form %d/%d; strong form mu_G/alpha held on %d/%d (min ratio %.4f)", weak, total, strong, total,
                 worst_ratio);
  return o;
}

// Checks adjacent grid pairs in (top/10, top] with alpha0 = top.
struct LipschitzTally {
  int pairs = 0;
  int ok = 0;
  double max_ratio = 0.0;  // lhs / bound
};

void lipschitz_grid(const LiftedObjective& obj, double top, LipschitzTally& tally) {
  const ScCertificate c0 = obj.certify(top);
  if (!c0.is_strongly_convex) return;
  const int n = 40;
  std::vector<double> alphas;
  for (int i = 0; i <= n; ++i) alphas.push_back(top / 10.0 + (top - top / 10.0) * i / n);
  alphas.front() *= 1.0 + 1e-9;  // open at top/10
  const MinimizerCurve curve = obj.minimizer_curve(alphas);
  for (std::size_t i = 0; i + 1 < curve.points.size(); ++i) {
    const auto& lo = curve.points[i];
    const auto& hi = curve.points[i + 1];
    const double c1 = estimate_c1(obj, lo.x, hi.x);
    // Dividing by the larger stepsize gives the tighter of the two readings.
    const double bound = minimizer_lipschitz_bound(top, c0.modulus, c1, lo.alpha, hi.alpha);
    const double lhs = distance(lo.x, hi.x);
    ++tally.pairs;
    if (lhs <= bound + 1e-8) ++tally.ok;
    if (bound > 0.0) tally.max_ratio = std::max(tally.max_ratio, lhs / bound);
  }
}

Outcome lipschitz() {
  const MixingMatrix w = experiment_mixing();
  LipschitzTally at_a, at_half;
  int instances = 0;
  for (const auto& e : indefinite_instances(20, 3000)) {
    bool b_nonzero = false;
    for (const auto& c : e.costs()) b_nonzero |= norm(c.b) > 0.0;
    if (!b_nonzero) continue;
    const LiftedObjective obj(e, w);
    const double alpha_a = obj.find_alpha_A().alpha_A;
    ++instances;
    lipschitz_grid(obj, alpha_a, at_a);
    lipschitz_grid(obj, 0.5 * alpha_a, at_half);
  }
  Outcome o;
  o.pass = instances == 20 && at_a.pairs > 0 && at_a.ok == at_a.pairs && at_half.ok == at_half.pairs;
  o.detail = fmt("%d instances; alpha0=alpha_A: %d/%d pairs (max lhs/bound %.3g); alpha0=alpha_A/2: %d/%d (max %.3g)",
                 instances, at_a.ok, at_a.pairs, at_a.max_ratio, at_half.ok, at_half.pairs, at_half.max_ratio);
  return o;
}

Outcome nonexpansive() {
  const MixingMatrix w = experiment_mixing();
  std::mt19937_64 gen(77);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  int instances = 0, clean = 0;
  long steps = 0;
  double worst = -INFINITY;
  for (const auto& e : dt::seeded_instances(50, 3, 2, 1.0, {}, 7000)) {
    const LiftedObjective obj(e, w);
    const AlphaThreshold t = obj.find_alpha_A();
    const double alpha_l = yly_bound(w.spectral().lambda_min, e.smoothness_L());
    const double alpha = u(gen) * std::min(alpha_l, t.certified_alpha());
    RunOptions opt;
    opt.horizon = 2000;
    opt.record_every = 1;
    const auto rec = run(e, w, StepsizeSchedule::constant(alpha), dt::random_vector(gen, 6, -5.0, 5.0), opt);
    const NonexpansivenessReport r = nonexpansiveness_check(rec, obj);
    ++instances;
    steps += static_cast<long>(r.steps.size());
    worst = std::max(worst, r.max_core_excess);
    if (r.core_violations == 0) ++clean;
  }
  Outcome o;
  o.pass = instances == 50 && clean == 50;
  o.detail = fmt("%d/%d instances non-increasing over %ld steps; largest step increase %.3g", clean, instances, steps,
                 worst);
  return o;
}

Outcome single_agent_contraction() {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int runs = 0;
  long checks = 0, ok = 0;
  double worst = -INFINITY;
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 1 + trial % 3;
    std::vector<double> d(n);
    for (double& v : d) v = 0.2 + 10.0 * u(gen);
    const double mu = *std::min_element(d.begin(), d.end());
    const double big_l = *std::max_element(d.begin(), d.end());
    const QuadraticEnsemble e =
        dt::make_ensemble({dt::with_spectrum(dt::random_orthogonal(gen, n), d)}, {dt::random_vector(gen, n)});
    const double alpha = (0.05 + 0.95 * u(gen)) * classical_gd_bound(mu, big_l);
    const double factor = 1.0 - 2.0 * big_l * mu * alpha / (big_l + mu);
    RunOptions opt;
    opt.horizon = 500;
    opt.record_every = 1;
    const auto rec =
        run(e, validate({{1.0}}), StepsizeSchedule::constant(alpha), dt::random_vector(gen, n, -10.0, 10.0), opt);
    const Vector& xs = e.minimizer();
    for (std::size_t t = 0; t + 1 < rec.states.size(); ++t) {
      const double before = distance(rec.states[t].x, xs);
      const double after = distance(rec.states[t + 1].x, xs);
      const double excess = after * after - factor * before * before;
      worst = std::max(worst, excess);
      ++checks;
      if (excess <= 1e-10) ++ok;
    }
    ++runs;
  }
  Outcome o;
  o.pass = ok == checks && checks > 0;
  o.detail = fmt("%d runs, %ld/%ld steps within the contraction factor, largest excess %.3g", runs, ok, checks, worst);
  return o;
}

Outcome figure_two() {
  ExperimentConfig c = parse_config_text(R"({
    "ensemble": {"type": "epsilon_example", "L": 10, "mu": 1, "epsilon": 0},
    "mixing": {"W": [[0.4, 0.3, 0.3], [0.3, 0.3, 0.4], [0.3, 0.4, 0.3]]}})");
  const auto rows = sweep_epsilon(c);
  c.agent_scale = true;
  const auto literal = sweep_epsilon(c);

  bool ok = rows.size() == 20;
  double previous = INFINITY;
  const double first_s = rows.empty() || !rows.front().alpha_S ? NAN : *rows.front().alpha_S;
  std::string crossing = "none";
  std::string literal_crossing = "none";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (!r.alpha_A || !r.alpha_S || !r.alpha_L) {
      ok = false;
      continue;
    }
    ok = ok && *r.alpha_A <= previous;
    ok = ok && *r.alpha_S == first_s && std::abs(*r.alpha_S - 0.0075) <= 1e-4;
    previous = *r.alpha_A;
    if (crossing == "none" && *r.alpha_A < *r.alpha_L) crossing = fmt("%.1f", r.epsilon);
    if (literal_crossing == "none" && literal[i].alpha_A && *literal[i].alpha_A < 0.2)
      literal_crossing = fmt("%.1f", r.epsilon);
  }
  Outcome o;
  o.pass = ok;
  o.detail = fmt("alpha_A %.4f (eps=0.5) .. %.4f (eps=10) non-increasing; alpha_S=%.6f; alpha_L=%.4f; "
                 "first eps with alpha_A < alpha_L: %s; per-agent alpha_A first below 0.2 at eps %s",
                 rows.front().alpha_A.value_or(NAN), rows.back().alpha_A.value_or(NAN), first_s,
                 rows.front().alpha_L.value_or(NAN), crossing.c_str(), literal_crossing.c_str());
  return o;
}

Outcome envelope() {
  const MixingMatrix w = experiment_mixing();
  std::mt19937_64 gen(99);
  int instances = 0, clean = 0;
  long steps = 0;
  double worst_mean = 0.0, worst_cons = 0.0;
  for (const auto& e : dt::seeded_instances(20, 3, 2, 1.0, {}, 9000)) {
    const double mu = e.aggregate_mu(), big_l = e.smoothness_L();
    const double alpha0 = 0.5 * ck_bound(mu, big_l, w.spectral().beta);
    const double eta = eta_constant(mu, big_l);
    const Vector x0 = dt::random_vector(gen, 6, -5.0, 5.0);
    const double big_r = radius_R(e, w, x0, alpha0);
    bool good = true;
    for (StepConvention conv : {StepConvention::agent_scale, StepConvention::lifted}) {
      for (const StepsizeSchedule& s :
           {StepsizeSchedule::constant(alpha0), StepsizeSchedule::polynomial(alpha0, 1.0, 0.5)}) {
        RunOptions opt;
        opt.horizon = 10000;
        opt.convention = conv;
        opt.track_lifted_min = false;
        const auto rec = run(e, w, s, x0, opt);
        for (const auto& m : rec.metrics) {
          const double slack = 1e-12 * std::max(1.0, big_r);
          worst_mean = std::max(worst_mean, m.mean_err / big_r);
          worst_cons = std::max(worst_cons, m.consensus_err / (eta * big_r / big_l));
          good = good && m.mean_err <= big_r + slack && m.consensus_err <= eta * big_r / big_l + slack;
          ++steps;
        }
      }
    }
    ++instances;
    if (good) ++clean;
  }
  Outcome o;
  o.pass = instances == 20 && clean == 20;
  o.detail = fmt("%d/%d instances inside the envelope over %ld steps (both conventions, constant and polynomial); "
                 "max |xbar-x*|/R %.4f, max consensus/(eta R/L) %.4f",
                 clean, instances, steps, worst_mean, worst_cons);
  return o;
}

}  // namespace

int main() {
  const auto certified = dt::seeded_instances(100, 3, 2, 1.0, {}, 11000);

  struct Criterion {
    int id;
    const char* name;
    double budget_s;  // stated runtime, 0 when none
    std::function<Outcome()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "bound formulas vs printed constants", 1.0, paper_numbers},
      {2, "seeded stepsize sweep vs oracle", 60.0, stepsize_sweep},
      {3, "simulator verdict equals spectral-radius oracle on 200 pairs", 120.0, oracle_equivalence},
      {4, "monotonicity of the certified modulus", 0.0, [&] { return monotonicity(certified); }},
      {5, "certified lifted objective bounds aggregate convexity", 0.0, [&] { return aggregate_convexity(certified); }},
      {6, "Lipschitz continuity of the lifted minimizer", 0.0, lipschitz},
      {7, "non-expansive steps at constant stepsize", 0.0, nonexpansive},
      {8, "single-agent contraction factor", 0.0, single_agent_contraction},
      {9, "epsilon sweep: alpha_A non-increasing, alpha_S constant", 0.0, figure_two},
      {10, "trajectory envelope at half the consensus-rate bound", 0.0, envelope},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs > c.budget_s) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budget_s);
    }
    if (!o.pass) ++failures;
    std::printf("[%s] criterion %d: %s (%.2f s) -- %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, secs,
                o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
