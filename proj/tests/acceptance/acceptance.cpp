// Acceptance gate: one PASS/FAIL line per criterion.
#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "cvverify/errors.hpp"
#include "cvverify/estimator.hpp"
#include "cvverify/injection.hpp"
#include "cvverify/protocol.hpp"
#include "cvverify/states.hpp"
#include "cvverify/witness.hpp"
#include "cvverify_cli/commands.hpp"
#include "cvverify_cli/config.hpp"
#include "oracles.hpp"

using namespace cvv;

namespace {

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& note) {
    pass = pass && ok;
    notes.push_back((ok ? "  ok   " : "  FAIL ") + note);
  }
  void info(const std::string& note) { notes.push_back("  .    " + note); }
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

int g_workers = 1;

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

// ------------------------------------------------------------------ 1

Outcome witness_tightness() {
  Outcome out;
  for (double g : {0.0, 0.05, 0.1, 0.2}) {
    for (double s : {0.8, 1.0, 1.5}) {
      // tail gate disabled so the truncated state is scored even where the gate would refuse it
      const ResourceSpec r{g, s, 1, 40, 1.0};
      const FockState psi = cubic_phase_state(r);
      const double f = f_low_exact(DensityMatrix::pure(psi), build_witness(r));
      out.require(std::abs(f - 1.0) <= 5e-7,
                  fmt("gamma_tilde=%.2f s=%.1f  f_low-1=%+.3e  top-level mass=%.2e", g, s, f - 1.0, psi.tail_mass()));
    }
  }
  return out;
}

// ------------------------------------------------------------------ 2

Outcome universal_lower_bound() {
  Outcome out;
  const int d = 30;
  const ResourceSpec r{0.1, 1.0, 1, d};
  const WitnessSpec w = build_witness(r);
  const FockState sigma = cubic_phase_state(r);
  const DensityMatrix sigma_rho = DensityMatrix::pure(sigma);
  std::mt19937_64 rng(20240611);
  std::uniform_real_distribution<double> unit;
  double worst = -1e300;
  double tightest = 1e300;
  int violations = 0;
  for (int t = 0; t < 1000; ++t) {
    Matrix m = oracle::random_density(d, t % 3, rng);
    if (t % 4 == 3) {
      // states close to sigma, where the bound has the least slack
      const double mix = 0.2 * unit(rng);
      m = (1 - mix) * sigma_rho.entries() + mix * m;
    }
    const DensityMatrix rho(m);
    const double gap = f_low_exact(rho, w) - fidelity(sigma, rho);
    worst = std::max(worst, gap);
    tightest = std::min(tightest, std::abs(gap));
    if (gap > 1e-9) ++violations;
  }
  out.require(violations == 0, fmt("1000 states, max f_low - F = %.3e (violations %d)", worst, violations));
  out.info(fmt("smallest |f_low - F| = %.3e", tightest));
  return out;
}

// ------------------------------------------------------------------ 3

Outcome operator_identity() {
  Outcome out;
  const int d = 40;
  const int interior = d - 6;
  struct Point {
    double g, s;
    int padded;  // the truncated exp(i g X^3) needs more room as g grows
  };
  for (auto [g, s, padded] : std::vector<Point>{{0.1, 1.0, 800}, {0.05, 1.5, 800}, {0.1, 1.2, 800}, {0.2, 0.8, 2400}}) {
    const Matrix lib = vnv_quadrature_form(g, s, d);
    const Matrix ref = oracle::vnv_by_conjugation(g, s, d, padded);
    const double err = max_abs(lib.topLeftCorner(interior, interior) - ref.topLeftCorner(interior, interior));
    out.require(err <= 1e-6, fmt("gamma_tilde=%.2f s=%.1f  oracle padded to %d: interior %dx%d max error %.2e", g, s,
                                 padded, interior, interior, err));
  }
  return out;
}

// ------------------------------------------------------------------ 4

Outcome estimator_unbiased() {
  Outcome out;
  const ResourceSpec r{0.1, 1.0, 1, 40};
  const WitnessSpec w = build_witness(r);
  const double eta = 0.05;
  const int runs = 200;
  const std::vector<AdversarySpec> adversaries{AdversarySpec::honest(), AdversarySpec::vacuum(),
                                               AdversarySpec::thermal_mix(0.3), AdversarySpec::orthogonal_mix(0.2)};
  for (const auto& adv : adversaries) {
    const DensityMatrix rho = adversary_state(adv, r);
    const HomodyneSampler sampler(rho);
    const double f_low = f_low_exact(rho, w);
    const double f2 = second_moment_exact(rho, w);
    for (std::int64_t n : {1000, 10000}) {
      SamplingPlan plan = make_plan(w, eta, 0.05, rho, 77);
      plan.trials = n;
      std::vector<double> est(runs);
      for (int k = 0; k < runs; ++k) {
        EstimateOptions opts;
        opts.workers = g_workers;
        opts.stream = static_cast<std::uint64_t>(k);
        est[static_cast<std::size_t>(k)] = estimate_f_low(sampler, w, plan, opts).f_low_est;
      }
      double mean = 0;
      for (double e : est) mean += e;
      mean /= runs;
      double var = 0;
      int far = 0;
      for (double e : est) {
        var += (e - mean) * (e - mean);
        if (std::abs(e - f_low) >= eta) ++far;
      }
      const double sigma = std::sqrt(var / (runs - 1) / runs);
      const double p_far = static_cast<double>(far) / runs;
      const double bound = tail_bound(n, eta, f2);
      out.require(std::abs(mean - f_low) < 5 * sigma,
                  fmt("%-20s N=%-6lld grand mean - f_low = %+.4f  (%.2f sigma)", adv.label().c_str(),
                      static_cast<long long>(n), mean - f_low, std::abs(mean - f_low) / sigma));
      out.require(p_far <= bound, fmt("%-20s N=%-6lld P(|err|>=eta) = %.3f <= %.3f", adv.label().c_str(),
                                      static_cast<long long>(n), p_far, bound));
    }
  }
  return out;
}

// ------------------------------------------------------------------ 5

Outcome sample_complexity_scaling() {
  Outcome out;
  for (auto [g, s] : std::vector<std::pair<double, double>>{{0.1, 1.0}, {0.05, 1.5}, {0.0, 0.8}}) {
    const ResourceSpec r1{g, s, 1, 40};
    ResourceSpec r2 = r1;
    r2.copies = 2;
    const SamplingPlan p1 = make_plan(build_witness(r1), 0.05, 0.05, 1);
    const SamplingPlan p2 = make_plan(build_witness(r2), 0.05, 0.05, 1);
    out.require(std::llabs(p2.trials - 4 * p1.trials) <= 4,
                fmt("gamma_tilde=%.2f s=%.1f  N(M=1)=%lld N(M=2)=%lld  N2-4N1=%lld", g, s,
                    static_cast<long long>(p1.trials), static_cast<long long>(p2.trials),
                    static_cast<long long>(p2.trials - 4 * p1.trials)));
  }

  // <F^2> on an explicit two-mode product state, every term acting on its own mode
  const int d = 24;
  const ResourceSpec r1{0.1, 1.0, 1, d, 1e-6};
  ResourceSpec r2 = r1;
  r2.copies = 2;
  const WitnessSpec w1 = build_witness(r1);
  const WitnessSpec w2 = build_witness(r2);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 3; ++trial) {
    const DensityMatrix rho = trial == 0 ? DensityMatrix::pure(cubic_phase_state(r1))
                                         : DensityMatrix(oracle::random_density(d, trial, rng));
    const DensityMatrix joint = tensor(rho, rho);
    const Matrix id = Matrix::Identity(d, d);
    double inner = 0;
    for (const auto& t : w2.terms) {
      const auto& o = t.observable;
      const Matrix f2 = o.scale * o.scale * quadrature_power(d, o.angle, 2 * o.power);
      const Matrix full = o.mode == 0 ? kron(f2, id) : kron(id, f2);
      inner += std::abs(t.lambda) * joint.expectation(full);
    }
    const double joint_f2 = w2.sum_abs_lambda() * inner;
    const double single = second_moment_exact(rho, w1);
    const double via_spec = second_moment_exact(rho, w2);
    const double rel = std::abs(joint_f2 / single - 4.0) / 4.0;
    out.require(rel < 1e-12 && std::abs(via_spec / single - 4.0) < 1e-12,
                fmt("state %d  <F^2>(M=2)/<F^2>(M=1) = %.15f (joint operator), %.15f (plan)", trial,
                    joint_f2 / single, via_spec / single));
  }
  return out;
}

// ------------------------------------------------------------------ 6

Outcome teleportation() {
  Outcome out;
  const int d = 24;
  struct Case {
    double gamma, gamma_tilde, s;
    std::optional<double> x;
    GaussianInput input;
  };
  const std::vector<Case> cases{
      {0.05, 0.05, 1.5, 0.0, {1.0, 0.0, 0.0}},     {0.05, 0.05, 1.5, 0.5, {1.0, 0.3, 0.0}},
      {0.1, 0.05, 1.5, 0.3, {1.2, 0.0, 0.4}},      {0.02, 0.05, 1.5, -1.0, {0.9, -0.2, 0.0}},
      {0.1, 0.1, 1.0, std::nullopt, {1.0, 0.5, -0.3}},
  };
  for (const auto& c : cases) {
    const InjectionParams p{c.gamma, c.gamma_tilde, c.s, d, 1e-6};
    const ResourceSpec rs{c.gamma_tilde, c.s, 1, d, 1e-6};
    const FockState in = gaussian_state(c.input, d, 1e-6);
    Rng rng = make_stream(31, 0, 0);
    const InjectionResult res = inject_cubic(in, cubic_phase_state(rs), p, c.x, &rng);
    const FockState target = analytic_target(in, c.gamma, c.s, p.squeeze_ratio(), res.x_meas);
    const double f = fidelity(target, res.output);
    out.require(f >= 0.999 && !res.improbable_branch,
                fmt("gamma=%.2f gamma_tilde=%.2f s=%.1f x_meas=%+.4f%s  F=%.9f", c.gamma, c.gamma_tilde, c.s,
                    res.x_meas, c.x ? "" : " (sampled)", f));
  }
  // s=50 needs ~600 photons, so the large-squeezing limit is taken on the closed form
  const FockState in = gaussian_state({1.0, 0.0, 0.0}, d, 1e-6);
  for (double gamma : {0.05, 0.1}) {
    const double f = fidelity(cubic_gate_image(in, gamma), DensityMatrix::pure(analytic_target(in, gamma, 50.0, 1.0, 0.0)));
    out.require(f >= 0.999, fmt("s=50 gamma=%.2f  F(target, C(gamma) psi) = %.9f", gamma, f));
  }
  return out;
}

// ------------------------------------------------------------------ 7

Outcome channel_propagation() {
  Outcome out;
  ProtocolParams params;
  const ResourceSpec rs = params.injection_resource();
  const InjectionParams ip = params.injection(params.gamma_tilde);
  const FockState sigma = cubic_phase_state(rs);
  const FockState in = gaussian_state(params.input, rs.dimension, rs.tail_tolerance);
  for (const auto& adv : shipped_adversaries()) {
    if (adv.kind == AdversaryKind::kHonest) continue;
    const DensityMatrix rho = adversary_state(adv, rs);
    Rng rng = make_stream(7, 0, 0);
    const ChannelReport rep = channel_fidelity_check(sigma, rho, in, ip, 50, rng, g_workers);
    int bad = 0;
    for (const auto& b : rep.branches) bad += b.fidelity_out < b.fidelity_in - 1e-9;
    out.require(rep.min_margin >= -1e-9,
                fmt("%-20s F_in=%.4f  min(F_out-F_in)=%+.3e  violating branches %2d/50  coherence residual %.2e",
                    adv.label().c_str(), rep.fidelity_in, rep.min_margin, bad, rep.decomposition_residual));
  }
  return out;
}

// ------------------------------------------------------------------ 8

Outcome verifiability() {
  Outcome out;
  ProtocolParams params;
  params.threshold_fidelity = 0.9;
  params.beta = 0.05;
  const double eps = epsilon_bound(params.threshold_fidelity, params.beta);
  out.require(std::abs(eps - 0.145) < 1e-12, fmt("epsilon = %.6f", eps));
  for (const auto& adv : shipped_adversaries()) {
    const VerifiabilityReport rep = verifiability_monte_carlo(params, adv, 500, g_workers);
    out.require(rep.joint_prob_est <= eps + 3 * rep.sigma,
                fmt("%-20s F=%.4f accept=%.3f joint=%.4f <= %.4f", adv.label().c_str(), rep.fidelity_exact,
                    rep.accept_rate, rep.joint_prob_est, eps + 3 * rep.sigma));
  }
  return out;
}

// ------------------------------------------------------------------ 9

Outcome blindness() {
  Outcome out;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> gamma(0.01, 0.3);
  std::uniform_real_distribution<double> width(0.5, 2.0);
  std::uniform_real_distribution<double> shift(-1.5, 1.5);
  const auto draw = [&] {
    ProtocolParams p;
    p.copies = 3;
    p.gamma_list.clear();
    for (int k = 0; k < p.copies; ++k) p.gamma_list.push_back(gamma(rng));
    p.input = {width(rng), shift(rng), shift(rng)};
    p.seed = rng();
    return p;
  };
  int identical = 0;
  for (int k = 0; k < 100; ++k) {
    const BlindnessAudit a = blindness_audit(draw(), draw());
    identical += a.comparison == ViewComparison::kIdentical && a.identical_views;
  }
  out.require(identical == 100, fmt("M=3: %d/100 randomized pairs give identical views", identical));
  return out;
}

// ------------------------------------------------------------------ 10

Outcome determinism() {
  Outcome out;
  const std::vector<std::string> configs{
      R"({"M":1,"gamma_tilde":0.1,"s":1.0,"F_T":0.9,"beta":0.05,"eta":0.05,"seed":11})",
      R"({"M":1,"gamma_tilde":0.1,"s":1.0,"F_T":0.9,"beta":0.05,"eta":0.05,"seed":12,"runs":6,
          "adversary":{"kind":"orthogonal_mix","parameter":0.2}})",
      R"({"M":2,"gamma_tilde":0.1,"s":1.0,"F_T":0.9,"beta":0.05,"eta":0.05,"seed":13,"runs":2,
          "gamma_list":[0.05,0.1]})",
  };
  for (std::size_t c = 0; c < configs.size(); ++c) {
    const cli::RunConfig cfg = cli::parse_config(nlohmann::json::parse(configs[c]));
    const cli::CommandOutput ref = cli::execute("protocol-run", cfg, 1);
    bool same = ref.exit_code == cli::kExitOk;
    for (int workers : {4, 8}) {
      const cli::CommandOutput other = cli::execute("protocol-run", cfg, workers);
      same = same && other.report.dump(2) == ref.report.dump(2) && other.csv.size() == ref.csv.size();
      for (std::size_t i = 0; same && i < ref.csv.size(); ++i) {
        same = other.csv[i].name == ref.csv[i].name && other.csv[i].content == ref.csv[i].content;
      }
    }
    out.require(same, fmt("config %zu: report and CSV byte-identical under 1, 4, 8 workers", c));
  }
  return out;
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0: no runtime bound
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cvverify acceptance gate"};
  std::vector<int> selected;
  bool verbose = false;
  app.add_option("-c,--criterion", selected, "criteria to run (default: all)")->check(CLI::Range(1, 10));
  app.add_option("-j,--workers", g_workers, "worker threads (0 = hardware)");
  app.add_flag("-v,--verbose", verbose, "print per-case detail");
  CLI11_PARSE(app, argc, argv);
  if (g_workers <= 0) g_workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

  const std::vector<Criterion> criteria{
      {1, "witness tightness", 10, witness_tightness},
      {2, "universal lower bound", 60, universal_lower_bound},
      {3, "operator identity", 0, operator_identity},
      {4, "estimator unbiasedness and tail", 300, estimator_unbiased},
      {5, "sample-complexity scaling", 0, sample_complexity_scaling},
      {6, "teleportation correctness", 120, teleportation},
      {7, "fidelity propagation", 300, channel_propagation},
      {8, "epsilon-verifiability", 600, verifiability},
      {9, "blindness", 0, blindness},
      {10, "determinism", 0, determinism},
  };

  bool all = true;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes.push_back(std::string("  FAIL exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budget_s > 0) o.require(secs < c.budget_s, fmt("runtime %.1f s < %.0f s", secs, c.budget_s));
    std::printf("criterion %2d %-32s %s  (%.1f s)\n", c.id, c.name, o.pass ? "PASS" : "FAIL", secs);
    if (verbose || !o.pass) {
      for (const auto& n : o.notes) std::printf("%s\n", n.c_str());
    }
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
