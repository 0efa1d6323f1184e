// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include "ecoclone/ansatz.hpp"
#include "ecoclone/commands.hpp"
#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

using namespace ecoclone;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (detail.size() < 400) detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

// 1. d r_max of the universal R equals (3 + d)/(2(1 + d)).
Outcome universal_fidelity() {
  Outcome o;
  double worst = 0.0;
  for (int d = 2; d <= 7; ++d) {
    const double dev = std::abs(d * max_eigenspace(r_universal(d)).r_max - (3.0 + d) / (2.0 * (1.0 + d)));
    worst = std::max(worst, dev);
    o.require(dev <= 1e-9, "d=" + std::to_string(d) + " dev " + num(dev));
  }
  if (o.pass) o.detail = "max |dev| " + num(worst) + " for d=2..7";
  return o;
}

// 2. Three eigenvalues with multiplicities (d, d, d^3 - 2d); 1/(d(d+1)) at d^3 - 2d.
Outcome universal_spectrum() {
  Outcome o;
  for (int d = 2; d <= 7; ++d) {
    const EigenspaceReport es = max_eigenspace(r_universal(d));
    const bool three = es.spectrum.size() == 3;
    o.require(three, "d=" + std::to_string(d) + " has " + std::to_string(es.spectrum.size()) + " clusters");
    if (!three) continue;
    o.require(es.spectrum[0].multiplicity == d && es.spectrum[1].multiplicity == d &&
                  es.spectrum[2].multiplicity == d * d * d - 2 * d,
              "d=" + std::to_string(d) + " multiplicities");
    o.require(std::abs(es.spectrum[2].value - 1.0 / (d * (d + 1.0))) <= 1e-10, "d=" + std::to_string(d) + " low value");
  }
  if (o.pass) o.detail = "multiplicities (d, d, d^3-2d), low value 1/(d(d+1)), d=2..7";
  return o;
}

// 3. Conjectured universal and phase-covariant eigenstates span the maximal eigenspace.
Outcome conjectured_eigenstates_check() {
  Outcome o;
  double res = 0.0, ang = 0.0;
  for (Family f : {Family::universal, Family::phase_covariant})
    for (int d = 2; d <= 7; ++d) {
      const ConjectureReport r = check_conjectured_eigenstates(f, d);
      res = std::max(res, r.eigen_residual);
      ang = std::max(ang, r.subspace_distance);
      o.require(r.eigen_residual <= 1e-9 && r.subspace_distance < 1e-8 && r.degeneracy == d,
                to_string(f) + " d=" + std::to_string(d));
    }
  if (o.pass) o.detail = "max eigen residual " + num(res) + ", max principal-angle sine " + num(ang);
  return o;
}

// 4. Niu-Griffiths qubit benchmark.
Outcome qubit_benchmark() {
  Outcome o;
  Rng rng = make_rng(0, 4);
  const double target = (2.0 + std::sqrt(2.0)) / 4.0;
  const ChoiOp s = choi_from_isometry(isometry_from_unitary(niu_griffiths(std::numbers::pi / 4)));
  double lo = 1e9, hi = -1e9, worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const CloneFidelities f = clone_fidelities(s, random_balanced_ket(2, rng));
    worst = std::max({worst, std::abs(f.bob - target), std::abs(f.eve - target)});
    lo = std::min({lo, f.bob, f.eve});
    hi = std::max({hi, f.bob, f.eve});
  }
  o.require(worst <= 1e-12, "pi/4 deviation " + num(worst));
  o.require(hi - lo <= 1e-12, "spread " + num(hi - lo));
  std::uniform_real_distribution<double> ua(0.0, std::numbers::pi / 2);
  double worst_a = 0.0;
  for (int t = 0; t < 10; ++t) {
    const double a = ua(rng);
    const ChoiOp sa = choi_from_isometry(isometry_from_unitary(niu_griffiths(a)));
    const CloneFidelities f = clone_fidelities(sa, random_balanced_ket(2, rng));
    worst_a = std::max({worst_a, std::abs(f.bob - (1 + std::cos(a)) / 2), std::abs(f.eve - (1 + std::sin(a)) / 2)});
  }
  o.require(worst_a <= 1e-12, "general alpha deviation " + num(worst_a));
  if (o.pass) o.detail = "pi/4 dev " + num(worst) + ", spread " + num(hi - lo) + ", general alpha dev " + num(worst_a);
  return o;
}

// 5. Feasible only for phase-covariant qubits; no run in the gap.
Outcome feasibility_dichotomy() {
  Outcome o;
  const FeasibilityThresholds thr;
  auto run = [&](Family f, int d) {
    const FeasibilityReport r = economical_feasibility(f, d, 100, 0, thr);
    o.require(r.gap_runs == 0, to_string(f) + " d=" + std::to_string(d) + " gap runs " + std::to_string(r.gap_runs));
    return r.residual;
  };
  const double pc2 = run(Family::phase_covariant, 2);
  o.require(pc2 < 1e-8, "pc d=2 residual " + num(pc2));
  double min_inf = 1e9;
  for (int d = 2; d <= 7; ++d) {
    const double r = run(Family::universal, d);
    o.require(r > 1e-3, "universal d=" + std::to_string(d) + " residual " + num(r));
    min_inf = std::min(min_inf, r);
  }
  for (int d = 3; d <= 7; ++d) {
    const double r = run(Family::phase_covariant, d);
    o.require(r > 1e-3, "pc d=" + std::to_string(d) + " residual " + num(r));
    min_inf = std::min(min_inf, r);
  }
  if (o.pass) o.detail = "pc d=2 residual " + num(pc2) + ", smallest infeasible residual " + num(min_inf);
  return o;
}

// 6. Suboptimal economical cloner equals F_U and is optimal only for qubits.
Outcome suboptimal_cloner() {
  Outcome o;
  Rng rng = make_rng(0, 6);
  double worst = 0.0, min_gap = 1e9;
  for (int d = 2; d <= 7; ++d) {
    const ChoiOp s = choi_from_isometry(suboptimal_economical(d));
    const double fu = economical_pc_fidelity(d);
    for (int t = 0; t < 100; ++t) {
      const CloneFidelities f = clone_fidelities(s, random_balanced_ket(d, rng));
      worst = std::max(worst, std::abs(0.5 * (f.bob + f.eve) - fu));
    }
    const double gap = d * max_eigenspace(r_phase_covariant(d)).r_max - fu;
    if (d == 2) o.require(std::abs(gap) <= 1e-10, "d=2 gap " + num(gap));
    else {
      o.require(gap > 0.01, "d=" + std::to_string(d) + " gap " + num(gap));
      min_gap = std::min(min_gap, gap);
    }
  }
  o.require(worst <= 1e-10, "F_U deviation " + num(worst));
  if (o.pass) o.detail = "F_U dev " + num(worst) + ", min gap d>=3 " + num(min_gap);
  return o;
}

// 7. Ansatz machines saturate the bound.
Outcome ansatz_saturation() {
  Outcome o;
  double worst_u = 0.0, worst_tp = 0.0, worst_n = 0.0;
  for (int d = 2; d <= 7; ++d) {
    const ChoiOp s = reduced_choi(cloning_state(amp_universal(symmetric_universal_params(d), d)));
    const double tp = is_trace_preserving(s).residual;
    const double dev = std::abs(mean_fidelity(s, r_universal(d)) - d * max_eigenspace(r_universal(d)).r_max);
    worst_tp = std::max(worst_tp, tp);
    worst_u = std::max(worst_u, dev);
    o.require(tp < 1e-10 && dev <= 1e-9, "universal d=" + std::to_string(d));
  }
  for (Family f : {Family::phase_covariant, Family::fourier})
    for (int d = 2; d <= 5; ++d) {
      const OptimalParams p = optimize_xparams(f, d);
      const ChoiOp s = reduced_choi(cloning_state(amp_family(f, p.x, d)));
      const double dev = std::abs(mean_fidelity(s, r_operator(f, d)) - p.bound);
      worst_n = std::max(worst_n, dev);
      o.require(dev <= 1e-7 && is_trace_preserving(s).residual < 1e-10, to_string(f) + " d=" + std::to_string(d) + " dev " + num(dev));
    }
  if (o.pass)
    o.detail = "universal dev " + num(worst_u) + " (trace residual " + num(worst_tp) + "), optimized dev " + num(worst_n);
  return o;
}

// 8. Constraint systems.
Outcome constraint_systems() {
  Outcome o;
  Rng rng = make_rng(0, 8);
  std::normal_distribution<double> g(0.0, 1.0);
  double worst = 0.0;
  for (Family f : {Family::universal, Family::phase_covariant, Family::fourier})
    for (int d = 2; d <= 4; ++d)
      for (int t = 0; t < 50; ++t) {
        XParams x{g(rng), f == Family::universal ? 0.0 : g(rng), g(rng)};
        x = normalize_params(f, x, d);
        Vec alpha = gaussian_matrix(d, 1, rng).col(0);
        alpha /= alpha.norm();
        const ConstraintResiduals c = constraint_residuals(f, x, alpha, d);
        const Mat gram = oracle::economical_gram(amp_family(f, x, d).mat(), alpha);
        for (int k = 0; k < d; ++k) {
          worst = std::max(worst, std::abs(c.diagonal[static_cast<std::size_t>(k)] - (gram(k, k).real() - 1.0)));
          for (int kp = 0; kp < d; ++kp)
            if (kp != k) worst = std::max(worst, std::abs(c.off_diagonal(kp, k) - gram(kp, k)));
        }
        if (f == Family::fourier) worst = std::max(worst, std::abs(c.f + c.g / d - 1.0));
      }
  o.require(worst <= 1e-10, "polynomial vs oracle " + num(worst));

  const RecurrenceReport r2 = fourier_recurrence_check(2);
  o.require(r2.verdict == Verdict::feasible, "recurrence d=2 residual " + num(r2.min_system_residual));
  double min_bound = 1e9;
  for (int d = 3; d <= 5; ++d) {
    const RecurrenceReport r = fourier_recurrence_check(d);
    min_bound = std::min(min_bound, r.min_system_residual);
    o.require(r.min_system_residual > 1e-3, "recurrence d=" + std::to_string(d) + " bound " + num(r.min_system_residual));
  }
  for (int d = 2; d <= 7; ++d) {
    const PcSystemReport pc = pc_system_check(optimize_xparams(Family::phase_covariant, d).x, d);
    o.require(pc.solvable == (d == 2), "pc system d=" + std::to_string(d));
  }
  if (o.pass)
    o.detail = "oracle dev " + num(worst) + ", recurrence bound d=3..5 >= " + num(min_bound) + ", pc solvable at d=2 only";
  return o;
}

// 9. Closed-form R against sampling and finite-sum oracles.
Outcome oracle_equivalence() {
  Outcome o;
  double worst_sigma = 0.0;
  for (Family f : {Family::universal, Family::phase_covariant})
    for (int d = 2; d <= 3; ++d) {
      const OracleComparison c = compare_to_samples(sample_r(f, d, 100000, 0), r_operator(f, d));
      worst_sigma = std::max(worst_sigma, c.worst_sigma);
      o.require(c.passed, to_string(f) + " d=" + std::to_string(d) + " violations " + std::to_string(c.violations));
    }
  double worst_f = 0.0;
  for (int d = 2; d <= 5; ++d) {
    const double dev = (r_fourier(d).mat() - oracle::r_fourier(d)).cwiseAbs().maxCoeff();
    worst_f = std::max(worst_f, dev);
    o.require(dev <= 1e-12, "fourier d=" + std::to_string(d) + " dev " + num(dev));
  }
  if (o.pass) o.detail = "worst sampled deviation " + num(worst_sigma) + " SE, fourier dev " + num(worst_f);
  return o;
}

// 10. Tr(SR) <= d r_max for random trace-preserving maps.
Outcome bound_property() {
  Outcome o;
  Rng rng = make_rng(0, 10);
  double margin = 1e9;
  for (int d = 2; d <= 3; ++d) {
    std::vector<ChoiOp> maps;
    for (int t = 0; t < 50; ++t)
      maps.push_back(ChoiOp::from_operator(Op({d, d, d}, oracle::random_tp_choi(d, 1 + t % 4, rng))));
    for (Family f : {Family::universal, Family::phase_covariant, Family::fourier}) {
      const Op r = r_operator(f, d);
      const double bound = d * max_eigenspace(r).r_max;
      for (const ChoiOp& s : maps) {
        const double fid = mean_fidelity(s, r);
        margin = std::min(margin, bound - fid);
        o.require(fid <= bound + 1e-9, to_string(f) + " d=" + std::to_string(d) + " exceeds bound");
      }
    }
  }
  if (o.pass) o.detail = "smallest margin " + num(margin);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"universal fidelity (3+d)/(2(1+d))", universal_fidelity},
      {"universal spectrum structure", universal_spectrum},
      {"conjectured eigenstates span max eigenspace", conjectured_eigenstates_check},
      {"Niu-Griffiths qubit benchmark", qubit_benchmark},
      {"economical feasibility dichotomy", feasibility_dichotomy},
      {"suboptimal economical cloner", suboptimal_cloner},
      {"ansatz saturation", ansatz_saturation},
      {"constraint systems", constraint_systems},
      {"oracle equivalence", oracle_equivalence},
      {"bound property", bound_property},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[i].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %2zu: %s  %s (%.1fs) -- %s\n", i + 1, out.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                secs, out.detail.c_str());
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
