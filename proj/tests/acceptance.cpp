// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Every tolerance is pinned here, in code.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>

#include "specloc/jobs.hpp"
#include "specloc/specloc.hpp"

using namespace specloc;
using clk = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int criterion, const char* title, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s — %s%s%s\n", criterion, pass ? "PASS" : "FAIL",
              title, detail.empty() ? "" : ": ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

struct Check {
  bool ok = true;
  std::ostringstream detail;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      detail << (detail.str().empty() ? "" : "; ") << what;
    }
  }
};

double seconds(clk::time_point t0) {
  return std::chrono::duration<double>(clk::now() - t0).count();
}

std::mt19937_64 grng(20240803ULL);
double uni() { return (grng() >> 11) * 0x1p-53; }

// --- criterion 1: odd-dimension standard localizer vs winding -----------

void criterion1() {
  Check c;
  CliffordRep rep = build_clifford(1);
  for (double t2 : {0.5, 1.5}) {
    auto t0 = clk::now();
    ModelInstance m = ssh(1.0, t2, 0.0, 28);
    GradedOperator op = graded_for_pipeline(m);
    LocalizerSpec spec{Variant::OddStandard, std::nullopt, 24.0, false};
    InvariantReport r = invariant(spec, op, rep);
    long w = *oracle_value(m);
    double dt = seconds(t0);
    c.expect(2 * r.invariant == r.signature, "half-signature not integral");
    c.expect(r.invariant == w,
             "t2=" + std::to_string(t2) + ": invariant " +
                 std::to_string(r.invariant) + " != winding " + std::to_string(w));
    c.expect(dt < 5.0, "runtime " + std::to_string(dt) + " s >= 5 s");
  }
  report(1, "odd standard localizer equals the winding oracle (both phases)",
         c.ok, c.detail.str());
}

// --- criterion 2: even standard localizer vs plaquette Chern ------------

void criterion2() {
  Check c;
  CliffordRep rep = build_clifford(2);
  std::vector<double> masses = {-1.0, 1.0, 3.0};
  while (masses.size() < 13) {
    double m = -3.0 + 6.0 * uni();
    if (std::abs(std::abs(m) - 2.0) < 0.2 || std::abs(m) < 0.2) continue;
    if (std::abs(std::abs(m) - 0.0) < 0.2) continue;
    masses.push_back(m);
  }
  for (double mass : masses) {
    auto t0 = clk::now();
    ModelInstance m = qwz(mass, 0.0, 14);
    GradedOperator op = graded_for_pipeline(m);
    LocalizerSpec spec{Variant::EvenStandard, 0.2, 12.0, false};
    InvariantReport r = invariant(spec, op, rep);
    int ch = chern_number(*m.bloch);
    double dt = seconds(t0);
    c.expect(r.matrix_dim <= 2500, "matrix dim exceeds 2500");
    c.expect(r.invariant == ch, "m=" + std::to_string(mass) + ": invariant " +
                                    std::to_string(r.invariant) + " != chern " +
                                    std::to_string(ch));
    c.expect(dt < 60.0, "runtime " + std::to_string(dt) + " s >= 60 s");
  }
  report(2, "even standard localizer equals the Berry-flux Chern oracle", c.ok,
         c.detail.str());
}

// --- criterion 3: strict-mode gap certificate ----------------------------

void criterion3() {
  Check c;
  {
    CliffordRep rep = build_clifford(1);
    ModelInstance m = ssh(1.0, 0.5, 0.0, 90);
    GradedOperator op = graded_for_pipeline(m);
    Admissibility probe =
        admissibility_bounds(op, rep, 1.0, 1.0, Variant::OddStandard);
    double kappa = 0.9 * probe.kappa_max;
    double rho = 2 * op.g / kappa * 1.05;
    c.expect(rho < 90, "ssh strict rho does not fit the window");
    LocalizerSpec spec{Variant::OddStandard, kappa, rho, true};
    InvariantReport r = invariant(spec, op, rep);  // throws if the bound fails
    c.expect(r.admissibility == "strict", "ssh verdict not strict");
    c.expect(2 * static_cast<double>(r.matrix_dim) <= 2e4, "ssh dim too large");
    c.expect(r.localizer_gap >= op.g / 2 * (1 - 1e-6),
             "ssh localizer gap below g/2");
    long w = *oracle_value(m);
    c.expect(r.invariant == w, "ssh strict invariant mismatch");
  }
  {
    CliffordRep rep = build_clifford(2);
    ModelInstance m = qwz(10.0, 0.0, 14);
    GradedOperator op = graded_for_pipeline(m);
    Admissibility probe =
        admissibility_bounds(op, rep, 1.0, 1.0, Variant::EvenStandard);
    double kappa = std::min(0.9 * probe.kappa_max, 1.5);
    double rho = 2 * op.g / kappa * 1.05;
    c.expect(rho <= 12.5, "qwz strict rho does not fit");
    LocalizerSpec spec{Variant::EvenStandard, kappa, rho, true};
    InvariantReport r = invariant(spec, op, rep);
    c.expect(r.admissibility == "strict", "qwz verdict not strict");
    c.expect(r.matrix_dim <= 10000, "qwz dim above 1e4");
    c.expect(r.localizer_gap >= op.g / 2 * (1 - 1e-6),
             "qwz localizer gap below g/2");
    c.expect(r.invariant == chern_number(*m.bloch), "qwz strict invariant mismatch");
  }
  report(3, "strict admissibility certifies the localizer gap >= g/2", c.ok,
         c.detail.str());
}

// --- criterion 4: approximate chiral symmetry, twisted and reduced ------

void criterion4() {
  Check c;
  CliffordRep rep = build_clifford(1);
  ModelInstance clean = ssh(1.0, 1.5, 0.0, 28);
  long w0 = *oracle_value(clean);
  for (double eps : {0.03, 0.06, 0.09, 0.12, 0.15}) {
    ModelInstance m = ssh_perturbed(1.0, 1.5, eps, 0.0, 28);
    GradedOperator op = graded_for_pipeline(m);
    c.expect(op.eta < 0.9 * 2 * op.g / 3,
             "eps=" + std::to_string(eps) + ": eta exceeds 0.9*(2g/3)");
    LocalizerSpec tw{Variant::OddTwistedChiral, std::nullopt, 24.0, false};
    LocalizerSpec red{Variant::OddReduced, std::nullopt, 24.0, false};
    InvariantReport rt = invariant(tw, op, rep);
    InvariantReport rr = invariant(red, op, rep);
    c.expect(rt.signature % 4 == 0, "twisted signature not divisible by 4");
    c.expect(rt.invariant == w0, "twisted invariant != unperturbed winding");
    c.expect(rr.invariant == w0, "reduced invariant != unperturbed winding");
    c.expect(rt.invariant == rr.invariant, "twisted and reduced disagree");
  }
  report(4, "twisted chiral localizer reproduces the unperturbed winding", c.ok,
         c.detail.str());
}

// --- criterion 5: conservation-law localizer vs spin Chern --------------

void criterion5() {
  Check c;
  CliffordRep rep = build_clifford(2);
  struct Point {
    double mass, lambda;
    int z2;
  };
  std::vector<Point> points = {{1.0, 0.05, 1}, {1.0, 0.1, 1},  {1.0, 0.2, 1},
                               {-1.0, 0.1, 1}, {3.0, 0.1, 0}, {3.0, 0.2, 0}};
  for (const Point& p : points) {
    ModelInstance m = bhz_rashba(p.mass, p.lambda, 0.0, 11);
    GradedOperator op = graded_for_pipeline(m);
    c.expect(op.eta < 2 * op.g / 3, "eta above 2g/3 at lambda=" +
                                        std::to_string(p.lambda));
    LocalizerSpec spec{Variant::EvenTwistedConservation, 0.2, 9.0, false};
    InvariantReport r = invariant(spec, op, rep);
    ModelInstance m0 = bhz_rashba(p.mass, 0.0, 0.0, 11);
    long sc = *oracle_value(m0);
    c.expect(r.signature % 4 == 0, "signature not divisible by 4");
    c.expect(r.invariant == sc,
             "mass=" + std::to_string(p.mass) + " lambda=" +
                 std::to_string(p.lambda) + ": invariant " +
                 std::to_string(r.invariant) + " != spin Chern " +
                 std::to_string(sc));
    c.expect(r.z2 == p.z2, "z2 parity wrong");
  }
  report(5, "conservation-law localizer equals the spin Chern oracle", c.ok,
         c.detail.str());
}

// --- criterion 6: block invariants sum to the full invariant -------------

void criterion6() {
  Check c;
  CliffordRep rep = build_clifford(2);
  ModelInstance m = bhz_rashba(1.0, 0.0, 0.0, 11);
  double g = model_gap(m);
  SplitP sp = split_P(m.real_space, *m.pipeline_grading, g, 0.0);
  Grading gr = grading_basis(*m.pipeline_grading);
  auto block_gap = [&](bool plus) {
    BlochClosure block{2, 2, {}, false};
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 64; ++i)
      for (int j = 0; j < 64; ++j) {
        Matrix sym = m.bloch->symbol({2 * M_PI * i / 64, 2 * M_PI * j / 64});
        Matrix rot = gr.rotation.adjoint() * sym * gr.rotation;
        Matrix blk = plus ? rot.topLeftCorner(2, 2) : rot.bottomRightCorner(2, 2);
        Eigen::SelfAdjointEigenSolver<Matrix> es(blk, Eigen::EigenvaluesOnly);
        worst = std::min(worst, es.eigenvalues().cwiseAbs().minCoeff());
      }
    return worst;
  };
  auto graded = [&](const BlockLatticeOperator& h, double gap) {
    GradedOperator op;
    op.d = 2;
    op.H = h;
    op.g = gap;
    op.eta = 0;
    op.norm_H = operator_norm(h.window_sparse());
    return op;
  };
  LocalizerSpec spec{Variant::EvenStandard, 0.2, 9.0, false};
  InvariantReport rp = invariant(spec, graded(sp.h_plus, block_gap(true)), rep);
  InvariantReport rm = invariant(spec, graded(sp.h_minus, block_gap(false)), rep);
  GradedOperator full = graded_for_pipeline(m);
  full.eta = 0;
  InvariantReport rf = invariant(spec, full, rep);
  c.expect(rp.invariant + rm.invariant == rf.invariant,
           "block invariants do not sum: " + std::to_string(rp.invariant) +
               " + " + std::to_string(rm.invariant) +
               " != " + std::to_string(rf.invariant));
  c.expect(rf.invariant == 0, "full invariant nonzero under odd TRS");
  c.expect(std::abs(rp.invariant) == 1, "block invariant not +-1");
  report(6, "conserved-block invariants sum to the full invariant", c.ok,
         c.detail.str());
}

// --- criterion 7: zero-dimensional parity formula -------------------------

double pfaffian_bruteforce(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return 1.0;
  if (n == 2) return m(0, 1);
  double total = 0;
  int sign = 1;
  for (Eigen::Index j = 1; j < n; ++j) {
    Eigen::MatrixXd sub(n - 2, n - 2);
    Eigen::Index r = 0;
    for (Eigen::Index a = 1; a < n; ++a) {
      if (a == j) continue;
      Eigen::Index cc = 0;
      for (Eigen::Index b = 1; b < n; ++b) {
        if (b == j) continue;
        sub(r, cc++) = m(a, b);
      }
      ++r;
    }
    total += sign * m(0, j) * pfaffian_bruteforce(sub);
    sign = -sign;
  }
  return total;
}

void criterion7() {
  Check c;
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 1000; ++seed) {
    int bands = 1 + static_cast<int>(seed % 4);
    ModelInstance m = random_bdg(bands, 0.4, seed);
    Matrix h = m.real_space.entry(Site::zero(0), Site::zero(0));
    ZeroDimResult z = zero_dim_invariant(h);
    if (z.pf_sign != z.formula_sign) {
      c.expect(false, "seed " + std::to_string(seed) + ": signs disagree");
      break;
    }
    // cross-check the Pfaffian kernel against the recursive expansion
    Matrix tc = kron(cayley2(), identity(bands));
    Eigen::MatrixXd re = ((I * (tc.adjoint() * h * tc).eval()).real()).eval();
    double brute = pfaffian_bruteforce(re);
    if ((brute > 0 ? 1 : -1) != pfaffian_sign(re)) {
      c.expect(false, "seed " + std::to_string(seed) + ": brute force disagrees");
      break;
    }
    ++checked;
  }
  c.expect(checked == 1000, "not all 1000 draws verified");
  // Pf^2 = det up to dimension 100
  std::mt19937_64 rng(7);
  auto u = [&]() { return (rng() >> 11) * 0x1p-53 - 0.5; };
  for (int n : {20, 60, 100}) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = u();
    Eigen::MatrixXd a = 0.5 * (g - g.transpose());
    double pf = pfaffian_real(a).value;
    double det = a.determinant();
    c.expect(std::abs(pf * pf - det) <= 1e-8 * std::max(1.0, std::abs(det)),
             "Pf^2 != det at dim " + std::to_string(n));
  }
  report(7, "Pfaffian parity equals the signature formula on 1000 draws", c.ok,
         c.detail.str());
}

// --- criterion 8: homotopy constancy and gap-closure detection ------------

void criterion8() {
  Check c;
  CliffordRep rep1 = build_clifford(1);
  {
    // scaled symmetry-breaking path for the twisted chiral setting
    std::vector<GradedOperator> path;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      path.push_back(graded_for_pipeline(ssh_perturbed(1.0, 1.5, 0.12 * t, 0.0, 26)));
    LocalizerSpec spec{Variant::OddTwistedChiral, std::nullopt, 20.0, false};
    std::vector<long> sigs = homotopy_scan(path, spec, rep1);
    c.expect(sigs.front() == sigs.back(), "twisted chiral path signature moved");
  }
  {
    CliffordRep rep2 = build_clifford(2);
    std::vector<GradedOperator> path;
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0})
      path.push_back(graded_for_pipeline(bhz_rashba(1.0, 0.15 * t, 0.0, 11)));
    LocalizerSpec spec{Variant::EvenTwistedConservation, 0.2, 9.0, false};
    std::vector<long> sigs = homotopy_scan(path, spec, rep2);
    c.expect(sigs.front() == sigs.back(), "conservation path signature moved");
  }
  {
    bool fired = false;
    try {
      std::vector<GradedOperator> path;
      for (double t2 : {0.5, 0.75, 1.0, 1.25, 1.5})
        path.push_back(graded_for_pipeline(ssh(1.0, t2, 0.0, 26)));
      LocalizerSpec spec{Variant::OddStandard, 0.08, 16.0, false};
      homotopy_scan(path, spec, rep1);
    } catch (const GapClosedError&) {
      fired = true;
    }
    c.expect(fired, "gap-closure detection did not fire at the transition");
  }
  report(8, "signatures constant along gapped paths, closure detected", c.ok,
         c.detail.str());
}

// --- criterion 9: signature kernel vs eigendecomposition ------------------

void criterion9() {
  Check c;
  std::mt19937_64 rng(31337);
  auto u = [&]() { return (rng() >> 11) * 0x1p-53 - 0.5; };
  auto random_hermitian = [&](int n) {
    Matrix g(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g(i, j) = cplx(u(), u());
    return Matrix(0.5 * (g + Matrix(g.adjoint())));
  };
  int verified = 0;
  for (int trial = 0; trial < 500; ++trial) {
    int n = 2 + static_cast<int>(rng() % 299);
    Matrix m = random_hermitian(n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().cwiseAbs().minCoeff() < 1e-8) continue;
    long expect = 0;
    for (Eigen::Index i = 0; i < n; ++i)
      expect += es.eigenvalues()(i) > 0 ? 1 : -1;
    if (hermitian_signature(m).signature != expect) {
      c.expect(false, "mismatch at trial " + std::to_string(trial));
      break;
    }
    ++verified;
  }
  c.expect(verified >= 495, "too few verified draws");
  int congruent = 0;
  for (int trial = 0; trial < 100; ++trial) {
    int n = 4 + static_cast<int>(rng() % 56);
    Matrix m = random_hermitian(n);
    Matrix s = identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) s(i, j) += 0.35 * cplx(u(), u());
    if (hermitian_signature(Matrix(s.adjoint() * m * s)).signature ==
        hermitian_signature(m).signature)
      ++congruent;
  }
  c.expect(congruent == 100, "congruence invariance failed");
  report(9, "signature kernel matches the eigencount oracle", c.ok,
         c.detail.str());
}

// --- criterion 10: Clifford and Dirac symmetry suite ----------------------

void criterion10() {
  Check c;
  auto t0 = clk::now();
  for (int d = 1; d <= 8; ++d) {
    try {
      CliffordRep rep = build_clifford(d);
      verify_clifford(rep);
      // reduced symmetry against the site blocks
      std::mt19937_64 rng(17 + d);
      for (int k = 0; k < 4; ++k) {
        std::vector<double> x(d);
        for (int i = 0; i < d; ++i)
          x[i] = static_cast<double>(static_cast<int>(rng() % 9) - 4);
        Matrix blk = rep.site_block(x);
        if (d % 2 == 0) {
          int h = rep.dprime / 2;
          Matrix b = blk.block(0, h, h, h);
          Matrix lhs = rep.reduced_transpose
                           ? Matrix(rep.reduced_sigma.adjoint() * b.transpose() *
                                    rep.reduced_sigma)
                           : Matrix(rep.reduced_sigma.adjoint() * b.conjugate() *
                                    rep.reduced_sigma);
          c.expect((lhs - b).cwiseAbs().maxCoeff() < 1e-12,
                   "reduced relation failed at d=" + std::to_string(d));
        }
      }
    } catch (const std::exception& e) {
      c.expect(false, std::string("d=") + std::to_string(d) + ": " + e.what());
    }
  }
  c.expect(seconds(t0) < 1.0, "suite exceeded 1 s");
  report(10, "Clifford anticommutation and symmetry table rows, d = 1..8", c.ok,
         c.detail.str());
}

// --- criterion 11: stability under rho, kappa, and weak disorder ----------

void criterion11() {
  Check c;
  CliffordRep rep1 = build_clifford(1);
  CliffordRep rep2 = build_clifford(2);
  {
    for (double t2 : {0.5, 1.5}) {
      ModelInstance m = ssh(1.0, t2, 0.0, 30);
      GradedOperator op = graded_for_pipeline(m);
      LocalizerSpec spec{Variant::OddStandard, 0.06, 22.0, false};
      long base = invariant(spec, op, rep1).invariant;
      spec.rho = 24.0;
      c.expect(invariant(spec, op, rep1).invariant == base,
               "ssh rho stability failed");
      spec.rho = 22.0;
      spec.kappa = 0.03;
      c.expect(invariant(spec, op, rep1).invariant == base,
               "ssh kappa stability failed");
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        ModelInstance dis = ssh(1.0, t2, 0.2 * 0.5, 30, seed);
        GradedOperator opd = graded_for_pipeline(dis);
        LocalizerSpec sd{Variant::OddStandard, 0.06, 22.0, false};
        c.expect(invariant(sd, opd, rep1).invariant == base,
                 "ssh disorder stability failed at seed " + std::to_string(seed));
      }
    }
  }
  {
    for (double mass : {-1.0, 1.0, 3.0}) {
      ModelInstance m = qwz(mass, 0.0, 16);
      GradedOperator op = graded_for_pipeline(m);
      LocalizerSpec spec{Variant::EvenStandard, 0.3, 12.0, false};
      long base = invariant(spec, op, rep2).invariant;
      c.expect(base == chern_number(*m.bloch), "qwz base invariant off");
      spec.rho = 14.0;
      c.expect(invariant(spec, op, rep2).invariant == base,
               "qwz rho stability failed");
      spec.rho = 12.0;
      spec.kappa = 0.15;
      c.expect(invariant(spec, op, rep2).invariant == base,
               "qwz kappa stability failed");
      for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        ModelInstance dis = qwz(mass, 0.2 * model_gap(m), 16, seed);
        GradedOperator opd = graded_for_pipeline(dis);
        LocalizerSpec sd{Variant::EvenStandard, 0.3, 12.0, false};
        c.expect(invariant(sd, opd, rep2).invariant == base,
                 "qwz disorder stability failed at seed " + std::to_string(seed));
      }
    }
  }
  report(11, "invariants stable under rho+2, kappa/2, and weak disorder", c.ok,
         c.detail.str());
}

}  // namespace

int main() {
  auto t0 = clk::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  criterion11();
  std::printf("acceptance: %s (%d failure%s, %.1f s)\n",
              failures == 0 ? "ALL PASS" : "FAILURES", failures,
              failures == 1 ? "" : "s", seconds(t0));
  return failures == 0 ? 0 : 1;
}
