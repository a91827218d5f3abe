// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Each criterion prints its sub-checks and then a single
// line "criterion <N> PASS|FAIL: <summary>". Exit status is nonzero if any
// selected criterion fails.
//
//   acceptance                  run all criteria
//   acceptance --criterion 4    run one criterion

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dbm/approx_entries.hpp"
#include "dbm/chebyshev.hpp"
#include "dbm/combinatorics.hpp"
#include "dbm/experiments.hpp"
#include "dbm/spectral.hpp"
#include "dbm/tridiag.hpp"

namespace {

using namespace dbm;

class Report {
 public:
  explicit Report(int id) : id_(id) {}

  void check(bool ok, const std::string& what) {
    if (!ok) ++failed_;
    ++total_;
    std::cout << "  [" << (ok ? "ok" : "FAIL") << "] " << what << "\n";
  }

  void note(const std::string& what) { std::cout << "  " << what << "\n"; }

  bool finish(const std::string& summary) const {
    std::cout << "criterion " << id_ << " " << (failed_ == 0 ? "PASS" : "FAIL") << ": " << summary << " ("
              << total_ - failed_ << "/" << total_ << " checks)" << std::endl;
    return failed_ == 0;
  }

 private:
  int id_;
  int failed_ = 0;
  int total_ = 0;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

ParallelOptions par() { return {resolve_threads(), 16}; }

double band(double se1, double se2) { return std::sqrt(se1 * se1 + se2 * se2); }

// Stationary marginals at one time: a_j ~ N(0, 2), b_j^2 ~ chi^2_{beta(N-j)}.
bool criterion_1() {
  Report r(1);
  const std::size_t n = 201;
  const std::size_t samples = 5000;
  const auto st = simulate_entries(n, 1, n, TimeGrid::single(), samples, 101, par());
  double vlo = 1e9, vhi = -1e9;
  int vbad = 0;
  for (const auto& a : st.a) {
    const double v = a.at(0).variance();
    vlo = std::min(vlo, v);
    vhi = std::max(vhi, v);
    if (v < 1.85 || v > 2.15) ++vbad;
  }
  r.check(vbad == 0, fmt("Var a_j in [1.85, 2.15] for j = 1..%zu: range [%.4f, %.4f], %d outside", n, vlo, vhi, vbad));

  // Relative 2% is a meaningful gate once the chi-square degree reaches 16
  // (relative SE <= 0.5%). Smaller degrees are gated at 4 SE instead.
  double worst_rel = 0.0;
  double worst_z = 0.0;
  int rel_bad = 0, z_bad = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const auto& m = st.b_sq[j - 1].at(0);
    const double want = static_cast<double>(n - j);
    if (want >= 16.0) {
      const double rel = std::abs(m.mean_x() / want - 1.0);
      worst_rel = std::max(worst_rel, rel);
      if (rel > 0.02) ++rel_bad;
    } else {
      const double z = std::abs(m.mean_x() - want) / std::sqrt(2.0 * want / samples);
      worst_z = std::max(worst_z, z);
      if (z > 4.0) ++z_bad;
    }
  }
  r.check(rel_bad == 0, fmt("E b_j^2 within 2%% of (N - j) where N - j >= 16: worst %.4f%%", 100.0 * worst_rel));
  r.check(z_bad == 0, fmt("E b_j^2 within 4 SE of (N - j) where N - j < 16: worst %.2f SE", worst_z));
  return r.finish("stationary marginals, N=201, 5000 samples");
}

// Cov(a_5(0), a_5(t)) against 2 exp(-9t).
bool criterion_2() {
  Report r(2);
  const auto grid = TimeGrid::over(0.5, 2.5e-3);
  const auto st = simulate_entries(400, 1, 5, grid, 4000, 102, par());
  const auto t = st.times();
  const auto cov = st.a[4].covariance(t);
  double worst = 0.0, at = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = std::abs(cov.value[i] - 2.0 * std::exp(-9.0 * t[i]));
    if (d > worst) {
      worst = d;
      at = t[i];
    }
  }
  r.note(fmt("Cov(a_5(0), a_5(t)) at t = 0, 0.1, 0.5: %.4f, %.4f, %.4f", cov.value[0], cov.value[40], cov.value.back()));
  r.check(worst <= 0.2, fmt("max_t |Cov - 2 exp(-9t)| = %.4f at t = %.4f (tolerance 0.2)", worst, at));
  return r.finish("a_5 covariance curve, n=400, 4000 samples, dt=2.5e-3");
}

// b_25 of the n = 2000 GOE process against its chi law and against b_hat.
bool criterion_3() {
  Report r(3);
  const std::size_t n = 2000, j = 25, samples = 1000;
  const auto grid = TimeGrid::over(0.05, 0.01);
  const auto st = simulate_entries(n, 1, j, grid, samples, 103, par());
  const auto bh = simulate_bhat(n, j, 1, grid, samples, 103, par());
  const auto t = st.times();
  const double m = static_cast<double>(n - j);
  const double chi_mean = std::sqrt(2.0) * std::exp(std::lgamma((m + 1.0) / 2.0) - std::lgamma(m / 2.0));
  const auto& b = st.b[j - 1];
  r.note(fmt("chi mean %.4f, sqrt(n - j) = %.4f, b_hat exclusions %zu", chi_mean, std::sqrt(m), bh.excluded));

  double worst_mean = 0.0, vlo = 1e9, vhi = -1e9;
  for (std::size_t i = 0; i < t.size(); ++i) {
    worst_mean = std::max(worst_mean, std::abs(b.at(i).mean_x() / chi_mean - 1.0));
    vlo = std::min(vlo, b.at(i).variance());
    vhi = std::max(vhi, b.at(i).variance());
  }
  r.check(worst_mean <= 0.005, fmt("mean b_25 within 0.5%% of chi mean: worst %.4f%%", 100.0 * worst_mean));
  r.check(vlo >= 0.4 && vhi <= 0.6, fmt("Var b_25 in [0.4, 0.6]: range [%.4f, %.4f]", vlo, vhi));

  auto compare = [&](const Curve& x, const Curve& y, const char* what) {
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
      worst = std::max(worst, std::abs(x.value[i] - y.value[i]) / band(x.se[i], y.se[i]));
    r.check(worst <= 3.0, fmt("%s of b_25 and b_hat_25 within 3 SE: worst %.2f SE", what, worst));
  };
  compare(b.mean(t), bh.bhat.mean(t), "mean");
  compare(b.variance(t), bh.bhat.variance(t), "variance");
  compare(b.covariance(t), bh.bhat.covariance(t), "covariance");
  return r.finish("off-diagonal limit, n=2000, j=25, 1000 samples");
}

// Excess kurtosis of a_j(0) + a_j(t).
bool criterion_4() {
  Report r(4);
  const auto grid = TimeGrid::over(0.5, 0.1);
  const auto curves = kurtosis_sum_experiment({5, 320}, {1, 3}, grid, 100000, 104, par());
  auto find = [&](std::size_t n, std::size_t j) -> const KurtosisCurve& {
    for (const auto& c : curves)
      if (c.n == n && c.j == j) return c;
    std::abort();
  };
  for (const auto& c : curves) {
    std::ostringstream os;
    os << "n=" << c.n << " j=" << c.j << ":";
    for (std::size_t i = 0; i < c.t.size(); ++i) os << fmt(" %.3f(%.3f)", c.value[i], c.se(i));
    r.note(os.str());
  }
  const auto& small = find(5, 3);
  const auto& large = find(320, 3);
  // Intermediate times: the interior of the grid.
  for (std::size_t i = 1; i + 1 < small.t.size(); ++i) {
    const double ks = std::abs(small.value[i]);
    const double kl = std::abs(large.value[i]);
    r.check(ks > 3.0 * small.se(i), fmt("t=%.1f: |G2| at n=5 = %.4f > 3 SE = %.4f", small.t[i], ks, 3.0 * small.se(i)));
    const double gap_se = band(small.se(i), large.se(i));
    r.check(ks - kl > 3.0 * gap_se,
            fmt("t=%.1f: |G2(n=5)| - |G2(n=320)| = %.4f > 3 SE = %.4f", small.t[i], ks - kl, 3.0 * gap_se));
  }
  for (std::size_t n : {5u, 320u}) {
    const auto& c = find(n, 1);
    double worst = 0.0;
    for (std::size_t i = 0; i < c.t.size(); ++i) worst = std::max(worst, std::abs(c.value[i]) / c.se(i));
    r.check(worst <= 3.0, fmt("j=1 control at n=%zu within 3 SE of 0: worst %.2f SE", n, worst));
  }
  return r.finish("non-Gaussianity of a_3, n in {5, 320}, 100000 samples");
}

// (1/n) Tr(P_j P_k) across two times against the semicircular oracle.
bool criterion_5() {
  Report r(5);
  const std::size_t n = 300;
  const auto mc = moment_check(n, 4, 0.3, 2000, 105, par());
  for (const auto& e : mc.entries) {
    const double want = e.j == e.k ? std::exp(-static_cast<double>(e.k) * 0.3) : 0.0;
    const double tol = 3.0 * e.se + 5.0 / static_cast<double>(n);
    r.check(std::abs(e.oracle - want) < 1e-12 && std::abs(e.value - e.oracle) <= tol,
            fmt("j=%zu k=%zu: MC %.5f, oracle %.5f, |diff| %.5f <= %.5f", e.j, e.k, e.value, e.oracle,
                std::abs(e.value - e.oracle), tol));
  }
  return r.finish("moment oracle vs Monte Carlo, n=300, lag 0.3, 2000 samples");
}

// Exact combinatorics.
bool criterion_6() {
  Report r(6);
  for (std::size_t m = 0; m <= 8; ++m) {
    // Catalan numbers by the convolution recurrence.
    std::vector<std::uint64_t> cat{1};
    for (std::size_t i = 1; i <= m; ++i) {
      std::uint64_t c = 0;
      for (std::size_t a = 0; a < i; ++a) c += cat[a] * cat[i - 1 - a];
      cat.push_back(c);
    }
    const auto count = enumerate_nc2(2 * m).size();
    r.check(count == cat[m], fmt("|NC2[%zu]| = %zu, Catalan(%zu) = %llu", 2 * m, count, m,
                                 static_cast<unsigned long long>(cat[m])));
  }
  for (int j = 1; j <= 6; ++j) {
    std::uint64_t sum = 0;
    std::vector<PermutationCycles> seen;
    for (const auto& pi : enumerate_slot_pairings(j)) {
      const auto sigma = perm_from_pairing(pi);
      if (std::find(seen.begin(), seen.end(), sigma) == seen.end()) {
        seen.push_back(sigma);
        sum += perm_multiplicity(sigma);
      }
    }
    std::uint64_t df = 1;
    for (int i = 2 * j - 1; i > 1; i -= 2) df *= static_cast<std::uint64_t>(i);
    r.check(sum == df, fmt("|J|=%d: sum of multiplicities %llu, (2|J|-1)!! = %llu", j,
                           static_cast<unsigned long long>(sum), static_cast<unsigned long long>(df)));
  }
  auto slots = [](std::vector<std::pair<Slot, Slot>> p) {
    SlotPairing s{std::move(p)};
    s.normalize();
    return s;
  };
  const auto pi = slots({{{1, 1}, {1, 3}}, {{2, 3}, {2, 2}}, {{1, 2}, {1, 4}}, {{2, 4}, {2, 1}}});
  const auto pi2 = slots({{{1, 1}, {1, 2}}, {{2, 2}, {2, 1}}, {{1, 3}, {1, 4}}, {{2, 4}, {2, 3}}});
  const auto s1 = perm_from_pairing(pi).str();
  const auto s2 = perm_from_pairing(pi2).str();
  r.check(s1 == "(1 3 2 4)", "Perm example 1 gives " + s1);
  r.check(s2 == "(1 2)(3 4)", "Perm example 2 gives " + s2);
  return r.finish("exact combinatorics");
}

// Sup-grid error of |a_j - a~_j| decays like log(n)/sqrt(n).
bool criterion_7() {
  Report r(7);
  const std::vector<std::size_t> ns{250, 1000, 4000};
  const auto rows = approx_error_study(ns, 3, TimeGrid::over(0.5, 0.1), 200, 107, par());
  bool exact = true;
  for (const auto& row : rows)
    for (double v : row.a_sup[0]) exact = exact && v == 0.0;
  r.check(exact, "j=1: a~_1 = a_1 exactly for every sample and n");
  for (std::size_t j = 2; j <= 3; ++j) {
    std::ostringstream os;
    for (const auto& row : rows) os << fmt(" n=%zu:%.5f", row.n, row.median_a(j));
    r.note(fmt("j=%zu medians", j) + os.str());
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const double ratio = rows[i + 1].median_a(j) / rows[i].median_a(j);
      r.check(ratio >= 0.35 && ratio <= 0.75,
              fmt("j=%zu n %zu -> %zu: ratio %.4f in [0.35, 0.75]", j, rows[i].n, rows[i + 1].n, ratio));
    }
  }
  return r.finish("approximation rate, n in {250, 1000, 4000}, 200 samples");
}

// Largest-eigenvalue covariance curves: limit-model corner vs tridiagonal corner vs full.
bool criterion_8() {
  Report r(8);
  const auto st = eigen_cov_experiment(400, 1, {10, 30}, TimeGrid::over(0.5, 0.05), 1000, 108, par());
  const auto t = st.times();
  const auto full = st.full.covariance(t).value;
  const auto lim10 = st.limit[0].covariance(t).value;
  const auto tri10 = st.tridiag[0].covariance(t).value;
  const auto lim30 = st.limit[1].covariance(t).value;
  const auto tri30 = st.tridiag[1].covariance(t).value;
  r.note(fmt("Cov at t=0 / t=0.5: full %.4f/%.4f, limit10 %.4f/%.4f, tri10 %.4f/%.4f, limit30 %.4f/%.4f, "
             "tri30 %.4f/%.4f",
             full[0], full.back(), lim10[0], lim10.back(), tri10[0], tri10.back(), lim30[0], lim30.back(), tri30[0],
             tri30.back()));
  r.note(fmt("b_hat exclusions: k=10 %zu, k=30 %zu", st.excluded[0], st.excluded[1]));
  const double g10 = integrated_gap(t, lim10, tri10);
  const double g30 = integrated_gap(t, lim30, full);
  r.note(fmt("gap(limit, tridiag) at k=30: %.5f; gap(tridiag, full) at k=30: %.5f", integrated_gap(t, lim30, tri30),
             integrated_gap(t, tri30, full)));
  r.check(g10 < g30, fmt("gap(limit, tridiag) at k=10 = %.5f < gap(limit, full) at k=30 = %.5f", g10, g30));
  return r.finish("eigenvalue covariance ordering, n=400, k in {10, 30}, 1000 samples");
}

// beta = 2 diagonal and beta = 4 off-diagonal covariance curves.
bool criterion_9() {
  Report r(9);
  const std::size_t n = 200, samples = 1000;
  const auto grid = TimeGrid::over(0.5, 0.01);
  const double slack = 4.0 / std::sqrt(static_cast<double>(n));

  const auto gue = simulate_entries(n, 2, 5, grid, samples, 109, par());
  const auto t = gue.times();
  const auto ca = gue.a[4].covariance(t);
  double worst = 0.0;
  bool ok = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double d = std::abs(ca.value[i] - 2.0 * std::exp(-9.0 * t[i]));
    worst = std::max(worst, d - 3.0 * ca.se[i]);
    ok = ok && d <= 3.0 * ca.se[i] + slack;
  }
  r.check(ok, fmt("beta=2 Cov(a_5(0), a_5(t)) within 3 SE + %.4f of 2 exp(-9t): worst excess over 3 SE %.4f", slack,
                  worst));

  const auto gse = simulate_entries(n, 4, 7, grid, samples, 209, par());
  const auto bh = simulate_bhat(n, 7, 4, grid, samples, 209, par());
  const auto cb = gse.b[6].covariance(t);
  const auto ch = bh.bhat.covariance(t);
  double worst_gap = 0.0;
  bool overlap = true;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double gap = std::abs(cb.value[i] - ch.value[i]) - 3.0 * (cb.se[i] + ch.se[i]);
    worst_gap = std::max(worst_gap, gap);
    overlap = overlap && gap <= 0.0;
  }
  r.note(fmt("beta=4 Cov b_7 at t=0: %.4f, b_hat_7: %.4f; exclusions %zu", cb.value[0], ch.value[0], bh.excluded));
  r.check(overlap, fmt("beta=4 b_7 and b_hat_7 3 SE covariance bands overlap at every t (worst gap %.4f)", worst_gap));
  return r.finish("beta = 2, 4 spot checks, n=200, 1000 samples");
}

// Deterministic identities: polynomial algebra, similarity, Sturm counts.
bool criterion_10() {
  Report r(10);
  bool poly = true;
  for (std::size_t k = 1; k <= 14; ++k) {
    poly = poly && poly_p(k) * poly_p(k) - poly_p(k - 1) * poly_p(k - 1) == poly_p(2 * k);
    if (k >= 2) poly = poly && (poly_p(k) - poly_p(k - 2)) * poly_p(k - 1) == poly_p(2 * k - 1);
    for (std::size_t j = 0; j <= 10; ++j) {
      IntPoly sum;
      for (std::size_t d : poly_product_expand(j, k)) sum = sum + poly_p(d);
      poly = poly && sum == poly_p(j) * poly_p(k);
    }
  }
  r.check(poly, "P_j P_k expansion and both product corollaries hold exactly for k <= 14");

  auto similarity = [&]<class F>(int beta) {
    double worst = 0.0;
    for (std::size_t n : {2u, 5u, 17u, 64u}) {
      const auto a = gbe_sample_stationary<F>(n, 1000 + n);
      TridiagOptions opts;
      opts.accumulate_transform = true;
      const auto res = tridiagonalize_with(a, opts);
      const auto& q = *res.transform;
      const auto td = res.tridiagonal.dense();
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          F s{};
          for (std::size_t x = 0; x < n; ++x)
            for (std::size_t y = 0; y < n; ++y) s += conj_of(q(x, i)) * a(x, y) * q(y, j);
          worst = std::max(worst, abs_of(F(s - F(td(i, j)))));
        }
    }
    r.check(worst <= 1e-10, fmt("beta=%d: max |Q* A Q - T| = %.2e for n <= 64", beta, worst));
  };
  similarity.operator()<double>(1);
  similarity.operator()<std::complex<double>>(2);
  similarity.operator()<Quaternion>(4);

  double worst = 0.0;
  bool counts = true;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    Engine e(seed);
    StandardNormal normal;
    SymTridiagonal t;
    for (int i = 0; i < 8; ++i) t.diag.push_back(normal(e));
    for (int i = 0; i < 7; ++i) t.offdiag.push_back(std::abs(normal(e)));
    // Roots of the characteristic polynomial by sign scanning and bisection.
    auto det = [&](double x) {
      double p0 = 1.0, p1 = t.diag[0] - x;
      for (std::size_t i = 1; i < 8; ++i) {
        const double p2 = (t.diag[i] - x) * p1 - t.offdiag[i - 1] * t.offdiag[i - 1] * p0;
        p0 = p1;
        p1 = p2;
      }
      return p1;
    };
    const auto g = gershgorin(t);
    std::vector<double> roots;
    double xa = g.lo - 1e-9, fa = det(xa);
    for (int i = 1; i <= 20000; ++i) {
      const double xb = g.lo + (g.hi - g.lo) * i / 20000.0 + 1e-9;
      const double fb = det(xb);
      if ((fa < 0) != (fb < 0)) {
        double lo = xa, hi = xb, flo = fa;
        for (int it = 0; it < 200; ++it) {
          const double mid = 0.5 * (lo + hi);
          const double fm = det(mid);
          if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
          } else {
            hi = mid;
          }
        }
        roots.push_back(0.5 * (lo + hi));
      }
      xa = xb;
      fa = fb;
    }
    if (roots.size() != 8) {
      counts = false;
      continue;
    }
    for (std::size_t i = 0; i < 8; ++i)
      counts = counts && sturm_count(t, roots[i] - 1e-7) == i && sturm_count(t, roots[i] + 1e-7) == i + 1;
    const auto top = eigs_extreme({t, 8, Which::largest, 1e-12});
    for (std::size_t i = 0; i < 8; ++i) worst = std::max(worst, std::abs(top[i] - roots[7 - i]));
  }
  r.check(counts, "Sturm counts agree with characteristic-polynomial roots on 20 random 8x8 matrices");
  r.check(worst <= 1e-8, fmt("bisection eigenvalues within %.2e of the roots (tolerance 1e-8)", worst));
  return r.finish("chebyshev and spectral identities");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::function<bool()>> criteria{criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                                    criterion_6, criterion_7, criterion_8, criterion_9, criterion_10};
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::cerr << "usage: acceptance [--criterion N]...\n";
      return 2;
    }
  }
  if (selected.empty())
    for (int c = 1; c <= 10; ++c) selected.push_back(c);

  int failed = 0;
  for (int c : selected) {
    if (c < 1 || c > 10) {
      std::cerr << "no criterion " << c << "\n";
      return 2;
    }
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
      ok = criteria[c - 1]();
    } catch (const std::exception& e) {
      std::cout << "criterion " << c << " FAIL: exception: " << e.what() << std::endl;
    }
    const std::chrono::duration<double> took = std::chrono::steady_clock::now() - start;
    std::cout << "  (" << fmt("%.1f", took.count()) << " s)" << std::endl;
    if (!ok) ++failed;
  }
  return failed == 0 ? 0 : 1;
}
