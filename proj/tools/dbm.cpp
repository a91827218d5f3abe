// Copyright 2026 The dbm-tridiag Authors.
// SPDX-License-Identifier: Apache-2.0

// dbm: experiment runner for tridiagonalized GbE processes.
//
// Each subcommand writes CSV curves (t,value,stderr,series) and a JSON run
// summary into --out. approx-error stores n in the t column.
// Exit codes: 0 ok, 1 a check failed, 2 usage error, 3 I/O error, 4 internal error.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "dbm/approx_entries.hpp"
#include "dbm/combinatorics.hpp"
#include "dbm/experiments.hpp"

#ifndef DBM_GIT_VERSION
#define DBM_GIT_VERSION "unknown"
#endif

namespace {

using json = nlohmann::json;
using namespace dbm;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::vector<std::size_t> n;
  int beta = 1;
  std::vector<std::size_t> j;
  std::vector<std::size_t> k;
  std::size_t samples = 1000;
  double t_max = 0.5;
  double dt = 1e-3;
  double lag = 0.3;
  std::uint64_t seed = 1;
  std::optional<unsigned> threads;
  std::string out = ".";
  bool sequential = false;
};

std::size_t first(const std::vector<std::size_t>& v) { return v.front(); }

class Run {
 public:
  Run(std::string name, const Options& o) : name_(std::move(name)), opts_(o), start_(std::chrono::steady_clock::now()) {
    config_ = {{"experiment", name_},  {"n", o.n},         {"beta", o.beta},       {"j", o.j},
               {"k", o.k},             {"samples", o.samples}, {"t_max", o.t_max}, {"dt", o.dt},
               {"seed", o.seed},       {"sequential", o.sequential}};
    if (name_ == "moment-check") config_["lag"] = o.lag;
    par_.threads = o.sequential ? 1u : resolve_threads(o.threads);
    std::error_code ec;
    std::filesystem::create_directories(o.out, ec);
    if (ec) throw IoError("cannot create output directory " + o.out + ": " + ec.message());
  }

  const ParallelOptions& par() const { return par_; }
  TimeGrid grid() const { return TimeGrid::over(opts_.t_max, opts_.dt); }

  /// Queues a curve for <out>/<experiment>_<family>.csv.
  void curve(const std::string& family, const Curve& c, const std::string& series) {
    families_[family].push_back({c, series});
  }

  void check(const std::string& name, bool pass, const std::string& detail) {
    checks_.push_back({{"name", name}, {"pass", pass}, {"detail", detail}});
    if (!pass) failed_ = true;
    std::cerr << (pass ? "ok    " : "FAIL  ") << name << ": " << detail << "\n";
  }

  void diagnostic(const std::string& name, double value, const std::string& detail) {
    diagnostics_.push_back({{"name", name}, {"value", value}, {"detail", detail}});
    std::cerr << "info  " << name << " = " << value << " (" << detail << ")\n";
  }

  /// Writes one CSV per curve family plus <out>/<name>_summary.json.
  int finish() {
    const std::string hash = config_hash();
    for (const auto& [family, rows] : families_) {
      const auto path = std::filesystem::path(opts_.out) / (name_ + "_" + family + ".csv");
      std::ofstream f(path);
      if (!f) throw IoError("cannot open " + path.string());
      f << "# dbm " << name_ << " config=" << hash << " seed=" << opts_.seed << " version=" << DBM_GIT_VERSION << "\n";
      f << "t,value,stderr,series\n";
      char buf[128];
      for (const auto& [c, series] : rows)
        for (std::size_t i = 0; i < c.t.size(); ++i) {
          std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,", c.t[i], c.value[i], c.se[i]);
          f << buf << series << "\n";
        }
      if (!f) throw IoError("write failed for " + path.string());
    }
    const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start_;
    json summary = {{"config", config_},
                    {"config_hash", hash},
                    {"seed", opts_.seed},
                    {"threads", par_.threads},
                    {"git_version", DBM_GIT_VERSION},
                    {"wall_time_s", wall.count()},
                    {"checks", checks_},
                    {"diagnostics", diagnostics_}};
    const auto path = std::filesystem::path(opts_.out) / (name_ + "_summary.json");
    std::ofstream f(path);
    if (!f) throw IoError("cannot open " + path.string());
    f << summary.dump(2) << "\n";
    if (!f) throw IoError("write failed for " + path.string());
    return failed_ ? 1 : 0;
  }

 private:
  // FNV-1a over the canonical config dump. Threads are left out on purpose,
  // results do not depend on them.
  std::string config_hash() const {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char ch : config_.dump()) {
      h ^= ch;
      h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
  }

  std::string name_;
  Options opts_;
  std::chrono::steady_clock::time_point start_;
  ParallelOptions par_;
  json config_;
  json checks_ = json::array();
  json diagnostics_ = json::array();
  std::map<std::string, std::vector<std::pair<Curve, std::string>>> families_;
  bool failed_ = false;
};

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool all_finite(const Curve& c) {
  for (std::size_t i = 0; i < c.value.size(); ++i)
    if (!std::isfinite(c.value[i]) || !std::isfinite(c.se[i])) return false;
  return true;
}

void require_entry_range(std::size_t n, std::size_t j) {
  detail::require(n > j + 3, "need n > j + 3 (got n=" + std::to_string(n) + ", j=" + std::to_string(j) + ")");
}

int simulate_entries_cmd(const Options& o) {
  Run run("simulate-entries", o);
  const std::size_t n = first(o.n), k = first(o.k);
  const auto st = simulate_entries(n, o.beta, k, run.grid(), o.samples, o.seed, run.par());
  const auto t = st.times();
  bool finite = true;
  double worst = 0.0;
  for (std::size_t j = 1; j <= st.a.size(); ++j) {
    const auto var = st.a[j - 1].variance(t);
    for (const auto& [c, tag] : {std::pair{st.a[j - 1].mean(t), "mean"}, {var, "var"}, {st.a[j - 1].covariance(t), "cov"}}) {
      finite = finite && all_finite(c);
      run.curve(tag, c, fmt("a%zu", j));
    }
    worst = std::max(worst, std::abs(var.value[0] - 2.0) / var.se[0]);
  }
  for (std::size_t j = 1; j <= st.b.size(); ++j)
    for (const auto& [c, tag] : {std::pair{st.b[j - 1].mean(t), "mean"}, {st.b[j - 1].variance(t), "var"},
                                 {st.b[j - 1].covariance(t), "cov"}}) {
      finite = finite && all_finite(c);
      run.curve(tag, c, fmt("b%zu", j));
    }
  run.check("finite", finite, "all estimates and standard errors finite");
  run.check("sample_count", st.a[0].count() == o.samples, fmt("%zu paths accumulated", st.a[0].count()));
  run.diagnostic("max_var_a_deviation_se", worst, "max_j |Var a_j(0) - 2| / SE");
  return run.finish();
}

int compare_limit_cmd(const Options& o) {
  Run run("compare-limit", o);
  const std::size_t n = first(o.n), j = first(o.j);
  require_entry_range(n, j);
  const auto grid = run.grid();
  const auto st = simulate_entries(n, o.beta, j, grid, o.samples, o.seed, run.par());
  const auto lim = simulate_limit(j, grid, o.samples, o.seed, run.par());
  const auto t = st.times();
  const auto ca = st.a[j - 1].covariance(t);
  const auto cl = lim.a[j - 1].covariance(t);
  Curve theory{"theory", t, {}, std::vector<double>(t.size(), 0.0)};
  const double rate = LimitEntryProcesses::a_rate(j);
  double dev = 0.0, dev_lim = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    theory.value.push_back(2.0 * std::exp(-rate * t[i]));
    dev = std::max(dev, std::abs(ca.value[i] - theory.value[i]));
    dev_lim = std::max(dev_lim, std::abs(cl.value[i] - theory.value[i]) / cl.se[i]);
  }
  run.curve("cov", ca, fmt("a%zu", j));
  run.curve("cov", cl, fmt("A%zu", j));
  run.curve("cov", theory, "theory");
  run.curve("mean", st.a[j - 1].mean(t), fmt("a%zu", j));
  run.curve("mean", lim.a[j - 1].mean(t), fmt("A%zu", j));
  run.curve("var", st.a[j - 1].variance(t), fmt("a%zu", j));
  run.curve("var", lim.a[j - 1].variance(t), fmt("A%zu", j));
  run.check("finite", all_finite(ca) && all_finite(cl), "covariance curves finite");
  run.diagnostic("max_abs_dev_tridiagonal", dev, "max_t |Cov a_j - 2 exp(-(2j-1)t)|");
  run.diagnostic("max_dev_limit_se", dev_lim, "max_t |Cov A_j - theory| / SE");
  return run.finish();
}

int bhat_compare_cmd(const Options& o) {
  Run run("bhat-compare", o);
  const std::size_t n = first(o.n), j = first(o.j);
  require_entry_range(n, j);
  const auto grid = run.grid();
  const auto st = simulate_entries(n, o.beta, j, grid, o.samples, o.seed, run.par());
  const auto bh = simulate_bhat(n, j, o.beta, grid, o.samples, o.seed, run.par());
  const auto t = st.times();
  const auto& b = st.b[j - 1];
  double worst = 0.0;
  const Curve pairs[3][2] = {{b.mean(t), bh.bhat.mean(t)}, {b.variance(t), bh.bhat.variance(t)},
                             {b.covariance(t), bh.bhat.covariance(t)}};
  const char* tags[3] = {"mean", "var", "cov"};
  for (int q = 0; q < 3; ++q) {
    const auto& x = pairs[q][0];
    const auto& y = pairs[q][1];
    run.curve(tags[q], x, fmt("b%zu", j));
    run.curve(tags[q], y, fmt("bhat%zu", j));
    for (std::size_t i = 0; i < t.size(); ++i)
      worst = std::max(worst, std::abs(x.value[i] - y.value[i]) / std::hypot(x.se[i], y.se[i]));
  }
  run.check("exclusions_counted", bh.excluded + bh.bhat.count() == o.samples,
            fmt("%zu of %zu b_hat paths excluded for a non-positive radicand", bh.excluded, o.samples));
  run.diagnostic("max_gap_se", worst, "max over t and mean/var/cov of |b - b_hat| / SE");
  return run.finish();
}

int kurtosis_cmd(const Options& o) {
  Run run("kurtosis", o);
  const auto curves = kurtosis_sum_experiment(o.n, o.j, run.grid(), o.samples, o.seed, run.par());
  bool finite = true;
  for (const auto& c : curves) {
    Curve out{"", c.t, c.value, {}};
    for (std::size_t i = 0; i < c.t.size(); ++i) out.se.push_back(c.se(i));
    finite = finite && all_finite(out);
    run.curve("excess_kurtosis", out, fmt("n%zu.j%zu", c.n, c.j));
    double peak = 0.0;
    for (std::size_t i = 0; i < c.t.size(); ++i) peak = std::max(peak, std::abs(c.value[i]) / c.se(i));
    run.diagnostic(fmt("n%zu.j%zu.max_abs_kurtosis_se", c.n, c.j), peak, "max_t |G2| / SE");
  }
  run.check("finite", finite, "kurtosis curves finite");
  return run.finish();
}

int eigen_cov_cmd(const Options& o) {
  Run run("eigen-cov", o);
  const std::size_t n = first(o.n);
  const auto st = eigen_cov_experiment(n, o.beta, o.k, run.grid(), o.samples, o.seed, run.par());
  const auto t = st.times();
  const auto full = st.full.covariance(t);
  run.curve("cov", full, "full");
  bool ok = all_finite(full);
  for (std::size_t q = 0; q < o.k.size(); ++q) {
    const auto lim = st.limit[q].covariance(t);
    const auto tri = st.tridiag[q].covariance(t);
    ok = ok && all_finite(lim) && all_finite(tri);
    run.curve("cov", lim, fmt("limit.k%zu", o.k[q]));
    run.curve("cov", tri, fmt("tridiag.k%zu", o.k[q]));
    run.diagnostic(fmt("k%zu.gap_limit_tridiag", o.k[q]), integrated_gap(t, lim.value, tri.value),
                   "integral of |limit - tridiag|");
    run.diagnostic(fmt("k%zu.gap_limit_full", o.k[q]), integrated_gap(t, lim.value, full.value),
                   "integral of |limit - full|");
    run.diagnostic(fmt("k%zu.excluded", o.k[q]), static_cast<double>(st.excluded[q]), "limit paths dropped");
  }
  run.check("finite", ok, "covariance curves finite");
  return run.finish();
}

int moment_check_cmd(const Options& o) {
  Run run("moment-check", o);
  const std::size_t n = first(o.n), jmax = first(o.k);
  const auto mc = moment_check(n, jmax, o.lag, o.samples, o.seed, run.par());
  bool oracle_ok = true;
  double worst = 0.0;
  for (const auto& e : mc.entries) {
    const double want = e.j == e.k ? std::exp(-static_cast<double>(e.k) * o.lag) : 0.0;
    oracle_ok = oracle_ok && std::abs(e.oracle - want) < 1e-12;
    run.curve("trace", {"", {o.lag}, {e.value}, {e.se}}, fmt("P%zuP%zu", e.j, e.k));
    run.curve("trace", {"", {o.lag}, {e.oracle}, {0.0}}, fmt("oracle.P%zuP%zu", e.j, e.k));
    worst = std::max(worst, std::abs(e.value - e.oracle) / (3.0 * e.se + 5.0 / static_cast<double>(n)));
  }
  run.check("oracle_kronecker", oracle_ok, "semicircular oracle equals delta_jk exp(-k lag)");
  run.diagnostic("max_scaled_gap", worst, "max |MC - oracle| / (3 SE + 5/n); <= 1 expected");
  return run.finish();
}

int approx_error_cmd(const Options& o) {
  Run run("approx-error", o);
  const std::size_t k = first(o.k);
  const auto rows = approx_error_study(o.n, k, run.grid(), o.samples, o.seed, run.par());
  bool exact = true;
  for (const auto& r : rows)
    for (double v : r.a_sup[0]) exact = exact && v == 0.0;
  for (std::size_t j = 1; j <= k; ++j) {
    Curve a{"", {}, {}, {}}, b{"", {}, {}, {}};
    for (const auto& r : rows) {
      a.t.push_back(static_cast<double>(r.n));
      a.value.push_back(r.median_a(j));
      a.se.push_back(0.0);
      b.t.push_back(static_cast<double>(r.n));
      b.value.push_back(r.median_b(j));
      b.se.push_back(0.0);
    }
    run.curve("median_sup", a, fmt("a%zu", j));
    run.curve("median_sup", b, fmt("b%zu", j));
    for (std::size_t i = 0; j > 1 && i + 1 < rows.size(); ++i)
      run.diagnostic(fmt("a%zu.ratio.%zu_%zu", j, rows[i].n, rows[i + 1].n), a.value[i + 1] / a.value[i],
                     "median sup error ratio");
  }
  run.check("first_entry_exact", exact, "a~_1 = a_1 for every sample, time and n");
  return run.finish();
}

int verify_combinatorics_cmd(const Options& o) {
  Run run("verify-combinatorics", o);
  for (std::size_t m = 0; m <= 8; ++m) {
    const auto c = enumerate_nc2(2 * m).size();
    run.check(fmt("nc2_catalan_%zu", m), c == catalan(m), fmt("|NC2[%zu]| = %zu", 2 * m, c));
  }
  for (std::size_t s = 0; s <= 12; s += 2) {
    std::vector<int> ground(s);
    for (std::size_t i = 0; i < s; ++i) ground[i] = static_cast<int>(i);
    const auto c = enumerate_p2(ground).size();
    run.check(fmt("p2_count_%zu", s), c == double_factorial(static_cast<std::int64_t>(s) - 1),
              fmt("|P2(%zu)| = %zu", s, c));
  }
  for (int j = 1; j <= 6; ++j) {
    std::vector<PermutationCycles> seen;
    std::vector<std::uint64_t> fiber;
    for (const auto& pi : enumerate_slot_pairings(j)) {
      const auto sigma = perm_from_pairing(pi);
      const auto it = std::find(seen.begin(), seen.end(), sigma);
      if (it == seen.end()) {
        seen.push_back(sigma);
        fiber.push_back(1);
      } else {
        ++fiber[static_cast<std::size_t>(it - seen.begin())];
      }
    }
    std::uint64_t total = 0;
    bool fibers = true;
    for (std::size_t i = 0; i < seen.size(); ++i) {
      total += perm_multiplicity(seen[i]);
      fibers = fibers && fiber[i] == perm_multiplicity(seen[i]);
    }
    std::uint64_t perms = 1;
    for (int i = 2; i <= j; ++i) perms *= static_cast<std::uint64_t>(i);
    run.check(fmt("perm_fibers_%d", j), fibers && seen.size() == perms,
              fmt("%zu permutations reached, each fiber of size 2^(sum(|c|-1))", seen.size()));
    run.check(fmt("perm_multiplicity_sum_%d", j), total == double_factorial(2 * j - 1),
              fmt("sum = %llu", static_cast<unsigned long long>(total)));
  }
  auto slots = [](std::vector<std::pair<Slot, Slot>> p) {
    SlotPairing s{std::move(p)};
    s.normalize();
    return s;
  };
  const auto e1 = perm_from_pairing(slots({{{1, 1}, {1, 3}}, {{2, 3}, {2, 2}}, {{1, 2}, {1, 4}}, {{2, 4}, {2, 1}}})).str();
  const auto e2 = perm_from_pairing(slots({{{1, 1}, {1, 2}}, {{2, 2}, {2, 1}}, {{1, 3}, {1, 4}}, {{2, 4}, {2, 3}}})).str();
  run.check("perm_example_1", e1 == "(1 3 2 4)", e1);
  run.check("perm_example_2", e2 == "(1 2)(3 4)", e2);
  for (std::size_t j = 0; j <= 4; ++j)
    for (std::size_t k = 0; k <= 4; ++k) {
      const double got = semicircular_cov_p(j, k, 0.0, 0.0);
      run.check(fmt("semicircular_cov_%zu_%zu", j, k), got == (j == k ? 1.0 : 0.0), fmt("%.17g", got));
    }
  return run.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tridiagonalized GbE process experiments"};
  app.require_subcommand(1);

  struct Command {
    const char* name;
    const char* help;
    int (*fn)(const Options&);
    Options defaults;
  };
  // Defaults: n, j, k, samples, t_max, dt.
  auto def = [](std::vector<std::size_t> n, std::vector<std::size_t> j, std::vector<std::size_t> k,
                std::size_t samples, double dt) {
    Options o;
    o.n = std::move(n);
    o.j = std::move(j);
    o.k = std::move(k);
    o.samples = samples;
    o.dt = dt;
    return o;
  };
  std::vector<Command> commands{
      {"simulate-entries", "mean, variance and covariance curves of a_j, b_j", simulate_entries_cmd,
       def({400}, {5}, {5}, 1000, 1e-3)},
      {"compare-limit", "Cov(a_j(0), a_j(t)) against the limit process A_j", compare_limit_cmd,
       def({400}, {5}, {5}, 1000, 1e-3)},
      {"bhat-compare", "b_j against b_hat_j built from B_j", bhat_compare_cmd, def({2000}, {25}, {1}, 1000, 1e-2)},
      {"kurtosis", "excess kurtosis of a_j(0) + a_j(t)", kurtosis_cmd, def({5, 40, 320}, {1, 3}, {1}, 10000, 0.05)},
      {"eigen-cov", "largest-eigenvalue covariance curves", eigen_cov_cmd, def({400}, {1}, {10, 30}, 1000, 0.05)},
      {"moment-check", "(1/n) Tr P_j P_k across two times vs the semicircular oracle", moment_check_cmd,
       def({300}, {1}, {4}, 2000, 1e-3)},
      {"approx-error", "sup-grid error of the approximate entries", approx_error_cmd,
       def({250, 1000, 4000}, {1}, {3}, 200, 0.1)},
      {"verify-combinatorics", "exact pair-partition and Perm checks", verify_combinatorics_cmd,
       def({1}, {1}, {1}, 2, 1e-3)},
  };

  std::vector<CLI::App*> subs;
  for (auto& c : commands) {
    Options& o = c.defaults;
    CLI::App* sub = app.add_subcommand(c.name, c.help);
    sub->add_option("--n", o.n, "matrix size (comma list where several are used)")->delimiter(',')->capture_default_str();
    sub->add_option("--beta", o.beta, "1 (GOE), 2 (GUE) or 4 (GSE)")->check(CLI::IsMember({1, 2, 4}))->capture_default_str();
    sub->add_option("--j", o.j, "entry index (comma list for kurtosis)")->delimiter(',')->capture_default_str();
    sub->add_option("--k", o.k, "entry count, corner sizes or top polynomial degree")->delimiter(',')->capture_default_str();
    sub->add_option("--samples", o.samples, "number of sample paths")->capture_default_str();
    sub->add_option("--t-max", o.t_max, "end of the time grid")->capture_default_str();
    sub->add_option("--dt", o.dt, "time step")->capture_default_str();
    sub->add_option("--seed", o.seed, "master seed")->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads (overrides DBM_THREADS)");
    sub->add_option("--out", o.out, "output directory")->capture_default_str();
    sub->add_flag("--sequential", o.sequential, "run on one thread");
    if (c.fn == moment_check_cmd) sub->add_option("--lag", o.lag, "time separation of the two frames")->capture_default_str();
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    for (std::size_t i = 0; i < subs.size(); ++i) {
      if (!subs[i]->parsed()) continue;
      const Options& o = commands[i].defaults;
      detail::require(!o.n.empty() && !o.j.empty() && !o.k.empty(), "--n, --j and --k need at least one value");
      return commands[i].fn(o);
    }
    return 2;
  } catch (const ParameterError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const InsufficientData& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
