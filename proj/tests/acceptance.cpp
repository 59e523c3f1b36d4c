// Acceptance run: one PASS/FAIL line per criterion. Exit status is non-zero when any criterion fails.
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlab/harness.hpp"
#include "mlab/operators.hpp"
#include "mlab/weights.hpp"

namespace fs = std::filesystem;
using namespace mlab;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("criterion %2d: %s  %s\n", id, ok ? "PASS" : "FAIL", what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int sweep(const fs::path& config, const fs::path& out, int threads) {
  const std::string cmd = "MLAB_THREADS=" + std::to_string(threads) + " " + MLAB_BINARY + " sweep --config " +
                          config.string() + " --out " + out.string() + " > " + (out.string() + ".log") + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

double interior_rel_l2(const GridFunction& a, const GridFunction& b) {
  const Grid& g = a.grid();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::abs(g.point(i)[0]) > 0.5 * g.half_width()) continue;
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

}  // namespace

int main() {
  const CheckConfig defaults;

  {  // 1
    const auto t0 = std::chrono::steady_clock::now();
    const Grid g(1, 8.0, 1024);
    const GridFunction f = make_function("gauss:0.5", g);
    double worst = 0;
    for (double a : {0.25, 0.5})
      worst = std::max(worst, interior_rel_l2(generalized_fractional(SemigroupSpec::heat(1), f, a),
                                              riesz_potential(f, a)));
    const double s = seconds_since(t0);
    report(1, worst <= 1e-3 && s <= 60,
           "semigroup fractional integral vs Riesz potential: interior rel-L2 " + fmt("%.3g", worst) + " (<= 1e-3), " +
               fmt("%.1f", s) + " s (<= 60 s)");
  }
  {  // 2
    const Grid g(1, 4.0, 1024);
    const GridFunction u = riesz_potential(make_function("chi:1", g), 0.5);
    const double v = u[g.flat_index(g.nearest_index(0.0))];
    const double exact = 4 / std::sqrt(2 * std::numbers::pi);
    report(2, std::abs(v / exact - 1) <= 0.01,
           "I_{1/2} chi_[-1,1](0) = " + fmt("%.6f", v) + " vs " + fmt("%.6f", exact) + " (1%)");
  }
  {  // 3
    const Grid g(1, 8.0, 1024);
    BallPolicy pol;
    pol.origin_only = true;
    const double a2 = ap_characteristic(WeightSpec::power(-0.5).sample(g), 2.0, build_ball_family(g, pol)).value;
    report(3, std::abs(a2 / (4.0 / 3) - 1) <= 0.02, "[|x|^{-1/2}]_{A_2} on origin balls = " + fmt("%.5f", a2) + " (4/3 +- 2%)");
  }
  {  // 4
    const CriticalIndexOptions opt{defaults.r_max, DivergenceOptions{defaults.growth_factor}};
    const CriticalIndex a = critical_index_estimate(WeightSpec::power(-0.5), defaults.domain, defaults.policy,
                                                    defaults.resolutions, defaults.rh_tol, opt);
    const CriticalIndex b = critical_index_estimate(WeightSpec::power(-0.75), defaults.domain, defaults.policy,
                                                    defaults.resolutions, defaults.rh_tol, opt);
    const bool ok = !a.capped && !b.capped && std::abs(a.value - 2.0) <= 0.1 && std::abs(b.value - 4.0 / 3) <= 0.1;
    report(4, ok, "critical index: |x|^{-1/2} -> " + fmt("%.4f", a.value) + " (2 +- 0.1), |x|^{-3/4} -> " +
                      fmt("%.4f", b.value) + " (4/3 +- 0.1)");
  }

  // Criteria 5 to 13 read the registry sweep; the second sweep only differs in thread count.
  const fs::path dir = fs::temp_directory_path() / ("mlab-acceptance-" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  const fs::path config = dir / "sweep.ini";
  std::ofstream(config) << "[grid]\ndim = 1\nR = 8\nresolutions = 512, 1024\n";
  const int code1 = sweep(config, dir / "t1", 1);
  const int code4 = sweep(config, dir / "t4", 4);
  if (code1 < 0 || code1 > 1 || !fs::exists(dir / "t1" / "report.json")) {
    std::printf("sweep failed with exit code %d; see %s\n", code1, (dir / "t1.log").c_str());
    return 2;
  }
  const auto rep = nlohmann::json::parse(slurp(dir / "t1" / "report.json"));
  std::map<std::string, nlohmann::json> checks;
  for (const auto& c : rep["checks"]) checks[c["id"]] = c;
  std::map<std::string, double> seconds;
  {
    std::ifstream csv(dir / "t1" / "summary.csv");
    std::string line;
    std::getline(csv, line);
    while (std::getline(csv, line)) {
      const auto c = line.rfind(',');
      seconds[line.substr(0, line.find(','))] = std::stod(line.substr(c + 1));
    }
  }
  auto verdict = [&](const std::string& id) { return checks.at(id)["verdict"].get<std::string>(); };
  auto finest = [&](const std::string& id) { return checks.at(id)["resolutions"].back(); };

  report(5, verdict("CHK-L7") == "PASS",
         "A_p factorization agreement: " + fmt("%.0f", finest("CHK-L7")["violations"].get<double>()) +
             " disagreements over " + fmt("%.0f", finest("CHK-L7")["cases"].get<double>()) + " rows");
  report(6, verdict("CHK-SIGMA") == "PASS",
         "subset expansion max relative deviation " + fmt("%.3g", finest("CHK-SIGMA")["max_ratio"].get<double>()) +
             " (<= 1e-10)");
  report(7, verdict("CHK-TRIV-COMM") == "PASS",
         "constant-symbol commutator max |output| " +
             fmt("%.3g", finest("CHK-TRIV-COMM")["max_ratio"].get<double>()) + " (<= 1e-12), m = 1, 2, 3");
  report(8, verdict("CHK-KOLM") == "PASS" && finest("CHK-KOLM")["violations"] == 0,
         "Kolmogorov sandwich over " + fmt("%.0f", finest("CHK-KOLM")["cases"].get<double>()) +
             " random functions: " + fmt("%.0f", finest("CHK-KOLM")["violations"].get<double>()) + " violations");
  {
    const auto& t = checks.at("CHK-L14")["trends"];
    report(9, verdict("CHK-L14") == "PASS",
           "difference-kernel sup under node doubling: trend " + fmt("%.4f", t.empty() ? NAN : t[0].get<double>()) +
               " (<= 1.1)");
  }
  {
    bool ok = true;
    std::string detail;
    for (const char* id : {"CHK-L15", "CHK-L16", "CHK-THM1", "CHK-L9", "CHK-L10", "CHK-L11", "CHK-L12",
                           "CHK-CHAIN", "CHK-WEAK", "CHK-EQUIV"}) {
      const auto& c = checks.at(id);
      const double trend = c["trends"].empty() ? NAN : c["trends"][0].get<double>();
      const bool pass = verdict(id) == "PASS" && seconds[id] <= 600;
      ok = ok && pass;
      std::printf("    %-10s C = %.4g -> %.4g, trend %.4f, %.1f s  %s\n", id,
                  c["resolutions"][0]["max_ratio"].get<double>(), c["resolutions"][1]["max_ratio"].get<double>(),
                  trend, seconds[id], pass ? "ok" : verdict(id).c_str());
    }
    report(10, ok, "refinement-stable constants (trend <= 1.2, <= 600 s each) for the Morrey-bound checks");
  }
  {
    const auto& neg = checks.at("CHK-NEG-A1");
    const double trend = neg["trends"].empty() ? NAN : neg["trends"][0].get<double>();
    const bool gated = verdict("CHK-NEG-THM1") == "hypothesis-gated";
    report(11, trend > 1.5 && verdict("CHK-NEG-A1") == "FAIL" && gated,
           "w = |x|^{+1}: A_1 characteristic trend " + fmt("%.3f", trend) + " (> 1.5), main theorem " +
               verdict("CHK-NEG-THM1"));
  }
  {
    const bool same = code4 == code1 && slurp(dir / "t1" / "report.json") == slurp(dir / "t4" / "report.json");
    report(12, same, "sweep report.json byte-identical for MLAB_THREADS = 1 and 4");
  }
  {
    const auto& res = checks.at("CHK-MAXPT")["resolutions"];
    bool ok = verdict("CHK-MAXPT") == "PASS";
    std::size_t violations = 0;
    for (const auto& r : res)
      if (r["N"] == 1024) violations = r["violations"].get<std::size_t>(), ok = ok && violations == 0;
    report(13, ok, "M f >= |f| at N = 1024: " + std::to_string(violations) + " violations");
  }

  fs::remove_all(dir);
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
