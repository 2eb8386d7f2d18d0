#include "jetforge/cli.hpp"
#include "jetforge/error.hpp"
#include "jetforge/record.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

constexpr int kExitPass = 0;
constexpr int kExitAuditFailure = 1;
constexpr int kExitConfigError = 2;

}  // namespace

int main(int argc, char** argv) {
  using namespace jetforge;
  CLI::App app{"jetforge: exact jet counts, pushforward densities and slice audits for the characteristic polynomial map"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kEngineVersion));

  RunConfig cfg;
  std::string format = "json";
  std::optional<int> threads;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--ell", cfg.ell, "residue characteristic (prime)");
    sub->add_option("--k", cfg.k, "extension degree, q = ell^k");
    sub->add_option("--format", format, "json, csv or table")->check(CLI::IsMember({"json", "csv", "table"}));
    sub->add_option("--output,-o", cfg.output, "write the artifact here instead of stdout");
    sub->add_option("--threads", threads, "worker threads (default JETFORGE_THREADS or all cores)");
  };

  auto* count = app.add_subcommand("count", "exact jet-scheme point count");
  common(count);
  count->add_option("--n", cfg.n, "matrix size");
  count->add_option("--m", cfg.m, "jet order: entries in F_q[t]/(t^{m+1})");
  count->add_option("--target", cfg.target, "nilcone, fiber, gisum or fiber_table");
  count->add_option("--x", cfg.x, "fiber point c_1,...,c_n (series syntax, e.g. 1+t,0)");
  count->add_option("--i", cfg.power, "gisum exponent");
  count->add_option("--shards", cfg.shards, "split the base layer into this many shards");
  count->add_option("--checkpoint", cfg.checkpoint, "JSON-lines journal for resume");

  auto* fit = app.add_subcommand("fit-dim", "dimension fit over stored count records");
  common(fit);
  fit->add_option("--input,-i", cfg.inputs, "JSON-lines record files")->required();
  fit->add_option("--c-bound", cfg.c_bound, "fail unless every C_m is at most this");

  auto* density = app.add_subcommand("density", "pushforward density profile at resolution M");
  common(density);
  density->add_option("--n", cfg.n, "matrix size");
  density->add_option("--M", cfg.resolution, "resolution (boxes x + t^M O^n)");
  density->add_option("--norms", cfg.norms, "L^t exponents to report, e.g. 1,2")->delimiter(',');

  auto* anfrs = app.add_subcommand("anfrs", "ellipsoid mass ratio over the origin");
  common(anfrs);
  anfrs->add_option("--n", cfg.n, "matrix size");
  anfrs->add_option("--a", cfg.a, "ellipsoid scale");
  anfrs->add_option("--level", cfg.level, "source truncation level (default a*n)");

  auto* slice = app.add_subcommand("slice-audit", "slice bases, weights and audits");
  common(slice);
  slice->add_option("--n", cfg.n, "matrix size");
  slice->add_option("--partition", cfg.partition, "e.g. 2,1 (default: every partition of n)");
  slice->add_option("--samples", cfg.samples, "samples when a sweep is too large");
  slice->add_option("--seed", cfg.seed, "sampler seed");

  auto* subreg = app.add_subcommand("subreg", "subregular slice density, two independent paths");
  common(subreg);
  subreg->add_option("--n", cfg.n, "matrix size, at least 3");
  subreg->add_option("--M", cfg.resolution, "resolution");
  subreg->add_option("--samples", cfg.samples, "samples for the level-1 identity check when not exhaustive");
  subreg->add_option("--seed", cfg.seed, "sampler seed");

  auto* insep = app.add_subcommand("insep-probe", "density trace toward z^2 + t in characteristic 2 (exploratory)");
  common(insep);
  insep->add_option("--limit,--M", cfg.resolution, "largest resolution");

  auto* hist = app.add_subcommand("hist-mult", "valuation histogram of x*y");
  common(hist);
  hist->add_option("--M", cfg.resolution, "truncation level");

  auto* val = app.add_subcommand("val-int", "truncated valuation integral of a polynomial");
  common(val);
  val->add_option("--M", cfg.resolution, "largest truncation level");
  val->add_option("--poly", cfg.poly, "e.g. z^3+z+1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitPass : kExitConfigError;
  }

  try {
    cfg.subcommand = app.get_subcommands().front()->get_name();
    if (cfg.subcommand == "insep-probe") cfg.n = 2;
    cfg.format = parse_format(format);
    cfg.threads = threads ? *threads : default_threads();
    const auto report = run(cfg);
    if (cfg.output) {
      write_text_atomic(*cfg.output, report.artifact);
      for (const auto& v : report.verdicts) std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "\n";
      std::cout << "wrote " << cfg.output->string() << "\n";
    } else {
      std::cout << report.artifact;
    }
    if (report.exploratory) return kExitPass;
    return report.passed() ? kExitPass : kExitAuditFailure;
  } catch (const Error& e) {
    std::cerr << "jetforge: " << e.what() << "\n";
    return kExitConfigError;
  }
}
