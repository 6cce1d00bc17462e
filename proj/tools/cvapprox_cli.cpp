#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cvapprox/audit.hpp"
#include "cvapprox/error.hpp"
#include "cvapprox/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cvapprox;

namespace {

enum Exit { ok = 0, uncertified = 1, usage = 2, numeric = 3, criterion = 4 };

struct RunConfig {
  std::string scenario;
  std::string out = ".";
  std::vector<double> eps;
  int j = -1;
  int l = -1;
  std::string alpha;
  int grid = 0;
  std::uint64_t seed = 0;
  int refine = 2;
};

int exit_for(ErrorKind k) {
  switch (k) {
    case ErrorKind::parse:
    case ErrorKind::index:
    case ErrorKind::precondition: return usage;
    case ErrorKind::quadrature_convergence:
    case ErrorKind::domain:
    case ErrorKind::order:
    case ErrorKind::resolution:
    case ErrorKind::cover_defect: return numeric;
    case ErrorKind::criterion_failure:
    case ErrorKind::geometry:
    case ErrorKind::convergence_failure: return criterion;
  }
  return numeric;
}

// "sup", "subset:0,2", "weighted:1,0.5"
SeminormIndex alpha_from_flag(const std::string& s) {
  if (s == "sup") return SeminormIndex::sup();
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw Error(ErrorKind::parse, "unknown seminorm '" + s + "'");
  const std::string kind = s.substr(0, colon);
  std::stringstream in(s.substr(colon + 1));
  std::string item;
  std::vector<double> vals;
  while (std::getline(in, item, ',')) {
    try {
      vals.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw Error(ErrorKind::parse, "bad seminorm entry '" + item + "'");
    }
  }
  if (kind == "subset") {
    std::vector<std::size_t> c;
    for (double v : vals) c.push_back(static_cast<std::size_t>(v));
    return SeminormIndex::subset(std::move(c)).named(s);
  }
  if (kind == "weighted") return SeminormIndex::weighted(std::move(vals)).named(s);
  throw Error(ErrorKind::parse, "unknown seminorm '" + s + "'");
}

struct Loaded {
  Scenario scn;
  WeightIndex idx;
  SeminormIndex alpha;
  std::vector<double> eps;
};

Loaded load(const RunConfig& cfg) {
  Loaded L{load_scenario(cfg.scenario), {}, SeminormIndex::sup(), {}};
  if (cfg.grid > 0) L.scn = with_grid(L.scn, cfg.grid);
  L.idx = L.scn.index;
  if (cfg.j >= 0) L.idx.j = cfg.j;
  if (cfg.l >= 0) L.idx.l = cfg.l;
  L.alpha = cfg.alpha.empty() ? L.scn.alpha : alpha_from_flag(cfg.alpha);
  L.eps = cfg.eps.empty() ? L.scn.eps : cfg.eps;
  for (double e : L.eps) {
    if (!(e > 0.0)) throw Error(ErrorKind::parse, "eps entries must be positive");
  }
  L.scn.family.check_index(L.idx);
  return L;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream o(p);
  if (!o) throw Error(ErrorKind::parse, "cannot write " + p.string());
  o << text;
}

std::string tag(double eps) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", eps);
  return buf;
}

int cmd_check_weights(const RunConfig& cfg) {
  const Loaded L = load(cfg);
  const WeightAudit a = audit_weights(L.scn, cfg.seed);
  fs::create_directories(cfg.out);
  write(fs::path(cfg.out) / (L.scn.name + "_weights.json"), a.report.dump(2) + "\n");
  std::cout << L.scn.name << ": weight audit " << (a.pass ? "pass" : "FAIL") << "\n";
  if (!a.pass) {
    for (const auto& p : a.report["directed"]["pairs"]) {
      if (!p["ok"].get<bool>()) {
        std::cout << "  not directed: " << p["a"].dump() << " vs " << p["b"].dump() << " at " << p["witness"].dump()
                  << "\n";
      }
    }
    for (const auto& c : a.report["vanishing_ratio"]) {
      if (!c["pass"].get<bool>()) std::cout << "  vanishing ratio claim failed: " << c.dump() << "\n";
    }
  }
  return a.pass ? ok : criterion;
}

json factor_dump(const ApproximationResult& run, std::size_t cap) {
  const auto& res = run.result;
  json j{{"terms", res.terms()}, {"value_dim", res.value_dim()}, {"order", res.order()}};
  json vecs = json::array();
  for (std::size_t i = 0; i < res.terms(); ++i) vecs.push_back(res.vector(i));
  j["vectors"] = vecs;
  json samples = json::array();
  std::size_t count = 0;
  bool truncated = false;
  if (res.bank() && !run.ledger.stage2.K2.empty()) {
    const PointSet& pts = run.ledger.stage2.K2.grid();
    SparseBlock sb;
    for (std::size_t p = 0; p < pts.size() && !truncated; ++p) {
      res.bank()->nonzero(0, pts[p], sb);
      for (std::size_t t = 0; t < sb.size(); ++t) {
        if (count >= cap) {
          truncated = true;
          break;
        }
        samples.push_back({sb.index[t], std::vector<double>(pts[p].begin(), pts[p].end()), sb.values[t]});
        ++count;
      }
    }
  }
  j["samples"] = samples;  // [factor, x, value]
  j["truncated"] = truncated;
  return j;
}

int cmd_approximate(const RunConfig& cfg) {
  const Loaded L = load(cfg);
  const SampledFunction f = L.scn.make_function();
  fs::create_directories(cfg.out);
  int status = ok;
  for (double eps : L.eps) {
    const ApproximationResult run = approximate(f, L.scn, L.idx, L.alpha, eps);
    const VerificationReport v = verify_ledger(run, f, L.scn, cfg.refine);
    json ledger = to_json(run.ledger);
    ledger["verification"] = to_json(v);
    ledger["seed"] = cfg.seed;
    const std::string stem = L.scn.name + "_eps" + tag(eps);
    write(fs::path(cfg.out) / (stem + "_ledger.json"), ledger.dump(2) + "\n");
    write(fs::path(cfg.out) / (stem + "_ledger.csv"), to_csv(run.ledger));
    write(fs::path(cfg.out) / (stem + "_factors.json"), factor_dump(run, 2'000'000).dump() + "\n");
    std::cout << L.scn.name << " eps=" << eps << ": " << (run.ledger.certified ? "certified" : "uncertified")
              << " rank=" << run.result.rank() << " N2=" << run.ledger.stage2.N2
              << " total=" << run.ledger.total_measured;
    if (!run.ledger.certified) std::cout << " missed=" << run.ledger.failed_stage;
    std::cout << "\n";
    if (!run.ledger.certified) status = uncertified;
  }
  return status;
}

int cmd_convergence(const RunConfig& cfg) {
  const Loaded L = load(cfg);
  const SampledFunction f = L.scn.make_function();
  fs::create_directories(cfg.out);
  const double eps0 = L.eps.front();
  const CutoffResult cr = apply_cutoff(f, L.scn.family, L.idx, L.alpha, eps0, L.scn.delta_for(L.idx.j),
                                       L.scn.search_region(), L.scn.quad);
  std::ostringstream reg;
  reg.precision(17);
  reg << "n,seminorm\n";
  for (int n = 2; n <= L.scn.n_max; n *= 2) {
    const SampledFunction fr = regularize(cr.f_tilde, n, L.scn.quad, L.idx.l);
    const double v = weighted_seminorm(linear_combination(1.0, cr.f_tilde, -1.0, fr), L.scn.family, L.idx, L.alpha).value;
    reg << n << ',' << v << '\n';
  }
  write(fs::path(cfg.out) / (L.scn.name + "_regularization.csv"), reg.str());
  std::ostringstream rk;
  rk.precision(17);
  rk << "eps,rank,measured\n";
  for (double e : L.eps) {
    const LocalizationResult loc = finite_rank_c0_approx(cr.f_tilde, L.scn.family, L.idx.j, L.alpha, e);
    rk << e << ',' << loc.report.rank << ',' << loc.report.measured_error << '\n';
  }
  write(fs::path(cfg.out) / (L.scn.name + "_rank.csv"), rk.str());
  std::cout << L.scn.name << ": convergence data written to " << cfg.out << "\n";
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certified finite-rank approximation in weighted spaces of differentiable functions"};
  app.require_subcommand(1);
  RunConfig cfg;
  auto common = [&cfg](CLI::App* sub) {
    sub->add_option("--scenario", cfg.scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", cfg.out, "output directory");
    sub->add_option("--eps", cfg.eps, "comma separated eps list")->delimiter(',');
    sub->add_option("--j", cfg.j, "weight index j");
    sub->add_option("--l", cfg.l, "derivative order l");
    sub->add_option("--alpha", cfg.alpha, "seminorm: sup | subset:i,j | weighted:w1,w2");
    sub->add_option("--grid", cfg.grid, "grid points per unit length");
    sub->add_option("--seed", cfg.seed, "seed for randomized checks");
    sub->add_option("--refine", cfg.refine, "grid refinement for ledger verification");
  };
  auto* cw = app.add_subcommand("check-weights", "audit the weight family");
  auto* ap = app.add_subcommand("approximate", "run the certified pipeline");
  auto* cv = app.add_subcommand("convergence", "regularization and rank curves");
  common(cw);
  common(ap);
  common(cv);
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? ok : usage;
  }
  try {
    if (*cw) return cmd_check_weights(cfg);
    if (*ap) return cmd_approximate(cfg);
    if (*cv) return cmd_convergence(cfg);
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what();
    if (e.achieved()) std::cerr << " [achieved " << *e.achieved() << "]";
    std::cerr << "\n";
    return exit_for(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return numeric;
  }
  return usage;
}
