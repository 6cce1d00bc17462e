#include "cvapprox/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cvapprox/error.hpp"

namespace cvapprox {

namespace {

double max_over(const PointSet& pts, const std::function<double(std::span<const double>)>& fn) {
  double v = 0.0;
  for (std::size_t p = 0; p < pts.size(); ++p) v = std::max(v, fn(pts[p]));
  return v;
}

Region on_grid(const Region& dom, const Region& r) {
  if (r.empty()) return r;
  return Region::on_lattice(r.boxes(), {dom.origin().begin(), dom.origin().end()},
                            {dom.step().begin(), dom.step().end()});
}

Region box_on_grid(const Region& dom, Box b) {
  return Region::on_lattice({std::move(b)}, {dom.origin().begin(), dom.origin().end()},
                            {dom.step().begin(), dom.step().end()});
}

int domain_fit_scale(const Region& dom, const Region& V) {
  constexpr int kMaxScale = 1 << 20;
  for (int n = 1; n <= kMaxScale; n = n < 64 ? n + 1 : n * 2) {
    if (dom.contains(V.inflated(1.0 / n))) return n;
  }
  throw Error(ErrorKind::geometry, "neighbourhood of the cut-off support does not fit in the domain");
}

}  // namespace

ApproximationResult approximate(const SampledFunction& f, const Scenario& scn, const WeightIndex& idx,
                                const SeminormIndex& alpha, double eps) {
  if (!(eps > 0.0)) throw Error(ErrorKind::precondition, "eps must be positive");
  if (idx.l > f.order()) throw Error(ErrorKind::order, "seminorm order exceeds function order");
  const WeightFamily& fam = scn.family;
  fam.check_index(idx);
  alpha.check_dim(f.value_dim());
  const Region& dom = f.domain();
  const std::size_t d = f.dim();
  const std::size_t m = f.value_dim();
  const double budget = eps / 3.0;
  const int md = std::clamp(std::max(f.order(), idx.l), 0, Mollifier::kMaxDeriv);

  ErrorLedger L;
  L.scenario = scn.name;
  L.eps = eps;
  L.idx = idx;
  L.alpha = alpha.name();
  L.budget = budget;
  L.quad = scn.quad;
  L.note = "values live in R^m, so the completion of E is not needed";

  // stage 1: cut-off
  const double delta = scn.delta_for(idx.j);
  CutoffResult cr = apply_cutoff(f, fam, idx, alpha, budget, delta, scn.search_region(), scn.quad);
  L.stage1.K = cr.report.tail.K;
  L.stage1.delta = delta;
  L.stage1.C_l_delta = cr.report.C_l_delta;
  L.stage1.tail = cr.report.tail.tail.value;
  L.stage1.target = cr.report.target;
  L.stage1.bound = cr.report.bound;
  L.stage1.measured = cr.report.measured;
  L.stage1.iterations = cr.report.iterations;
  const SampledFunction& ft = cr.f_tilde;
  L.stage1.support = *ft.declared_support();

  // stage 2: regularization scale
  try {
    const RegularizationOrder ro = find_regularization_order(ft, fam, idx, alpha, budget, scn.n_max, scn.quad);
    L.stage2.N0 = ro.n;
    L.stage2.N0_found = true;
    L.stage2.history = ro.history;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::convergence_failure) throw;
    L.stage2.N0 = scn.n_max;
    L.stage2.N0_found = false;
  }
  const Region V = on_grid(dom, L.stage1.support.inflated(dom.max_step()));
  L.stage2.V = V;
  L.stage2.N1 = domain_fit_scale(dom, V);
  L.stage2.N2 = std::max(L.stage2.N0, L.stage2.N1);
  const int N2 = L.stage2.N2;
  L.stage2.K2 = on_grid(dom, V.inflated(1.0 / N2));
  const Mollifier moll = build_mollifier(d, N2, scn.quad, md);
  L.stage2.normC = moll.normC();
  L.stage2.mass = moll.mass();
  SampledFunction ft_reg = regularize(ft, moll, scn.quad);
  L.stage2.measured = weighted_seminorm(linear_combination(1.0, ft, -1.0, ft_reg), fam, idx, alpha).value;

  // stage 3: constants and the finite-rank step
  const AwayFromZeroReport away = check_locally_bounded_away_from_zero(fam, V);
  const BoundEntry* inf0 = nullptr;
  for (const auto& e : away.infs) {
    if (e.idx.l == 0) inf0 = &e;
  }
  if (!inf0 || !(inf0->value > 0.0)) {
    throw Error(ErrorKind::criterion_failure, "no weight of order 0 is bounded away from zero near the support");
  }
  auto& s3 = L.stage3;
  s3.i = inf0->idx.j;
  s3.C1 = 1.0 / inf0->value;
  s3.C2 = max_over(L.stage2.K2.grid(), [&](std::span<const double> x) { return fam.eval_unchecked(idx.j, idx.l, x); });
  const KernelTable kt_l = kernel_table(moll, scn.quad, idx.l);
  s3.C3 = *std::max_element(kt_l.abs_sum.begin(), kt_l.abs_sum.end());
  const double prod = s3.C1 * s3.C2 * s3.C3;
  s3.tensor_eps = prod > 0.0 ? eps / (3.0 * prod) : eps;
  s3.a_priori_input = s3.tensor_eps / 4.0;
  const bool adaptive = scn.tensor.mode == TensorSettings::Mode::adaptive;
  s3.mode = adaptive ? "adaptive" : "a_priori";

  CoverOptions copt;
  copt.max_refine = scn.tensor.max_refine;
  copt.max_lattice_points = scn.tensor.max_lattice_points;
  const KernelTable kt = kernel_table(moll, scn.quad, md);

  ApproximationResult out{FiniteRankFunction(dom, m, md, {}, {}), {}, ft, ft_reg, std::nullopt, nullptr};
  double t = adaptive ? std::max(eps / scn.tensor.divisor, s3.a_priori_input) : s3.a_priori_input;
  bool have = false;
  for (int h = 0; h <= scn.tensor.max_halvings; ++h) {
    std::optional<LocalizationResult> attempt;
    try {
      attempt.emplace(finite_rank_c0_approx(ft, fam, s3.i, alpha, t, V, scn.quad, md, copt));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::resolution) throw;
      L.note += std::string(L.note.empty() ? "" : "; ") + "stage 3 stopped: " + e.what();
      break;
    }
    LocalizationResult& loc = *attempt;
    auto cbank = std::make_shared<const ConvolvedBank>(loc.bank, kt);
    std::vector<SampledFunction> factors;
    std::vector<std::vector<double>> vectors;
    bool all_zero = true;
    for (std::size_t i = 0; i < loc.g.terms(); ++i) {
      for (double v : loc.g.vector(i)) all_zero = all_zero && v == 0.0;
    }
    FiniteRankFunction result(dom, m, md, {}, {});
    if (!all_zero) {
      for (std::size_t i = 0; i < loc.g.terms(); ++i) {
        Box sb = loc.bank->support_box(i).inflated(1.0 / N2);
        factors.push_back(bank_factor(cbank, i, dom, box_on_grid(dom, sb)));
        vectors.push_back(loc.g.vector(i));
      }
      result = FiniteRankFunction(dom, m, md, std::move(factors), std::move(vectors), cbank);
    }
    const SampledFunction res_fn = result.as_function(L.stage2.K2);
    const double st3 = weighted_sup(linear_combination(1.0, ft_reg, -1.0, res_fn), dom.grid(), fam, idx, alpha).value;
    s3.localization_eps = t;
    s3.halvings = h;
    s3.n_centers = loc.report.n_centers;
    s3.rank = result.rank();
    s3.refine = loc.report.refine;
    s3.N_const = loc.report.N_const;
    s3.tensor_measured = loc.report.measured_error;
    s3.measured = st3;
    s3.domination_bound = prod * loc.report.measured_error;
    s3.domination_ok = st3 <= s3.domination_bound + 10.0 * scn.quad.tol;
    out.result = std::move(result);
    out.g = std::move(loc.g);
    out.bank = std::move(cbank);
    have = true;
    if (!adaptive || st3 < budget || t <= s3.a_priori_input) break;
    t = std::max(0.5 * t, s3.a_priori_input);
  }

  if (have) {
    const SampledFunction res_fn = out.result.as_function(L.stage2.K2);
    L.total_measured = weighted_seminorm(linear_combination(1.0, f, -1.0, res_fn), fam, idx, alpha).value;
  } else {
    L.total_measured = weighted_seminorm(f, fam, idx, alpha).value;
  }
  L.stage_sum = L.stage1.measured + L.stage2.measured + s3.measured;
  L.total_bound = L.stage1.bound + L.stage2.measured + s3.domination_bound;
  if (L.stage1.measured >= budget) L.failed_stage = "stage1";
  else if (!L.stage2.N0_found || L.stage2.measured >= budget) L.failed_stage = "stage2";
  else if (!have || s3.measured >= budget) L.failed_stage = "stage3";
  else if (L.total_measured >= eps) L.failed_stage = "total";
  L.certified = L.failed_stage.empty();
  out.ledger = std::move(L);
  return out;
}

VerificationReport verify_ledger(const ApproximationResult& run, const SampledFunction& f, const Scenario& scn,
                                 int refine) {
  const ErrorLedger& L = run.ledger;
  const WeightFamily& fam = scn.family;
  const Region fine = f.domain().refined(std::max(refine, 1));
  const PointSet& pts = fine.grid();
  VerificationReport v;
  const SampledFunction res_fn = run.result.as_function(L.stage2.K2.empty() ? std::nullopt : std::optional<Region>(L.stage2.K2));
  v.refined_total = weighted_sup(linear_combination(1.0, f, -1.0, res_fn), pts, fam, L.idx, scn.alpha).value;
  v.refined_ok = v.refined_total <= 1.1 * L.total_measured + 1e-12;
  v.stage3_lhs = weighted_sup(linear_combination(1.0, run.f_tilde_reg, -1.0, res_fn), pts, fam, L.idx, scn.alpha).value;
  if (run.g) {
    const SampledFunction g_fn = run.g->as_function();
    const double t = weighted_sup(linear_combination(1.0, run.f_tilde, -1.0, g_fn), pts, fam,
                                  WeightIndex{L.stage3.i, 0}, scn.alpha)
                         .value;
    v.stage3_rhs = L.stage3.C1 * L.stage3.C2 * L.stage3.C3 * t;
  } else {
    v.stage3_rhs = L.stage3.C1 * L.stage3.C2 * L.stage3.C3 *
                   weighted_sup(run.f_tilde, pts, fam, WeightIndex{L.stage3.i, 0}, scn.alpha).value;
  }
  v.stage3_ok = v.stage3_lhs <= v.stage3_rhs + 10.0 * L.quad.tol;
  v.certified_consistent = !L.certified || L.total_measured < L.eps;
  v.sum_ok = L.total_measured <= L.stage_sum + 1e-10;
  return v;
}

namespace {

nlohmann::json region_json(const Region& r) { return region_to_json(r); }

}  // namespace

nlohmann::json to_json(const ErrorLedger& L) {
  using nlohmann::json;
  json hist = json::array();
  for (const auto& [n, v] : L.stage2.history) hist.push_back({{"n", n}, {"value", v}});
  return json{
      {"scenario", L.scenario},
      {"eps", L.eps},
      {"index", {{"j", L.idx.j}, {"l", L.idx.l}}},
      {"alpha", L.alpha},
      {"certified", L.certified},
      {"failed_stage", L.failed_stage},
      {"note", L.note},
      {"budget_per_stage", L.budget},
      {"quadrature", to_json(L.quad)},
      {"stage1",
       {{"K", region_json(L.stage1.K)},
        {"delta", L.stage1.delta},
        {"C_l_delta", L.stage1.C_l_delta},
        {"tail", L.stage1.tail},
        {"target", L.stage1.target},
        {"bound", L.stage1.bound},
        {"measured", L.stage1.measured},
        {"iterations", L.stage1.iterations},
        {"support", region_json(L.stage1.support)}}},
      {"stage2",
       {{"N0", L.stage2.N0},
        {"N0_found", L.stage2.N0_found},
        {"N1", L.stage2.N1},
        {"N2", L.stage2.N2},
        {"measured", L.stage2.measured},
        {"history", hist},
        {"normC", L.stage2.normC},
        {"mass", {{"base", L.stage2.mass.base}, {"refined", L.stage2.mass.refined}, {"levels", L.stage2.mass.levels}}},
        {"V", region_json(L.stage2.V)},
        {"K2", region_json(L.stage2.K2)}}},
      {"stage3",
       {{"i", L.stage3.i},
        {"C1", L.stage3.C1},
        {"C2", L.stage3.C2},
        {"C3", L.stage3.C3},
        {"tensor_eps", L.stage3.tensor_eps},
        {"a_priori_input", L.stage3.a_priori_input},
        {"localization_eps", L.stage3.localization_eps},
        {"mode", L.stage3.mode},
        {"halvings", L.stage3.halvings},
        {"n_centers", L.stage3.n_centers},
        {"rank", L.stage3.rank},
        {"cover_refine", L.stage3.refine},
        {"N_const", L.stage3.N_const},
        {"tensor_measured", L.stage3.tensor_measured},
        {"measured", L.stage3.measured},
        {"domination_bound", L.stage3.domination_bound},
        {"domination_ok", L.stage3.domination_ok}}},
      {"stage_sum", L.stage_sum},
      {"total_measured", L.total_measured},
      {"total_bound", L.total_bound},
  };
}

nlohmann::json to_json(const VerificationReport& v) {
  return {{"refined_total", v.refined_total},     {"refined_ok", v.refined_ok},
          {"stage3_lhs", v.stage3_lhs},           {"stage3_rhs", v.stage3_rhs},
          {"stage3_ok", v.stage3_ok},             {"certified_consistent", v.certified_consistent},
          {"sum_ok", v.sum_ok},                   {"pass", v.pass()}};
}

std::string to_csv(const ErrorLedger& L) {
  std::ostringstream os;
  os.precision(17);
  os << "stage,budget,measured,constant,value\n";
  os << "stage1," << L.budget << ',' << L.stage1.measured << ",C_l_delta," << L.stage1.C_l_delta << '\n';
  os << "stage1," << L.budget << ',' << L.stage1.measured << ",tail," << L.stage1.tail << '\n';
  os << "stage2," << L.budget << ',' << L.stage2.measured << ",N2," << L.stage2.N2 << '\n';
  os << "stage3," << L.budget << ',' << L.stage3.measured << ",C1," << L.stage3.C1 << '\n';
  os << "stage3," << L.budget << ',' << L.stage3.measured << ",C2," << L.stage3.C2 << '\n';
  os << "stage3," << L.budget << ',' << L.stage3.measured << ",C3," << L.stage3.C3 << '\n';
  os << "stage3," << L.budget << ',' << L.stage3.measured << ",rank," << L.stage3.rank << '\n';
  os << "total," << L.eps << ',' << L.total_measured << ",stage_sum," << L.stage_sum << '\n';
  return os.str();
}

}  // namespace cvapprox
