#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvapprox/convolution.hpp"
#include "cvapprox/cutoff.hpp"
#include "cvapprox/scenario.hpp"
#include "cvapprox/tensorapprox.hpp"

namespace cvapprox {

struct ErrorLedger {
  std::string scenario;
  double eps = 0.0;
  WeightIndex idx;
  std::string alpha;
  bool certified = false;
  std::string failed_stage;  // first stage over budget, empty when certified
  std::string note;

  struct Stage1 {
    Region K;
    double delta = 0.0;
    double C_l_delta = 0.0;
    double tail = 0.0;
    double target = 0.0;
    double bound = 0.0;
    double measured = 0.0;
    int iterations = 0;
    Region support;  // supp f_tilde
  } stage1;

  struct Stage2 {
    int N0 = 0;
    bool N0_found = false;
    int N1 = 0;
    int N2 = 0;
    double measured = 0.0;
    std::vector<std::pair<int, double>> history;
    double normC = 0.0;
    MassCheck mass;
    Region V;
    Region K2;
  } stage2;

  struct Stage3 {
    int i = 0;
    double C1 = 0.0;
    double C2 = 0.0;
    double C3 = 0.0;
    double tensor_eps = 0.0;        // eps / (3 C1 C2 C3)
    double a_priori_input = 0.0;    // eps / (12 C1 C2 C3)
    double localization_eps = 0.0;  // tolerance actually handed to the localization step
    std::string mode;
    int halvings = 0;
    std::size_t n_centers = 0;
    std::size_t rank = 0;
    int refine = 1;
    double N_const = 0.0;
    double tensor_measured = 0.0;  // |f_tilde - g|_{i,0,alpha}
    double measured = 0.0;         // |(f_tilde - g) * rho_N2|_{j,l,alpha}
    double domination_bound = 0.0; // C1 C2 C3 |f_tilde - g|_{i,0,alpha}
    bool domination_ok = false;
  } stage3;

  double budget = 0.0;  // eps / 3 per stage
  double stage_sum = 0.0;
  double total_measured = 0.0;
  double total_bound = 0.0;
  QuadratureSpec quad;
};

struct ApproximationResult {
  FiniteRankFunction result;
  ErrorLedger ledger;
  SampledFunction f_tilde;
  SampledFunction f_tilde_reg;  // f_tilde * rho_N2
  std::optional<FiniteRankFunction> g;  // k = 0 approximant before smoothing
  std::shared_ptr<const ConvolvedBank> bank;
};

ApproximationResult approximate(const SampledFunction& f, const Scenario& scn, const WeightIndex& idx,
                                const SeminormIndex& alpha, double eps);

struct VerificationReport {
  double refined_total = 0.0;
  bool refined_ok = false;     // refined-grid total <= 1.1 x ledger total (or both ~0)
  double stage3_lhs = 0.0;
  double stage3_rhs = 0.0;
  bool stage3_ok = false;
  bool certified_consistent = false;  // certified implies total < eps
  bool sum_ok = false;                // total <= stage sum + 1e-10
  bool pass() const { return refined_ok && stage3_ok && certified_consistent && sum_ok; }
};

VerificationReport verify_ledger(const ApproximationResult& run, const SampledFunction& f, const Scenario& scn,
                                 int refine = 2);

nlohmann::json to_json(const ErrorLedger& ledger);
nlohmann::json to_json(const VerificationReport& v);
/// stage,budget,measured,constant,value rows.
std::string to_csv(const ErrorLedger& ledger);

}  // namespace cvapprox
