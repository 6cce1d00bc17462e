#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cvapprox/quadrature.hpp"
#include "cvapprox/sampled_function.hpp"
#include "cvapprox/seminorm_index.hpp"
#include "cvapprox/weights.hpp"

namespace cvapprox {

struct VanishingClaim {
  WeightIndex jl;
  WeightIndex im;
  double eps = 0.1;
  std::optional<Region> search;  // defaults to the family domain
};

struct TensorSettings {
  enum class Mode { a_priori, adaptive };
  Mode mode = Mode::adaptive;
  double divisor = 12.0;  // adaptive start: eps / divisor
  int max_halvings = 10;
  int max_refine = 64;
  std::size_t max_lattice_points = 4'000'000;
};

/// Everything a run needs; loaded from JSON.
struct Scenario {
  std::string name;
  Region domain;
  WeightFamily family;
  nlohmann::json function_spec;
  int order = 1;  // differentiability of the target function
  SeminormIndex alpha = SeminormIndex::sup();
  WeightIndex index{1, 0};
  std::vector<double> eps{0.1};
  double delta = 1.0;
  std::string delta_rule;  // "" or "strip": 1 / (2 j + 2)
  std::optional<Region> search;
  int n_max = 64;
  QuadratureSpec quad;
  TensorSettings tensor;
  Region audit_region;
  std::optional<Region> audit_compact;
  std::vector<VanishingClaim> vanishing;

  /// delta for the index j.
  double delta_for(int j) const;
  SampledFunction make_function() const;
  SampledFunction make_function(const Region& domain) const;
  Region search_region() const { return search ? *search : domain; }
};

Region parse_region(const nlohmann::json& j, std::size_t dim, const Region* lattice = nullptr);
nlohmann::json region_to_json(const Region& r);
SeminormIndex parse_alpha(const nlohmann::json& j);
QuadratureSpec parse_quadrature(const nlohmann::json& j);
nlohmann::json to_json(const QuadratureSpec& q);

Scenario parse_scenario(const nlohmann::json& j);
Scenario load_scenario(const std::filesystem::path& path);
/// Same scenario with the domain lattice refined (grid override).
Scenario with_grid(const Scenario& s, int points_per_unit);

}  // namespace cvapprox
