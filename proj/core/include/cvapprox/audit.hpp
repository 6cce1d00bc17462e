#pragma once

#include <cstdint>

#include <nlohmann/json.hpp>

#include "cvapprox/scenario.hpp"

namespace cvapprox {

struct WeightAudit {
  bool pass = true;
  nlohmann::json report;
};

/// Structural audits of the scenario's weight family plus every declared
/// vanishing-ratio claim, checked against the closed-form compact within
/// one grid step. The seed drives the randomized seminorm axiom check.
WeightAudit audit_weights(const Scenario& scn, std::uint64_t seed = 0);

/// Bounding boxes agree within one lattice step per axis (both empty also agrees).
bool compact_matches(const Region& found, const Region& predicted, std::span<const double> step);

}  // namespace cvapprox
