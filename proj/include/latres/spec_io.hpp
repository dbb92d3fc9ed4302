// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>

#include <json.hpp>

#include "latres/perturbation.hpp"

namespace latres {

using Json = nlohmann::ordered_json;

Json complex_to_json(Complex z);
Complex complex_from_json(const Json& j);

/// Spec document: {gamma, C, fiber_dim, gamma_factors, lambda1, lambda2,
/// kernel}; complex numbers as [re, im] pairs, matrices row-major.
Json spec_to_json(const PerturbationSpec& spec);
PerturbationSpec spec_from_json(const Json& j);

PerturbationSpec load_spec(const std::string& path);
void save_spec(const PerturbationSpec& spec, const std::string& path);

enum class SpecProfile { Selfadjoint, Nonselfadjoint, RankOne, Fibered };

SpecProfile profile_from_string(const std::string& name);
std::string profile_to_string(SpecProfile p);

/// Reproducible pseudo-random perturbation satisfying the decay bound by
/// construction. The kernel amplitude is calibrated so that the singular
/// block of the sandwiched operator stays well inside the default scan hole.
PerturbationSpec generate_spec(std::uint64_t seed, SpecProfile profile,
                               double gamma, int fiber_dim);

}  // namespace latres
