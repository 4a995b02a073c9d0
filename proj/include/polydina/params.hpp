#pragma once

#include <string>
#include <vector>

#include "polydina/core.hpp"
#include "polydina/gpdina.hpp"
#include "polydina/seqdina.hpp"

namespace polydina {

// One complete model configuration: item parameters of the active model plus
// the profile-proportion vector p.
struct ParamSet {
    ModelKind model = ModelKind::Gpdina;
    GpdinaParams gpdina; // used when model == Gpdina
    SeqParams seq;       // used when model == Seq
    std::vector<double> p;
};

// Bounds-level validation of the active parameter block plus p.
void validate_param_set(const ParamSet& s, const QMatrix& q);

// Full distribution of the active model.
std::vector<double> full_distribution(const QMatrix& q, const ParamSet& s);

// JSON form:
//   {"model":"gpdina","theta_plus":[[..]..],"theta_minus":[[..]..],"p":[..]}
//   {"model":"seq","beta_plus":[[..]..],"beta_minus":[[..]..],"p":[..]}
std::string param_set_to_json(const ParamSet& s);
ParamSet param_set_from_json(const std::string& text);

} // namespace polydina
