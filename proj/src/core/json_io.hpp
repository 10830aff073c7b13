#pragma once

#include "vvfrac/config.hpp"

#include <json.hpp>

#include <string>

namespace vvfrac::io {

using nlohmann::json;

json vec_json(const Vec2& p);
json crack_json(const CrackSet& c);
json energy_json(const EnergyReport& e);
json powers_json(const LoadPowers& p);
json state_json(const StateRecord& s);
// One JSON-lines record of a trace: the state plus the step that produced it.
json step_json(std::size_t i, const IncrementalStepResult& r);
json err_entry_json(const ErrEntry& e);
json griffith_json(const DiscreteGriffithReport& r);
json balance_json(const BalanceReport& r);
json viscous_griffith_json(const ViscousGriffithReport& r);
json limit_json(const LimitEvolution& l);
json param_trace_json(const ParametrizedTrace& p);
json param_griffith_json(const ParamGriffithReport& r);

// NaN and infinities become null.
json num(double v);

}  // namespace vvfrac::io
