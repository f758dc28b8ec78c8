#pragma once

#include <string>

#include "core/solver.hpp"

namespace mba {

// RankerModel JSON: {d, weights, lambda1, lambda2, pairs_seen, seed,
// objective_value, solver: {...}}. The solver block carries {iters, residual}
// for the quadratic paths and {step_schedule, c, rounds} for gradient methods.
std::string model_to_json(const RankerModel& model);
RankerModel model_from_json(const std::string& text);

void save_model(const RankerModel& model, const std::string& path);
RankerModel load_model(const std::string& path);

}  // namespace mba
