#include "core/model_io.hpp"

#include <cmath>
#include <fstream>
#include <json.hpp>

#include "core/error.hpp"

namespace mba {

namespace {

bool is_gradient_method(const std::string& method) {
  return method == "olr" || method == "mb_psl" || method == "mb_phl";
}

}  // namespace

std::string model_to_json(const RankerModel& model) {
  nlohmann::json j;
  j["format"] = "mba.model";
  j["version"] = 1;
  j["d"] = model.dim();
  j["weights"] = model.w;
  j["lambda1"] = model.reg.lambda1;
  j["lambda2"] = model.reg.lambda2;
  j["pairs_seen"] = model.pairs_seen;
  j["seed"] = model.seed;
  if (std::isnan(model.objective_value))
    j["objective_value"] = nullptr;
  else
    j["objective_value"] = model.objective_value;

  nlohmann::json solver;
  solver["method"] = model.method;
  if (is_gradient_method(model.method)) {
    solver["step_schedule"] = model.step_schedule;
    solver["c"] = model.step_c;
    solver["rounds"] = model.rounds;
  } else {
    solver["iters"] = model.iters;
    solver["residual"] = model.residual;
  }
  j["solver"] = solver;
  return j.dump(2);
}

RankerModel model_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(ErrorKind::Parse, "model file is not valid JSON");
  if (j.value("format", "") != "mba.model" || j.value("version", 0) != 1)
    fail(ErrorKind::Parse, "unrecognized model format/version");

  RankerModel model;
  model.w = j.at("weights").get<std::vector<double>>();
  if (model.w.size() != j.at("d").get<std::size_t>())
    fail(ErrorKind::Parse, "model weight length does not match d");
  model.reg.lambda1 = j.at("lambda1").get<double>();
  model.reg.lambda2 = j.at("lambda2").get<double>();
  model.pairs_seen = j.at("pairs_seen").get<std::uint64_t>();
  model.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("objective_value") && !j.at("objective_value").is_null())
    model.objective_value = j.at("objective_value").get<double>();

  const auto& solver = j.at("solver");
  model.method = solver.at("method").get<std::string>();
  if (is_gradient_method(model.method)) {
    model.step_schedule = solver.at("step_schedule").get<std::string>();
    model.step_c = solver.at("c").get<double>();
    model.rounds = solver.at("rounds").get<std::uint64_t>();
  } else {
    model.iters = solver.at("iters").get<std::uint64_t>();
    model.residual = solver.at("residual").get<double>();
  }
  return model;
}

void save_model(const RankerModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::Io, "cannot write '" + path + "'");
  out << model_to_json(model) << '\n';
  if (!out.good()) fail(ErrorKind::Io, "write failure on '" + path + "'");
}

RankerModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot open '" + path + "'");
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace mba
