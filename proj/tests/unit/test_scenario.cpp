#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "wrenchgrasp/errors.hpp"
#include "wrenchgrasp/scenario.hpp"

using namespace wrenchgrasp;

namespace {

std::string path_of(const std::string& name) { return std::string(WRENCHGRASP_SCENARIO_DIR) + "/" + name + ".json"; }

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Scenario, ShippedFilesLoadAndValidate) {
  for (const char* name : {"hammer", "knock", "sweep", "reach"}) {
    const Scenario s = load_scenario(path_of(name));
    EXPECT_EQ(s.name, name);
    EXPECT_EQ(to_string(s.task), name);
    s.validate();
    const RigidBodyModel b = make_body(s);
    b.validate();
    EXPECT_GT(b.mass, 0.0);
    synth_trajectory(s.task, s.motion, s.contact).validate();
  }
}

TEST(Scenario, JsonRoundTripIsStable) {
  for (const char* name : {"hammer", "knock", "sweep", "reach"}) {
    const Scenario s = load_scenario(path_of(name));
    const std::string once = scenario_to_json(s);
    const std::string twice = scenario_to_json(parse_scenario(once));
    EXPECT_EQ(once, twice);
  }
}

TEST(Scenario, MassScaleScalesMassAndInertia) {
  Scenario s = load_scenario(path_of("hammer"));
  const RigidBodyModel a = make_body(s);
  s.body.mass_scale = 2.0;
  const RigidBodyModel b = make_body(s);
  EXPECT_NEAR(b.mass, 2.0 * a.mass, 1e-12);
  EXPECT_LT((b.inertia - 2.0 * a.inertia).norm(), 1e-12);
  EXPECT_LT((b.com - a.com).norm(), 1e-12);
}

TEST(Scenario, InfiniteClampSurvivesSerialization) {
  Scenario s = load_scenario(path_of("hammer"));
  s.sim.clamp_force = std::numeric_limits<double>::infinity();
  const Scenario back = parse_scenario(scenario_to_json(s));
  EXPECT_TRUE(std::isinf(back.sim.clamp_force));
}

TEST(Scenario, ErrorsNameTheField) {
  const std::string text = slurp(path_of("hammer"));
  auto expect_field = [](const nlohmann::json& j, const std::string& field) {
    try {
      parse_scenario(j.dump());
      ADD_FAILURE() << "accepted bad " << field;
    } catch (const ParseError& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    } catch (const InvalidInput& e) {
      EXPECT_NE(std::string(e.what()).find(field), std::string::npos) << e.what();
    }
  };
  nlohmann::json j = nlohmann::json::parse(text);
  j["tool"]["primitives"][0]["shape"] = "torus";
  expect_field(j, "shape");
  j = nlohmann::json::parse(text);
  j["contact"].erase("normal");
  expect_field(j, "normal");
  j = nlohmann::json::parse(text);
  j["schema_version"] = 7;
  expect_field(j, "schema_version");
  j = nlohmann::json::parse(text);
  j["task"] = "juggle";
  EXPECT_ANY_THROW(parse_scenario(j.dump()));
  EXPECT_THROW(parse_scenario("not json"), ParseError);
  EXPECT_ANY_THROW(load_scenario("/nonexistent/scenario.json"));
}

TEST(Scenario, SaveAndLoad) {
  const Scenario s = load_scenario(path_of("reach"));
  const auto tmp = std::filesystem::temp_directory_path() / "wrenchgrasp_scenario_test.json";
  save_scenario(s, tmp.string());
  EXPECT_EQ(scenario_to_json(load_scenario(tmp.string())), scenario_to_json(s));
  std::filesystem::remove(tmp);
}
