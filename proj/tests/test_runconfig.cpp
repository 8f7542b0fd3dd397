#include "doctest.h"

#include <string>
#include <vector>

#include "pmlab/errors.hpp"
#include "pmlab/runconfig.hpp"

using namespace pmlab;
using cli::RunConfig;

TEST_CASE("configs round-trip through JSON") {
  RunConfig c;
  c.states = {"Psi1", "rho26"};
  c.shots = 5000;
  c.seed = 77;
  c.resamples = 250;
  c.noise = "depol:0.05";
  c.mode = "analytic";
  c.format = "json";
  c.output = "/tmp/out.json";
  c.threads = 4;
  RunConfig back = cli::config_from_json(cli::config_to_json(c));
  CHECK(back == c);

  // Empty state list means the full catalog and survives the round-trip.
  RunConfig all;
  RunConfig all_back = cli::config_from_json(cli::config_to_json(all));
  CHECK(all_back == all);
  CHECK(cli::resolve_states(all).size() == 26);
  CHECK(cli::resolve_states(all).front() == "Psi1");
  CHECK(cli::resolve_states(c) == c.states);
}

TEST_CASE("validation rejects out-of-domain settings") {
  RunConfig good;
  CHECK_NOTHROW(cli::validate(good));

  RunConfig bad_state = good;
  bad_state.states = {"Psi1", "Psi99"};
  CHECK_THROWS_AS(cli::validate(bad_state), InvalidInput);

  RunConfig bad_noise = good;
  bad_noise.noise = "depol:2";
  CHECK_THROWS_AS(cli::validate(bad_noise), InvalidInput);

  RunConfig bad_mode = good;
  bad_mode.mode = "exact";
  CHECK_THROWS_AS(cli::validate(bad_mode), InvalidInput);

  RunConfig bad_format = good;
  bad_format.format = "xml";
  CHECK_THROWS_AS(cli::validate(bad_format), InvalidInput);

  RunConfig bad_shots = good;
  bad_shots.shots = 0;
  CHECK_THROWS_AS(cli::validate(bad_shots), InvalidInput);

  RunConfig bad_resamples = good;
  bad_resamples.resamples = 50;
  CHECK_THROWS_AS(cli::validate(bad_resamples), InvalidInput);

  RunConfig bad_threads = good;
  bad_threads.threads = 0;
  CHECK_THROWS_AS(cli::validate(bad_threads), InvalidInput);
}

TEST_CASE("JSON overrides only touch the keys present") {
  RunConfig c;
  c.shots = 12345;
  c.seed = 9;
  c.states = {"Psi3"};

  cli::apply_json_overrides(c, R"({"resamples": 300, "mode": "analytic"})");
  CHECK(c.resamples == 300);
  CHECK(c.mode == "analytic");
  CHECK(c.shots == 12345);
  CHECK(c.seed == 9);
  CHECK(c.states == std::vector<std::string>{"Psi3"});

  cli::apply_json_overrides(c, R"({"states": "all"})");
  CHECK(c.states.empty());

  cli::apply_json_overrides(c, R"({"states": ["rho17", "rho26"]})");
  CHECK(c.states == std::vector<std::string>({"rho17", "rho26"}));

  CHECK_THROWS_AS(cli::apply_json_overrides(c, R"({"shotz": 1})"), InvalidInput);
  CHECK_THROWS_AS(cli::apply_json_overrides(c, "not json"), InvalidInput);
}
