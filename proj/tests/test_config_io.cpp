#include <gtest/gtest.h>

#include <filesystem>

#include "lambdarep/config.hpp"
#include "lambdarep/error.hpp"
#include "lambdarep/experiments.hpp"
#include "lambdarep/io.hpp"
#include "lambdarep/parallel.hpp"

using namespace lambdarep;

namespace {

const char* kToy = R"({
  "grid": ["G.G"],
  "goals": {"0,0": {"reward": 10, "lambda": 0}, "0,2": {"reward": 6, "lambda": 1}},
  "gamma": 0.99, "noise_prob": 0, "wall_penalty": 0, "start": [0, 1], "horizon": 5
})";

std::string message_of(const std::string& text) {
  try {
    parse_env_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(EnvConfig, ParsesAndBuilds) {
  const EnvConfig c = parse_env_config(kToy, "toy");
  EXPECT_EQ(c.grid.rows, 1);
  EXPECT_EQ(c.grid.cols, 3);
  EXPECT_EQ(c.horizon, 5);
  ASSERT_TRUE(c.start.has_value());
  EXPECT_EQ(c.start->second, 1);
  const Environment env = build_environment(c);
  EXPECT_EQ(env.mdp().n_states(), 3);
  EXPECT_DOUBLE_EQ(env.mdp().start_distribution()[1], 1.0);
  EXPECT_EQ(env.policy_targets, (std::vector<int>{0, 2}));
  EXPECT_DOUBLE_EQ(env.spec.r_bar[0], 10.0);
  EnvOverrides o;
  o.gamma = 0.5;
  EXPECT_DOUBLE_EQ(build_environment(c, o).mdp().gamma(), 0.5);
}

TEST(EnvConfig, ErrorsNameTheField) {
  EXPECT_NE(message_of("{").find("invalid JSON"), std::string::npos);
  EXPECT_NE(message_of(R"({"grid": ["..", "."]})").find("grid row 1"), std::string::npos);
  EXPECT_NE(message_of(R"({"grid": [".."], "gamma": 1.5})").find("gamma"), std::string::npos);
  EXPECT_NE(message_of(R"({"grid": ["G."], "goals": {"x": {}}})").find("goal key"), std::string::npos);
  EXPECT_NE(message_of(R"({"grid": [".."], "start": [3, 0]})").find("outside the grid"), std::string::npos);
  EXPECT_NE(message_of(R"({"grid": [".."], "start": "corner"})").find("start"), std::string::npos);
}

TEST(EnvConfig, ShippedConfigsLoad) {
  for (const char* name : {"fourrooms", "tworooms", "toy", "policy_eval", "asymmetric", "corridor_3", "corridor_6",
                           "corridor_9"}) {
    EXPECT_NO_THROW(load_named_environment(default_config_dir(), name)) << name;
  }
  const Environment fr = load_named_environment(default_config_dir(), "fourrooms");
  EXPECT_EQ(fr.mdp().n_states(), 104);
  EXPECT_EQ(fr.mdp().n_actions(), 5);
}

TEST(PolicyFile, RoundTripsAndFallsBackToUniform) {
  const std::vector<int> acts{1, 0, 4};
  const Policy pi = Policy::deterministic(acts, 5);
  const Policy back = parse_policy(policy_to_json(pi), 3, 5);
  EXPECT_EQ(back.probs(), pi.probs());
  const Policy partial = parse_policy(R"({"1": [0, 0, 1, 0, 0]})", 3, 5);
  EXPECT_DOUBLE_EQ(partial(0, 3), 0.2);
  EXPECT_DOUBLE_EQ(partial(1, 2), 1.0);
  EXPECT_THROW(parse_policy(R"({"7": [1, 0, 0, 0, 0]})", 3, 5), ConfigError);
  EXPECT_THROW(parse_policy(R"({"0": [1, 0]})", 3, 5), ConfigError);
  EXPECT_THROW(parse_policy(R"({"0": [0.5, 0, 0, 0, 0]})", 3, 5), ConfigError);
}

TEST(Io, NumberFormatting) {
  EXPECT_EQ(format_number(0.0), "0");
  EXPECT_EQ(format_number(-0.0), "0");
  EXPECT_EQ(format_number(0.5), "0.5");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333333");
}

TEST(Io, CsvLayouts) {
  Matrix m(2, 2);
  m << 1, 2,
       3, 4;
  EXPECT_EQ(matrix_csv(m), "row,0,1\n0,1,2\n1,3,4\n");
  EXPECT_EQ(residual_log_csv({0.5, 0.25}), "iter,max_residual\n1,0.5\n2,0.25\n");
  EXPECT_EQ(results_csv({ResultRow{0.5, 0, 3.0, 2.0, 7}}),
            "agent_lambda,episode,return_undiscounted,return_discounted,steps\n0.5,0,3,2,7\n");
  const std::string curve = return_curve_csv({{1.0, 2.0}}, {9});
  EXPECT_EQ(curve.substr(0, curve.find('\n')), "episode,return,seed");
}

TEST(Io, ManifestRoundTrip) {
  RunManifest m;
  m.command = "eval";
  m.argv = {"eval", "--env", "x.json"};
  m.seed = 12345678901234ULL;
  m.config_hash = fnv1a_hex("abc");
  m.outputs = {"values.csv"};
  const RunManifest back = parse_manifest(manifest_json(m));
  EXPECT_EQ(back.command, m.command);
  EXPECT_EQ(back.argv, m.argv);
  EXPECT_EQ(back.seed, m.seed);
  EXPECT_EQ(back.config_hash, m.config_hash);
  EXPECT_EQ(back.outputs, m.outputs);
  EXPECT_THROW(parse_manifest("{}"), ConfigError);
}

TEST(Io, Fnv1aKnownDigests) {
  EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
  EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Io, WriteOutputCreatesDirectory) {
  const auto dir = std::filesystem::temp_directory_path() / "lambdarep_io_test" / "nested";
  std::filesystem::remove_all(dir.parent_path());
  const std::string path = write_output(dir.string(), "a.txt", "hello");
  EXPECT_EQ(read_text_file(path), "hello");
  std::filesystem::remove_all(dir.parent_path());
}

TEST(Parallel, ResultsIndependentOfWorkerCount) {
  std::vector<Vector> vs;
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) vs.push_back(Vector::Constant(3, rng.normal()));
  std::vector<double> out1(200);
  std::vector<double> out4(200);
  set_worker_count(1);
  parallel_for(200, [&](std::size_t i) { out1[i] = Rng(mix_seed(3, i)).uniform(); });
  const Vector s1 = pairwise_sum(vs);
  set_worker_count(4);
  parallel_for(200, [&](std::size_t i) { out4[i] = Rng(mix_seed(3, i)).uniform(); });
  const Vector s4 = pairwise_sum(vs);
  set_worker_count(0);
  EXPECT_EQ(out1, out4);
  EXPECT_EQ(s1, s4);
  EXPECT_THROW(parallel_for(10, [](std::size_t i) { if (i == 5) throw NumericError("boom"); }), NumericError);
}
