#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "rydnhqc/experiments.hpp"

using namespace rydnhqc;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig quick_not(ModelLevel level) {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::not_gate);
  c.level = level;
  c.params.level = level;
  c.steps = 4000;
  c.snapshots = 100;
  c.threads = 1;
  return c;
}

std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("rydnhqc_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("experiment names") {
  CHECK(parse_experiment("not-gate") == Experiment::not_gate);
  CHECK(parse_experiment("single-gate") == Experiment::single_gate_custom);
  CHECK(parse_experiment("gamma_sweep") == Experiment::gamma_sweep);
  for (auto e : {Experiment::not_gate, Experiment::single_gate_custom, Experiment::cnot_gate, Experiment::error_sweep,
                 Experiment::gamma_sweep, Experiment::qs_map, Experiment::tables}) {
    CHECK(parse_experiment(to_string(e)) == e);
  }
  CHECK_THROWS(parse_experiment("fig9"));
  CHECK(parse_gate_choice("cnot") == GateChoice::cnot);
  CHECK_THROWS(parse_gate_choice("toffoli"));
}

TEST_CASE("config round trip through the document format") {
  for (auto e : {Experiment::not_gate, Experiment::cnot_gate, Experiment::error_sweep, Experiment::gamma_sweep,
                 Experiment::qs_map, Experiment::tables}) {
    ExperimentConfig c = ExperimentConfig::defaults(e);
    c.epsilon = 0.031;
    c.seed = 17;
    c.out_dir = "results dir";
    const std::string text = c.to_document().serialize();
    const ExperimentConfig back = ExperimentConfig::from_document(io::ConfigDocument::parse(text));
    CHECK(back == c);
    CHECK(back.to_document().serialize() == text);
  }
  const auto doc = io::ConfigDocument::parse("experiment = \"not-gate\"\n[run]\nbogus = 1\n");
  CHECK_THROWS_AS(ExperimentConfig::from_document(doc), io::ConfigError);
  const auto bad_level = io::ConfigDocument::parse("model_level = \"L9\"\n");
  CHECK_THROWS_AS(ExperimentConfig::from_document(bad_level), io::ConfigError);
}

TEST_CASE("defaults per experiment") {
  const auto sweep = ExperimentConfig::defaults(Experiment::error_sweep);
  CHECK(sweep.level == ModelLevel::effective);
  CHECK(sweep.epsilons.size() == 21);
  CHECK(sweep.epsilons.front() == -0.1);
  CHECK(sweep.epsilons[10] == 0.0);
  const auto cnot = ExperimentConfig::defaults(Experiment::cnot_gate);
  CHECK(cnot.params == PhysicalParams::two_qubit_paper());
  auto gs = ExperimentConfig::defaults(Experiment::gamma_sweep);
  gs.use_gate(GateChoice::cnot);
  CHECK(gs.gammas_khz.back() == 2.0);
  CHECK(default_steps(GateKind::two_qubit, ModelLevel::full_lab) == 100000);
  CHECK(amplitude_scale(ModelLevel::effective, 0.1) == doctest::Approx(1.2));
  CHECK(amplitude_scale(ModelLevel::full_lab, 0.1) == doctest::Approx(1.1));
}

TEST_CASE("validation") {
  auto bad = [](auto mutate) {
    ExperimentConfig c = ExperimentConfig::defaults(Experiment::not_gate);
    mutate(c);
    return c;
  };
  CHECK_NOTHROW(ExperimentConfig::defaults(Experiment::not_gate).validate());
  CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.epsilon = 0.9; }).validate(), io::ConfigError);
  CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.gamma_khz = -1; }).validate(), io::ConfigError);
  CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.snapshots = 0; }).validate(), io::ConfigError);
  CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.level = ModelLevel::two_qubit_rwa; }).validate(), io::ConfigError);
  CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.params.detunings.d1 = 0; }).validate(), io::ConfigError);
  CHECK_THROWS_AS(bad([](ExperimentConfig& c) { c.out_dir.clear(); }).validate(), io::ConfigError);
}

TEST_CASE("parallel_map keeps order and propagates errors") {
  const auto sq = parallel_map<int>(50, 4, [](int i) { return i * i; });
  for (int i = 0; i < 50; ++i) CHECK(sq[static_cast<size_t>(i)] == i * i);
  CHECK(parallel_map<int>(0, 2, [](int) { return 1; }).empty());
  CHECK_THROWS_AS(parallel_map<int>(10, 3,
                                    [](int i) {
                                      if (i == 7) throw std::runtime_error("boom");
                                      return i;
                                    }),
                  std::runtime_error);
}

TEST_CASE("effective Not gate run") {
  const RunOutput out = run_not_gate(quick_not(ModelLevel::effective));
  CHECK(out.scalar("F_avg") > 1.0 - 1e-6);
  CHECK(out.scalar("F_avg_effective") > 1.0 - 1e-6);
  CHECK(std::abs(out.scalar("vartheta_minus_T")) < 1e-6);
  CHECK(out.scalar("theta_minus_T") == doctest::Approx(kPi).epsilon(1e-6));
  CHECK(out.scalar("omega_tilde_max") == doctest::Approx(20.35).epsilon(0.003));
  CHECK(out.scalar("T_us") == doctest::Approx(22.918).epsilon(1e-4));
  CHECK(std::abs(out.scalar("F_avg_haar") - out.scalar("F_avg")) < 4.0 * out.scalar("F_avg_haar_stderr") + 1e-12);
  CHECK(out.table("fig3b").rows.size() == 101);
  CHECK(out.table("fig3c").rows.size() == 101);
  CHECK(out.table("fig4a").rows.back()[0] == 1.0);
  CHECK_THROWS_AS(out.scalar("nope"), std::out_of_range);
}

TEST_CASE("single-gate runs reach their targets on the effective model") {
  ExperimentConfig c = quick_not(ModelLevel::effective);
  c.experiment = Experiment::single_gate_custom;
  c.theta_s = kPi / 2;
  c.theta1 = 0.7;
  c.phi1 = 0.3;
  const RunOutput out = run_single_gate(c);
  CHECK(out.scalar("F_avg") > 1.0 - 1e-6);
}

TEST_CASE("effective C-Not run") {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::cnot_gate);
  c.level = ModelLevel::two_qubit_rwa;
  c.params.level = c.level;
  c.steps = 20000;
  c.snapshots = 50;
  const RunOutput out = run_cnot_gate(c);
  CHECK(out.scalar("F_avg") > 1.0 - 1e-6);
  CHECK(out.table("fig5a").rows.size() == 51);
}

TEST_CASE("error sweep scalars") {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::error_sweep);
  c.epsilons = {-0.1, 0.0, 0.1};
  c.chi0_values = {1.0, 0.0};
  c.steps = 4000;
  c.threads = 2;
  const RunOutput out = run_error_sweep(c);
  const auto& t = out.table("fig3d");
  CHECK(t.rows.size() == 6);
  CHECK(t.column("epsilon_tilde")[0] == doctest::Approx(-0.2));
  CHECK(out.scalar("F_avg@1@0") > 1.0 - 1e-6);
  CHECK(out.scalar("argmax_epsilon@1") == 0.0);
  CHECK(out.scalar("F_avg@0@0.1") == doctest::Approx(0.8212).epsilon(0.01 / 0.8212));
  CHECK(out.scalar("min_F_avg@1") > 0.9834);
}

TEST_CASE("gamma sweep on the effective model matches the factorized estimate") {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::gamma_sweep);
  c.level = ModelLevel::effective;
  c.params.level = c.level;
  c.gammas_khz = {0.0, 4.0};
  c.master_steps = 8000;
  c.snapshots = 40;
  c.threads = 1;
  const RunOutput out = run_gamma_sweep(c);
  CHECK(out.scalar("F_master@4") == doctest::Approx(out.scalar("F_theory@4")).epsilon(1e-6));
  CHECK(out.scalar("P_s@4") == doctest::Approx(std::exp(-4e3 * out.scalar("T_us") * 1e-6)).epsilon(1e-6));
  CHECK(out.scalar("F_prime@4") == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(out.table("fig4d").rows.size() == 2);
  CHECK(out.table("fig4c").column("F_master").size() == 41);
  CHECK(out.scalar("max_trace_error") < 1e-8);
}

TEST_CASE("qs map") {
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::qs_map);
  c.qs_theta_over_pi = {0.0, 0.5, 1.0};
  c.qs_chi0 = {0.0, 1.0};
  c.steps = 4000;
  const RunOutput out = run_qs_map(c);
  CHECK(out.table("fig3a").rows.size() == 6);
  CHECK(out.scalar("max_abs_closed_form_diff") < 1e-6);
  CHECK(out.scalar("Q_s_chi0_1_theta_pi") < 1e-12);
}

TEST_CASE("outputs are deterministic and carry provenance") {
  setenv("SOURCE_DATE_EPOCH", "1700000000", 1);
  ExperimentConfig c = ExperimentConfig::defaults(Experiment::qs_map);
  c.qs_theta_over_pi = {0.0, 1.0};
  c.qs_chi0 = {0.5, 1.0};
  c.steps = 400;
  c.threads = 2;
  const auto a = scratch_dir("det_a"), b = scratch_dir("det_b");
  const auto fa = emit_outputs(run_experiment(c), c, a);
  const auto fb = emit_outputs(run_experiment(c), c, b);
  REQUIRE(fa.size() == 2);
  for (size_t i = 0; i < fa.size(); ++i) CHECK(slurp(fa[i]) == slurp(fb[i]));

  const auto j = nlohmann::json::parse(slurp(a / "summary.json"));
  CHECK(j["experiment"] == "qs_map");
  CHECK(j["provenance"]["timestamp_utc"] == "2023-11-14T22:13:20Z");
  CHECK(j["provenance"]["files"][0] == "fig3a.csv");
  CHECK(j["resolved"]["V"] == 7200.0);
  CHECK(j["scalars"].contains("max_abs_closed_form_diff"));
  const auto back = ExperimentConfig::from_document(io::ConfigDocument::parse(j["config"].get<std::string>()));
  CHECK(back == c);
  const auto table = io::read_csv(a / "fig3a.csv");
  CHECK(table.columns[2].name == "Q_s");
  std::filesystem::remove_all(a);
  std::filesystem::remove_all(b);
}
