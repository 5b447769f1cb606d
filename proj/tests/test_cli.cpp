#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>
#include <sys/wait.h>

#include "pinned_values.hpp"
#include "scalekit/laws.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir() {
  auto dir = fs::temp_directory_path() / "scalekit-cli-tests";
  fs::create_directories(dir);
  return dir;
}

CliResult run_cli(const std::string& args) {
  auto dir = scratch_dir();
  auto out_path = dir / "stdout.txt";
  auto err_path = dir / "stderr.txt";
  std::string cmd = std::string("'") + SCALEKIT_CLI_PATH + "' " + args + " > '" +
                    out_path.string() + "' 2> '" + err_path.string() + "'";
  int rc = std::system(cmd.c_str());
  CliResult result;
  result.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
  result.out = slurp(out_path);
  result.err = slurp(err_path);
  return result;
}

fs::path write_file(const std::string& name, const std::string& body) {
  auto p = scratch_dir() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("count reports the billion-parameter reference shape") {
  auto shape = write_file("shape.json",
                          R"({"n_layer": 48, "d_model": 1600, "n_ctx": 1024, "n_vocab": 50257})");
  auto r = run_cli("count --shape '" + shape.string() + "' --format json");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["params"]["total_non_embedding_params"] == 1474560000);
  CHECK(doc["flops_per_token"]["c_forward_flops"] == 3106406400);
  CHECK(doc.contains("lr_hint"));

  auto with_budget = run_cli("count --shape '" + shape.string() +
                             "' --batch-tokens 524288 --steps 250000 --format json");
  REQUIRE(with_budget.exit_code == 0);
  auto doc2 = json::parse(with_budget.out);
  CHECK(doc2["training_compute"]["pf_days"].get<double>() ==
        doctest::Approx(13.42).epsilon(0.001));
}

TEST_CASE("plan matches the library laws") {
  auto r = run_cli("plan --budget 1 --mode empirical --format json");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["predicted_loss_nats"].get<double>() ==
        doctest::Approx(pinned::loss_cmin_1pfday).epsilon(1e-10));
  CHECK(doc["d_processed_tokens"].get<double>() ==
        doctest::Approx(pinned::d_traj_emp_1pfday).epsilon(1e-10));

  auto derived = run_cli("plan --budget 1 --format json");
  REQUIRE(derived.exit_code == 0);
  auto doc2 = json::parse(derived.out);
  CHECK(doc2["n_opt_params"].get<double>() ==
        doctest::Approx(pinned::n_opt_derived_1pfday).epsilon(1e-10));
}

TEST_CASE("intersect reports the collision budget") {
  auto r = run_cli("intersect --format json");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  CHECK(doc["c_star_pf_days"].get<double>() ==
        doctest::Approx(pinned::intersect_c_star).epsilon(1e-10));
  CHECK(doc["l_star_nats"].get<double>() ==
        doctest::Approx(pinned::intersect_l_star).epsilon(1e-10));
}

TEST_CASE("synthetic log feeds the fitter end to end") {
  auto runs = scratch_dir() / "runs.csv";
  auto gen = run_cli("synth --n-grid 1e6,1e7,1e8,1e9 --max-steps 2147483648 --samples 12 "
                     "--seed 5 --out '" + runs.string() + "'");
  REQUIRE(gen.exit_code == 0);

  auto fit = run_cli("fit --runs '" + runs.string() + "' --law n --format json");
  REQUIRE(fit.exit_code == 0);
  auto doc = json::parse(fit.out);
  REQUIRE(doc["fits"].size() == 1);
  CHECK(doc["fits"][0]["law"] == "n");
  CHECK(doc["fits"][0]["params"]["alpha_N"].get<double>() ==
        doctest::Approx(0.076).epsilon(0.01));
  CHECK(doc["ingest"]["accepted"] == 48);
}

TEST_CASE("the command line is deterministic") {
  auto a = run_cli("frontier --from 0.001 --to 1000 --points 7 --format csv");
  auto b = run_cli("frontier --from 0.001 --to 1000 --points 7 --format csv");
  REQUIRE(a.exit_code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("c_min,n_opt,b,s_min,d,loss\n", 0) == 0);
}

TEST_CASE("constants overrides reach the laws") {
  auto constants = write_file("constants.json", R"({"alpha_N": 0.08})");
  auto r = run_cli("predict --law n --from 1e9 --to 1e10 --points 2 --constants '" +
                   constants.string() + "' --format json");
  REQUIRE(r.exit_code == 0);
  auto doc = json::parse(r.out);
  double expected = std::pow(8.8e13 / 1e9, 0.08);
  CHECK(doc["points"][0]["loss_nats"].get<double>() ==
        doctest::Approx(expected).epsilon(1e-10));

  auto bad_key = write_file("bad_key.json", R"({"alpha_Z": 0.08})");
  auto rejected = run_cli("predict --law n --from 1e9 --to 1e10 --points 2 --constants '" +
                          bad_key.string() + "'");
  CHECK(rejected.exit_code == 1);
  CHECK(rejected.err.rfind("error[BAD_INPUT]", 0) == 0);

  auto not_json = write_file("broken.json", "{nope");
  auto parse_fail = run_cli("plan --budget 1 --constants '" + not_json.string() + "'");
  CHECK(parse_fail.exit_code == 1);
  CHECK(parse_fail.err.rfind("error[BAD_JSON]", 0) == 0);
}

TEST_CASE("failures are single-line coded errors") {
  auto negative = run_cli("plan --budget -3");
  CHECK(negative.exit_code == 1);
  CHECK(negative.err.rfind("error[BAD_INPUT]", 0) == 0);
  CHECK(negative.err.find('\n') == negative.err.size() - 1);

  auto usage = run_cli("plan");
  CHECK(usage.exit_code == 1);
  CHECK(usage.err.rfind("error[USAGE]", 0) == 0);

  auto unknown_law = run_cli("predict --law zap --from 1 --to 10");
  CHECK(unknown_law.exit_code == 1);
  CHECK(unknown_law.err.rfind("error[BAD_INPUT]", 0) == 0);

  auto help = run_cli("--help");
  CHECK(help.exit_code == 0);
  CHECK(help.out.find("count") != std::string::npos);
}

TEST_CASE("reports can be written to a file") {
  auto out_file = scratch_dir() / "plan.json";
  auto r = run_cli("plan --budget 2 --out '" + out_file.string() + "'");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.empty());
  auto doc = json::parse(slurp(out_file));
  CHECK(doc["c_min_pf_days"] == 2.0);
}
