#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fracproj/cli.hpp"
#include "fracproj/parallel.hpp"
#include "fracproj/rng.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

using namespace fracproj;
using namespace fracproj::cli;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const fs::path kScratch = fs::path(FRACPROJ_TEST_SCRATCH) / "cli";

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream(p, std::ios::binary) << text;
}

// Runs the command line with stdout and stderr captured.
int invoke(std::vector<std::string> args, std::string* out = nullptr) {
  args.insert(args.begin(), "fracproj");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream cout_capture, cerr_capture;
  auto* old_out = std::cout.rdbuf(cout_capture.rdbuf());
  auto* old_err = std::cerr.rdbuf(cerr_capture.rdbuf());
  const int code = main_entry(static_cast<int>(argv.size()), argv.data());
  std::cout.rdbuf(old_out);
  std::cerr.rdbuf(old_err);
  if (out) *out = cout_capture.str() + cerr_capture.str();
  return code;
}

int error_line(const std::string& text) {
  try {
    parse_config(text, "t.json");
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

std::string cantor_json() {
  return R"({"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.5, 0.5]})";
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream is(csv);
  std::string line;
  bool header = false;
  while (std::getline(is, line)) {
    if (line.rfind("#", 0) == 0) continue;
    if (!header) {
      header = true;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TEST_CASE("number format") {
  CHECK(format_number(std::log(2.0) / std::log(3.0)) == "0.63093");
  CHECK(format_number(1234567.0) == "1.23457e+06");
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(-0.0) == "0");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("shipped configs and schema examples validate") {
  std::size_t count = 0;
  for (const auto& entry : fs::directory_iterator(FRACPROJ_CONFIG_DIR)) {
    if (entry.path().extension() != ".json") continue;
    CAPTURE(entry.path().string());
    const auto cfg = load_config(entry.path().string());
    CHECK(!cfg.knobs.empty());
    ++count;
  }
  CHECK(count >= 6);
  std::set<std::string> tags;
  const std::string schema = schema_text();
  for (const auto& [name, text] : schema_examples()) {
    CAPTURE(name);
    tags.insert(parse_config(text, name).tag);
    CHECK(schema.find(text) != std::string::npos);
    CHECK(read_file(fs::path(FRACPROJ_CONFIG_DIR) / (name + ".json")) == text + "\n");
  }
  CHECK(tags == std::set<std::string>{"dim", "scan", "cpchain", "bc-grid", "convolve", "lift-check"});
  for (const char* variant : {"bernoulli_digits", "markov_digits", "linear_ifs", "product", "bernoulli_convolution"}) {
    bool used = false;
    for (const auto& example : schema_examples()) used |= example.second.find(variant) != std::string::npos;
    CHECK_MESSAGE(used, variant);
  }
}

TEST_CASE("config errors are anchored to lines") {
  const std::string head = "{\n  \"experiment\": \"dim\",\n  \"seed\": 1,\n  \"output\": \"x.csv\",\n";
  CHECK(error_line(head + "  \"measure\": {\"type\": \"bernoulli_digits\", \"base\": 3,\n"
                          "    \"digits\": [0, 2], \"probs\": [0.5, 0.6]}\n}") == 5);
  CHECK(error_line(head + "  \"measure\": " + cantor_json() + ",\n  \"depht\": 3\n}") == 6);
  CHECK(error_line(head + "  \"measure\": " + cantor_json() + ",\n  \"depth\": 0\n}") == 6);
  CHECK(error_line(head + "  \"measure\": " + cantor_json() + ",\n  \"samples\": \"many\"\n}") == 6);
  CHECK(error_line(head + "  \"depth\": 3,\n") == 6);  // truncated
  CHECK(error_line(head + "  \"measure\": {\"type\": \"fractal\"}\n}") == 5);
  CHECK(error_line("{\n  \"experiment\": \"dim\",\n  \"seed\": -4,\n  \"output\": \"x\"\n}") == 3);
  CHECK(error_line("{\n  \"experiment\": \"fly\",\n  \"seed\": 4,\n  \"output\": \"x\"\n}") == 2);
  CHECK(error_line("{\n  \"experiment\": \"dim\",\n  \"output\": \"x\"\n}") == 1);

  try {
    parse_config(head + "  \"measure\": " + cantor_json() + ",\n  \"depth\": 0\n}", "t.json");
    FAIL("no error");
  } catch (const ConfigError& e) {
    CHECK(e.located().rfind("t.json:6: depth:", 0) == 0);
  }
}

TEST_CASE("experiment-specific validation") {
  const auto fails = [](const std::string& body) {
    const std::string text = "{\"seed\": 3, \"output\": \"o.csv\", " + body + "}";
    CHECK_THROWS_AS(parse_config(text), ConfigError);
  };
  const std::string x2x3 = R"("measure": {"type": "product",
      "first": {"type": "bernoulli_digits", "base": 2, "digits": [0, 1], "probs": [0.9, 0.1]},
      "second": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.9, 0.1]}})";
  const std::string cantor_square =
      R"("measure": {"type": "product", "first": )" + cantor_json() + R"(, "second": )" + cantor_json() + "}";
  fails(R"("experiment": "scan", "measure": )" + cantor_json());
  fails(R"("experiment": "scan", )" + x2x3 + R"(, "slopes": [1], "slope_grid": {"lo": 0.1, "hi": 1, "per_side": 2})");
  fails(R"("experiment": "scan", )" + cantor_square + R"(, "operator": "rw")");
  fails(R"("experiment": "scan", )" + x2x3 + R"(, "operator": "base-x")");
  fails(R"("experiment": "scan", )" + x2x3 + R"(, "slopes": [], "axes": false)");
  fails(R"("experiment": "cpchain", "measure": )" + cantor_json() + R"(, "functionals": ["w"])");
  fails(R"("experiment": "cpchain", "measure": )" + cantor_json() + R"(, "functionals": ["speed"])");
  fails(R"("experiment": "cpchain")");
  fails(R"("experiment": "cpchain", "x2x3": {"mu": )" + cantor_json() + R"(, "nu": )" + cantor_json() + "}");
  fails(R"("experiment": "bc-grid", "blocks": [20], "atoms_extra": 8)");
  fails(R"("experiment": "bc-grid", "t": [0.5, 1.0])");
  fails(R"("experiment": "convolve", "measure": )" + cantor_json() + R"(, "level": 16)");
  fails(R"("experiment": "lift-check", "map": {"type": "coding", "base": 2, "dim": 1}, )" + cantor_square);
  fails(R"("experiment": "lift-check", "map": {"type": "coding", "base": 3, "dim": 2}, "depth": 8)");
  fails(R"("experiment": "dim", "measure": {"type": "bernoulli_convolution", "t": 0.6, "p": 0.5})");

  CHECK_NOTHROW(parse_config(R"({"experiment": "scan", "seed": 3, "output": "o.csv", "operator": "rw", )" + x2x3 + "}"));
}

TEST_CASE("measure records") {
  const std::string text = R"({"type": "markov_digits", "base": 2, "digits": [0, 1],
    "transition": [[0.8, 0.2], ["3/10", "7/10"]], "initial": [0.6, 0.4]})";
  const auto spec = parse_measure(json::parse(text), text, "m.json", {});
  const auto& markov = std::get<MarkovDigits>(spec.kind);
  CHECK(markov.transition[0][0] == Rational(4, 5));
  CHECK(markov.transition[1][0] == Rational(3, 10));
  CHECK(markov.initial[1] == Rational(2, 5));

  const std::string planar = R"({"type": "bernoulli_digits", "base": 2, "dim": 2,
    "digits": [[0, 0], [1, 1]], "probs": [0.25, 0.75]})";
  const auto p = std::get<BernoulliDigits>(parse_measure(json::parse(planar), planar, "m.json", {}).kind);
  CHECK(p.dim == 2);
  CHECK(p.digits[1] == Digit{1, 1});
  CHECK(p.probs[0] == Rational(1, 4));

  const std::string ifs = R"({"type": "linear_ifs", "dim": 2, "maps": [
      {"ratio": 0.4, "angle": 0.5, "reflect": true, "translation": [0, 0]},
      {"ratio": 0.4, "translation": [0.6, 0.6]}], "weights": [0.5, 0.5]})";
  const auto l = std::get<LinearIFS>(parse_measure(json::parse(ifs), ifs, "m.json", {}).kind);
  CHECK(l.maps[0].reflect);
  CHECK(l.maps[0].angle == 0.5);
  CHECK(l.maps[1].translation(1) == 0.6);

  const std::string bad = R"({"type": "bernoulli_digits", "base": 2, "digits": [0, 2], "probs": [0.5, 0.5]})";
  CHECK_THROWS_AS(parse_measure(json::parse(bad), bad, "m.json", {}), ConfigError);
}

TEST_CASE("dim experiment on the Cantor measure") {
  const auto cfg = parse_config(R"({"experiment": "dim", "seed": 5, "output": "d.csv", "measure": )" + cantor_json() + "}");
  const auto result = run_experiment(cfg);
  REQUIRE(result.table.rows.size() == 1);
  const double estimate = std::stod(result.table.rows[0][2]);
  CHECK(std::abs(estimate - std::log(2.0) / std::log(3.0)) <= 0.02);
  const std::string csv = render_csv(cfg, result.table);
  CHECK(csv.rfind("# experiment: dim\n# seed: 5\n", 0) == 0);
  for (const char* knob : {"# measure: ", "# depth: 15", "# samples: 500"}) CHECK(csv.find(knob) != std::string::npos);
  CHECK(csv.find("depth,samples,estimate,stderr,lln_diagnostic,analytic\n") != std::string::npos);
}

TEST_CASE("scan rows, seeds and determinism across worker counts") {
  const std::string text = R"({"experiment": "scan", "seed": 11, "output": "s.csv",
    "measure": {"type": "product",
      "first": {"type": "bernoulli_digits", "base": 2, "digits": [0, 1], "probs": [0.9, 0.1]},
      "second": {"type": "bernoulli_digits", "base": 3, "digits": [0, 2], "probs": [0.9, 0.1]}},
    "q": 4, "N": 3, "samples": 3})";
  const auto cfg = parse_config(text);
  set_worker_count(1);
  const auto one = run_experiment(cfg);
  set_worker_count(3);
  const auto three = run_experiment(cfg);
  set_worker_count(0);
  CHECK(render_csv(cfg, one.table) == render_csv(cfg, three.table));
  REQUIRE(one.table.rows.size() == 22);
  for (std::size_t k = 0; k < 20; ++k) {
    CHECK(one.table.rows[k][0] == "slope");
    CHECK(one.table.rows[k][7] == std::to_string(derive_seed(11, k)));
    CHECK(one.table.rows[k][8] == "x2x3-chain");
  }
  CHECK(one.table.rows[0][1] == "-2");
  CHECK(one.table.rows[19][1] == "2");
  CHECK(one.table.rows[20][0] == "axis_x");
  CHECK(one.table.rows[21][0] == "axis_y");
  CHECK(one.table.rows[21][1].empty());
  CHECK(one.summary.contains("max_slope_estimate"));
}

TEST_CASE("chain, convolution, grid and lift experiments") {
  const auto chain = run_experiment(parse_config(
      R"({"experiment": "cpchain", "seed": 2, "output": "c.csv", "steps": 500, "every": 5, "measure": )" + cantor_json() + "}"));
  CHECK(chain.table.rows.size() == 100);
  CHECK(chain.summary["chain_dimension"].get<double>() == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-12));
  for (const auto& row : chain.table.rows) CHECK((row[1] == "0" || row[1] == "2"));

  const auto x2x3 = run_experiment(parse_config(R"({"experiment": "cpchain", "seed": 2, "output": "c.csv", "steps": 200,
    "x2x3": {"mu": {"type": "bernoulli_digits", "base": 2, "digits": [0, 1], "probs": [0.5, 0.5]},
             "nu": {"type": "bernoulli_digits", "base": 3, "digits": [0, 1, 2], "probs": ["1/3", "1/3", "1/3"]},
             "w0": 0.5}})"));
  REQUIRE(x2x3.table.columns == std::vector<std::string>{"step", "chosen_child", "log_mass", "w"});
  double w = 0.5;
  for (const auto& row : x2x3.table.rows) {
    CHECK(std::stod(row[3]) == doctest::Approx(w).epsilon(1e-5));
    w = rw_next(w);
  }

  const auto conv = run_experiment(parse_config(
      R"({"experiment": "convolve", "seed": 0, "output": "v.csv", "level": 8, "measure": )" + cantor_json() + "}"));
  REQUIRE(conv.table.rows.size() == 3);
  CHECK(std::stod(conv.table.rows[0][1]) == doctest::Approx(std::log(2.0) / std::log(3.0)).epsilon(1e-5));
  CHECK(conv.table.rows[0][3] == "256");
  CHECK(conv.summary["nondecreasing"].get<bool>());

  const auto grid = run_experiment(parse_config(R"({"experiment": "bc-grid", "seed": 0, "output": "b.csv", "blocks": [4, 8]})"));
  REQUIRE(grid.table.rows.size() == 10);
  for (std::size_t b = 0; b < 2; ++b) {
    for (std::size_t i = 1; i < 5; ++i)
      CHECK(std::stod(grid.table.rows[5 * b + i][4]) > std::stod(grid.table.rows[5 * b + i - 1][4]));
  }
  CHECK(std::stod(grid.table.rows[9][4]) >= 0.97);

  const auto lift = run_experiment(parse_config(R"({"experiment": "lift-check", "seed": 0, "output": "l.csv",
    "map": {"type": "coding", "base": 2, "dim": 2}, "depth": 4})"));
  CHECK(lift.table.rows.size() == 5);
  CHECK(lift.summary["morphism"].get<bool>());
  CHECK(lift.summary["containment"].get<bool>());
  CHECK(lift.summary["C_mult"].get<double>() == faithfulness_check(fracproj::lift(coding_map(2, 2), 4), 4).C_mult);
  CHECK(lift.table.rows[4][4] == "256");
}

TEST_CASE("command line") {
  fs::remove_all(kScratch);
  const fs::path config = kScratch / "dim.json";
  const fs::path out = kScratch / "out" / "dim.csv";
  write_file(config, R"({"experiment": "dim", "seed": 9, "output": ")" + out.string() +
                         R"(", "depth": 10, "samples": 50, "measure": )" + cantor_json() + "}");
  CHECK(invoke({"validate", config.string()}) == 0);
  CHECK(invoke({"--workers", "2", "run", config.string()}) == 0);
  const std::string first = read_file(out);
  CHECK(invoke({"run", config.string()}) == 0);
  CHECK(read_file(out) == first);
  CHECK(split(data_rows(first).at(0)).size() == 6);

  const auto manifest = json::parse(read_file(out.string() + ".manifest.json"));
  CHECK(manifest["seed"] == 9);
  CHECK(manifest["config"]["depth"] == 10);
  CHECK(manifest["rows"] == 1);
  CHECK(manifest.contains("wall_seconds"));
  for (const char* key : {"compiler", "eigen", "boost"}) CHECK(manifest["versions"].contains(key));

  write_file(kScratch / "broken.json", "{\"experiment\": \"dim\",\n \"seed\": 1,\n");
  std::string message;
  CHECK(invoke({"run", (kScratch / "broken.json").string()}, &message) == 2);
  CHECK(message.find("broken.json:3:") != std::string::npos);
  CHECK(invoke({"validate", (kScratch / "missing.json").string()}) == 2);
  CHECK(invoke({"frobnicate"}) == 2);
  CHECK(invoke({"schema"}, &message) == 0);
  CHECK(message == schema_text());

  // output path names an existing directory
  fs::create_directories(kScratch / "taken");
  write_file(kScratch / "clash.json", R"({"experiment": "dim", "seed": 9, "output": ")" + (kScratch / "taken").string() +
                                          R"(", "depth": 4, "samples": 5, "measure": )" + cantor_json() + "}");
  CHECK(invoke({"run", (kScratch / "clash.json").string()}, &message) == 3);
  CHECK(message.rfind("runtime error:", 0) == 0);
}
