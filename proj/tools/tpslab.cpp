// tpslab: run experiments, generate instances, check invariants, export reports.
//
// Exit codes: 0 ok, 1 invariant/experiment failure, 2 usage error.

#include <tpslab/tpslab.hpp>

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace tpslab;

namespace {

constexpr int kOk = 0;
constexpr int kFailure = 1;
constexpr int kUsage = 2;

std::vector<int> parse_dims(const std::string& text) {
  std::vector<int> dims;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    int d = 0;
    try {
      d = std::stoi(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw FormatError("--dims", "bad entry '" + item + "'");
    dims.push_back(d);
  }
  return dims;
}

int cmd_run(const std::string& config_path, std::optional<std::uint64_t> seed,
            const std::string& output) {
  const Json doc = read_json_file(config_path);
  ExperimentConfig cfg = parse_config(doc, fs::path(config_path).parent_path());
  if (seed) cfg.seed = *seed;
  if (!output.empty()) cfg.output = output;
  if (cfg.output.empty()) cfg.output = "out/" + cfg.experiment;
  const ExperimentReport rep = run(cfg);
  for (const auto& path : write_report(rep, cfg.output)) std::cout << "wrote " << path << "\n";
  std::cout << cfg.experiment << ": " << (rep.passed ? "ok" : "FAILED") << "\n";
  return rep.passed ? kOk : kFailure;
}

int cmd_gen(const std::string& kind, const std::string& dims_text, std::uint64_t seed, int k,
            const std::string& out_dir) {
  const TpsShape shape(parse_dims(dims_text));
  const Json inst = generate(kind, shape, seed, k);
  fs::create_directories(out_dir);
  std::string dims_tag = dims_text;
  std::replace(dims_tag.begin(), dims_tag.end(), ',', 'x');
  const auto path = (fs::path(out_dir) / (kind + "_" + dims_tag + "_seed" + std::to_string(seed) + ".json")).string();
  write_text_file(path, inst.dump(2) + "\n");
  std::cout << "wrote " << path << "\n";
  return kOk;
}

int cmd_check(std::uint64_t seed, bool inject_fault, const std::string& csv) {
  CheckOptions opt;
  opt.seed = seed;
  opt.inject_fault = inject_fault;
  const auto results = check(opt);
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::printf("%-4s %-12s %-68s %12.3e %s %-9.1e %6.2fs%s%s\n", r.passed ? "ok" : "FAIL",
                r.module.c_str(), r.name.c_str(), r.value, r.upper ? "<=" : ">=", r.bound,
                r.seconds, r.error.empty() ? "" : "  error: ", r.error.c_str());
    failed += r.passed ? 0 : 1;
  }
  std::printf("%zu invariants, %zu failed\n", results.size(), failed);
  if (!csv.empty()) {
    const fs::path p(csv);
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
    write_text_file(csv, to_csv(summary_table(results)));
  }
  return failed == 0 ? kOk : kFailure;
}

// Exports the tables of JSON reports as <dir>/<report stem>_<table>.csv.
int cmd_report(std::vector<std::string> inputs, const std::string& csv_dir) {
  if (inputs.empty()) {
    if (!fs::is_directory(csv_dir)) throw FormatError("--csv", "not a directory: " + csv_dir);
    for (const auto& entry : fs::directory_iterator(csv_dir)) {
      if (entry.path().extension() == ".json") inputs.push_back(entry.path().string());
    }
    std::sort(inputs.begin(), inputs.end());
  }
  fs::create_directories(csv_dir);
  std::size_t exported = 0;
  for (const auto& input : inputs) {
    const Json report = read_json_file(input);
    if (!report.contains("tables")) continue;
    const std::string stem = fs::path(input).stem().string();
    for (const auto& [name, t] : report.at("tables").items()) {
      const auto path = (fs::path(csv_dir) / (stem + "_" + name + ".csv")).string();
      write_text_file(path, to_csv(table_from_json(t, input + ".tables." + name)));
      std::cout << "wrote " << path << "\n";
      ++exported;
    }
  }
  if (exported == 0) {
    std::cerr << "no report tables found\n";
    return kFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tpslab: tensor product structure lab"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "RNG seed (overrides config)");

  auto* run_cmd = app.add_subcommand("run", "run an experiment from a JSON config");
  run_cmd->fallthrough();
  std::string config_path, output;
  run_cmd->add_option("-c,--config", config_path, "config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("-o,--output", output, "output path prefix (overrides config)");

  auto* gen_cmd = app.add_subcommand("gen", "generate an instance file");
  gen_cmd->fallthrough();
  std::string kind, dims = "2,2", out_dir = ".";
  int k = 2;
  gen_cmd->add_option("--kind", kind, "random-H | kronecker-H | scrambled-klocal | random-state")
      ->required()
      ->check(CLI::IsMember({"random-H", "kronecker-H", "scrambled-klocal", "random-state"}));
  gen_cmd->add_option("--dims", dims, "comma-separated factor dimensions");
  gen_cmd->add_option("--k", k, "locality for scrambled-klocal");
  gen_cmd->add_option("-o,--out", out_dir, "output directory");

  auto* check_cmd = app.add_subcommand("check", "run the invariant suite");
  check_cmd->fallthrough();
  bool inject_fault = false;
  std::string check_csv;
  check_cmd->add_flag("--inject-fault", inject_fault, "perturb a TPS matrix off unitary by 1e-3");
  check_cmd->add_option("--csv", check_csv, "write the summary table as CSV");

  auto* report_cmd = app.add_subcommand("report", "export report tables as CSV");
  report_cmd->fallthrough();
  std::vector<std::string> inputs;
  std::string csv_dir;
  report_cmd->add_option("inputs", inputs, "JSON reports (default: every *.json in the CSV dir)");
  report_cmd->add_option("--csv", csv_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*run_cmd) return cmd_run(config_path, seed, output);
    if (*gen_cmd) return cmd_gen(kind, dims, seed.value_or(0), k, out_dir);
    if (*check_cmd) return cmd_check(seed.value_or(0), inject_fault, check_csv);
    if (*report_cmd) return cmd_report(inputs, csv_dir);
  } catch (const FormatError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ConditionError& e) {
    std::cerr << "condition failure: " << e.what() << "\n";
    return kFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFailure;
  }
  return kUsage;
}
