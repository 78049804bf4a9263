// Command-line entry point: verify, experiment, volume-radius, sample.
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "conehull/body.hpp"
#include "conehull/error.hpp"
#include "conehull/experiment.hpp"
#include "conehull/sampling.hpp"
#include "conehull/verification.hpp"

namespace {

constexpr int kExitConfig = 2;

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw conehull::Error(conehull::ErrorKind::ConfigError, "cannot read " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw conehull::Error(conehull::ErrorKind::ConfigError, path + ": " + e.what());
  }
}

// Inline JSON or a path to a JSON file.
nlohmann::json json_argument(const std::string& text) {
  if (!text.empty() && text.front() == '{') {
    try {
      return nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
      throw conehull::Error(conehull::ErrorKind::ConfigError, e.what());
    }
  }
  return read_json(text);
}

int run_verify(const std::string& config_path, std::optional<std::uint64_t> seed, std::optional<std::size_t> samples,
               std::optional<double> psi2_constant, std::optional<unsigned> workers, const std::string& out_path) {
  using namespace conehull;
  VerificationConfig config = config_path.empty() ? VerificationConfig{} : VerificationConfig::from_json(read_json(config_path));
  if (seed) config.master_seed = *seed;
  if (samples) config.sample_count = *samples;
  if (psi2_constant) config.psi2_constant = *psi2_constant;
  if (workers) config.workers = *workers;
  // Round trip so command-line overrides get the same validation as files.
  nlohmann::json checked = config.to_json();
  checked["workers"] = config.workers;
  config = VerificationConfig::from_json(checked);
  const VerificationReport report = run_verification_suite(config);
  const nlohmann::json doc = report.to_json();
  if (out_path.empty()) {
    std::cout << doc.dump(2) << '\n';
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot open output " + out_path);
    out << doc.dump(2) << '\n';
  }
  for (const auto& c : report.checks)
    if (c.status != "pass")
      std::cerr << c.status << ": " << c.check << " body=" << c.body << " n=" << c.n << " empirical=" << c.empirical
                << " bound=" << c.bound << '\n';
  std::cerr << "checks: " << report.checks.size() << ", hard failures: " << report.hard_failures()
            << ", statistical failures: " << report.statistical_failures() << '\n';
  return report.exit_code();
}

int run_experiment(const std::string& config_path, bool volume_radius, std::optional<unsigned> workers,
                   const std::string& csv, const std::string& json) {
  using namespace conehull;
  nlohmann::json doc = read_json(config_path);
  if (volume_radius) {
    doc["experiment"] = "volume_radius";
  } else if (doc.value("experiment", "unconditional") == "volume_radius") {
    throw Error(ErrorKind::ConfigError, "use the volume-radius subcommand for volume_radius configs");
  }
  ExperimentConfig config = ExperimentConfig::from_json(doc);
  if (workers) config.workers = *workers;
  if (!csv.empty()) config.csv_path = csv;
  if (!json.empty()) config.json_path = json;
  return run_configured(config, std::cerr);
}

int run_sample(const std::string& body_text, const std::string& dist, std::size_t count, std::uint64_t seed,
               std::uint64_t stream, const std::string& out_path) {
  using namespace conehull;
  const BodySpec body = body_from_json(json_argument(body_text));
  RandomStream rng(seed, stream);
  const SampleBatch batch =
      dist == "cone" ? sample_cone_boundary(body, count, rng) : sample_uniform(body, count, rng);
  if (out_path.empty() || out_path == "-") {
    write_batch_csv(batch, std::cout);
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw Error(ErrorKind::ConfigError, "cannot open output " + out_path);
    write_batch_csv(batch, out);
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random symmetric convex hulls of cone-measure points: experiments and checks"};
  app.require_subcommand(1);

  auto* verify = app.add_subcommand("verify", "run the invariant checks and print a JSON report");
  std::string verify_config, verify_out;
  std::optional<std::uint64_t> verify_seed;
  std::optional<std::size_t> verify_samples;
  std::optional<double> psi2_constant;
  std::optional<unsigned> verify_workers;
  verify->add_option("--config", verify_config, "JSON config file")->check(CLI::ExistingFile);
  verify->add_option("--seed", verify_seed, "master seed");
  verify->add_option("--samples", verify_samples, "sample count of the statistical checks");
  verify->add_option("--psi2-constant", psi2_constant, "constant of the psi_2 bound (negative controls)");
  verify->add_option("--workers", verify_workers, "worker threads (0 = all cores)");
  verify->add_option("--out", verify_out, "write the report here instead of stdout");

  auto* experiment = app.add_subcommand("experiment", "run an unconditional or general experiment");
  auto* volume = app.add_subcommand("volume-radius", "run the volume radius and coupling check");
  std::string config_path, csv, json;
  std::optional<unsigned> workers;
  for (auto* sub : {experiment, volume}) {
    sub->add_option("--config", config_path, "JSON config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--workers", workers, "worker threads, overrides the config (0 = all cores)");
    sub->add_option("--csv", csv, "row output, overrides the config");
    sub->add_option("--json", json, "summary output, overrides the config");
  }

  auto* sample = app.add_subcommand("sample", "draw points and write them as CSV");
  std::string body_text, dist = "cone", sample_out;
  std::size_t count = 1000;
  std::uint64_t seed = 1, stream = 0;
  sample->add_option("--body", body_text, "body as inline JSON or a JSON file")->required();
  sample->add_option("--dist", dist, "cone or uniform")->check(CLI::IsMember({"cone", "uniform"}));
  sample->add_option("--count", count, "number of points")->check(CLI::PositiveNumber);
  sample->add_option("--seed", seed, "seed");
  sample->add_option("--stream", stream, "stream id");
  sample->add_option("--out", sample_out, "CSV output (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*verify) return run_verify(verify_config, verify_seed, verify_samples, psi2_constant, verify_workers, verify_out);
    if (*experiment) return run_experiment(config_path, false, workers, csv, json);
    if (*volume) return run_experiment(config_path, true, workers, csv, json);
    if (*sample) return run_sample(body_text, dist, count, seed, stream, sample_out);
  } catch (const conehull::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    const auto kind = e.kind();
    return kind == conehull::ErrorKind::ConfigError || kind == conehull::ErrorKind::InvalidArgument ? kExitConfig : 1;
  }
  return 0;
}
