// mlbalance command-line driver: info, run and batch.

#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mlbalance/algorithms.hpp"
#include "mlbalance/arff.hpp"
#include "mlbalance/batch.hpp"
#include "mlbalance/errors.hpp"
#include "mlbalance/metrics.hpp"

namespace fs = std::filesystem;
using namespace mlbalance;

namespace {

enum ExitCode : int {
  kOk = 0,
  kLoad = 2,
  kMetric = 3,
  kAlgorithm = 4,
  kPartial = 5,
  kUsage = 64,
};

struct SourceArgs {
  std::string arff;
  std::optional<std::string> xml;
  std::optional<int> meka;

  void attach(CLI::App& cmd) {
    cmd.add_option("arff", arff, "input ARFF file")->required();
    auto* x = cmd.add_option("--xml", xml, "MULAN label file (defaults to a sibling .xml)");
    cmd.add_option("-C", meka, "MEKA label count (positive: leading attributes, negative: trailing)")
        ->excludes(x);
  }

  DatasetSource source() const {
    DatasetSource s{arff, std::nullopt, meka};
    if (xml) s.xml = fs::path(*xml);
    return s;
  }

  std::string baseName() const { return fs::path(arff).stem().string(); }
};

struct ParamArgs {
  std::optional<double> p;
  std::optional<std::size_t> k;
  std::optional<double> threshold;

  void attach(CLI::App& cmd) {
    cmd.add_option("--p", p, "percentage P");
    cmd.add_option("--k", k, "number of neighbors");
    cmd.add_option("--threshold", threshold, "label-difference threshold HT");
  }

  AlgorithmParams params() const { return {p, k, threshold}; }
};

struct ExecArgs {
  std::uint64_t seed = 1;
  std::optional<unsigned> threads;
  std::string outputDir;

  void attach(CLI::App& cmd) {
    cmd.add_option("--seed", seed, "master seed");
    cmd.add_option("--threads", threads, "cache-build workers (0 = all cores; default 1 or $MLBALANCE_THREADS)");
    cmd.add_option("-o,--output", outputDir, "output directory")->required();
  }
};

std::optional<Dataset> load(const SourceArgs& args, int& code) {
  try {
    return readDataset(args.source());
  } catch (const Error& e) {
    std::cerr << "error: cannot load '" << args.arff << "': " << e.what() << '\n';
    code = kLoad;
    return std::nullopt;
  }
}

unsigned effectiveThreads(const std::optional<unsigned>& requested) {
  unsigned threads = 1;
  if (requested) {
    threads = *requested;
  } else if (const char* env = std::getenv("MLBALANCE_THREADS"); env && *env) {
    try {
      threads = static_cast<unsigned>(std::stoul(env));
    } catch (const std::exception&) {
      std::cerr << "warning: ignoring MLBALANCE_THREADS='" << env << "'\n";
    }
  }
  const unsigned n = configureParallel(threads);
  if (n > 1) {
    std::cout << "Parallel computing enabled on " << n << " cores\n";
  } else {
    std::cout << "Parallel computing disabled (1 core)\n";
  }
  return n;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(7) << v;
  return s.str();
}

void printSummary(const char* tag, const Dataset& data) {
  std::cout << tag << ": num.instances " << data.size();
  try {
    const auto profile = computeProfile(data);
    std::cout << ", MeanIR " << fmt(profile.meanIR) << ", SCUMBLE " << fmt(profile.scumble);
  } catch (const MetricError& e) {
    std::cout << ", metrics unavailable (" << e.what() << ")";
  }
  std::cout << '\n';
}

int infoCommand(const SourceArgs& src, bool json) {
  int code = kOk;
  auto data = load(src, code);
  if (!data) return code;

  ImbalanceProfile profile;
  try {
    profile = computeProfile(*data);
  } catch (const MetricError& e) {
    if (json) {
      std::cout << nlohmann::json{{"num_instances", data->size()}, {"error", e.what()}}.dump(2) << '\n';
    } else {
      std::cout << "num.instances " << data->size() << '\n';
    }
    std::cerr << "error: " << e.what() << '\n';
    return kMetric;
  }

  if (json) {
    nlohmann::json labels = nlohmann::json::array();
    for (std::size_t l = 0; l < data->labelCount(); ++l) {
      nlohmann::json irlbl = nullptr;
      if (profile.irlbl[l]) irlbl = *profile.irlbl[l];
      labels.push_back({{"name", data->labelNames()[l]},
                        {"count", profile.counts[l]},
                        {"irlbl", irlbl},
                        {"minority", profile.isMinority(l)}});
    }
    nlohmann::json out{{"name", data->name()},
                       {"num_instances", data->size()},
                       {"num_features", data->featureCount()},
                       {"num_labels", data->labelCount()},
                       {"meanir", profile.meanIR},
                       {"scumble", profile.scumble},
                       {"labels", labels}};
    std::cout << out.dump(2) << '\n';
    return kOk;
  }

  std::cout << "name           " << data->name() << '\n'
            << "num.instances  " << data->size() << '\n'
            << "num.features   " << data->featureCount() << '\n'
            << "num.labels     " << data->labelCount() << '\n'
            << "MeanIR         " << fmt(profile.meanIR) << '\n'
            << "SCUMBLE        " << fmt(profile.scumble) << '\n'
            << '\n';
  std::size_t width = 5;
  for (const auto& name : data->labelNames()) width = std::max(width, name.size());
  const int w = static_cast<int>(width) + 2;
  std::cout << std::left << std::setw(w) << "label" << std::setw(8) << "count" << "IRLbl\n";
  for (std::size_t l = 0; l < data->labelCount(); ++l) {
    std::cout << std::left << std::setw(w) << data->labelNames()[l] << std::setw(8) << profile.counts[l]
              << (profile.irlbl[l] ? fmt(*profile.irlbl[l]) : std::string("NA"))
              << (profile.isMinority(l) ? "  minority" : "") << '\n';
  }
  return kOk;
}

std::optional<Algorithm> lookup(const std::string& name) {
  auto alg = parseAlgorithm(name);
  if (!alg) {
    std::cerr << "error: unknown algorithm '" << name << "'; expected one of";
    for (auto a : kAllAlgorithms) std::cerr << ' ' << algorithmName(a);
    std::cerr << '\n';
  }
  return alg;
}

int runCommand(const std::string& algName, const SourceArgs& src, const ParamArgs& par,
               const ExecArgs& exec) {
  const auto alg = lookup(algName);
  if (!alg) return kUsage;
  AlgorithmSpec spec;
  try {
    spec = makeSpec(*alg, par.params());
  } catch (const SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  }

  int code = kOk;
  auto data = load(src, code);
  if (!data) return code;

  BatchOptions options;
  options.seed = exec.seed;
  options.threads = effectiveThreads(exec.threads);
  options.outputDir = exec.outputDir;
  options.baseName = src.baseName();
  options.keepResults = true;
  options.log = &std::cout;
  options.progressBar = true;

  printSummary("before", *data);
  fs::create_directories(options.outputDir);
  const auto report = runBatch(*data, std::span(&spec, 1), options);
  const auto& entry = report.entries.front();
  if (!entry.ok) {
    std::cerr << "error: " << entry.algorithm << ": " << entry.error << '\n';
    return kAlgorithm;
  }
  printSummary("after", *entry.result);
  std::cout << "seconds " << entry.seconds << '\n' << "output " << entry.output.string() << '\n';
  return kOk;
}

int batchCommand(const std::vector<std::string>& names, const SourceArgs& src, const ParamArgs& par,
                 const ExecArgs& exec, const std::optional<std::string>& cacheFile) {
  std::vector<AlgorithmSpec> specs;
  for (const auto& name : names) {
    const auto alg = lookup(name);
    if (!alg) return kUsage;
    try {
      specs.push_back(makeSpec(*alg, par.params(), false));
    } catch (const SpecError& e) {
      std::cerr << "error: " << name << ": " << e.what() << '\n';
      return kUsage;
    }
  }
  if (specs.empty()) {
    std::cerr << "error: no algorithms given\n";
    return kUsage;
  }

  int code = kOk;
  auto data = load(src, code);
  if (!data) return code;

  BatchOptions options;
  options.seed = exec.seed;
  options.threads = effectiveThreads(exec.threads);
  options.outputDir = exec.outputDir;
  options.baseName = src.baseName();
  if (cacheFile) options.cacheFile = fs::path(*cacheFile);
  options.log = &std::cout;
  options.progressBar = true;

  fs::create_directories(options.outputDir);
  const auto report = runBatch(*data, specs, options);
  std::cout << '\n';
  printReport(std::cout, report);
  for (const auto& e : report.entries) {
    if (!e.ok) std::cerr << "error: " << e.algorithm << ": " << e.error << '\n';
  }
  return report.anyFailed() ? kPartial : kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resampling of imbalanced multilabel datasets", "mlbalance"};
  app.require_subcommand(1);

  SourceArgs infoSrc;
  bool json = false;
  auto* info = app.add_subcommand("info", "print imbalance metrics");
  infoSrc.attach(*info);
  info->add_flag("--json", json, "machine-readable output");

  std::string algName;
  SourceArgs runSrc;
  ParamArgs runPar;
  ExecArgs runExec;
  auto* run = app.add_subcommand("run", "apply one algorithm");
  run->add_option("algorithm", algName, "algorithm name")->required();
  runSrc.attach(*run);
  runPar.attach(*run);
  runExec.attach(*run);

  std::vector<std::string> algNames;
  SourceArgs batchSrc;
  ParamArgs batchPar;
  ExecArgs batchExec;
  std::optional<std::string> cacheFile;
  auto* batch = app.add_subcommand("batch", "apply several algorithms sharing one neighbor cache");
  batchSrc.attach(*batch);
  batch->add_option("-a,--algorithms", algNames, "comma-separated algorithm names")
      ->required()
      ->delimiter(',');
  batchPar.attach(*batch);
  batchExec.attach(*batch);
  batch->add_option("--cache-file", cacheFile, "load the neighbor cache from, or save it to, this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*info) return infoCommand(infoSrc, json);
    if (*run) return runCommand(algName, runSrc, runPar, runExec);
    return batchCommand(algNames, batchSrc, batchPar, batchExec, cacheFile);
  } catch (const MetricError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kMetric;
  } catch (const AlgorithmError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAlgorithm;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kAlgorithm;
  }
}
