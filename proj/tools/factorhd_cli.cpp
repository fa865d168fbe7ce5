// factorhd: benchmark runner for the FactorHD encoder/factorizer and the
// resonator / class-instance baselines.
//
// Exit status: 0 success, 1 usage error, 2 runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "factorhd/bench.hpp"
#include "factorhd/codebook.hpp"
#include "factorhd/error.hpp"

namespace {

using factorhd::Error;
using factorhd::ErrorCode;
using namespace factorhd::bench;

struct GlobalOptions {
  std::size_t dim = 1000;
  std::size_t classes = 3;
  std::vector<std::size_t> branching;
  std::size_t objects = 1;
  std::size_t trials = 1024;
  std::size_t batch = 512;
  std::uint64_t seed = 0;
  std::string model = "factorhd";
  double th = 0.0;
  bool th_auto = false;
  bool halve_dim = false;
  std::string out;
  std::string format = "csv";
  std::string codebook_mode = "batch";
  std::size_t max_iterations = 200;
  std::size_t max_objects = 16;
  std::size_t threads = 0;
  bool hint = false;
  std::string acceptance = "rescan";
  std::vector<double> th_values;
  std::vector<std::size_t> m_values{16, 64, 256};
  std::string file;
};

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig make_config(const GlobalOptions& o) {
  if (o.branching.empty()) {
    throw UsageError("--branching is required");
  }
  ExperimentConfig cfg;
  cfg.model = parse_model(o.model);
  cfg.dim = o.dim;
  cfg.num_classes = o.classes;
  cfg.branching = o.branching;
  cfg.num_objects = o.objects;
  cfg.trials = o.trials;
  cfg.batch_size = o.batch;
  cfg.seed = factorhd::Seed{o.seed};
  cfg.dimension_halving = o.halve_dim;
  cfg.codebook_mode = parse_codebook_mode(o.codebook_mode);
  cfg.resonator_max_iterations = o.max_iterations;
  cfg.max_objects = o.max_objects;
  cfg.threads = o.threads;
  cfg.attach_object_hint = o.hint;
  cfg.acceptance = o.acceptance == "in-order"     ? factorhd::Acceptance::in_order
                    : o.acceptance == "best-first" ? factorhd::Acceptance::best_first
                                                   : factorhd::Acceptance::rescan;
  if (o.th > 0.0 && !o.th_auto) {
    cfg.threshold = factorhd::ThresholdConfig::fixed(o.th);
  } else {
    cfg.threshold = factorhd::ThresholdConfig::automatic(std::max<std::size_t>(o.objects, 1));
  }
  return cfg;
}

// Writes to --out when given, otherwise stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_) {
        throw Error(ErrorCode::invalid_argument, "cannot open " + path + " for writing");
      }
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void run_rep(const GlobalOptions& o, ExperimentConfig cfg) {
  std::vector<TrialRecord> records;
  const ResultTable table = run_experiment(cfg, &records);
  Sink sink(o.out);
  if (o.format == "jsonl") {
    write_trials_jsonl(sink.stream(), cfg, records);
  } else {
    write_csv(sink.stream(), {table});
  }
}

std::vector<double> default_th_values() {
  std::vector<double> v;
  for (int k = 0; k <= 12; ++k) {
    v.push_back(0.02 + 0.005 * k);
  }
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FactorHD factorization benchmarks"};
  app.require_subcommand(1);
  GlobalOptions o;

  app.add_option("--dim", o.dim, "Hypervector dimension D");
  app.add_option("--classes", o.classes, "Number of classes F");
  app.add_option("--branching", o.branching, "Items per subclass level, e.g. 256,10")
      ->delimiter(',');
  app.add_option("--objects", o.objects, "Objects per target N");
  app.add_option("--trials", o.trials, "Factorization trials");
  app.add_option("--batch", o.batch, "Trials per codebook batch");
  app.add_option("--seed", o.seed, "Base seed");
  app.add_option("--model", o.model, "factorhd | ci | resonator")
      ->check(CLI::IsMember({"factorhd", "ci", "resonator"}));
  auto* th = app.add_option("--th", o.th, "Fixed similarity threshold in (0,1)");
  app.add_flag("--th-auto", o.th_auto, "Threshold from the fitted TH* formula")->excludes(th);
  app.add_flag("--halve-dim", o.halve_dim, "Give FactorHD half the dimension (storage parity)");
  app.add_option("--out", o.out, "Output path (default stdout)");
  app.add_option("--format", o.format, "csv | jsonl")->check(CLI::IsMember({"csv", "jsonl"}));
  app.add_option("--codebook", o.codebook_mode, "Codebook reuse: batch | trial | shared")
      ->check(CLI::IsMember({"batch", "trial", "shared"}));
  app.add_option("--max-iterations", o.max_iterations, "Resonator sweep cap");
  app.add_option("--max-objects", o.max_objects, "Cap on objects decoded per target");
  app.add_option("--threads", o.threads, "Worker threads (0 = all cores)");
  app.add_option("--acceptance", o.acceptance, "Multi-object acceptance: rescan | best-first | in-order")
      ->check(CLI::IsMember({"rescan", "best-first", "in-order"}));
  app.add_flag("--hint-objects", o.hint, "Pass the true object count to the factorizer");

  auto* rep1 = app.add_subcommand("rep1", "Single object, one subclass level");
  auto* rep2 = app.add_subcommand("rep2", "Single object, several subclass levels");
  auto* rep3 = app.add_subcommand("rep3", "Several objects");
  auto* sweep = app.add_subcommand("sweep-th", "Accuracy across thresholds (multi-object)");
  sweep->add_option("--th-values", o.th_values, "Thresholds to sweep (comma list)")->delimiter(',');
  auto* scaling = app.add_subcommand("scaling", "Cost against codebook size M");
  scaling->add_option("--m-values", o.m_values, "Codebook sizes (comma list)")->delimiter(',');
  auto* codebook = app.add_subcommand("codebook", "Codebook files");
  codebook->require_subcommand(1);
  auto* gen = codebook->add_subcommand("gen", "Generate and save a hierarchy");
  gen->add_option("--file", o.file, "Output codebook path")->required();
  auto* inspect = codebook->add_subcommand("inspect", "Print a codebook header");
  inspect->add_option("file", o.file, "Codebook path")->required();
  for (auto* sub : {rep1, rep2, rep3, sweep, scaling, codebook}) {
    sub->fallthrough();
  }
  gen->fallthrough();
  inspect->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*rep1 || *rep2) {
      ExperimentConfig cfg = make_config(o);
      if (*rep1 && cfg.branching.size() != 1) {
        throw UsageError("rep1 takes a single branching level");
      }
      cfg.num_objects = 1;
      run_rep(o, cfg);
    } else if (*rep3) {
      if (!app.get_option("--objects")->count()) {
        o.objects = 2;
      }
      ExperimentConfig cfg = make_config(o);
      cfg.multi = true;
      run_rep(o, cfg);
    } else if (*sweep) {
      if (!app.get_option("--objects")->count()) {
        o.objects = 3;
      }
      ExperimentConfig cfg = make_config(o);
      const auto values = o.th_values.empty() ? default_th_values() : o.th_values;
      const SweepResult result = sweep_threshold(cfg, values);
      Sink sink(o.out);
      write_sweep_csv(sink.stream(), result);
    } else if (*scaling) {
      if (o.branching.empty()) {
        o.branching = {o.m_values.empty() ? 16 : o.m_values.front()};
      }
      ExperimentConfig cfg = make_config(o);
      const ScalingResult result = scaling_study(cfg, o.m_values);
      Sink sink(o.out);
      write_scaling_csv(sink.stream(), result);
    } else if (*gen) {
      if (o.branching.empty()) {
        throw UsageError("--branching is required");
      }
      const auto h = factorhd::Hierarchy::generate(o.dim, o.classes, o.branching,
                                                   factorhd::Seed{o.seed});
      h.save_file(o.file);
      std::cout << "wrote " << h.total_vectors() << " vectors to " << o.file << '\n';
    } else if (*inspect) {
      const auto h = factorhd::Hierarchy::load_file(o.file);
      std::cout << "dim " << h.dim() << "\nclasses " << h.num_classes() << "\nlevels "
                << h.levels() << "\nbranching";
      for (auto m : h.branching()) {
        std::cout << ' ' << m;
      }
      std::cout << "\nseed " << h.seed().value << "\nvectors " << h.total_vectors() << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
