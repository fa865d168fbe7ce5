#include "factorhd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "factorhd/baselines.hpp"
#include "factorhd/codebook.hpp"
#include "factorhd/encoder.hpp"
#include "factorhd/error.hpp"

namespace factorhd::bench {

namespace {

constexpr std::uint64_t kBatchCodebookStream = 0x1000'0000ULL;
constexpr std::uint64_t kTrialCodebookStream = 0x2000'0000ULL;
constexpr std::uint64_t kSampleStream = 0x3000'0000ULL;

using Clock = std::chrono::steady_clock;

std::string join_branching(const std::vector<std::size_t>& branching) {
  std::string s;
  for (std::size_t k = 0; k < branching.size(); ++k) {
    if (k > 0) {
      s += 'x';
    }
    s += std::to_string(branching[k]);
  }
  return s;
}

// Stable textual form for objects so decoded and true scenes compare as multisets.
std::vector<std::string> canonical(const std::vector<ObjectDescription>& objs) {
  std::vector<std::string> keys;
  keys.reserve(objs.size());
  for (const auto& o : objs) {
    keys.push_back(to_string(o));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

ObjectDescription sample_object(const Hierarchy& h, RandomStream& rng) {
  ObjectDescription obj;
  obj.assignments.reserve(h.num_classes());
  for (std::size_t c = 0; c < h.num_classes(); ++c) {
    ItemPath p{c, {}, false};
    for (auto m : h.branching()) {
      p.levels.push_back(static_cast<std::size_t>(rng.uniform(m)));
    }
    obj.assignments.push_back(std::move(p));
  }
  return obj;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

TrialRecord run_factorhd_trial(const ExperimentConfig& cfg, const Hierarchy& h,
                               RandomStream& rng) {
  TrialRecord rec;
  std::vector<ObjectDescription> truth;
  for (std::size_t k = 0; k < cfg.num_objects; ++k) {
    truth.push_back(sample_object(h, rng));
  }
  if (!cfg.uses_multi()) {
    const Hypervector target = encode_object(h, truth.front());
    const auto t0 = Clock::now();
    const SingleResult r = factorize_single(target, h);
    rec.wall_time_s = seconds_since(t0);
    rec.similarity_measurements = r.counters.similarity_measurements;
    rec.correct = true;
    for (const auto& d : r.classes) {
      rec.correct = rec.correct && d.path == truth.front().assignments[d.class_index];
    }
    rec.objects_decoded = 1;
    return rec;
  }
  const EncodedTarget target = encode_scene(h, truth, cfg.attach_object_hint);
  FactorizerOptions options;
  options.threshold = cfg.threshold;
  options.max_objects = cfg.max_objects;
  options.acceptance = cfg.acceptance;
  const auto t0 = Clock::now();
  const FactorizationResult r = factorize_multi(target, h, options);
  rec.wall_time_s = seconds_since(t0);
  rec.similarity_measurements = r.counters.similarity_measurements;
  rec.combinations_tested = r.counters.combinations_tested;
  rec.iterations = r.counters.loop_iterations;
  rec.objects_decoded = r.objects.size();
  std::vector<ObjectDescription> decoded;
  for (const auto& d : r.objects) {
    decoded.push_back(d.object);
  }
  rec.correct = canonical(decoded) == canonical(truth);
  return rec;
}

TrialRecord run_ci_trial(const ExperimentConfig&, const Hierarchy& h, RandomStream& rng) {
  TrialRecord rec;
  std::vector<std::size_t> truth(h.num_classes());
  for (auto& t : truth) {
    t = static_cast<std::size_t>(rng.uniform(h.branching().front()));
  }
  const CIEncoded enc = ci_encode(h, truth);
  const auto t0 = Clock::now();
  rec.correct = true;
  for (std::size_t c = 0; c < h.num_classes(); ++c) {
    rec.correct = ci_factorize(enc, h, c) == truth[c] && rec.correct;
  }
  rec.wall_time_s = seconds_since(t0);
  rec.similarity_measurements = h.num_classes() * h.branching().front();
  rec.objects_decoded = 1;
  return rec;
}

TrialRecord run_resonator_trial(const ExperimentConfig& cfg, const Hierarchy& h,
                                RandomStream& rng) {
  TrialRecord rec;
  std::vector<std::size_t> truth(h.num_classes());
  std::vector<Codebook> books;
  for (std::size_t c = 0; c < h.num_classes(); ++c) {
    books.push_back(h.level_items(c, 1));
    truth[c] = static_cast<std::size_t>(rng.uniform(books.back().size()));
  }
  Hypervector target = books[0][truth[0]];
  for (std::size_t c = 1; c < books.size(); ++c) {
    target = bind(target, books[c][truth[c]]);
  }
  const auto t0 = Clock::now();
  const ResonatorResult r = resonator_factorize(target, books, cfg.resonator_max_iterations);
  rec.wall_time_s = seconds_since(t0);
  rec.correct = r.indices == truth;
  rec.iterations = r.iterations;
  rec.similarity_measurements = r.similarity_measurements;
  rec.objects_decoded = 1;
  return rec;
}

// Runs fn(i) for i in [begin, end) on up to `threads` workers.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, std::size_t threads, Fn&& fn) {
  const std::size_t n = end - begin;
  const std::size_t workers = std::min(threads, n);
  if (workers <= 1) {
    for (std::size_t i = begin; i < end; ++i) {
      fn(i);
    }
    return;
  }
  std::atomic<std::size_t> next{begin};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next.fetch_add(1); i < end; i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
}

std::string fmt_double(double x) {
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

}  // namespace

const char* to_string(Model model) noexcept {
  switch (model) {
    case Model::factorhd: return "factorhd";
    case Model::ci: return "ci";
    case Model::resonator: return "resonator";
  }
  return "unknown";
}

const char* to_string(CodebookMode mode) noexcept {
  switch (mode) {
    case CodebookMode::per_batch: return "batch";
    case CodebookMode::per_trial: return "trial";
    case CodebookMode::shared: return "shared";
  }
  return "unknown";
}

Model parse_model(const std::string& name) {
  if (name == "factorhd") return Model::factorhd;
  if (name == "ci") return Model::ci;
  if (name == "resonator") return Model::resonator;
  throw Error(ErrorCode::invalid_argument, "unknown model '" + name + "'");
}

CodebookMode parse_codebook_mode(const std::string& name) {
  if (name == "batch") return CodebookMode::per_batch;
  if (name == "trial") return CodebookMode::per_trial;
  if (name == "shared") return CodebookMode::shared;
  throw Error(ErrorCode::invalid_argument, "unknown codebook mode '" + name + "'");
}

std::size_t ExperimentConfig::effective_dim() const noexcept {
  if (model == Model::factorhd && dimension_halving) {
    return dim / 2;
  }
  return dim;
}

void validate(const ExperimentConfig& cfg) {
  if (cfg.trials == 0 || cfg.batch_size == 0) {
    throw Error(ErrorCode::invalid_argument, "trials and batch size must be >= 1");
  }
  if (cfg.effective_dim() == 0) {
    throw Error(ErrorCode::invalid_dimension, "effective dimension is 0");
  }
  if (cfg.num_classes == 0 || cfg.num_objects == 0) {
    throw Error(ErrorCode::invalid_argument, "classes and objects must be >= 1");
  }
  if (cfg.branching.empty()) {
    throw Error(ErrorCode::invalid_shape, "branching needs at least one level");
  }
  if (cfg.model != Model::factorhd) {
    if (cfg.branching.size() != 1) {
      throw Error(ErrorCode::unsupported_configuration,
                  std::string(to_string(cfg.model)) + " supports a single subclass level only");
    }
    if (cfg.num_objects != 1 || cfg.multi) {
      throw Error(ErrorCode::unsupported_configuration,
                  std::string(to_string(cfg.model)) + " decodes single objects only");
    }
  }
  if (cfg.max_objects == 0) {
    throw Error(ErrorCode::invalid_argument, "max_objects must be >= 1");
  }
}

double ci95_half_width(double p, std::size_t n) {
  if (n == 0) {
    return 0.0;
  }
  return 1.96 * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ResultTable run_experiment(const ExperimentConfig& cfg, std::vector<TrialRecord>* records) {
  validate(cfg);
  const std::size_t dim = cfg.effective_dim();
  const std::size_t threads =
      cfg.threads != 0 ? cfg.threads : std::max(1U, std::thread::hardware_concurrency());

  std::vector<TrialRecord> trials(cfg.trials);
  auto make_hierarchy = [&](Seed s) {
    return Hierarchy::generate(dim, cfg.num_classes, cfg.branching, s);
  };
  auto run_trial = [&](const Hierarchy& h, std::size_t i) {
    RandomStream rng(derive(derive(cfg.seed, kSampleStream), i));
    TrialRecord rec;
    switch (cfg.model) {
      case Model::factorhd: rec = run_factorhd_trial(cfg, h, rng); break;
      case Model::ci: rec = run_ci_trial(cfg, h, rng); break;
      case Model::resonator: rec = run_resonator_trial(cfg, h, rng); break;
    }
    rec.trial_id = i;
    trials[i] = rec;
  };

  for (std::size_t begin = 0; begin < cfg.trials; begin += cfg.batch_size) {
    const std::size_t end = std::min(cfg.trials, begin + cfg.batch_size);
    if (cfg.codebook_mode == CodebookMode::per_trial) {
      parallel_for(begin, end, threads, [&](std::size_t i) {
        run_trial(make_hierarchy(derive(cfg.seed, kTrialCodebookStream + i)), i);
      });
      continue;
    }
    const std::size_t batch = cfg.codebook_mode == CodebookMode::shared ? 0 : begin / cfg.batch_size;
    const Hierarchy h = make_hierarchy(derive(cfg.seed, kBatchCodebookStream + batch));
    parallel_for(begin, end, threads, [&](std::size_t i) { run_trial(h, i); });
  }

  ResultTable table;
  table.config = cfg;
  table.trials = cfg.trials;
  std::vector<double> walls;
  walls.reserve(trials.size());
  double sim_sum = 0.0;
  double comb_sum = 0.0;
  double iter_sum = 0.0;
  double wall_sum = 0.0;
  for (const auto& t : trials) {
    table.correct += t.correct ? 1 : 0;
    sim_sum += static_cast<double>(t.similarity_measurements);
    comb_sum += static_cast<double>(t.combinations_tested);
    iter_sum += static_cast<double>(t.iterations);
    wall_sum += t.wall_time_s;
    walls.push_back(t.wall_time_s);
  }
  const auto n = static_cast<double>(cfg.trials);
  table.accuracy = static_cast<double>(table.correct) / n;
  table.ci95 = ci95_half_width(table.accuracy, cfg.trials);
  table.mean_similarity_measurements = sim_sum / n;
  table.mean_combinations = comb_sum / n;
  table.mean_iterations = iter_sum / n;
  table.mean_wall_time_s = wall_sum / n;
  std::sort(walls.begin(), walls.end());
  const std::size_t mid = walls.size() / 2;
  table.median_wall_time_s =
      walls.size() % 2 == 1 ? walls[mid] : 0.5 * (walls[mid - 1] + walls[mid]);
  if (cfg.model == Model::factorhd && cfg.uses_multi()) {
    const std::size_t m = *std::max_element(cfg.branching.begin(), cfg.branching.end());
    table.threshold = cfg.threshold.resolve(
        cfg.num_classes, dim, m,
        cfg.attach_object_hint ? std::optional<std::size_t>(cfg.num_objects) : std::nullopt);
  }
  if (records != nullptr) {
    *records = std::move(trials);
  }
  return table;
}

SweepResult sweep_threshold(const ExperimentConfig& cfg, const std::vector<double>& th_values) {
  if (th_values.empty()) {
    throw Error(ErrorCode::empty_input, "threshold sweep needs at least one value");
  }
  if (cfg.model != Model::factorhd || cfg.num_objects < 2) {
    throw Error(ErrorCode::unsupported_configuration,
                "threshold sweeps need the factorhd model and at least two objects");
  }
  SweepResult out;
  bool first = true;
  for (double th : th_values) {
    ExperimentConfig c = cfg;
    c.threshold = ThresholdConfig::fixed(th);
    SweepRow row{th, run_experiment(c)};
    if (first || row.table.accuracy > out.best_accuracy ||
        (row.table.accuracy == out.best_accuracy && th < out.best_th)) {
      out.best_accuracy = row.table.accuracy;
      out.best_th = th;
      first = false;
    }
    out.rows.push_back(std::move(row));
  }
  const std::size_t m = *std::max_element(cfg.branching.begin(), cfg.branching.end());
  out.predicted_th = auto_threshold(cfg.num_objects, cfg.num_classes, cfg.effective_dim(), m);
  return out;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "slope fit needs two or more paired points");
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(y.size());
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

ScalingResult scaling_study(const ExperimentConfig& base_cfg,
                            const std::vector<std::size_t>& m_values) {
  if (base_cfg.model == Model::ci) {
    throw Error(ErrorCode::unsupported_configuration, "scaling study compares factorhd and resonator");
  }
  ScalingResult out;
  std::vector<double> xs;
  std::vector<double> ys;
  for (auto m : m_values) {
    ExperimentConfig c = base_cfg;
    c.branching = {m};
    ScalingRow row{m, run_experiment(c), 0.0};
    row.cost = row.table.mean_similarity_measurements;
    xs.push_back(static_cast<double>(m));
    ys.push_back(row.cost);
    out.rows.push_back(std::move(row));
  }
  if (xs.size() >= 2) {
    out.slope = loglog_slope(xs, ys);
  }
  return out;
}

std::string config_json(const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["model"] = to_string(cfg.model);
  j["dim"] = cfg.dim;
  j["effective_dim"] = cfg.effective_dim();
  j["classes"] = cfg.num_classes;
  j["branching"] = cfg.branching;
  j["objects"] = cfg.num_objects;
  j["trials"] = cfg.trials;
  j["batch"] = cfg.batch_size;
  j["seed"] = cfg.seed.value;
  if (cfg.threshold.mode == ThresholdConfig::Mode::fixed) {
    j["th"] = cfg.threshold.value;
  } else {
    j["th"] = "auto";
    j["th_assumed_objects"] = cfg.threshold.assumed_objects;
  }
  j["halve_dim"] = cfg.dimension_halving;
  j["codebook"] = to_string(cfg.codebook_mode);
  j["multi"] = cfg.uses_multi();
  if (cfg.uses_multi()) {
    j["acceptance"] = to_string(cfg.acceptance);
  }
  if (cfg.model == Model::resonator) {
    j["max_iterations"] = cfg.resonator_max_iterations;
  }
  return j.dump();
}

void write_csv(std::ostream& out, const std::vector<ResultTable>& rows) {
  if (!rows.empty()) {
    out << "# config " << config_json(rows.front().config) << '\n';
  }
  out << "model,dim,effective_dim,classes,branching,objects,trials,batch,seed,threshold,"
         "halve_dim,codebook,accuracy,ci95,mean_sim_measurements,mean_combinations,"
         "mean_iterations,mean_wall_time_s,median_wall_time_s\n";
  for (const auto& r : rows) {
    const auto& c = r.config;
    out << to_string(c.model) << ',' << c.dim << ',' << c.effective_dim() << ','
        << c.num_classes << ',' << join_branching(c.branching) << ',' << c.num_objects << ','
        << c.trials << ',' << c.batch_size << ',' << c.seed.value << ','
        << (r.threshold > 0.0 ? fmt_double(r.threshold) : std::string()) << ','
        << (c.dimension_halving ? 1 : 0) << ',' << to_string(c.codebook_mode) << ','
        << fmt_double(r.accuracy) << ',' << fmt_double(r.ci95) << ','
        << fmt_double(r.mean_similarity_measurements) << ',' << fmt_double(r.mean_combinations)
        << ',' << fmt_double(r.mean_iterations) << ',' << fmt_double(r.mean_wall_time_s) << ','
        << fmt_double(r.median_wall_time_s) << '\n';
  }
}

void write_trials_jsonl(std::ostream& out, const ExperimentConfig& cfg,
                        const std::vector<TrialRecord>& records) {
  out << "# config " << config_json(cfg) << '\n';
  for (const auto& r : records) {
    nlohmann::ordered_json j;
    j["trial_id"] = r.trial_id;
    j["correct"] = r.correct;
    j["similarity_measurements"] = r.similarity_measurements;
    j["combinations_tested"] = r.combinations_tested;
    j["iterations"] = r.iterations;
    j["objects_decoded"] = r.objects_decoded;
    j["wall_time_s"] = r.wall_time_s;
    out << j.dump() << '\n';
  }
}

void write_sweep_csv(std::ostream& out, const SweepResult& sweep) {
  if (!sweep.rows.empty()) {
    out << "# config " << config_json(sweep.rows.front().table.config) << '\n';
  }
  out << "# best_th " << fmt_double(sweep.best_th) << " best_accuracy "
      << fmt_double(sweep.best_accuracy) << " predicted_th " << fmt_double(sweep.predicted_th)
      << '\n';
  out << "th,accuracy,ci95,mean_sim_measurements,mean_combinations,mean_wall_time_s\n";
  for (const auto& r : sweep.rows) {
    out << fmt_double(r.th) << ',' << fmt_double(r.table.accuracy) << ','
        << fmt_double(r.table.ci95) << ',' << fmt_double(r.table.mean_similarity_measurements)
        << ',' << fmt_double(r.table.mean_combinations) << ','
        << fmt_double(r.table.mean_wall_time_s) << '\n';
  }
}

void write_scaling_csv(std::ostream& out, const ScalingResult& scaling) {
  if (!scaling.rows.empty()) {
    out << "# config " << config_json(scaling.rows.front().table.config) << '\n';
  }
  out << "# loglog_slope " << fmt_double(scaling.slope) << '\n';
  out << "m,problem_size,accuracy,ci95,cost,mean_iterations,mean_wall_time_s\n";
  for (const auto& r : scaling.rows) {
    const double size = std::pow(static_cast<double>(r.m),
                                 static_cast<double>(r.table.config.num_classes));
    out << r.m << ',' << fmt_double(size) << ',' << fmt_double(r.table.accuracy) << ','
        << fmt_double(r.table.ci95) << ',' << fmt_double(r.cost) << ','
        << fmt_double(r.table.mean_iterations) << ',' << fmt_double(r.table.mean_wall_time_s)
        << '\n';
  }
}

}  // namespace factorhd::bench
