#include "rankdens/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankdens/experiments.hpp"
#include "rankdens/random.hpp"
#include "rankdens/rules.hpp"

namespace rankdens {

namespace {

struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  std::string command;
  std::string data;
  std::string format = "ml100k";
  std::size_t top_items = 53;
  std::optional<std::size_t> top_users;
  std::size_t min_count = 1;
  std::string bandwidth;  // empty: command default
  std::string kernel;     // empty: command default
  std::uint64_t seed = 1;
  std::string out;
  std::string loss = "l1";
  double threshold = 1.0;
  bool strict = false;
  std::string posterior = "event";
  std::string titles;
  std::string genres;

  // normtable
  std::vector<std::size_t> ns;
  std::vector<double> hs;
  // loglik
  std::vector<std::size_t> sizes;
  std::size_t reps = 20;
  std::size_t test_count = 1000;
  double concentration = 1.0;
  double observe = 0.8;
  double tie = 0.0;
  // predict
  double test_fraction = 0.3;
  double holdout = 0.5;
  // rules, graph
  std::string mode = "mi";
  std::size_t top = 10;
  std::size_t rule_items = 20;
  // synth
  std::size_t count = 100;
  std::size_t components = 2;
  // prob
  std::string event;

  [[nodiscard]] nlohmann::json to_json() const {
    nlohmann::json j;
    j["command"] = command;
    j["data"] = data;
    j["format"] = format;
    j["top_items"] = top_items;
    j["top_users"] = top_users ? nlohmann::json(*top_users) : nlohmann::json();
    j["min_count"] = min_count;
    j["bandwidth"] = bandwidth;
    j["kernel"] = kernel;
    j["seed"] = seed;
    j["loss"] = loss;
    j["threshold"] = threshold;
    j["strict"] = strict;
    j["posterior"] = posterior;
    j["titles"] = titles;
    j["genres"] = genres;
    j["n"] = ns;
    j["h"] = hs;
    j["sizes"] = sizes;
    j["reps"] = reps;
    j["test_count"] = test_count;
    j["concentration"] = concentration;
    j["observe"] = observe;
    j["tie"] = tie;
    j["test_fraction"] = test_fraction;
    j["holdout"] = holdout;
    j["mode"] = mode;
    j["top"] = top;
    j["rule_items"] = rule_items;
    j["count"] = count;
    j["components"] = components;
    j["event"] = event;
    return j;
  }
};

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

class Output {
 public:
  Output(const RunConfig& config, std::ostream& out) : config_(config), out_(out) {}

  void set_input_hash(std::string hash) { input_hash_ = std::move(hash); }

  void emit(const std::string& name, const std::string& body) {
    std::ostringstream file;
    file << "# rankdens " << config_.command << ' ' << name << '\n';
    file << "# config: " << config_.to_json().dump() << '\n';
    file << "# input: " << input_hash_ << '\n';
    file << body;
    if (config_.out.empty()) {
      out_ << file.str();
      return;
    }
    std::filesystem::create_directories(config_.out);
    const auto path = std::filesystem::path(config_.out) / name;
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DataError("cannot write '" + path.string() + "'");
    f << file.str();
  }

 private:
  const RunConfig& config_;
  std::string input_hash_ = "none";
  std::ostream& out_;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (const char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

std::ostringstream number_stream() {
  std::ostringstream s;
  s << std::setprecision(12);
  return s;
}

KernelMode kernel_mode(const RunConfig& c, KernelMode fallback) {
  if (c.kernel.empty()) return fallback;
  if (c.kernel == "modified") return KernelMode::modified;
  if (c.kernel == "exact") return KernelMode::exact_support;
  throw UsageError("--kernel must be modified or exact");
}

// nullopt means auto.
std::optional<double> bandwidth_value(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t used = 0;
  double h = 0.0;
  try {
    h = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(h > 0.0) || !std::isfinite(h)) {
    throw UsageError("--bandwidth must be a positive number or auto");
  }
  return h;
}

// Bandwidth for a model on these rankings; empty text keeps the default.
KernelConfig kernel_config(const RunConfig& c, std::span<const TiedRanking> rankings,
                           KernelMode mode, std::uint64_t stage) {
  KernelConfig config;
  config.mode = mode;
  if (c.bandwidth.empty()) {
    if (mode == KernelMode::exact_support) {
      throw UsageError("the exact kernel needs --bandwidth H or auto");
    }
    return config;
  }
  config.bandwidth = bandwidth_value(c.bandwidth);
  if (!config.bandwidth) {
    config.bandwidth = select_bandwidth(rankings, derive_seed(c.seed, stage), 0.2, mode).bandwidth;
  }
  return config;
}

struct Dataset {
  RatingsTable table;
  RankingSet set;
  std::string hash;
};

Dataset load_dataset(const RunConfig& c) {
  if (c.data.empty()) throw UsageError("--data is required");
  FormatDescriptor format;
  try {
    format = FormatDescriptor::parse(c.format);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto bytes = read_file(c.data);
  Dataset d;
  d.hash = "fnv1a64=" + hex64(fnv1a(bytes));
  std::istringstream in(bytes);
  d.table = parse_ratings(in, format);
  const auto items = select_items(d.table, c.top_items);
  const auto users = select_users(d.table, items, {.min_count = c.min_count, .top_m = c.top_users});
  d.set = build_rankings(d.table, items, users);
  if (d.set.rankings.empty()) throw DataError("no user rates the selected items");
  return d;
}

ItemNamer namer(const RunConfig& c, const UniversePtr& universe) {
  auto titles = std::make_shared<std::map<std::string, std::string>>();
  if (!c.titles.empty()) *titles = load_titles(c.titles);
  return [titles, universe](Item i) {
    const auto id = universe->label(i);
    const auto it = titles->find(id);
    return it == titles->end() ? id : it->second;
  };
}

struct Warnings {
  std::vector<std::string> messages;
  /// Informational only, never fatal under --strict.
  std::vector<std::string> notes;
  void add(std::size_t count, const std::string& what) {
    if (count > 0) messages.push_back(std::to_string(count) + " " + what);
  }
};

// ---------------------------------------------------------------------------

void cmd_normtable(const RunConfig& c, Output& output) {
  if (c.ns.empty()) throw UsageError("--n needs at least one value");
  const auto mode = kernel_mode(c, KernelMode::exact_support);
  auto body = number_stream();
  body << "kind,n,x,value\n";
  for (const std::size_t n : c.ns) {
    if (n == 0) throw UsageError("--n values must be positive");
    const auto table = mahonian_distribution(n);
    for (std::size_t t = 0; t <= table.max_distance(); ++t) {
      body << "g," << n << ',' << t << ',' << table[t] << '\n';
    }
    for (const double h : c.hs) {
      body << "C," << n << ',' << h << ',' << triangular_normalization(table, h, mode).norm << '\n';
    }
  }
  output.emit("normtable.csv", body.str());
}

void cmd_pairs(const RunConfig& c, Output& output, Warnings& warnings) {
  const auto d = load_dataset(c);
  output.set_input_hash(d.hash);
  const auto mode = kernel_mode(c, KernelMode::modified);
  const auto model = fit(d.set.rankings, kernel_config(c, d.set.rankings, mode, 5));
  const auto table = pairwise_table(model);
  warnings.add(table.negative, "negative pairwise estimates");
  const auto& u = *model.universe();
  const auto name = namer(c, model.universe());

  auto pairs = number_stream();
  pairs << "item";
  for (std::size_t j = 0; j < u.size(); ++j) pairs << ',' << csv_field(u.label(static_cast<Item>(j)));
  pairs << '\n';
  for (std::size_t i = 0; i < u.size(); ++i) {
    pairs << csv_field(u.label(static_cast<Item>(i)));
    for (const double p : table.prob[i]) pairs << ',' << p;
    pairs << '\n';
  }
  output.emit("pairs.csv", pairs.str());

  std::map<std::string, std::string> genre;
  if (!c.genres.empty()) genre = load_titles(c.genres);
  auto order = order_by_score(table);
  if (!c.genres.empty()) {
    std::stable_sort(order.begin(), order.end(), [&](Item a, Item b) {
      const auto ga = genre.find(u.label(a));
      const auto gb = genre.find(u.label(b));
      const std::string sa = ga == genre.end() ? "~" : ga->second;
      const std::string sb = gb == genre.end() ? "~" : gb->second;
      return sa < sb;
    });
  }
  auto ranks = number_stream();
  ranks << "rank,item,name,genre,score\n";
  for (std::size_t r = 0; r < order.size(); ++r) {
    const auto g = genre.find(u.label(order[r]));
    ranks << r + 1 << ',' << csv_field(u.label(order[r])) << ',' << csv_field(name(order[r])) << ','
          << csv_field(g == genre.end() ? "" : g->second) << ',' << table.score[order[r]] << '\n';
  }
  output.emit("ranks.csv", ranks.str());
}

// Half of the users ordering every selected item are tested; training draws
// from everyone else. No runs when fewer than two users order them all.
std::vector<LoglikComparison> data_loglik_runs(const RunConfig& c, const RankingSet& set,
                                               std::size_t m, const KernelChoice& kernel) {
  std::vector<LoglikComparison> runs;
  std::vector<Item> subset(set.universe->size());
  std::iota(subset.begin(), subset.end(), Item{0});
  std::size_t complete = 0;
  for (const auto& r : set.rankings) complete += full_order(r, subset).has_value();
  if (complete < 2) return runs;
  for (std::size_t rep = 0; rep < c.reps; ++rep) {
    const auto seed = derive_seed(derive_seed(derive_seed(c.seed, subset.size()), m), rep);
    std::vector<std::size_t> order(set.rankings.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(seed);
    rng.shuffle(order);
    std::vector<TiedRanking> test;
    std::vector<TiedRanking> train;
    for (const auto x : order) {
      const auto& r = set.rankings[x];
      if (test.size() < complete / 2 && full_order(r, subset)) {
        test.push_back(r);
      } else if (train.size() < m) {
        train.push_back(r);
      }
    }
    runs.push_back(compare_loglik(train, test, kernel, derive_seed(seed, 6)));
  }
  return runs;
}

void cmd_loglik(const RunConfig& c, Output& output, Warnings& warnings) {
  const auto ns = c.ns.empty() ? std::vector<std::size_t>{3, 4, 5} : c.ns;
  const auto sizes =
      c.sizes.empty() ? std::vector<std::size_t>{50, 100, 200, 500, 1000} : c.sizes;
  for (const std::size_t n : ns) {
    if (n < 2 || n > 5) throw UsageError("loglik compares against Mallows, so n must be 2..5");
  }
  if (c.reps == 0) throw UsageError("--reps must be positive");
  KernelChoice kernel;
  kernel.mode = kernel_mode(c, KernelMode::exact_support);
  kernel.bandwidth = bandwidth_value(c.bandwidth.empty() ? "auto" : c.bandwidth);

  std::string hash = "none";
  std::optional<RatingsTable> table;
  if (!c.data.empty()) {
    const auto bytes = read_file(c.data);
    hash = "fnv1a64=" + hex64(fnv1a(bytes));
    std::istringstream in(bytes);
    table = parse_ratings(in, FormatDescriptor::parse(c.format));
  }
  output.set_input_hash(hash);
  auto body = number_stream();
  body << "n,m,estimator,mean,stderr,reps\n";
  std::size_t floored = 0;
  std::vector<std::size_t> skipped;
  for (const std::size_t n : ns) {
    std::optional<RankingSet> set;
    if (table) {
      const auto items = select_items(*table, n);
      set = build_rankings(*table, items, select_users(*table, items, {}));
    }
    for (const std::size_t m : sizes) {
      std::vector<LoglikComparison> runs;
      if (set) {
        runs = data_loglik_runs(c, *set, m, kernel);
      } else {
        const SyntheticMixture mixture{c.concentration, {c.observe, c.tie}, c.test_count};
        for (std::size_t rep = 0; rep < c.reps; ++rep) {
          const auto seed = derive_seed(derive_seed(derive_seed(c.seed, n), m), rep);
          const auto [train, test] = synthetic_mixture(n, m, mixture, seed);
          runs.push_back(compare_loglik(train, test, kernel, derive_seed(seed, 6)));
        }
      }
      if (runs.empty()) {
        skipped.push_back(n);
        break;
      }
      for (const auto& r : runs) floored += r.kernel.floored;
      for (const auto& row : summarize(n, m, runs)) {
        body << row.n << ',' << row.m << ',' << row.estimator << ',' << row.mean << ','
             << row.standard_error << ',' << row.repetitions << '\n';
      }
    }
  }
  warnings.add(floored, "kernel test scores floored at 1e-12");
  output.emit("loglik.csv", body.str());
  for (const auto n : skipped) {
    warnings.notes.push_back("n = " + std::to_string(n) +
                             " skipped, fewer than two users order all items");
  }
}

LossMatrix loss_matrix(const RunConfig& c, const RatingsTable& table) {
  if (c.loss == "l0" || c.loss == "l1" || c.loss == "le") {
    try {
      return LossMatrix::builtin(c.loss, table.min_level, table.max_level);
    } catch (const std::invalid_argument& e) {
      throw UsageError(e.what());
    }
  }
  std::ifstream in(c.loss);
  if (!in) throw DataError("cannot read loss matrix '" + c.loss + "'");
  auto loss = LossMatrix::read_csv(in, table.min_level);
  if (loss.last_level() != table.max_level) {
    throw DataError("loss matrix does not cover the rating scale");
  }
  return loss;
}

void cmd_predict(const RunConfig& c, Output& output, Warnings& warnings) {
  const auto d = load_dataset(c);
  output.set_input_hash(d.hash);
  const auto loss = loss_matrix(c, d.table);
  PosteriorWeight weight{};
  try {
    weight = parse_posterior_weight(c.posterior);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (!(c.test_fraction > 0.0 && c.test_fraction < 1.0) ||
      !(c.holdout > 0.0 && c.holdout < 1.0)) {
    throw UsageError("--test-fraction and --holdout must be in (0, 1)");
  }
  const auto s = split(d.set, derive_seed(c.seed, 7), c.test_fraction, c.holdout);
  if (s.test.held_out_count() == 0) throw DataError("no test user has two ranked items");
  KernelChoice kernel;
  kernel.mode = kernel_mode(c, KernelMode::modified);
  if (!c.bandwidth.empty()) {
    kernel.bandwidth = bandwidth_value(c.bandwidth);
  } else if (kernel.mode == KernelMode::modified) {
    kernel.bandwidth = default_bandwidth(d.set.universe->size());
  } else {
    throw UsageError("the exact kernel needs --bandwidth H or auto");
  }
  auto sizes = c.sizes;
  if (sizes.empty()) {
    for (std::size_t m = 50; m < s.train.size(); m *= 2) sizes.push_back(m);
    sizes.push_back(s.train.size());
  }
  const auto rows = prediction_curve(s, sizes, loss, kernel, weight, c.seed);
  auto body = number_stream();
  body << "m,predictor,mean_loss,predictions,clamped\n";
  std::size_t clamped = 0;
  for (const auto& r : rows) {
    body << r.m << ',' << r.predictor << ',' << r.mean_loss << ',' << r.predictions << ','
         << r.clamped << '\n';
    clamped += r.clamped;
  }
  warnings.add(clamped, "posteriors with clamped negative estimates");
  output.emit("predict.csv", body.str());
}

// The rule_items most rated items among the model's universe.
std::vector<Item> rule_subset(const RunConfig& c, const Dataset& d) {
  if (c.rule_items < 2) throw UsageError("--rule-items must be at least 2");
  std::vector<Item> subset;
  for (const auto& id : select_items(d.table, std::min(c.rule_items, d.set.universe->size()))) {
    if (const auto item = d.set.universe->find(id)) subset.push_back(*item);
  }
  std::sort(subset.begin(), subset.end());
  return subset;
}

void cmd_rules(const RunConfig& c, Output& output, Warnings& warnings) {
  const auto d = load_dataset(c);
  output.set_input_hash(d.hash);
  const auto mode = kernel_mode(c, KernelMode::modified);
  const auto model = fit(d.set.rankings, kernel_config(c, d.set.rankings, mode, 5));
  const auto subset = rule_subset(c, d);
  const auto name = namer(c, model.universe());
  auto body = number_stream();
  if (c.mode == "mi") {
    if (subset.size() < 4) throw UsageError("MI rules need at least four items");
    const auto rules = mine_mi_rules(model, subset, c.top);
    std::size_t renormalized = 0;
    body << "rank,if_first,if_second,then_first,then_second,mutual_information\n";
    for (std::size_t r = 0; r < rules.size(); ++r) {
      const auto& rule = rules[r];
      const auto& q = rule.items;
      renormalized += joint_pair_table(model, q[0], q[1], q[2], q[3]).renormalized;
      body << r + 1 << ',' << csv_field(name(rule.antecedent.first)) << ','
           << csv_field(name(rule.antecedent.second)) << ',' << csv_field(name(rule.consequent.first))
           << ',' << csv_field(name(rule.consequent.second)) << ',' << rule.score << '\n';
    }
    warnings.add(renormalized, "rule tables renormalized after negative cells");
  } else if (c.mode == "lift-top2" || c.mode == "lift-topbottom") {
    const auto lift = c.mode == "lift-top2" ? LiftMode::top2 : LiftMode::top_bottom;
    const auto rules = mine_lift_rules(model, subset, lift, c.top);
    body << "rank,first," << (lift == LiftMode::top2 ? "second" : "last") << ",lift\n";
    for (std::size_t r = 0; r < rules.size(); ++r) {
      body << r + 1 << ',' << csv_field(name(rules[r].first)) << ','
           << csv_field(name(rules[r].second)) << ',' << rules[r].score << '\n';
    }
  } else {
    throw UsageError("--mode must be mi, lift-top2 or lift-topbottom");
  }
  output.emit("rules.csv", body.str());
}

void cmd_graph(const RunConfig& c, Output& output) {
  const auto d = load_dataset(c);
  output.set_input_hash(d.hash);
  const auto mode = kernel_mode(c, KernelMode::modified);
  const auto model = fit(d.set.rankings, kernel_config(c, d.set.rankings, mode, 5));
  if (!(c.threshold > 0.0)) throw UsageError("--threshold must be positive");
  const auto edges = affinity_graph(model, rule_subset(c, d), c.threshold);
  const auto name = namer(c, model.universe());
  std::ostringstream csv;
  write_edges_csv(edges, name, csv);
  output.emit("graph.csv", csv.str());
  std::ostringstream dot;
  write_dot(edges, name, dot);
  output.emit("graph.dot", dot.str());
}

void cmd_synth(const RunConfig& c, Output& output) {
  const std::size_t n = c.ns.empty() ? 5 : c.ns.front();
  if (n < 2 || c.ns.size() > 1) throw UsageError("synth takes a single --n of at least 2");
  if (c.components == 0 || c.components > n) throw UsageError("--components must be 1..n");
  const auto universe = make_universe(n);
  oracle::SynthConfig config;
  for (std::size_t k = 0; k < c.components; ++k) {
    std::vector<Item> center(n);
    for (std::size_t i = 0; i < n; ++i) center[i] = static_cast<Item>((i + k * n / c.components) % n);
    config.components.push_back({1.0 / static_cast<double>(c.components), center, c.concentration});
  }
  config.censoring = {c.observe, c.tie};
  config.count = c.count;
  config.seed = derive_seed(c.seed, 8);
  const auto sample = oracle::synthesize(config, universe);
  std::ostringstream body;
  body << "user\tcomponent\tlatent\tobserved\n";
  for (std::size_t u = 0; u < sample.observed.size(); ++u) {
    body << u + 1 << '\t' << sample.component[u] << '\t'
         << format_permutation(sample.latent[u], *universe) << '\t'
         << format_ranking(sample.observed[u]) << '\n';
  }
  output.emit("synth.tsv", body.str());
}

void cmd_prob(const RunConfig& c, Output& output, Warnings& warnings) {
  const auto d = load_dataset(c);
  output.set_input_hash(d.hash);
  if (c.event.empty()) throw UsageError("--event is required");
  const auto mode = kernel_mode(c, KernelMode::modified);
  const auto model = fit(d.set.rankings, kernel_config(c, d.set.rankings, mode, 5));
  TiedRanking event = [&] {
    try {
      return parse_ranking(c.event, model.universe());
    } catch (const std::exception& e) {
      throw UsageError(std::string("--event: ") + e.what());
    }
  }();
  const auto p = event_prob(model, event);
  if (p.negative()) warnings.add(1, "negative estimate");
  auto body = number_stream();
  body << "event,estimate,empirical\n"
       << csv_field(format_ranking(event)) << ',' << p.value << ','
       << empirical_prob(model.training(), event) << '\n';
  output.emit("prob.csv", body.str());
}

std::vector<std::size_t> parse_size_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t used = 0;
    long long v = -1;
    try {
      v = std::stoll(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || v < 0) {
      throw UsageError(std::string(flag) + ": bad value '" + item + "'");
    }
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::vector<double> parse_real_list(const std::string& text, const char* flag) {
  std::vector<double> out;
  std::stringstream s(text);
  std::string item;
  while (std::getline(s, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != item.size() || !std::isfinite(v)) {
      throw UsageError(std::string(flag) + ": bad value '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig c;
  std::string n_text;
  std::string h_text;
  std::string sizes_text;
  std::size_t top_users = 0;

  CLI::App app{"Kernel estimates of preference probabilities from tied, incomplete rankings.", "rankdens"};
  app.require_subcommand(1);
  app.fallthrough();
  app.add_option("--data", c.data, "Ratings file");
  app.add_option("--format", c.format, "ml100k, ml1m or csv:COLS[:header][:LO-HI][:tab|:colons]");
  app.add_option("--top-items", c.top_items, "Most rated items to keep (0 keeps all)");
  app.add_option("--top-users", top_users, "Users with most ratings among the items (0 keeps all)");
  app.add_option("--min-count", c.min_count, "Minimum ratings among the items per user");
  app.add_option("--bandwidth", c.bandwidth, "Kernel bandwidth H, or auto for a validated choice");
  app.add_option("--kernel", c.kernel, "modified or exact (exact needs at most 8 items)");
  app.add_option("--seed", c.seed, "Seed for every random stage");
  app.add_option("--out", c.out, "Output directory (default: standard output)");
  app.add_option("--loss", c.loss,
                 "l0, l1, le or a CSV matrix path. le is the 0-5 star matrix; on a 1-5 scale "
                 "its zero-star row and column are dropped");
  app.add_option("--threshold", c.threshold, "Edge threshold on mean lift");
  app.add_flag("--strict", c.strict, "Exit with status 3 on numeric validity warnings");
  app.add_option("--posterior", c.posterior, "event (default) or density weighting of candidate levels");
  app.add_option("--titles", c.titles, "id<TAB>title file for item names");

  auto* normtable = app.add_subcommand("normtable", "Mahonian distribution g[t]/n! and C(h)/n!");
  normtable->set_help_flag("--help", "Print this help message and exit");
  normtable->add_option("--n", n_text, "Comma-separated item counts")->required();
  normtable->add_option("--h", h_text, "Comma-separated bandwidths");

  auto* pairs = app.add_subcommand("pairs", "Pairwise preference matrix and mean win probability");
  pairs->add_option("--genres", c.genres, "id<TAB>genre file; orders by genre, then score");

  auto* loglik = app.add_subcommand(
      "loglik",
      "Held-out log-likelihood of kernel, empirical and Mallows estimates. Synthetic mixture "
      "data unless --data is given. Defaults to the exact kernel with --bandwidth auto");
  loglik->add_option("--n", n_text, "Comma-separated item counts (2..5)");
  loglik->add_option("--sizes", sizes_text, "Comma-separated training sizes");
  loglik->add_option("--reps", c.reps, "Repetitions per size");
  loglik->add_option("--test-count", c.test_count, "Synthetic test rankings per repetition");
  loglik->add_option("--concentration", c.concentration, "Mallows concentration of both components");
  loglik->add_option("--observe", c.observe, "Probability each item is observed");
  loglik->add_option("--tie", c.tie, "Probability adjacent observed items are tied");

  auto* predict = app.add_subcommand("predict", "Held-out level prediction loss against training size");
  predict->add_option("--sizes", sizes_text, "Comma-separated training sizes");
  predict->add_option("--test-fraction", c.test_fraction, "Fraction of users held out");
  predict->add_option("--holdout", c.holdout, "Fraction of each test user's items held out");

  auto* rules = app.add_subcommand("rules", "Association rules over the most rated items");
  rules->add_option("--mode", c.mode, "mi, lift-top2 or lift-topbottom");
  rules->add_option("--top", c.top, "Rules to report");
  rules->add_option("--rule-items", c.rule_items, "Most rated items to mine over");

  auto* graph = app.add_subcommand("graph", "Affinity graph of mean top-two lift");
  graph->add_option("--rule-items", c.rule_items, "Most rated items in the graph");

  auto* synth = app.add_subcommand("synth", "Synthetic censored Mallows mixture rankings");
  synth->add_option("--n", n_text, "Item count");
  synth->add_option("--count", c.count, "Rankings to draw");
  synth->add_option("--components", c.components, "Mixture components, centres evenly rotated");
  synth->add_option("--concentration", c.concentration, "Mallows concentration");
  synth->add_option("--observe", c.observe, "Probability each item is observed");
  synth->add_option("--tie", c.tie, "Probability adjacent observed items are tied");

  auto* prob = app.add_subcommand("prob", "Estimate of one event, e.g. --event '50|181,100'");
  prob->add_option("--event", c.event, "Ranking over item ids")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  Warnings warnings;
  try {
    c.command = app.get_subcommands().front()->get_name();
    if (top_users > 0) c.top_users = top_users;
    if (!n_text.empty()) c.ns = parse_size_list(n_text, "--n");
    if (!h_text.empty()) c.hs = parse_real_list(h_text, "--h");
    if (!sizes_text.empty()) c.sizes = parse_size_list(sizes_text, "--sizes");
    Output output(c, out);
    if (c.command == "normtable") cmd_normtable(c, output);
    if (c.command == "pairs") cmd_pairs(c, output, warnings);
    if (c.command == "loglik") cmd_loglik(c, output, warnings);
    if (c.command == "predict") cmd_predict(c, output, warnings);
    if (c.command == "rules") cmd_rules(c, output, warnings);
    if (c.command == "graph") cmd_graph(c, output);
    if (c.command == "synth") cmd_synth(c, output);
    if (c.command == "prob") cmd_prob(c, output, warnings);
  } catch (const DataError& e) {
    err << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::invalid_argument& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::out_of_range& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  for (const auto& w : warnings.notes) err << "note: " << w << '\n';
  for (const auto& w : warnings.messages) err << "warning: " << w << '\n';
  return c.strict && !warnings.messages.empty() ? kExitNumeric : kExitOk;
}

}  // namespace rankdens
