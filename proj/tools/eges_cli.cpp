#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "eges/error.hpp"
#include "eges/eval.hpp"
#include "eges/synth.hpp"

using namespace eges;

namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void progress(const std::string& msg) { std::cerr << "eges: " << msg << '\n'; }

ItemGraph load_graph(const std::string& path) {
  auto in = open_in(path);
  return read_edge_list(in);
}

SideInfoCatalog load_catalog(const std::string& path,
                             std::span<const std::string> items) {
  if (path.empty()) return SideInfoCatalog::none(items.size());
  auto in = open_in(path);
  return SideInfoCatalog::align(read_catalog_table(in), items);
}

struct Options {
  std::string log, sessions, graph, walks, catalog, model, out, exported;
  std::string delisted, item, items, profile = "twoblock", regime = "eges";
  std::vector<std::string> side;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  std::int64_t window_seconds = kDefaultSessionWindow;
  NoiseConfig noise;
  WalkConfig walk;
  TrainConfig train;
  double ratio = 1.0 / 3.0;
  std::size_t k = 10;
  bool cosine = false;
  bool unigram = false;
};

void add_walk_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--walks", o.walk.walks_per_node, "Walks started per node")->capture_default_str();
  cmd->add_option("--walk-len", o.walk.walk_length, "Nodes per walk")->capture_default_str();
}

void add_train_flags(CLI::App* cmd, Options& o) {
  cmd->add_option("--regime", o.regime, "bge, ges or eges")->capture_default_str();
  cmd->add_option("--dim", o.train.dim, "Embedding dimension")->capture_default_str();
  cmd->add_option("--window", o.train.window, "Skip-gram window")->capture_default_str();
  cmd->add_option("--negatives", o.train.negatives, "Negative samples per positive pair")
      ->capture_default_str();
  cmd->add_option("--lr", o.train.learning_rate, "Learning rate")->capture_default_str();
  cmd->add_option("--epochs", o.train.epochs, "Passes over the walk corpus")->capture_default_str();
  cmd->add_flag("--sequential-update", o.train.sequential_update,
                "Update the context vector before the item-side parameters");
  cmd->add_flag("--decay-lr", o.train.decay_learning_rate, "Linear learning-rate decay");
  cmd->add_flag("--unigram", o.unigram, "Draw negatives by unigram^0.75 frequency");
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  cmd->add_option("--threads", o.threads, "Worker threads; 1 is deterministic")
      ->capture_default_str();
}

void sync_configs(Options& o) {
  o.walk.seed = o.seed;
  o.train.seed = o.seed;
  o.train.threads = o.threads;
  o.train.negative_distribution =
      o.unigram ? NegativeDistribution::kUnigram : NegativeDistribution::kUniform;
}

void print_scored(const Model& m, const std::vector<Scored>& hits) {
  for (const auto& h : hits) {
    std::printf("%s\t%.9g\n", m.item_ids()[h.item].c_str(), h.score);
  }
}

EmbeddingTable table_for(const Model& m, bool cosine) {
  auto table = EmbeddingTable::from_model(m);
  return cosine ? table.normalized() : table;
}

int cmd_sessionize(const Options& o) {
  auto parsed = read_behavior_log(o.log);
  if (parsed.skipped > 0) progress("skipped " + std::to_string(parsed.skipped) + " malformed rows");
  std::unordered_set<std::string> delisted;
  if (!o.delisted.empty()) {
    auto in = open_in(o.delisted);
    delisted = read_item_set(in);
  }
  auto events = filter_noise(parsed.events, o.noise, delisted);
  auto sessions = sessionize(events, o.window_seconds);
  progress(std::to_string(events.size()) + " of " + std::to_string(parsed.events.size()) +
           " events kept, " + std::to_string(sessions.size()) + " sessions");
  auto out = open_out(o.out);
  out << "# eges sessionize window=" << o.window_seconds << '\n';
  write_sessions(sessions, out);
  return 0;
}

int cmd_build_graph(const Options& o) {
  auto in = open_in(o.sessions);
  auto g = build_item_graph(read_sessions(in));
  progress(std::to_string(g.num_nodes()) + " nodes, " + std::to_string(g.num_edges()) + " edges");
  auto out = open_out(o.out);
  out << "# eges build-graph\n";
  write_edge_list(g, out);
  return 0;
}

int cmd_walk(const Options& o) {
  auto g = load_graph(o.graph);
  auto corpus = generate_walks(g, o.walk, o.threads);
  progress(std::to_string(corpus.walks.size()) + " walks");
  auto out = open_out(o.out);
  out << "# eges walk seed=" << o.seed << " walks=" << o.walk.walks_per_node
      << " walk-len=" << o.walk.walk_length << '\n';
  write_walks(corpus, g, out);
  return 0;
}

Model train_model(const Options& o, const ItemGraph* graph) {
  const Regime regime = parse_regime(o.regime);
  TrainStats stats;
  Model m = [&] {
    if (graph) {
      auto catalog = load_catalog(o.catalog, graph->names());
      return train(*graph, catalog, o.walk, o.train, regime, &stats);
    }
    auto in = open_in(o.walks);
    auto vc = read_walks(in);
    auto catalog = load_catalog(o.catalog, vc.vocabulary);
    return train_on_corpus(vc.vocabulary, vc.corpus, catalog, o.train, regime, &stats);
  }();
  progress("trained " + std::string(to_string(regime)) + " on " + std::to_string(stats.walks) +
           " walks, " + std::to_string(stats.updates.positive) + " positive pairs");
  return m;
}

int cmd_train(const Options& o) {
  if (o.graph.empty() == o.walks.empty()) {
    throw ConfigError("train needs exactly one of --graph or --walk-file");
  }
  ItemGraph g;
  if (!o.graph.empty()) g = load_graph(o.graph);
  auto m = train_model(o, o.graph.empty() ? nullptr : &g);
  save_model(m, std::filesystem::path(o.out));
  if (!o.exported.empty()) {
    auto out = open_out(o.exported);
    write_embeddings(m, out);
  }
  return 0;
}

int cmd_eval(const Options& o) {
  auto g = load_graph(o.graph);
  auto split = split_edges(g, o.ratio, o.seed);
  progress("held out " + std::to_string(split.positives.size()) + " of " +
           std::to_string(g.num_edges()) + " edges");
  auto m = train_model(o, &split.train_graph);
  const double value = evaluate_link_prediction(m, split);
  write_auc_report(std::cout, value, split.positives.size(), split.negatives.size(), o.seed);
  if (!o.out.empty()) {
    auto out = open_out(o.out);
    write_auc_report(out, value, split.positives.size(), split.negatives.size(), o.seed);
  }
  return 0;
}

int cmd_similar(const Options& o) {
  auto m = load_model(std::filesystem::path(o.model));
  print_scored(m, topk_similar(table_for(m, o.cosine), m.item_index(o.item), o.k));
  return 0;
}

int cmd_coldstart(const Options& o) {
  auto m = load_model(std::filesystem::path(o.model));
  const auto& catalog = m.catalog();
  std::vector<std::uint32_t> values(m.num_types(), 0);
  for (const auto& assignment : o.side) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("--side expects type=value, got " + assignment);
    const std::string type = assignment.substr(0, eq);
    const auto& names = catalog.type_names();
    const auto it = std::find(names.begin(), names.end(), type);
    if (it == names.end()) throw LookupError("unknown side-information type '" + type + "'");
    const auto s = static_cast<std::size_t>(it - names.begin());
    values[s] = catalog.value_index(s, assignment.substr(eq + 1));
  }
  auto query = cold_start_embedding(m, values);
  std::printf("embedding");
  for (std::size_t i = 0; i < query.size(); ++i) std::printf("%c%.9g", i ? ' ' : '\t', query[i]);
  std::printf("\n");
  auto table = table_for(m, o.cosine);
  if (o.cosine) {
    double norm = 0.0;
    for (float x : query) norm += double(x) * x;
    if (norm > 0) {
      for (auto& x : query) x = static_cast<float>(x / std::sqrt(norm));
    }
  }
  print_scored(m, topk_by_vector(table, query, o.k));
  return 0;
}

int cmd_weights(const Options& o) {
  auto m = load_model(std::filesystem::path(o.model));
  for (const auto& w : side_weights(m, m.item_index(o.item))) {
    std::printf("%s\t%.6f\n", w.label.c_str(), w.weight);
  }
  return 0;
}

int cmd_project(const Options& o) {
  auto m = load_model(std::filesystem::path(o.model));
  std::vector<NodeId> chosen;
  if (o.items.empty()) {
    for (NodeId v = 0; v < m.num_items(); ++v) chosen.push_back(v);
  } else {
    auto in = open_in(o.items);
    std::string line;
    while (std::getline(in, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) chosen.push_back(m.item_index(line));
    }
  }
  std::vector<std::vector<double>> vectors;
  for (NodeId v : chosen) {
    auto h = item_embedding(m, v);
    vectors.emplace_back(h.begin(), h.end());
  }
  auto points = pca_project(vectors, 2);
  auto out = open_out(o.out);
  out << "# eges project seed=" << m.seed() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < chosen.size(); ++i) {
    std::snprintf(buf, sizeof buf, "\t%.9g\t%.9g\n", points[i][0], points[i][1]);
    out << m.item_ids()[chosen[i]] << buf;
  }
  return 0;
}

int cmd_synth(const Options& o) {
  auto data = generate_synthetic(parse_synth_profile(o.profile), o.seed);
  write_synthetic(data, o.out);
  progress(std::to_string(data.log.size()) + " events, " + std::to_string(data.items.size()) +
           " items written to " + o.out);
  return 0;
}

const char* kSynthHelp =
    "Synthetic behavior log and catalog with planted structure.\n"
    "  twoblock:  2,000 items in 2 clusters of 20 groups (50 items each). Users\n"
    "             browse mostly within one group; 12 side-information types, of\n"
    "             which category (the group) and brand (half a group) are\n"
    "             informative and attr1..attr10 are random.\n"
    "  coldstart: 2,000 items in 10 clusters of 200; category is the cluster.\n"
    "             10% of items never occur in the log and exist only in the\n"
    "             catalog (cold items, flagged in clusters.tsv).\n"
    "Both add zero-dwell clicks and two spam users for the noise filter.\n"
    "Writes log.tsv, catalog.tsv and clusters.tsv into --out.";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Item embeddings from behavior graphs with side information"};
  app.require_subcommand(1);
  Options o;

  auto* sess = app.add_subcommand("sessionize", "Filter a behavior log and cut it into sessions");
  sess->add_option("--log", o.log, "Behavior log TSV")->required();
  sess->add_option("--out", o.out, "Sessions file")->required();
  sess->add_option("--delisted", o.delisted, "File of delisted item ids");
  sess->add_option("--window", o.window_seconds, "Session window in seconds")->capture_default_str();
  sess->add_option("--min-dwell", o.noise.min_dwell, "Minimum click dwell in seconds")
      ->capture_default_str();
  sess->add_option("--max-purchases", o.noise.max_purchases, "Purchase limit per user and span")
      ->capture_default_str();
  sess->add_option("--max-clicks", o.noise.max_clicks, "Click limit per user and span")
      ->capture_default_str();
  sess->add_option("--span-days", o.noise.observation_span_days, "Observation span in days")
      ->capture_default_str();

  auto* build = app.add_subcommand("build-graph", "Weighted item graph from sessions");
  build->add_option("--sessions", o.sessions, "Sessions file")->required();
  build->add_option("--out", o.out, "Edge list")->required();

  auto* walk = app.add_subcommand("walk", "Weighted random walks over an edge list");
  walk->add_option("--graph", o.graph, "Edge list")->required();
  walk->add_option("--out", o.out, "Walks file")->required();
  add_walk_flags(walk, o);
  add_common(walk, o);

  auto* tr = app.add_subcommand("train", "Train embeddings from an edge list or walks");
  tr->add_option("--graph", o.graph, "Edge list");
  tr->add_option("--walk-file", o.walks, "Walks file");
  tr->add_option("--catalog", o.catalog, "Side-information TSV");
  tr->add_option("--out", o.out, "Model file")->required();
  tr->add_option("--export", o.exported, "Text export of item embeddings");
  add_walk_flags(tr, o);
  add_train_flags(tr, o);
  add_common(tr, o);

  auto* ev = app.add_subcommand("eval", "Link-prediction AUC with held-out edges");
  ev->add_option("--graph", o.graph, "Edge list")->required();
  ev->add_option("--catalog", o.catalog, "Side-information TSV");
  ev->add_option("--ratio", o.ratio, "Share of edges held out")->capture_default_str();
  ev->add_option("--out", o.out, "Also write the JSON report here");
  add_walk_flags(ev, o);
  add_train_flags(ev, o);
  add_common(ev, o);

  auto* sim = app.add_subcommand("similar", "Top-k items by embedding similarity");
  sim->add_option("--model", o.model, "Model file")->required();
  sim->add_option("--item", o.item, "Query item id")->required();
  sim->add_option("-k,--k", o.k, "Number of neighbors")->capture_default_str();
  sim->add_flag("--cosine", o.cosine, "Rank by cosine instead of dot product");

  auto* cold = app.add_subcommand("coldstart", "Embed an unseen item from its side information");
  cold->add_option("--model", o.model, "Model file")->required();
  cold->add_option("--side", o.side, "type=value; omitted types are unknown");
  cold->add_option("-k,--k", o.k, "Number of neighbors")->capture_default_str();
  cold->add_flag("--cosine", o.cosine, "Rank by cosine instead of dot product");

  auto* wts = app.add_subcommand("weights", "Learned per-type weights of an item (EGES)");
  wts->add_option("--model", o.model, "Model file")->required();
  wts->add_option("--item", o.item, "Item id")->required();

  auto* proj = app.add_subcommand("project", "2-D PCA projection of item embeddings");
  proj->add_option("--model", o.model, "Model file")->required();
  proj->add_option("--items", o.items, "File of item ids (default: all items)");
  proj->add_option("--out", o.out, "Output TSV")->required();

  auto* syn = app.add_subcommand("synth", kSynthHelp);
  syn->add_option("--profile", o.profile, "twoblock or coldstart")->capture_default_str();
  syn->add_option("--out", o.out, "Output directory")->required();
  syn->add_option("--seed", o.seed, "Random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    sync_configs(o);
    o.noise.validate();
    o.walk.validate();
    o.train.validate();
    if (*sess) return cmd_sessionize(o);
    if (*build) return cmd_build_graph(o);
    if (*walk) return cmd_walk(o);
    if (*tr) return cmd_train(o);
    if (*ev) return cmd_eval(o);
    if (*sim) return cmd_similar(o);
    if (*cold) return cmd_coldstart(o);
    if (*wts) return cmd_weights(o);
    if (*proj) return cmd_project(o);
    if (*syn) return cmd_synth(o);
  } catch (const ConfigError& e) {
    std::cerr << "eges: " << e.what() << '\n';
    return 1;
  } catch (const UnsupportedError& e) {
    std::cerr << "eges: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "eges: numeric failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "eges: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
