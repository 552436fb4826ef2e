#include <sys/wait.h>
#include <unistd.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "dhg/error.hpp"
#include "dhg/gradcheck.hpp"
#include "dhg/graph.hpp"
#include "dhg/metrics.hpp"
#include "dhg/model.hpp"
#include "dhg/params.hpp"
#include "dhg/rng.hpp"
#include "dhg/sampling.hpp"
#include "dhg/sen.hpp"
#include "dhg/synthetic.hpp"
#include "dhg/trainer.hpp"

namespace fs = std::filesystem;
using namespace dhg;

namespace {

int32_t parse_layers(const std::string& s) {
  try {
    size_t pos = 0;
    const int v = std::stoi(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return static_cast<int32_t>(v);
  } catch (const std::exception&) {
    throw ConfigError("--layers must be an integer or 'auto', got '" + s + "'");
  }
}

// Comma-separated integers and inclusive a..b ranges, e.g. "1,3,5..8".
std::vector<int64_t> parse_int_list(const std::string& s, const std::string& what) {
  std::vector<int64_t> out;
  std::stringstream ss(s);
  std::string tok;
  auto one = [&](const std::string& text) {
    size_t pos = 0;
    const long long v = std::stoll(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return static_cast<int64_t>(v);
  };
  while (std::getline(ss, tok, ',')) {
    try {
      const size_t dots = tok.find("..");
      if (dots == std::string::npos) {
        out.push_back(one(tok));
      } else {
        const int64_t lo = one(tok.substr(0, dots));
        const int64_t hi = one(tok.substr(dots + 2));
        if (hi < lo) throw std::invalid_argument(tok);
        for (int64_t v = lo; v <= hi; ++v) out.push_back(v);
      }
    } catch (const std::exception&) {
      throw ConfigError("bad " + what + " entry '" + tok + "' (want e.g. \"1,3\" or \"1..10\")");
    }
  }
  if (out.empty()) throw ConfigError("empty " + what + " list");
  return out;
}

void require_valid(const Dataset& ds, const std::string& dir) {
  std::vector<std::string> viol = ds.graph.validate();
  for (const auto& v : validate_splits(ds)) viol.push_back(v);
  if (viol.empty()) return;
  std::ostringstream os;
  os << "dataset '" << dir << "' failed validation:";
  for (const auto& v : viol) os << "\n  - " << v;
  throw ConfigError(os.str());
}

std::string dataset_label(const std::string& dir) {
  std::string name = fs::path(dir).filename().string();
  if (name.empty()) name = fs::path(dir).parent_path().filename().string();
  return name.empty() ? "dataset" : name;
}

// Chunked evaluation of a parameter set on explicit targets.
struct EvalMetrics {
  double nll = 0.0;
  double micro = 0.0;
  double macro = 0.0;
};

EvalMetrics evaluate_targets(const Model& model, ParameterStore& store, const Dataset& ds,
                             const std::vector<int64_t>& targets, int64_t batch_size,
                             const SampleConfig& sc, Rng& rng) {
  std::vector<std::vector<double>> lps;
  std::vector<int64_t> preds, labels;
  for (size_t i = 0; i < targets.size(); i += static_cast<size_t>(batch_size)) {
    const size_t end = std::min(targets.size(), i + static_cast<size_t>(batch_size));
    const std::vector<int64_t> chunk(targets.begin() + static_cast<int64_t>(i),
                                     targets.begin() + static_cast<int64_t>(end));
    Tape tape;
    std::vector<Tape::Val> logits;
    if (model.config().variant == Variant::Rgcn) {
      const RgcnBatch b = build_rgcn_batch(ds.graph, chunk, model.config().layers, sc, rng);
      logits = model.forward(tape, store, b);
    } else {
      const Batch b =
          build_batch(ds.graph, model.sen_template(), chunk, model.config().layers, sc, rng);
      logits = model.forward(tape, store, b);
    }
    for (size_t j = 0; j < chunk.size(); ++j) {
      const std::vector<double> row = tape.value(logits[j]).vec();
      lps.push_back(log_softmax(row));
      preds.push_back(argmax(row));
      labels.push_back(ds.graph.label(chunk[j]));
    }
  }
  EvalMetrics m;
  m.nll = nll(lps, labels);
  m.micro = micro_f1(preds, labels);
  m.macro = macro_f1(preds, labels, ds.graph.num_classes());
  return m;
}

// ---------------------------------------------------------------- generate

struct GenArgs {
  SynthConfig cfg;
  std::string out;
  bool force = false;
};

int cmd_generate(const GenArgs& a) {
  if (fs::exists(a.out) && fs::is_directory(a.out) && !fs::is_empty(a.out) && !a.force)
    throw ConfigError("output directory '" + a.out +
                      "' exists and is not empty (pass --force to overwrite)");
  const SynthResult r = generate(a.cfg);
  fs::create_directories(a.out);
  save_dataset(a.out, r.dataset);
  save_trace((fs::path(a.out) / "trace.json").string(), r.trace);
  std::cout << "family " << a.cfg.family_index << ", seed " << a.cfg.seed << "\n";
  std::cout << r.dataset.graph.summary();
  std::cout << "folds:";
  for (const auto& f : r.dataset.folds) std::cout << " " << f.size();
  std::cout << "\n";
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  std::string dataset;
  std::string variant = "dhgcn-h";
  std::string layers = "1";
  std::string out;
  TrainConfig tcfg;
  int64_t hidden_dim = 64;
  bool allow_any_fold_count = false;
  bool per_fold = false;
};

int cmd_train(const TrainArgs& a) {
  if (a.per_fold && a.layers != "auto")
    throw ConfigError("--per-fold-layers requires --layers auto");
  const Dataset ds = load_dataset(a.dataset);
  require_valid(ds, a.dataset);

  ModelConfig mc;
  mc.variant = variant_from_string(a.variant);
  mc.hidden_dim = a.hidden_dim;
  const std::string name = dataset_label(a.dataset);
  fs::create_directories(a.out);

  CvReport rep;
  std::vector<ParameterStore> checkpoints;
  std::vector<int64_t> checkpoint_folds;

  if (a.layers == "auto") {
    const LayerSelection sel = select_layers(ds, mc, a.tcfg, name, a.allow_any_fold_count);
    std::cout << "layer search (mean validation nll):\n";
    for (size_t i = 0; i < sel.grid.ks.size(); ++i) {
      const auto vals = collect(sel.grid.reports[i].rows, &FoldResult::best_val_nll);
      std::cout << "  k=" << sel.grid.ks[i] << "  " << format_double(mean_of(vals)) << "\n";
    }
    if (a.per_fold) {
      const std::vector<int32_t> ks = per_fold_selection(sel.grid);
      std::cout << "selected layers per fold:";
      for (int32_t k : ks) std::cout << " " << k;
      std::cout << "\n";
      rep.dataset_name = name;
      rep.variant = a.variant;
      rep.layers = -1;  // per-row values carry the per-fold selection
      for (size_t f = 0; f < ks.size(); ++f) {
        ModelConfig mk = mc;
        mk.layers = ks[f];
        ParameterStore best;
        rep.rows.push_back(run_fold(ds, static_cast<int64_t>(f), mk, a.tcfg, &best));
        checkpoints.push_back(std::move(best));
        checkpoint_folds.push_back(static_cast<int64_t>(f));
      }
    } else {
      std::cout << "selected layers: " << sel.best_k << "\n";
      mc.layers = sel.best_k;
      rep = cross_validate(ds, mc, a.tcfg, name, a.allow_any_fold_count, {}, &checkpoints);
      for (const auto& row : rep.rows) checkpoint_folds.push_back(row.fold);
    }
  } else {
    mc.layers = parse_layers(a.layers);
    rep = cross_validate(ds, mc, a.tcfg, name, a.allow_any_fold_count, {}, &checkpoints);
    for (const auto& row : rep.rows) checkpoint_folds.push_back(row.fold);
  }

  for (size_t i = 0; i < checkpoints.size(); ++i) {
    const fs::path p =
        fs::path(a.out) / ("fold" + std::to_string(checkpoint_folds[i]) + ".json");
    checkpoints[i].save(p.string());
  }
  write_metrics_csv((fs::path(a.out) / "metrics.csv").string(), {rep});
  std::cout << format_report(rep);
  std::cout << "wrote " << (fs::path(a.out) / "metrics.csv").string() << "\n";
  return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
  std::string dataset;
  std::string checkpoint;
  std::string variant = "dhgcn-h";
  int32_t layers = 1;
  int64_t fold = 0;
  int64_t hidden_dim = 64;
  TrainConfig tcfg;
};

int cmd_eval(const EvalArgs& a) {
  const Dataset ds = load_dataset(a.dataset);
  require_valid(ds, a.dataset);
  if (a.fold < 0 || a.fold >= static_cast<int64_t>(ds.folds.size()))
    throw ConfigError("--fold " + std::to_string(a.fold) + " out of range for " +
                      std::to_string(ds.folds.size()) + " folds");

  ModelConfig mc;
  mc.variant = variant_from_string(a.variant);
  mc.layers = a.layers;
  mc.hidden_dim = a.hidden_dim;
  const Model model(ds.graph, mc);
  ParameterStore store;
  model.init_params(store, 0);  // allocate exact shapes, then overwrite
  store.load(a.checkpoint);

  Rng rng(derive_seed(a.tcfg.seed, {hash_tag("test"), static_cast<uint64_t>(a.fold)}));
  const SampleConfig sc{a.tcfg.walks, a.tcfg.fanout};
  const EvalMetrics m = evaluate_targets(model, store, ds, ds.folds[static_cast<size_t>(a.fold)],
                                         a.tcfg.batch_size, sc, rng);
  std::cout << "fold " << a.fold << ": nll=" << format_double(m.nll)
            << " micro_f1=" << format_double(m.micro) << " macro_f1=" << format_double(m.macro)
            << "\n";
  return 0;
}

// -------------------------------------------------------------------- sweep

struct SweepArgs {
  std::string families;
  std::string variants;
  std::string seeds;
  std::string layers = "1";
  std::string out;
  int64_t targets = 2000;
  int64_t hidden_dim = 64;
  int64_t jobs = 1;
  SynthConfig gen;
  TrainConfig tcfg;
};

struct SweepCell {
  int64_t family = 0;
  std::string variant;
  uint64_t seed = 0;
  fs::path data_dir;
  fs::path run_dir;
};

void run_cell(const SweepArgs& a, const SweepCell& cell) {
  const Dataset ds = load_dataset(cell.data_dir.string());
  require_valid(ds, cell.data_dir.string());
  TrainConfig t = a.tcfg;
  t.seed = cell.seed;
  ModelConfig mc;
  mc.variant = variant_from_string(cell.variant);
  mc.hidden_dim = a.hidden_dim;
  const std::string name = "family" + std::to_string(cell.family);

  CvReport rep;
  if (a.layers == "auto") {
    const LayerSelection sel = select_layers(ds, mc, t, name);
    mc.layers = sel.best_k;
    rep = cross_validate(ds, mc, t, name);
  } else {
    mc.layers = parse_layers(a.layers);
    rep = cross_validate(ds, mc, t, name);
  }
  fs::create_directories(cell.run_dir);
  write_metrics_csv((cell.run_dir / "metrics.csv").string(), {rep});
  std::ofstream marker(cell.run_dir / ".complete", std::ios::binary);
  marker << "ok\n";
}

// Returns the aggregate mean row (dataset,variant,layers,nll,micro,macro).
std::vector<std::string> read_mean_row(const fs::path& csv) {
  std::ifstream in(csv);
  if (!in) throw ConfigError("missing cell result " + csv.string());
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string c;
    while (std::getline(ss, c, ',')) cols.push_back(c);
    if (cols.size() == 7 && cols[3] == "mean") return cols;
  }
  throw ConfigError("no aggregate row in " + csv.string());
}

int cmd_sweep(const SweepArgs& a) {
  const std::vector<int64_t> families = parse_int_list(a.families, "--families");
  const std::vector<int64_t> seeds = parse_int_list(a.seeds, "--seeds");
  std::vector<std::string> variants;
  {
    std::stringstream ss(a.variants);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.empty()) continue;
      variant_from_string(tok);  // validate early
      variants.push_back(tok);
    }
    if (variants.empty()) throw ConfigError("empty --variants list");
  }
  if (a.jobs < 1) throw ConfigError("--jobs must be >= 1");
  if (a.targets < 1) throw ConfigError("--targets must be >= 1");
  fs::create_directories(a.out);

  // Datasets first (shared across variants), serial so parallel cells never
  // race on generation.
  for (int64_t family : families) {
    for (int64_t seed : seeds) {
      const fs::path dir = fs::path(a.out) / ("data_f" + std::to_string(family) + "_s" +
                                              std::to_string(seed));
      if (fs::exists(dir / ".complete")) continue;
      fs::remove_all(dir);
      SynthConfig g = a.gen;
      g.family_index = static_cast<int32_t>(family);
      g.n_targets = a.targets;
      g.seed = static_cast<uint64_t>(seed);
      const SynthResult r = generate(g);
      fs::create_directories(dir);
      save_dataset(dir.string(), r.dataset);
      save_trace((dir / "trace.json").string(), r.trace);
      std::ofstream marker(dir / ".complete", std::ios::binary);
      marker << "ok\n";
      std::cout << "generated " << dir.string() << "\n";
    }
  }

  std::vector<SweepCell> cells;
  for (int64_t family : families) {
    for (const std::string& variant : variants) {
      for (int64_t seed : seeds) {
        SweepCell c;
        c.family = family;
        c.variant = variant;
        c.seed = static_cast<uint64_t>(seed);
        c.data_dir = fs::path(a.out) /
                     ("data_f" + std::to_string(family) + "_s" + std::to_string(seed));
        c.run_dir = fs::path(a.out) / ("run_f" + std::to_string(family) + "_" + variant + "_k" +
                                       a.layers + "_s" + std::to_string(seed));
        cells.push_back(std::move(c));
      }
    }
  }

  // 0 = ran, 1 = failed, 2 = skipped (marker present).
  std::vector<int> status(cells.size(), 1);
  if (a.jobs == 1) {
    for (size_t i = 0; i < cells.size(); ++i) {
      if (fs::exists(cells[i].run_dir / ".complete")) {
        status[i] = 2;
        continue;
      }
      try {
        run_cell(a, cells[i]);
        status[i] = 0;
      } catch (const std::exception& e) {
        std::cerr << "cell " << cells[i].run_dir.filename().string() << ": " << e.what() << "\n";
        status[i] = 1;
      }
    }
  } else {
    std::map<pid_t, size_t> running;
    size_t next = 0;
    auto reap = [&]() {
      int st = 0;
      const pid_t pid = waitpid(-1, &st, 0);
      if (pid <= 0) throw std::runtime_error("waitpid failed");
      const auto it = running.find(pid);
      if (it == running.end()) return;
      status[it->second] = (WIFEXITED(st) && WEXITSTATUS(st) == 0) ? 0 : 1;
      running.erase(it);
    };
    while (next < cells.size() || !running.empty()) {
      if (next < cells.size() && static_cast<int64_t>(running.size()) < a.jobs) {
        const size_t idx = next++;
        if (fs::exists(cells[idx].run_dir / ".complete")) {
          status[idx] = 2;
          continue;
        }
        const pid_t pid = fork();
        if (pid < 0) throw std::runtime_error("fork failed");
        if (pid == 0) {
          try {
            run_cell(a, cells[idx]);
            _exit(0);
          } catch (const std::exception& e) {
            std::cerr << "cell " << cells[idx].run_dir.filename().string() << ": " << e.what()
                      << "\n";
            _exit(1);
          } catch (...) {
            _exit(1);
          }
        }
        running[pid] = idx;
      } else {
        reap();
      }
    }
  }

  int64_t failures = 0;
  for (size_t i = 0; i < cells.size(); ++i) {
    const std::string label = cells[i].run_dir.filename().string();
    if (status[i] == 0) std::cout << "cell " << label << " ok\n";
    if (status[i] == 2) std::cout << "cell " << label << " skipped (already complete)\n";
    if (status[i] == 1) {
      std::cout << "cell " << label << " FAILED\n";
      ++failures;
    }
  }
  if (failures > 0) {
    std::cout << failures << " of " << cells.size() << " cells failed; rerun to retry them\n";
    return 2;
  }

  const fs::path combined = fs::path(a.out) / "sweep.csv";
  std::ofstream out(combined, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + combined.string());
  out << "family,variant,layers,seed,nll,micro_f1,macro_f1\n";
  for (const auto& cell : cells) {
    const auto cols = read_mean_row(cell.run_dir / "metrics.csv");
    out << cell.family << "," << cell.variant << "," << cols[2] << "," << cell.seed << ","
        << cols[4] << "," << cols[5] << "," << cols[6] << "\n";
  }
  out.close();
  std::cout << "wrote " << combined.string() << " (" << cells.size() << " rows)\n";
  return 0;
}

// --------------------------------------------------------- gradcheck / sen

int cmd_gradcheck(uint64_t seed) {
  const auto results = run_gradcheck(seed);
  std::cout << format_gradcheck(results);
  if (!gradcheck_passed(results)) {
    std::cout << "gradient check FAILED (tolerance 1e-4)\n";
    return 2;
  }
  std::cout << "all groups below tolerance 1e-4\n";
  return 0;
}

int cmd_show_sen(const std::string& dataset_dir) {
  const fs::path schema_path = fs::path(dataset_dir) / "schema.json";
  const SchemaFile sf = load_schema_file(schema_path.string());
  const SenTemplate tmpl = derive_sen_template(sf.schema, sf.target_type);
  std::cout << format_sen_template(sf.schema, tmpl);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heterogeneous-graph learning over schema-derived ego-networks"};
  app.require_subcommand(1);

  std::function<int()> action;

  GenArgs gen;
  CLI::App* g = app.add_subcommand("generate", "Build one synthetic dataset directory");
  g->add_option("--family", gen.cfg.family_index, "Family index (mean info neighbors), 1..10")
      ->required();
  g->add_option("--targets", gen.cfg.n_targets, "Number of target nodes");
  g->add_option("--seed", gen.cfg.seed, "Generator seed")->required();
  g->add_option("--out", gen.out, "Output dataset directory")->required();
  g->add_option("--feature-dim", gen.cfg.feature_dim, "Feature dimension of every node type");
  g->add_option("--classes", gen.cfg.num_classes, "Number of target classes");
  g->add_option("--components", gen.cfg.mixture_components, "Mixture components per class");
  g->add_option("--alpha", gen.cfg.dirichlet_alpha, "Dirichlet concentration");
  g->add_option("--info-std", gen.cfg.info_count_std, "Std of the info-count draw");
  g->add_option("--mean-scale", gen.cfg.component_mean_scale,
                "Std of component mean coordinates");
  g->add_flag("--force", gen.force, "Overwrite a non-empty output directory");
  g->callback([&] { action = [&] { return cmd_generate(gen); }; });

  auto add_train_options = [](CLI::App* c, TrainConfig* t) {
    c->add_option("--lr", t->lr, "Adam learning rate");
    c->add_option("--weight-decay", t->weight_decay, "Coupled L2 weight decay");
    c->add_option("--batch-size", t->batch_size, "Mini-batch size");
    c->add_option("--patience", t->patience, "Early-stopping patience in epochs");
    c->add_option("--max-layers", t->max_layers, "Top of the layer search grid");
    c->add_option("--folds", t->folds, "Expected fold count");
    c->add_option("--max-epochs", t->max_epochs, "Epoch cap per fold");
    c->add_option("--walks", t->walks, "Random walks per metapath per target");
    c->add_option("--fanout", t->fanout, "Sampled neighbor cap per expansion");
  };

  TrainArgs tr;
  CLI::App* t = app.add_subcommand("train", "Cross-validated training on a dataset directory");
  t->add_option("--dataset", tr.dataset, "Dataset directory")->required();
  t->add_option("--variant", tr.variant, "Model variant: dhgcn-h, dhgcn-s or rgcn");
  t->add_option("--layers", tr.layers, "Layer count or 'auto' for validation search");
  t->add_option("--seed", tr.tcfg.seed, "Run seed")->required();
  t->add_option("--out", tr.out, "Run output directory")->required();
  t->add_option("--hidden-dim", tr.hidden_dim, "Hidden width");
  t->add_flag("--allow-any-fold-count", tr.allow_any_fold_count,
              "Accept datasets whose fold count differs from --folds");
  t->add_flag("--per-fold-layers", tr.per_fold,
              "With --layers auto, pick the layer count per fold");
  add_train_options(t, &tr.tcfg);
  t->callback([&] { action = [&] { return cmd_train(tr); }; });

  EvalArgs ev;
  CLI::App* e = app.add_subcommand("eval", "Score a saved checkpoint on one fold");
  e->add_option("--dataset", ev.dataset, "Dataset directory")->required();
  e->add_option("--checkpoint", ev.checkpoint, "Checkpoint manifest path (fold<k>.json)")
      ->required();
  e->add_option("--variant", ev.variant, "Model variant the checkpoint belongs to");
  e->add_option("--layers", ev.layers, "Layer count the checkpoint was trained with");
  e->add_option("--fold", ev.fold, "Fold index to score");
  e->add_option("--seed", ev.tcfg.seed, "Sampling seed")->required();
  e->add_option("--hidden-dim", ev.hidden_dim, "Hidden width");
  e->add_option("--batch-size", ev.tcfg.batch_size, "Mini-batch size");
  e->add_option("--walks", ev.tcfg.walks, "Random walks per metapath per target");
  e->add_option("--fanout", ev.tcfg.fanout, "Sampled neighbor cap per expansion");
  e->callback([&] { action = [&] { return cmd_eval(ev); }; });

  SweepArgs sw;
  CLI::App* s = app.add_subcommand("sweep", "Families x variants x seeds grid of runs");
  s->add_option("--families", sw.families, "Family list, e.g. 1..10 or 1,8")->required();
  s->add_option("--variants", sw.variants, "Comma-separated variant list")->required();
  s->add_option("--seeds", sw.seeds, "Seed list, e.g. 0..4")->required();
  s->add_option("--out", sw.out, "Sweep output directory")->required();
  s->add_option("--layers", sw.layers, "Layer count or 'auto' applied to every cell");
  s->add_option("--targets", sw.targets, "Targets per generated dataset");
  s->add_option("--hidden-dim", sw.hidden_dim, "Hidden width");
  s->add_option("--jobs", sw.jobs, "Parallel worker processes");
  s->add_option("--feature-dim", sw.gen.feature_dim, "Feature dimension of every node type");
  s->add_option("--classes", sw.gen.num_classes, "Number of target classes");
  s->add_option("--components", sw.gen.mixture_components, "Mixture components per class");
  s->add_option("--alpha", sw.gen.dirichlet_alpha, "Dirichlet concentration");
  s->add_option("--info-std", sw.gen.info_count_std, "Std of the info-count draw");
  s->add_option("--mean-scale", sw.gen.component_mean_scale,
                "Std of component mean coordinates");
  add_train_options(s, &sw.tcfg);
  s->callback([&] { action = [&] { return cmd_sweep(sw); }; });

  uint64_t gc_seed = 0;
  CLI::App* gc = app.add_subcommand("gradcheck", "Finite-difference check of all gradients");
  gc->add_option("--seed", gc_seed, "Random input seed")->required();
  gc->callback([&] { action = [&] { return cmd_gradcheck(gc_seed); }; });

  std::string sen_dataset;
  CLI::App* sh = app.add_subcommand("show-sen", "Print the schema-derived ego-network template");
  sh->add_option("--dataset", sen_dataset, "Dataset directory (only schema.json is read)")
      ->required();
  sh->callback([&] { action = [&] { return cmd_show_sen(sen_dataset); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& err) {
    const int rc = app.exit(err);
    return rc == 0 ? 0 : 1;
  }

  try {
    return action();
  } catch (const ConfigError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "internal error: " << err.what() << "\n";
    return 2;
  }
}
