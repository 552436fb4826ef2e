#include "dhg/graph.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dhg/error.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace dhg {

std::string to_string(Direction d) { return d == Direction::Forward ? "forward" : "reverse"; }

Direction direction_from_string(const std::string& s) {
  if (s == "forward") return Direction::Forward;
  if (s == "reverse") return Direction::Reverse;
  throw ConfigError("unknown direction '" + s + "' (expected forward or reverse)");
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw ConfigError("cannot format value");
  return std::string(buf, ptr);
}

namespace {

bool valid_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
  return true;
}

}  // namespace

int32_t Schema::add_node_type(const std::string& name, int64_t feature_dim) {
  if (!valid_name(name))
    throw ConfigError("node type name '" + name + "' must be nonempty [A-Za-z0-9_]");
  if (feature_dim < 1)
    throw ConfigError("node type '" + name + "': feature_dim must be >= 1");
  for (const auto& t : node_types_)
    if (t.name == name) throw ConfigError("duplicate node type name '" + name + "'");
  node_types_.push_back({name, feature_dim});
  return static_cast<int32_t>(node_types_.size() - 1);
}

int32_t Schema::add_edge_type(const std::string& name, const std::string& src_type,
                              const std::string& dst_type) {
  if (!valid_name(name))
    throw ConfigError("edge type name '" + name + "' must be nonempty [A-Za-z0-9_]");
  for (const auto& t : node_types_)
    if (t.name == name) throw ConfigError("edge type name '" + name + "' collides with a node type");
  for (const auto& e : edge_types_)
    if (e.name == name) throw ConfigError("duplicate edge type name '" + name + "'");
  edge_types_.push_back({name, node_type_id(src_type), node_type_id(dst_type)});
  return static_cast<int32_t>(edge_types_.size() - 1);
}

int32_t Schema::node_type_id(const std::string& name) const {
  for (size_t i = 0; i < node_types_.size(); ++i)
    if (node_types_[i].name == name) return static_cast<int32_t>(i);
  throw ConfigError("unknown node type '" + name + "'");
}

int32_t Schema::edge_type_id(const std::string& name) const {
  for (size_t i = 0; i < edge_types_.size(); ++i)
    if (edge_types_[i].name == name) return static_cast<int32_t>(i);
  throw ConfigError("unknown edge type '" + name + "'");
}

int32_t Schema::step_from(int32_t edge_type, Direction dir) const {
  const EdgeTypeInfo& e = this->edge_type(edge_type);
  return dir == Direction::Forward ? e.src_type : e.dst_type;
}

int32_t Schema::step_to(int32_t edge_type, Direction dir) const {
  const EdgeTypeInfo& e = this->edge_type(edge_type);
  return dir == Direction::Forward ? e.dst_type : e.src_type;
}

std::vector<std::pair<int32_t, Direction>> Schema::incident(int32_t node_type) const {
  std::vector<std::pair<int32_t, Direction>> out;
  for (int32_t e = 0; e < num_edge_types(); ++e) {
    if (edge_types_[static_cast<size_t>(e)].src_type == node_type)
      out.emplace_back(e, Direction::Forward);
    if (edge_types_[static_cast<size_t>(e)].dst_type == node_type)
      out.emplace_back(e, Direction::Reverse);
  }
  return out;
}

std::vector<int32_t> metapath_type_check(const Schema& schema, const Metapath& m) {
  if (m.steps.empty()) throw ConfigError("metapath '" + m.name + "' has no steps");
  std::vector<int32_t> types;
  types.push_back(schema.step_from(m.steps[0].edge_type, m.steps[0].dir));
  for (size_t k = 0; k < m.steps.size(); ++k) {
    const MetapathStep& s = m.steps[k];
    const int32_t from = schema.step_from(s.edge_type, s.dir);
    if (from != types.back())
      throw ConfigError("metapath '" + m.name + "': step " + std::to_string(k + 1) +
                        " starts at type '" + schema.node_type(from).name +
                        "' but the path is at type '" + schema.node_type(types.back()).name +
                        "'");
    types.push_back(schema.step_to(s.edge_type, s.dir));
  }
  return types;
}

HeteroGraph::HeteroGraph(Schema schema) : schema_(std::move(schema)) {
  node_counts_.assign(static_cast<size_t>(schema_.num_node_types()), 0);
  feats_.resize(static_cast<size_t>(schema_.num_node_types()));
  edges_.resize(static_cast<size_t>(schema_.num_edge_types()));
}

int64_t HeteroGraph::add_node(int32_t type, std::vector<double> feature) {
  if (type < 0 || type >= schema_.num_node_types())
    throw ConfigError("add_node: invalid node type id " + std::to_string(type));
  const int64_t dim = schema_.node_type(type).feature_dim;
  if (static_cast<int64_t>(feature.size()) != dim)
    throw ConfigError("add_node: node type '" + schema_.node_type(type).name + "' expects " +
                      std::to_string(dim) + " features, got " + std::to_string(feature.size()));
  auto& store = feats_[static_cast<size_t>(type)];
  store.insert(store.end(), feature.begin(), feature.end());
  finalized_ = false;
  return node_counts_[static_cast<size_t>(type)]++;
}

void HeteroGraph::add_edge(int32_t edge_type, int64_t src, int64_t dst) {
  if (edge_type < 0 || edge_type >= schema_.num_edge_types())
    throw ConfigError("add_edge: invalid edge type id " + std::to_string(edge_type));
  const EdgeTypeInfo& e = schema_.edge_type(edge_type);
  bool ok = true;
  if (src < 0 || src >= num_nodes(e.src_type)) {
    construction_violations_.push_back("edge type '" + e.name + "': source index " +
                                       std::to_string(src) + " out of range for type '" +
                                       schema_.node_type(e.src_type).name + "' (count " +
                                       std::to_string(num_nodes(e.src_type)) + ")");
    ok = false;
  }
  if (dst < 0 || dst >= num_nodes(e.dst_type)) {
    construction_violations_.push_back("edge type '" + e.name + "': destination index " +
                                       std::to_string(dst) + " out of range for type '" +
                                       schema_.node_type(e.dst_type).name + "' (count " +
                                       std::to_string(num_nodes(e.dst_type)) + ")");
    ok = false;
  }
  if (ok) {
    edges_[static_cast<size_t>(edge_type)].emplace_back(src, dst);
    finalized_ = false;
  }
}

void HeteroGraph::add_edge(int32_t edge_type, NodeRef src, NodeRef dst) {
  if (edge_type < 0 || edge_type >= schema_.num_edge_types())
    throw ConfigError("add_edge: invalid edge type id " + std::to_string(edge_type));
  const EdgeTypeInfo& e = schema_.edge_type(edge_type);
  bool ok = true;
  if (src.type != e.src_type) {
    construction_violations_.push_back(
        "edge type '" + e.name + "': source (" + schema_.node_type(src.type).name + " " +
        std::to_string(src.index) + ") has the wrong type, expected '" +
        schema_.node_type(e.src_type).name + "'");
    ok = false;
  }
  if (dst.type != e.dst_type) {
    construction_violations_.push_back(
        "edge type '" + e.name + "': destination (" + schema_.node_type(dst.type).name + " " +
        std::to_string(dst.index) + ") has the wrong type, expected '" +
        schema_.node_type(e.dst_type).name + "'");
    ok = false;
  }
  if (ok) add_edge(edge_type, src.index, dst.index);
}

int64_t HeteroGraph::num_nodes(int32_t type) const {
  if (type < 0 || type >= schema_.num_node_types())
    throw ConfigError("num_nodes: invalid node type id " + std::to_string(type));
  return node_counts_[static_cast<size_t>(type)];
}

int64_t HeteroGraph::total_nodes() const {
  int64_t n = 0;
  for (int64_t c : node_counts_) n += c;
  return n;
}

int64_t HeteroGraph::total_edges() const {
  int64_t n = 0;
  for (const auto& v : edges_) n += static_cast<int64_t>(v.size());
  return n;
}

const std::vector<std::pair<int64_t, int64_t>>& HeteroGraph::edge_list(int32_t edge_type) const {
  if (edge_type < 0 || edge_type >= schema_.num_edge_types())
    throw ConfigError("edge_list: invalid edge type id " + std::to_string(edge_type));
  return edges_[static_cast<size_t>(edge_type)];
}

Tensor HeteroGraph::feature_row(int32_t type, int64_t index) const {
  if (index < 0 || index >= num_nodes(type))
    throw ConfigError("feature_row: index " + std::to_string(index) +
                      " out of range for node type '" + schema_.node_type(type).name + "'");
  const int64_t dim = schema_.node_type(type).feature_dim;
  const double* base = feats_[static_cast<size_t>(type)].data() + index * dim;
  return Tensor(1, dim, std::vector<double>(base, base + dim));
}

const std::vector<double>& HeteroGraph::feature_data(int32_t type) const {
  if (type < 0 || type >= schema_.num_node_types())
    throw ConfigError("feature_data: invalid node type id " + std::to_string(type));
  return feats_[static_cast<size_t>(type)];
}

void HeteroGraph::set_target_type(int32_t type, int64_t num_classes) {
  if (type < 0 || type >= schema_.num_node_types())
    throw ConfigError("set_target_type: invalid node type id " + std::to_string(type));
  if (num_classes < 1) throw ConfigError("set_target_type: num_classes must be >= 1");
  target_type_ = type;
  num_classes_ = num_classes;
}

void HeteroGraph::set_label(int64_t target_index, int64_t cls) {
  if (target_type_ < 0) throw ConfigError("set_label: no target type designated");
  if (target_index < 0 || target_index >= num_nodes(target_type_)) {
    construction_violations_.push_back("label for target index " + std::to_string(target_index) +
                                       " out of range (count " +
                                       std::to_string(num_nodes(target_type_)) + ")");
    return;
  }
  if (labels_.size() < static_cast<size_t>(num_nodes(target_type_)))
    labels_.resize(static_cast<size_t>(num_nodes(target_type_)), -1);
  labels_[static_cast<size_t>(target_index)] = cls;
}

int64_t HeteroGraph::label(int64_t target_index) const {
  if (target_type_ < 0) throw ConfigError("label: no target type designated");
  if (target_index < 0 || target_index >= static_cast<int64_t>(labels_.size()))
    throw ConfigError("label: target index " + std::to_string(target_index) + " out of range");
  return labels_[static_cast<size_t>(target_index)];
}

void HeteroGraph::register_metapath(Metapath m) {
  metapath_type_check(schema_, m);  // reject broken chains at registration
  for (const auto& existing : metapaths_)
    if (existing.name == m.name)
      throw ConfigError("duplicate metapath name '" + m.name + "'");
  metapaths_.push_back(std::move(m));
}

void HeteroGraph::finalize() {
  const auto ne = static_cast<size_t>(schema_.num_edge_types());
  fwd_.assign(ne, {});
  rev_.assign(ne, {});
  for (size_t e = 0; e < ne; ++e) {
    const EdgeTypeInfo& info = schema_.edge_type(static_cast<int32_t>(e));
    const auto& list = edges_[e];
    const auto ns = static_cast<size_t>(num_nodes(info.src_type));
    const auto nd = static_cast<size_t>(num_nodes(info.dst_type));
    Csr& f = fwd_[e];
    Csr& r = rev_[e];
    f.offsets.assign(ns + 1, 0);
    r.offsets.assign(nd + 1, 0);
    for (const auto& [s, d] : list) {
      ++f.offsets[static_cast<size_t>(s) + 1];
      ++r.offsets[static_cast<size_t>(d) + 1];
    }
    for (size_t i = 1; i < f.offsets.size(); ++i) f.offsets[i] += f.offsets[i - 1];
    for (size_t i = 1; i < r.offsets.size(); ++i) r.offsets[i] += r.offsets[i - 1];
    f.values.resize(list.size());
    r.values.resize(list.size());
    std::vector<int64_t> fc(ns, 0), rc(nd, 0);
    for (const auto& [s, d] : list) {
      f.values[static_cast<size_t>(f.offsets[static_cast<size_t>(s)] + fc[static_cast<size_t>(s)]++)] = d;
      r.values[static_cast<size_t>(r.offsets[static_cast<size_t>(d)] + rc[static_cast<size_t>(d)]++)] = s;
    }
    for (size_t i = 0; i < ns; ++i)
      std::sort(f.values.begin() + f.offsets[i], f.values.begin() + f.offsets[i + 1]);
    for (size_t i = 0; i < nd; ++i)
      std::sort(r.values.begin() + r.offsets[i], r.values.begin() + r.offsets[i + 1]);
  }
  finalized_ = true;
}

std::span<const int64_t> HeteroGraph::neighbors(int32_t node_type, int64_t index,
                                                int32_t edge_type, Direction dir) const {
  if (!finalized_) throw ConfigError("neighbors: graph not finalized");
  if (edge_type < 0 || edge_type >= schema_.num_edge_types())
    throw ConfigError("neighbors: invalid edge type id " + std::to_string(edge_type));
  const int32_t expected = schema_.step_from(edge_type, dir);
  if (node_type != expected)
    throw ConfigError("neighbors: node type '" + schema_.node_type(node_type).name +
                      "' cannot traverse edge type '" + schema_.edge_type(edge_type).name +
                      "' " + to_string(dir) + " (expects '" + schema_.node_type(expected).name +
                      "')");
  if (index < 0 || index >= num_nodes(node_type))
    throw ConfigError("neighbors: index " + std::to_string(index) +
                      " out of range for node type '" + schema_.node_type(node_type).name + "'");
  const Csr& csr = dir == Direction::Forward ? fwd_[static_cast<size_t>(edge_type)]
                                             : rev_[static_cast<size_t>(edge_type)];
  const auto lo = static_cast<size_t>(csr.offsets[static_cast<size_t>(index)]);
  const auto hi = static_cast<size_t>(csr.offsets[static_cast<size_t>(index) + 1]);
  return std::span<const int64_t>(csr.values.data() + lo, hi - lo);
}

int64_t HeteroGraph::degree(int32_t node_type, int64_t index, int32_t edge_type,
                            Direction dir) const {
  return static_cast<int64_t>(neighbors(node_type, index, edge_type, dir).size());
}

std::vector<std::string> HeteroGraph::validate() const {
  std::vector<std::string> out = construction_violations_;
  for (int32_t t = 0; t < schema_.num_node_types(); ++t) {
    const auto& info = schema_.node_type(t);
    const auto expected = static_cast<size_t>(node_counts_[static_cast<size_t>(t)] * info.feature_dim);
    if (feats_[static_cast<size_t>(t)].size() != expected)
      out.push_back("node type '" + info.name + "': feature storage holds " +
                    std::to_string(feats_[static_cast<size_t>(t)].size()) + " values, expected " +
                    std::to_string(expected));
  }
  if (schema_.num_node_types() > 0 || target_type_ >= 0) {
    if (target_type_ < 0) {
      out.push_back("no target node type designated");
    } else {
      const int64_t n = num_nodes(target_type_);
      if (static_cast<int64_t>(labels_.size()) != n)
        out.push_back("label count mismatch: " + std::to_string(labels_.size()) + " labels for " +
                      std::to_string(n) + " '" + schema_.node_type(target_type_).name + "' nodes");
      const int64_t upto = std::min<int64_t>(n, static_cast<int64_t>(labels_.size()));
      for (int64_t i = 0; i < upto; ++i) {
        const int64_t c = labels_[static_cast<size_t>(i)];
        if (c < 0)
          out.push_back("target node " + std::to_string(i) + " has no label");
        else if (c >= num_classes_)
          out.push_back("target node " + std::to_string(i) + ": label " + std::to_string(c) +
                        " out of range for " + std::to_string(num_classes_) + " classes");
      }
    }
  }
  for (const auto& m : metapaths_) {
    try {
      metapath_type_check(schema_, m);
    } catch (const ConfigError& e) {
      out.push_back(e.what());
    }
  }
  return out;
}

std::string HeteroGraph::summary() const {
  std::ostringstream os;
  os << "node types (" << schema_.num_node_types() << "):\n";
  for (int32_t t = 0; t < schema_.num_node_types(); ++t)
    os << "  " << schema_.node_type(t).name << ": " << num_nodes(t) << " nodes, feature dim "
       << schema_.node_type(t).feature_dim << "\n";
  os << "edge types (" << schema_.num_edge_types() << "):\n";
  for (int32_t e = 0; e < schema_.num_edge_types(); ++e) {
    const auto& info = schema_.edge_type(e);
    os << "  " << info.name << ": " << edges_[static_cast<size_t>(e)].size() << " edges ("
       << schema_.node_type(info.src_type).name << " -> "
       << schema_.node_type(info.dst_type).name << ")\n";
  }
  os << "total: " << total_nodes() << " nodes, " << total_edges() << " edges\n";
  if (target_type_ >= 0)
    os << "target type: " << schema_.node_type(target_type_).name << ", " << num_classes_
       << " classes\n";
  if (!metapaths_.empty()) {
    os << "metapaths (" << metapaths_.size() << "):";
    for (const auto& m : metapaths_) os << " " << m.name;
    os << "\n";
  }
  return os.str();
}

namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> out;
  size_t start = 0;
  while (true) {
    const size_t tab = line.find('\t', start);
    if (tab == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
}

int64_t parse_int(std::string_view s, const std::string& where) {
  int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(where + ": expected an integer, got '" + std::string(s) + "'");
  return v;
}

double parse_float(std::string_view s, const std::string& where) {
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ConfigError(where + ": expected a number, got '" + std::string(s) + "'");
  return v;
}

json read_json_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << content;
  if (!out) throw ConfigError("short write to " + path.string());
}

// Applies `fn(line_number, line)` to each LF-terminated line.
template <typename Fn>
void for_each_line(const fs::path& path, Fn&& fn) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path.string());
  std::string line;
  int64_t no = 0;
  while (std::getline(in, line)) {
    ++no;
    if (line.empty()) continue;
    fn(no, std::string_view(line));
  }
}

Metapath metapath_from_json(const Schema& schema, const json& j, const std::string& where) {
  Metapath m;
  try {
    m.name = j.at("name").get<std::string>();
    for (const auto& step : j.at("steps"))
      m.steps.push_back({schema.edge_type_id(step.at("edge_type").get<std::string>()),
                         direction_from_string(step.at("direction").get<std::string>())});
  } catch (const json::exception& e) {
    throw ConfigError(where + ": malformed metapath: " + e.what());
  }
  return m;
}

}  // namespace

SchemaFile load_schema_file(const std::string& path) {
  const json j = read_json_file(path);
  SchemaFile out;
  try {
    for (const auto& nt : j.at("node_types"))
      out.schema.add_node_type(nt.at("name").get<std::string>(),
                               nt.at("feature_dim").get<int64_t>());
    for (const auto& et : j.at("edge_types"))
      out.schema.add_edge_type(et.at("name").get<std::string>(), et.at("src").get<std::string>(),
                               et.at("dst").get<std::string>());
    out.target_type = out.schema.node_type_id(j.at("target_type").get<std::string>());
    out.num_classes = j.at("num_classes").get<int64_t>();
    for (const auto& mp : j.value("metapaths", json::array()))
      out.metapaths.push_back(metapath_from_json(out.schema, mp, path));
  } catch (const json::exception& e) {
    throw ConfigError("malformed schema file " + path + ": " + e.what());
  }
  return out;
}

Dataset load_dataset(const std::string& dir) {
  const fs::path root(dir);
  SchemaFile sf = load_schema_file((root / "schema.json").string());
  HeteroGraph g(sf.schema);
  g.set_target_type(sf.target_type, sf.num_classes);
  for (auto& m : sf.metapaths) g.register_metapath(std::move(m));
  const Schema& schema = g.schema();

  for (int32_t t = 0; t < schema.num_node_types(); ++t) {
    const auto& info = schema.node_type(t);
    const fs::path file = root / ("nodes_" + info.name + ".tsv");
    for_each_line(file, [&](int64_t no, std::string_view line) {
      const std::string where = file.string() + ":" + std::to_string(no);
      const auto fields = split_tabs(line);
      if (static_cast<int64_t>(fields.size()) != 1 + info.feature_dim)
        throw ConfigError(where + ": expected " + std::to_string(1 + info.feature_dim) +
                          " fields, got " + std::to_string(fields.size()));
      const int64_t idx = parse_int(fields[0], where);
      if (idx != g.num_nodes(t))
        throw ConfigError(where + ": local_index " + std::to_string(idx) +
                          " out of order (expected " + std::to_string(g.num_nodes(t)) + ")");
      std::vector<double> feat(static_cast<size_t>(info.feature_dim));
      for (int64_t k = 0; k < info.feature_dim; ++k)
        feat[static_cast<size_t>(k)] = parse_float(fields[static_cast<size_t>(k) + 1], where);
      g.add_node(t, std::move(feat));
    });
  }

  for (int32_t e = 0; e < schema.num_edge_types(); ++e) {
    const fs::path file = root / ("edges_" + schema.edge_type(e).name + ".tsv");
    for_each_line(file, [&](int64_t no, std::string_view line) {
      const std::string where = file.string() + ":" + std::to_string(no);
      const auto fields = split_tabs(line);
      if (fields.size() != 2)
        throw ConfigError(where + ": expected 2 fields, got " + std::to_string(fields.size()));
      g.add_edge(e, parse_int(fields[0], where), parse_int(fields[1], where));
    });
  }

  {
    const fs::path file = root / "labels.tsv";
    for_each_line(file, [&](int64_t no, std::string_view line) {
      const std::string where = file.string() + ":" + std::to_string(no);
      const auto fields = split_tabs(line);
      if (fields.size() != 2)
        throw ConfigError(where + ": expected 2 fields, got " + std::to_string(fields.size()));
      g.set_label(parse_int(fields[0], where), parse_int(fields[1], where));
    });
  }

  Dataset ds;
  ds.graph = std::move(g);
  const json splits = read_json_file(root / "splits.json");
  try {
    for (const auto& fold : splits.at("folds"))
      ds.folds.push_back(fold.get<std::vector<int64_t>>());
  } catch (const json::exception& e) {
    throw ConfigError("malformed splits in " + (root / "splits.json").string() + ": " + e.what());
  }
  ds.graph.finalize();
  return ds;
}

void save_dataset(const std::string& dir, const Dataset& ds) {
  const fs::path root(dir);
  fs::create_directories(root);
  const HeteroGraph& g = ds.graph;
  const Schema& schema = g.schema();
  if (g.target_type() < 0) throw ConfigError("cannot save dataset: no target type designated");

  json sj;
  sj["node_types"] = json::array();
  for (int32_t t = 0; t < schema.num_node_types(); ++t)
    sj["node_types"].push_back(
        {{"name", schema.node_type(t).name}, {"feature_dim", schema.node_type(t).feature_dim}});
  sj["edge_types"] = json::array();
  for (int32_t e = 0; e < schema.num_edge_types(); ++e) {
    const auto& info = schema.edge_type(e);
    sj["edge_types"].push_back({{"name", info.name},
                                {"src", schema.node_type(info.src_type).name},
                                {"dst", schema.node_type(info.dst_type).name}});
  }
  sj["target_type"] = schema.node_type(g.target_type()).name;
  sj["num_classes"] = g.num_classes();
  sj["metapaths"] = json::array();
  for (const auto& m : g.metapaths()) {
    json steps = json::array();
    for (const auto& s : m.steps)
      steps.push_back(
          {{"edge_type", schema.edge_type(s.edge_type).name}, {"direction", to_string(s.dir)}});
    sj["metapaths"].push_back({{"name", m.name}, {"steps", steps}});
  }
  write_text_file(root / "schema.json", sj.dump(2) + "\n");

  for (int32_t t = 0; t < schema.num_node_types(); ++t) {
    const auto& info = schema.node_type(t);
    const auto& data = g.feature_data(t);
    std::string body;
    for (int64_t i = 0; i < g.num_nodes(t); ++i) {
      body += std::to_string(i);
      for (int64_t k = 0; k < info.feature_dim; ++k) {
        body += '\t';
        body += format_double(data[static_cast<size_t>(i * info.feature_dim + k)]);
      }
      body += '\n';
    }
    write_text_file(root / ("nodes_" + info.name + ".tsv"), body);
  }

  for (int32_t e = 0; e < schema.num_edge_types(); ++e) {
    std::string body;
    for (const auto& [s, d] : g.edge_list(e))
      body += std::to_string(s) + "\t" + std::to_string(d) + "\n";
    write_text_file(root / ("edges_" + schema.edge_type(e).name + ".tsv"), body);
  }

  {
    std::string body;
    for (int64_t i = 0; i < g.num_nodes(g.target_type()); ++i) {
      const int64_t c = g.label(i);
      if (c < 0)
        throw ConfigError("cannot save dataset: target node " + std::to_string(i) +
                          " has no label");
      body += std::to_string(i) + "\t" + std::to_string(c) + "\n";
    }
    write_text_file(root / "labels.tsv", body);
  }

  write_text_file(root / "splits.json", json{{"folds", ds.folds}}.dump(2) + "\n");
}

std::vector<std::string> validate_splits(const Dataset& ds) {
  std::vector<std::string> out;
  if (ds.graph.target_type() < 0) {
    out.push_back("splits: no target type designated");
    return out;
  }
  const int64_t n = ds.graph.num_nodes(ds.graph.target_type());
  std::vector<int8_t> seen(static_cast<size_t>(n), 0);
  for (size_t f = 0; f < ds.folds.size(); ++f) {
    for (int64_t idx : ds.folds[f]) {
      if (idx < 0 || idx >= n) {
        out.push_back("fold " + std::to_string(f) + ": index " + std::to_string(idx) +
                      " out of range (target count " + std::to_string(n) + ")");
        continue;
      }
      if (seen[static_cast<size_t>(idx)]++)
        out.push_back("fold " + std::to_string(f) + ": index " + std::to_string(idx) +
                      " appears in more than one fold");
    }
  }
  int64_t missing = 0;
  for (int64_t i = 0; i < n; ++i)
    if (!seen[static_cast<size_t>(i)]) ++missing;
  if (missing > 0)
    out.push_back("folds do not cover " + std::to_string(missing) + " target nodes");
  return out;
}

}  // namespace dhg
