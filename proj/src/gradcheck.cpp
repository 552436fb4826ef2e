#include "dhg/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <utility>
#include <vector>

#include "dhg/model.hpp"
#include "dhg/params.hpp"
#include "dhg/rng.hpp"
#include "dhg/sampling.hpp"
#include "dhg/tape.hpp"

namespace dhg {

namespace {

constexpr double kStep = 1e-5;

Tensor rand_tensor(Rng& rng, int64_t r, int64_t c, double lo, double hi) {
  Tensor t(r, c);
  for (double& x : t.vec()) x = rng.uniform(lo, hi);
  return t;
}

// Magnitudes kept away from zero so kinked activations are differentiable at
// every probe point.
Tensor rand_tensor_off_origin(Rng& rng, int64_t r, int64_t c, double margin, double hi) {
  Tensor t(r, c);
  for (double& x : t.vec()) {
    const double mag = rng.uniform(margin, hi);
    x = rng.uniform() < 0.5 ? -mag : mag;
  }
  return t;
}

Parameter leaf(std::string name, Tensor value) {
  Parameter p;
  p.name = std::move(name);
  p.grad = Tensor(value.rows(), value.cols());
  p.m = Tensor(value.rows(), value.cols());
  p.v = Tensor(value.rows(), value.cols());
  p.value = std::move(value);
  return p;
}

double l2_norm(const Tensor& t) {
  double s = 0.0;
  for (double x : t.vec()) s += x * x;
  return std::sqrt(s);
}

double rel_err(const Tensor& g, const Tensor& fd) {
  Tensor diff = g;
  for (size_t i = 0; i < diff.vec().size(); ++i) diff.vec()[i] -= fd.vec()[i];
  return l2_norm(diff) / std::max(l2_norm(g) + l2_norm(fd), 1e-12);
}

using ScalarFn = std::function<Tape::Val(Tape&, const std::vector<Tape::Val>&)>;

// Max relative error over the given leaves for a scalar-valued expression.
double fd_max_rel_err(std::vector<Parameter>& params, const ScalarFn& f) {
  auto eval = [&]() {
    Tape tape;
    std::vector<Tape::Val> leaves;
    leaves.reserve(params.size());
    for (auto& p : params) leaves.push_back(tape.param(p));
    return tape.value(f(tape, leaves)).vec()[0];
  };
  for (auto& p : params) p.grad = Tensor(p.value.rows(), p.value.cols());
  {
    Tape tape;
    std::vector<Tape::Val> leaves;
    leaves.reserve(params.size());
    for (auto& p : params) leaves.push_back(tape.param(p));
    tape.backward(f(tape, leaves));
  }
  double worst = 0.0;
  for (auto& p : params) {
    Tensor fd(p.value.rows(), p.value.cols());
    for (size_t i = 0; i < fd.vec().size(); ++i) {
      const double keep = p.value.vec()[i];
      p.value.vec()[i] = keep + kStep;
      const double fp = eval();
      p.value.vec()[i] = keep - kStep;
      const double fm = eval();
      p.value.vec()[i] = keep;
      fd.vec()[i] = (fp - fm) / (2.0 * kStep);
    }
    worst = std::max(worst, rel_err(p.grad, fd));
  }
  return worst;
}

// Scalarizes a matrix output with fixed non-uniform weights so every entry
// contributes a distinct gradient path.
Tape::Val weighted_sum(Tape& tape, Tape::Val v, const Tensor& w) {
  return tape.sum(tape.mul(v, tape.constant(w)));
}

// 8 nodes, feature dims 3 and 4, one target left without any edge so the
// empty-instance path is part of the checked graph.
HeteroGraph fixture_graph() {
  Schema s;
  s.add_node_type("author", 3);
  s.add_node_type("paper", 4);
  s.add_edge_type("ap", "author", "paper");
  HeteroGraph g(std::move(s));
  g.add_node(0, {0.3, -0.2, 0.5});
  g.add_node(0, {-0.5, 0.8, 0.1});
  g.add_node(0, {0.9, 0.1, -0.4});
  g.add_node(0, {0.2, 0.6, -0.8});
  g.add_node(1, {0.2, 0.4, -0.6, 0.3});
  g.add_node(1, {-0.3, 0.5, 0.1, -0.2});
  g.add_node(1, {0.7, -0.7, 0.2, 0.6});
  g.add_edge(0, 0, 0);
  g.add_edge(0, 1, 0);
  g.add_edge(0, 1, 1);
  g.add_edge(0, 2, 1);
  g.add_edge(0, 2, 2);
  g.set_target_type(0, 2);
  g.set_label(0, 0);
  g.set_label(1, 1);
  g.set_label(2, 0);
  g.set_label(3, 1);
  const int32_t ap = g.schema().edge_type_id("ap");
  g.register_metapath({"apa", {{ap, Direction::Forward}, {ap, Direction::Reverse}}});
  g.register_metapath({"apapa",
                       {{ap, Direction::Forward},
                        {ap, Direction::Reverse},
                        {ap, Direction::Forward},
                        {ap, Direction::Reverse}}});
  g.finalize();
  return g;
}

template <typename BatchT>
double model_fd(const Model& model, ParameterStore& store, const BatchT& batch,
                const std::vector<int64_t>& labels) {
  auto eval = [&]() {
    Tape tape;
    return tape.value(Model::mean_nll(tape, model.forward(tape, store, batch), labels)).vec()[0];
  };
  store.zero_grads();
  {
    Tape tape;
    tape.backward(Model::mean_nll(tape, model.forward(tape, store, batch), labels));
  }
  double worst = 0.0;
  for (auto& kv : store) {
    Parameter& p = kv.second;
    Tensor fd(p.value.rows(), p.value.cols());
    for (size_t i = 0; i < fd.vec().size(); ++i) {
      const double keep = p.value.vec()[i];
      p.value.vec()[i] = keep + kStep;
      const double fp = eval();
      p.value.vec()[i] = keep - kStep;
      const double fm = eval();
      p.value.vec()[i] = keep;
      fd.vec()[i] = (fp - fm) / (2.0 * kStep);
    }
    worst = std::max(worst, rel_err(p.grad, fd));
  }
  return worst;
}

GradCheckResult model_group(const HeteroGraph& g, Variant variant, int32_t layers,
                            uint64_t seed, uint64_t idx) {
  ModelConfig mc;
  mc.variant = variant;
  mc.layers = layers;
  mc.hidden_dim = 4;
  const Model model(g, mc);
  ParameterStore store;
  model.init_params(store, derive_seed(seed, {hash_tag("gradcheck-init"), idx}));

  const std::vector<int64_t> targets = {0, 1, 2, 3};
  std::vector<int64_t> labels;
  for (int64_t t : targets) labels.push_back(g.label(t));
  Rng srng(derive_seed(seed, {hash_tag("gradcheck-sample"), idx}));
  const SampleConfig sc{3, 3};

  GradCheckResult r;
  r.group = "model." + to_string(variant) + ".k" + std::to_string(layers);
  if (variant == Variant::Rgcn) {
    const RgcnBatch b = build_rgcn_batch(g, targets, layers, sc, srng);
    r.max_rel_err = model_fd(model, store, b, labels);
  } else {
    const Batch b = build_batch(g, model.sen_template(), targets, layers, sc, srng);
    r.max_rel_err = model_fd(model, store, b, labels);
  }
  return r;
}

}  // namespace

std::vector<GradCheckResult> run_gradcheck(uint64_t seed) {
  std::vector<GradCheckResult> out;
  uint64_t gi = 0;
  auto op = [&](const std::string& name, auto&& body) {
    Rng rng(derive_seed(seed, {hash_tag("gradcheck-op"), gi++}));
    GradCheckResult r;
    r.group = name;
    r.max_rel_err = body(rng);
    out.push_back(std::move(r));
  };

  op("op.matmul", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 3, 4, -1.5, 1.5)));
    ps.push_back(leaf("b", rand_tensor(rng, 4, 2, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 3, 2, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.matmul(l[0], l[1]), w);
    });
  });

  op("op.add", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 3, 5, -1.5, 1.5)));
    ps.push_back(leaf("b", rand_tensor(rng, 3, 5, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 3, 5, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.add(l[0], l[1]), w);
    });
  });

  op("op.add_n", [](Rng& rng) {
    std::vector<Parameter> ps;
    for (int i = 0; i < 4; ++i)
      ps.push_back(leaf("t" + std::to_string(i), rand_tensor(rng, 2, 3, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 2, 3, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.add_n(l), w);
    });
  });

  op("op.mul", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 3, 3, -1.5, 1.5)));
    ps.push_back(leaf("b", rand_tensor(rng, 3, 3, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 3, 3, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.mul(l[0], l[1]), w);
    });
  });

  op("op.scale", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 2, 4, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 2, 4, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.scale(l[0], -1.7), w);
    });
  });

  const auto act_group = [&](const std::string& name, Activation act, bool off_origin) {
    op(name, [&](Rng& rng) {
      std::vector<Parameter> ps;
      ps.push_back(leaf("a", off_origin ? rand_tensor_off_origin(rng, 3, 4, 0.2, 1.5)
                                        : rand_tensor(rng, 3, 4, -1.5, 1.5)));
      const Tensor w = rand_tensor(rng, 3, 4, -1.0, 1.0);
      return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
        return weighted_sum(t, t.activate(l[0], act), w);
      });
    });
  };
  act_group("op.identity", Activation::identity(), false);
  act_group("op.tanh", Activation::tanh(), false);
  act_group("op.relu", Activation::relu(), true);
  act_group("op.leaky_relu", Activation::leaky_relu(0.1), true);

  op("op.concat_cols", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 1, 2, -1.5, 1.5)));
    ps.push_back(leaf("b", rand_tensor(rng, 1, 3, -1.5, 1.5)));
    ps.push_back(leaf("c", rand_tensor(rng, 1, 4, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 1, 9, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.concat_cols(l), w);
    });
  });

  op("op.stack_rows", [](Rng& rng) {
    std::vector<Parameter> ps;
    for (int i = 0; i < 3; ++i)
      ps.push_back(leaf("r" + std::to_string(i), rand_tensor(rng, 1, 4, -1.5, 1.5)));
    const Tensor w = rand_tensor(rng, 3, 4, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.stack_rows(l), w);
    });
  });

  op("op.softmax_row", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 1, 6, -2.0, 2.0)));
    const Tensor w = rand_tensor(rng, 1, 6, -1.0, 1.0);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return weighted_sum(t, t.softmax_row(l[0]), w);
    });
  });

  op("op.nll_logsoftmax", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 1, 5, -2.0, 2.0)));
    const int64_t label = rng.uniform_int(0, 4);
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      return t.nll_logsoftmax(l[0], label);
    });
  });

  op("op.sum", [](Rng& rng) {
    std::vector<Parameter> ps;
    ps.push_back(leaf("a", rand_tensor(rng, 3, 3, -1.5, 1.5)));
    return fd_max_rel_err(
        ps, [&](Tape& t, const std::vector<Tape::Val>& l) { return t.sum(l[0]); });
  });

  op("op.composite", [](Rng& rng) {
    // Chained ops: projection, activation, attention-style softmax over a
    // concatenated row, then a classification loss.
    std::vector<Parameter> ps;
    ps.push_back(leaf("x", rand_tensor(rng, 1, 3, -1.0, 1.0)));
    ps.push_back(leaf("w1", rand_tensor(rng, 3, 4, -1.0, 1.0)));
    ps.push_back(leaf("w2", rand_tensor(rng, 4, 2, -1.0, 1.0)));
    ps.push_back(leaf("g", rand_tensor(rng, 1, 2, -1.0, 1.0)));
    return fd_max_rel_err(ps, [&](Tape& t, const std::vector<Tape::Val>& l) {
      const Tape::Val h = t.activate(t.matmul(l[0], l[1]), Activation::tanh());
      const Tape::Val logits = t.matmul(h, l[2]);
      const Tape::Val att = t.softmax_row(t.concat_cols(std::vector<Tape::Val>{logits, l[3]}));
      return t.add(t.nll_logsoftmax(logits, 1), t.sum(t.mul(att, att)));
    });
  });

  const HeteroGraph g = fixture_graph();
  uint64_t mi = 0;
  out.push_back(model_group(g, Variant::DhgcnH, 0, seed, mi++));
  out.push_back(model_group(g, Variant::DhgcnH, 1, seed, mi++));
  out.push_back(model_group(g, Variant::DhgcnH, 2, seed, mi++));
  out.push_back(model_group(g, Variant::DhgcnS, 0, seed, mi++));
  out.push_back(model_group(g, Variant::DhgcnS, 1, seed, mi++));
  out.push_back(model_group(g, Variant::Rgcn, 1, seed, mi++));
  out.push_back(model_group(g, Variant::Rgcn, 2, seed, mi++));
  return out;
}

bool gradcheck_passed(const std::vector<GradCheckResult>& results, double tol) {
  if (results.empty()) return false;
  for (const auto& r : results)
    if (!(r.max_rel_err < tol)) return false;
  return true;
}

std::string format_gradcheck(const std::vector<GradCheckResult>& results, double tol) {
  size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.group.size());
  std::ostringstream os;
  for (const auto& r : results) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3e", r.max_rel_err);
    os << r.group << std::string(width - r.group.size() + 2, ' ') << buf
       << (r.max_rel_err < tol ? "  ok" : "  FAIL") << "\n";
  }
  return os.str();
}

}  // namespace dhg
