#include "dhg/tape.hpp"

#include <algorithm>
#include <cmath>

#include "dhg/error.hpp"
#include "dhg/params.hpp"

namespace dhg {

Activation Activation::leaky_relu(double slope) {
  if (!(slope > 0.0 && slope < 1.0))
    throw ConfigError("LeakyReLU slope must lie in (0, 1), got " + std::to_string(slope));
  return Activation(Kind::LeakyRelu, slope);
}

double Activation::apply(double x) const {
  switch (kind_) {
    case Kind::Identity: return x;
    case Kind::Tanh: return std::tanh(x);
    case Kind::Relu: return x > 0.0 ? x : 0.0;
    case Kind::LeakyRelu: return x > 0.0 ? x : slope_ * x;
  }
  return x;
}

double Activation::grad(double x, double fx) const {
  switch (kind_) {
    case Kind::Identity: return 1.0;
    case Kind::Tanh: return 1.0 - fx * fx;
    case Kind::Relu: return x > 0.0 ? 1.0 : 0.0;
    case Kind::LeakyRelu: return x > 0.0 ? 1.0 : slope_;
  }
  return 1.0;
}

std::string Activation::name() const {
  switch (kind_) {
    case Kind::Identity: return "identity";
    case Kind::Tanh: return "tanh";
    case Kind::Relu: return "relu";
    case Kind::LeakyRelu: return "leaky-relu:" + std::to_string(slope_);
  }
  return "?";
}

Activation Activation::parse(const std::string& name) {
  if (name == "identity") return identity();
  if (name == "tanh") return tanh();
  if (name == "relu") return relu();
  if (name.rfind("leaky-relu:", 0) == 0) return leaky_relu(std::stod(name.substr(11)));
  if (name == "leaky-relu") return leaky_relu(0.01);
  throw ConfigError("unknown activation '" + name +
                    "' (expected tanh, relu, leaky-relu[:slope], identity)");
}

void Tape::check(Val v) const {
  if (!v.valid() || static_cast<size_t>(v.id) >= nodes_.size())
    throw std::logic_error("Tape: invalid value handle");
}

Tape::Val Tape::push(Tensor value, std::vector<int32_t> inputs,
                     std::function<void(Tape&, Node&)> back) {
  Node n;
  n.value = std::move(value);
  n.inputs = std::move(inputs);
  n.back = std::move(back);
  nodes_.push_back(std::move(n));
  return Val{static_cast<int32_t>(nodes_.size() - 1)};
}

Tape::Val Tape::constant(Tensor t) { return push(std::move(t), {}, {}); }

Tape::Val Tape::param(Parameter& p) {
  Val v = push(p.value, {}, {});
  nodes_.back().param = &p;
  return v;
}

Tape::Val Tape::matmul(Val a, Val b) {
  check(a);
  check(b);
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  Tensor out = dhg::matmul(ta, tb);
  int32_t ia = a.id, ib = b.id;
  return push(std::move(out), {ia, ib}, [ia, ib](Tape& t, Node& n) {
    add_matmul_abT(t.grad_of(ia), n.grad, t.node(ib).value);
    add_matmul_aTb(t.grad_of(ib), t.node(ia).value, n.grad);
  });
}

Tape::Val Tape::add(Val a, Val b) {
  Val terms[] = {a, b};
  return add_n(terms);
}

Tape::Val Tape::add_n(std::span<const Val> terms) {
  if (terms.empty()) throw ShapeError("add_n: empty term list");
  for (Val v : terms) check(v);
  const Tensor& first = value(terms[0]);
  Tensor out = first;
  for (size_t i = 1; i < terms.size(); ++i) {
    const Tensor& ti = value(terms[i]);
    if (!ti.same_shape(first))
      throw ShapeError("add: operand shapes differ: " + first.shape_str() + " vs " +
                       ti.shape_str());
    const double* src = ti.data();
    double* dst = out.data();
    for (int64_t j = 0; j < out.size(); ++j) dst[j] += src[j];
  }
  std::vector<int32_t> ins(terms.size());
  for (size_t i = 0; i < terms.size(); ++i) ins[i] = terms[i].id;
  return push(std::move(out), std::move(ins), [](Tape& t, Node& n) {
    for (int32_t in : n.inputs) {
      Tensor& g = t.grad_of(in);
      const double* src = n.grad.data();
      double* dst = g.data();
      for (int64_t j = 0; j < g.size(); ++j) dst[j] += src[j];
    }
  });
}

Tape::Val Tape::mul(Val a, Val b) {
  check(a);
  check(b);
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  if (!ta.same_shape(tb))
    throw ShapeError("mul: operand shapes differ: " + ta.shape_str() + " vs " + tb.shape_str());
  Tensor out = ta;
  for (int64_t j = 0; j < out.size(); ++j) out.data()[j] *= tb.data()[j];
  int32_t ia = a.id, ib = b.id;
  return push(std::move(out), {ia, ib}, [ia, ib](Tape& t, Node& n) {
    Tensor& ga = t.grad_of(ia);
    Tensor& gb = t.grad_of(ib);
    const Tensor& va = t.node(ia).value;
    const Tensor& vb = t.node(ib).value;
    for (int64_t j = 0; j < n.grad.size(); ++j) {
      ga.data()[j] += n.grad.data()[j] * vb.data()[j];
      gb.data()[j] += n.grad.data()[j] * va.data()[j];
    }
  });
}

Tape::Val Tape::scale(Val a, double c) {
  check(a);
  Tensor out = value(a);
  for (int64_t j = 0; j < out.size(); ++j) out.data()[j] *= c;
  int32_t ia = a.id;
  return push(std::move(out), {ia}, [ia, c](Tape& t, Node& n) {
    Tensor& g = t.grad_of(ia);
    for (int64_t j = 0; j < g.size(); ++j) g.data()[j] += c * n.grad.data()[j];
  });
}

Tape::Val Tape::activate(Val a, Activation act) {
  check(a);
  Tensor out = value(a);
  for (int64_t j = 0; j < out.size(); ++j) out.data()[j] = act.apply(out.data()[j]);
  int32_t ia = a.id;
  return push(std::move(out), {ia}, [ia, act](Tape& t, Node& n) {
    Tensor& g = t.grad_of(ia);
    const Tensor& x = t.node(ia).value;
    for (int64_t j = 0; j < g.size(); ++j)
      g.data()[j] += n.grad.data()[j] * act.grad(x.data()[j], n.value.data()[j]);
  });
}

Tape::Val Tape::concat_cols(std::span<const Val> parts) {
  if (parts.empty()) throw ShapeError("concat: empty part list");
  int64_t total = 0;
  for (Val v : parts) {
    check(v);
    const Tensor& t = value(v);
    if (t.rows() != 1)
      throw ShapeError("concat: parts must be row vectors, got " + t.shape_str());
    total += t.cols();
  }
  Tensor out(1, total);
  std::vector<int32_t> ins(parts.size());
  int64_t off = 0;
  for (size_t i = 0; i < parts.size(); ++i) {
    const Tensor& t = value(parts[i]);
    std::copy(t.data(), t.data() + t.cols(), out.data() + off);
    off += t.cols();
    ins[i] = parts[i].id;
  }
  return push(std::move(out), std::move(ins), [](Tape& t, Node& n) {
    int64_t off = 0;
    for (int32_t in : n.inputs) {
      Tensor& g = t.grad_of(in);
      for (int64_t j = 0; j < g.cols(); ++j) g.data()[j] += n.grad.data()[off + j];
      off += g.cols();
    }
  });
}

Tape::Val Tape::stack_rows(std::span<const Val> parts) {
  if (parts.empty()) throw ShapeError("stack_rows: empty part list");
  const int64_t d = value(parts[0]).cols();
  for (Val v : parts) {
    check(v);
    const Tensor& t = value(v);
    if (t.rows() != 1 || t.cols() != d)
      throw ShapeError("stack_rows: expected 1x" + std::to_string(d) + " rows, got " +
                       t.shape_str());
  }
  Tensor out(static_cast<int64_t>(parts.size()), d);
  std::vector<int32_t> ins(parts.size());
  for (size_t i = 0; i < parts.size(); ++i) {
    const Tensor& t = value(parts[i]);
    std::copy(t.data(), t.data() + d, out.data() + static_cast<int64_t>(i) * d);
    ins[i] = parts[i].id;
  }
  return push(std::move(out), std::move(ins), [d](Tape& t, Node& n) {
    for (size_t i = 0; i < n.inputs.size(); ++i) {
      Tensor& g = t.grad_of(n.inputs[i]);
      const double* src = n.grad.data() + static_cast<int64_t>(i) * d;
      for (int64_t j = 0; j < d; ++j) g.data()[j] += src[j];
    }
  });
}

Tape::Val Tape::softmax_row(Val logits) {
  check(logits);
  const Tensor& x = value(logits);
  if (x.rows() != 1 || x.cols() < 1)
    throw ShapeError("softmax: expected nonempty row vector, got " + x.shape_str());
  Tensor out(1, x.cols());
  double mx = x.data()[0];
  for (int64_t j = 1; j < x.cols(); ++j) mx = std::max(mx, x.data()[j]);
  double denom = 0.0;
  for (int64_t j = 0; j < x.cols(); ++j) {
    out.data()[j] = std::exp(x.data()[j] - mx);
    denom += out.data()[j];
  }
  for (int64_t j = 0; j < x.cols(); ++j) out.data()[j] /= denom;
  int32_t ia = logits.id;
  return push(std::move(out), {ia}, [ia](Tape& t, Node& n) {
    // dx_i = y_i * (dy_i - sum_j dy_j y_j)
    const Tensor& y = n.value;
    double dot = 0.0;
    for (int64_t j = 0; j < y.cols(); ++j) dot += n.grad.data()[j] * y.data()[j];
    Tensor& g = t.grad_of(ia);
    for (int64_t j = 0; j < y.cols(); ++j)
      g.data()[j] += y.data()[j] * (n.grad.data()[j] - dot);
  });
}

Tape::Val Tape::nll_logsoftmax(Val logits, int64_t label) {
  check(logits);
  const Tensor& x = value(logits);
  if (x.rows() != 1) throw ShapeError("nll: logits must be a row vector, got " + x.shape_str());
  if (label < 0 || label >= x.cols())
    throw ConfigError("nll: label " + std::to_string(label) + " out of range for " +
                      std::to_string(x.cols()) + " classes");
  double mx = x.data()[0];
  for (int64_t j = 1; j < x.cols(); ++j) mx = std::max(mx, x.data()[j]);
  std::vector<double> probs(static_cast<size_t>(x.cols()));
  double denom = 0.0;
  for (int64_t j = 0; j < x.cols(); ++j) {
    probs[static_cast<size_t>(j)] = std::exp(x.data()[j] - mx);
    denom += probs[static_cast<size_t>(j)];
  }
  for (auto& p : probs) p /= denom;
  double lse = mx + std::log(denom);
  Tensor out = Tensor::scalar(lse - x.data()[label]);
  int32_t ia = logits.id;
  return push(std::move(out), {ia},
              [ia, label, probs = std::move(probs)](Tape& t, Node& n) {
                // d/dx = softmax(x) - onehot(label)
                Tensor& g = t.grad_of(ia);
                double go = n.grad.data()[0];
                for (int64_t j = 0; j < g.cols(); ++j)
                  g.data()[j] += go * (probs[static_cast<size_t>(j)] -
                                       (j == label ? 1.0 : 0.0));
              });
}

Tape::Val Tape::sum(Val a) {
  check(a);
  const Tensor& x = value(a);
  double acc = 0.0;
  for (int64_t j = 0; j < x.size(); ++j) acc += x.data()[j];
  int32_t ia = a.id;
  return push(Tensor::scalar(acc), {ia}, [ia](Tape& t, Node& n) {
    Tensor& g = t.grad_of(ia);
    double go = n.grad.data()[0];
    for (int64_t j = 0; j < g.size(); ++j) g.data()[j] += go;
  });
}

const Tensor& Tape::grad(Val v) const {
  check(v);
  const Node& n = nodes_[static_cast<size_t>(v.id)];
  if (n.grad.size() == 0) {
    // not reached by the last backward pass
    const_cast<Tape*>(this)->empty_grad_ = Tensor(n.value.rows(), n.value.cols());
    return empty_grad_;
  }
  return n.grad;
}

void Tape::backward(Val loss) {
  check(loss);
  Node& top = node(loss.id);
  if (top.value.rows() != 1 || top.value.cols() != 1)
    throw ShapeError("backward: loss must be a 1x1 scalar, got " + top.value.shape_str());

  // mark nodes reachable from the loss
  std::vector<char> reach(nodes_.size(), 0);
  std::vector<int32_t> stack = {loss.id};
  reach[static_cast<size_t>(loss.id)] = 1;
  while (!stack.empty()) {
    int32_t id = stack.back();
    stack.pop_back();
    for (int32_t in : node(id).inputs) {
      if (!reach[static_cast<size_t>(in)]) {
        reach[static_cast<size_t>(in)] = 1;
        stack.push_back(in);
      }
    }
  }

  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (reach[i]) nodes_[i].grad = Tensor(nodes_[i].value.rows(), nodes_[i].value.cols());
  }
  top.grad.data()[0] = 1.0;

  for (int32_t id = loss.id; id >= 0; --id) {
    if (!reach[static_cast<size_t>(id)]) continue;
    Node& n = node(id);
    if (n.back) n.back(*this, n);
  }

  // accumulate into parameters reachable from the loss; others stay untouched
  for (size_t i = 0; i < nodes_.size(); ++i) {
    if (!reach[i] || nodes_[i].param == nullptr) continue;
    Parameter& p = *nodes_[i].param;
    const Tensor& g = nodes_[i].grad;
    for (int64_t j = 0; j < g.size(); ++j) p.grad.data()[j] += g.data()[j];
  }
}

}  // namespace dhg
