#include "evlearn/autodiff.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace evlearn::ad {

namespace {

using EMat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using MapMat = Eigen::Map<EMat>;
using MapConst = Eigen::Map<const EMat>;

MapConst as_mat(const Tensor& t) {
  return MapConst(t.data.data(), static_cast<Eigen::Index>(t.shape[0]),
                  static_cast<Eigen::Index>(t.shape[1]));
}

MapMat as_mat(Tensor& t) {
  return MapMat(t.data.data(), static_cast<Eigen::Index>(t.shape[0]),
                static_cast<Eigen::Index>(t.shape[1]));
}

void require_same_shape(const char* op, const Tensor& a, const Tensor& b) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + shape_str(a) + " vs " +
                     shape_str(b));
  }
}

void require_rank(const char* op, const Tensor& t, std::size_t rank) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(op) + ": expected rank-" + std::to_string(rank) +
                     " tensor, got " + shape_str(t));
  }
}

}  // namespace

const Tensor& Var::value() const { return graph_->node(index_).value; }

const Tensor& Var::grad() const { return graph_->node(index_).grad; }

Var Graph::make(Op op, std::vector<int> inputs, Tensor value) {
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.value = std::move(value);
  n.requires_grad = (op == Op::kLeaf);
  for (int i : n.inputs) {
    if (nodes_[i].requires_grad) n.requires_grad = true;
  }
  nodes_.push_back(std::move(n));
  return Var(this, static_cast<int>(nodes_.size()) - 1);
}

Var Graph::leaf(Tensor value) { return make(Op::kLeaf, {}, std::move(value)); }

Var Graph::constant(Tensor value) { return make(Op::kConstant, {}, std::move(value)); }

Var add(Var a, Var b) {
  require_same_shape("add", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += bv.data[i];
  return a.graph()->make(Op::kAdd, {a.index(), b.index()}, std::move(out));
}

Var sub(Var a, Var b) {
  require_same_shape("sub", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] -= bv.data[i];
  return a.graph()->make(Op::kSub, {a.index(), b.index()}, std::move(out));
}

Var mul(Var a, Var b) {
  require_same_shape("mul", a.value(), b.value());
  Tensor out = a.value();
  const Tensor& bv = b.value();
  for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] *= bv.data[i];
  return a.graph()->make(Op::kMul, {a.index(), b.index()}, std::move(out));
}

Var scale(Var a, double c) {
  Tensor out = a.value();
  for (double& v : out.data) v *= c;
  Var r = a.graph()->make(Op::kScale, {a.index()}, std::move(out));
  a.graph()->node(r.index()).scale = c;
  return r;
}

Var add_n(const std::vector<Var>& xs) {
  if (xs.empty()) throw std::invalid_argument("add_n: empty input list");
  Tensor out = xs[0].value();
  std::vector<int> in{xs[0].index()};
  for (std::size_t k = 1; k < xs.size(); ++k) {
    require_same_shape("add_n", out, xs[k].value());
    const Tensor& v = xs[k].value();
    for (std::size_t i = 0; i < out.numel(); ++i) out.data[i] += v.data[i];
    in.push_back(xs[k].index());
  }
  return xs[0].graph()->make(Op::kAddN, std::move(in), std::move(out));
}

Var matmul(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  require_rank("matmul", av, 2);
  require_rank("matmul", bv, 2);
  if (av.cols() != bv.rows()) {
    throw ShapeError("matmul: shape mismatch " + shape_str(av) + " vs " + shape_str(bv));
  }
  Tensor out = Tensor::zeros({av.rows(), bv.cols()});
  as_mat(out).noalias() = as_mat(av) * as_mat(bv);
  return a.graph()->make(Op::kMatmul, {a.index(), b.index()}, std::move(out));
}

Var sigmoid(Var a) {
  Tensor out = a.value();
  for (double& v : out.data) v = 1.0 / (1.0 + std::exp(-v));
  return a.graph()->make(Op::kSigmoid, {a.index()}, std::move(out));
}

Var tanh(Var a) {
  Tensor out = a.value();
  for (double& v : out.data) v = std::tanh(v);
  return a.graph()->make(Op::kTanh, {a.index()}, std::move(out));
}

Var concat(Var a, Var b) {
  const Tensor& av = a.value();
  const Tensor& bv = b.value();
  if (av.rank() == 1 && bv.rank() == 1) {
    Tensor out = Tensor::zeros({av.numel() + bv.numel()});
    std::copy(av.data.begin(), av.data.end(), out.data.begin());
    std::copy(bv.data.begin(), bv.data.end(), out.data.begin() + av.numel());
    return a.graph()->make(Op::kConcat, {a.index(), b.index()}, std::move(out));
  }
  if (av.rank() == 2 && bv.rank() == 2 && av.rows() == bv.rows()) {
    std::size_t r = av.rows(), ca = av.cols(), cb = bv.cols();
    Tensor out = Tensor::zeros({r, ca + cb});
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < ca; ++j) out.at(i, j) = av.at(i, j);
      for (std::size_t j = 0; j < cb; ++j) out.at(i, ca + j) = bv.at(i, j);
    }
    return a.graph()->make(Op::kConcat, {a.index(), b.index()}, std::move(out));
  }
  throw ShapeError("concat: shape mismatch " + shape_str(av) + " vs " + shape_str(bv));
}

double log_sum_exp(const double* begin, std::size_t n) {
  if (n == 0) throw std::domain_error("log_sum_exp: empty input");
  double m = begin[0];
  for (std::size_t i = 1; i < n; ++i) m = std::max(m, begin[i]);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += std::exp(begin[i] - m);
  return m + std::log(s);
}

double log_sum_exp(const Tensor& v) { return log_sum_exp(v.data.data(), v.numel()); }

Var log_sum_exp(Var v) {
  const Tensor& t = v.value();
  require_rank("log_sum_exp", t, 1);
  return v.graph()->make(Op::kLogSumExp, {v.index()},
                         Tensor::scalar(log_sum_exp(t.data.data(), t.numel())));
}

Var lse_rows(Var m) {
  const Tensor& t = m.value();
  require_rank("lse_rows", t, 2);
  Tensor out = Tensor::zeros({t.rows()});
  for (std::size_t i = 0; i < t.rows(); ++i) {
    out.at(i) = log_sum_exp(t.data.data() + i * t.cols(), t.cols());
  }
  return m.graph()->make(Op::kLseRows, {m.index()}, std::move(out));
}

Var add_row_broadcast(Var m, Var v) {
  const Tensor& mt = m.value();
  const Tensor& vt = v.value();
  require_rank("add_row_broadcast", mt, 2);
  require_rank("add_row_broadcast", vt, 1);
  if (mt.cols() != vt.numel()) {
    throw ShapeError("add_row_broadcast: shape mismatch " + shape_str(mt) + " vs " +
                     shape_str(vt));
  }
  Tensor out = mt;
  for (std::size_t i = 0; i < mt.rows(); ++i) {
    for (std::size_t j = 0; j < mt.cols(); ++j) out.at(i, j) += vt.at(j);
  }
  return m.graph()->make(Op::kAddRowBroadcast, {m.index(), v.index()}, std::move(out));
}

Var row(Var m, std::size_t i) {
  const Tensor& t = m.value();
  require_rank("row", t, 2);
  if (i >= t.rows()) throw ShapeError("row: index out of range for " + shape_str(t));
  Tensor out = Tensor::zeros({t.cols()});
  for (std::size_t j = 0; j < t.cols(); ++j) out.at(j) = t.at(i, j);
  Var r = m.graph()->make(Op::kRow, {m.index()}, std::move(out));
  m.graph()->node(r.index()).arg0 = i;
  return r;
}

Var pick(Var v, std::size_t i) {
  const Tensor& t = v.value();
  require_rank("pick", t, 1);
  if (i >= t.numel()) throw ShapeError("pick: index out of range for " + shape_str(t));
  Var r = v.graph()->make(Op::kPick, {v.index()}, Tensor::scalar(t.at(i)));
  v.graph()->node(r.index()).arg0 = i;
  return r;
}

Var sum(Var a) {
  const Tensor& t = a.value();
  double s = 0.0;
  for (double v : t.data) s += v;
  return a.graph()->make(Op::kSum, {a.index()}, Tensor::scalar(s));
}

void Graph::backward(Var root) {
  if (root.graph() != this || root.index() < 0) {
    throw std::logic_error("backward: root does not belong to this graph");
  }
  Node& r = nodes_[root.index()];
  if (r.value.numel() != 1) {
    throw std::logic_error("backward: root must be a scalar, got shape " +
                           shape_str(r.value));
  }
  for (int i = 0; i <= root.index(); ++i) {
    Node& n = nodes_[i];
    if (n.requires_grad) {
      n.grad = Tensor::zeros(n.value.shape);
    }
  }
  if (!r.requires_grad) return;  // no tracked leaf feeds the root
  r.grad.data[0] = 1.0;
  for (int i = root.index(); i >= 0; --i) backward_node(i);
}

void Graph::backward_node(int idx) {
  Node& n = nodes_[idx];
  if (!n.requires_grad || n.inputs.empty()) return;
  const Tensor& g = n.grad;

  auto input_grad = [&](int k) -> Tensor* {
    Node& in = nodes_[n.inputs[k]];
    return in.requires_grad ? &in.grad : nullptr;
  };

  switch (n.op) {
    case Op::kAdd: {
      for (int k = 0; k < 2; ++k) {
        if (Tensor* d = input_grad(k)) {
          for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += g.data[i];
        }
      }
      break;
    }
    case Op::kSub: {
      if (Tensor* d = input_grad(0)) {
        for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += g.data[i];
      }
      if (Tensor* d = input_grad(1)) {
        for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] -= g.data[i];
      }
      break;
    }
    case Op::kMul: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      if (Tensor* d = input_grad(0)) {
        for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += g.data[i] * b.data[i];
      }
      if (Tensor* d = input_grad(1)) {
        for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += g.data[i] * a.data[i];
      }
      break;
    }
    case Op::kScale: {
      if (Tensor* d = input_grad(0)) {
        for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += n.scale * g.data[i];
      }
      break;
    }
    case Op::kAddN: {
      for (std::size_t k = 0; k < n.inputs.size(); ++k) {
        if (Tensor* d = input_grad(static_cast<int>(k))) {
          for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += g.data[i];
        }
      }
      break;
    }
    case Op::kMatmul: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      if (Tensor* d = input_grad(0)) {
        as_mat(*d).noalias() += as_mat(g) * as_mat(b).transpose();
      }
      if (Tensor* d = input_grad(1)) {
        as_mat(*d).noalias() += as_mat(a).transpose() * as_mat(g);
      }
      break;
    }
    case Op::kSigmoid: {
      if (Tensor* d = input_grad(0)) {
        const Tensor& y = n.value;
        for (std::size_t i = 0; i < g.numel(); ++i) {
          d->data[i] += g.data[i] * y.data[i] * (1.0 - y.data[i]);
        }
      }
      break;
    }
    case Op::kTanh: {
      if (Tensor* d = input_grad(0)) {
        const Tensor& y = n.value;
        for (std::size_t i = 0; i < g.numel(); ++i) {
          d->data[i] += g.data[i] * (1.0 - y.data[i] * y.data[i]);
        }
      }
      break;
    }
    case Op::kConcat: {
      const Tensor& a = nodes_[n.inputs[0]].value;
      const Tensor& b = nodes_[n.inputs[1]].value;
      if (a.rank() == 1) {
        if (Tensor* d = input_grad(0)) {
          for (std::size_t i = 0; i < a.numel(); ++i) d->data[i] += g.data[i];
        }
        if (Tensor* d = input_grad(1)) {
          for (std::size_t i = 0; i < b.numel(); ++i) d->data[i] += g.data[a.numel() + i];
        }
      } else {
        std::size_t ca = a.cols();
        if (Tensor* d = input_grad(0)) {
          for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < ca; ++j) d->at(i, j) += g.at(i, j);
        }
        if (Tensor* d = input_grad(1)) {
          for (std::size_t i = 0; i < b.rows(); ++i)
            for (std::size_t j = 0; j < b.cols(); ++j) d->at(i, j) += g.at(i, ca + j);
        }
      }
      break;
    }
    case Op::kLogSumExp: {
      if (Tensor* d = input_grad(0)) {
        const Tensor& x = nodes_[n.inputs[0]].value;
        double lse = n.value.data[0];
        double go = g.data[0];
        for (std::size_t i = 0; i < x.numel(); ++i) {
          d->data[i] += go * std::exp(x.data[i] - lse);
        }
      }
      break;
    }
    case Op::kLseRows: {
      if (Tensor* d = input_grad(0)) {
        const Tensor& x = nodes_[n.inputs[0]].value;
        for (std::size_t i = 0; i < x.rows(); ++i) {
          double lse = n.value.data[i];
          double go = g.data[i];
          for (std::size_t j = 0; j < x.cols(); ++j) {
            d->at(i, j) += go * std::exp(x.at(i, j) - lse);
          }
        }
      }
      break;
    }
    case Op::kAddRowBroadcast: {
      if (Tensor* d = input_grad(0)) {
        for (std::size_t i = 0; i < g.numel(); ++i) d->data[i] += g.data[i];
      }
      if (Tensor* d = input_grad(1)) {
        std::size_t r = g.rows(), c = g.cols();
        for (std::size_t i = 0; i < r; ++i)
          for (std::size_t j = 0; j < c; ++j) d->at(j) += g.at(i, j);
      }
      break;
    }
    case Op::kRow: {
      if (Tensor* d = input_grad(0)) {
        for (std::size_t j = 0; j < g.numel(); ++j) d->at(n.arg0, j) += g.at(j);
      }
      break;
    }
    case Op::kPick: {
      if (Tensor* d = input_grad(0)) d->data[n.arg0] += g.data[0];
      break;
    }
    case Op::kSum: {
      if (Tensor* d = input_grad(0)) {
        for (std::size_t i = 0; i < d->numel(); ++i) d->data[i] += g.data[0];
      }
      break;
    }
    case Op::kLeaf:
    case Op::kConstant:
      break;
  }
}

double check_gradient(const std::function<Var(Graph&, Var)>& f, const Tensor& x,
                      double step) {
  Graph g;
  Var in = g.leaf(x);
  Var out = f(g, in);
  g.backward(out);
  Tensor analytic = in.grad();

  double worst = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    Tensor xp = x, xm = x;
    xp.data[i] += step;
    xm.data[i] -= step;
    Graph gp, gm;
    double fp = f(gp, gp.leaf(xp)).value().value();
    double fm = f(gm, gm.leaf(xm)).value().value();
    double numeric = (fp - fm) / (2.0 * step);
    double denom = std::max({std::abs(analytic.data[i]), std::abs(numeric), 1e-8});
    worst = std::max(worst, std::abs(analytic.data[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace evlearn::ad
