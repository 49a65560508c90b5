#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "evlearn/tensor.hpp"

namespace evlearn::ad {

class Graph;

// Handle to one node of a Graph. Cheap to copy; valid only as long as
// the owning Graph is alive.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  // Gradient accumulated by the last Graph::backward call.
  const Tensor& grad() const;

  Graph* graph() const { return graph_; }
  int index() const { return index_; }

 private:
  friend class Graph;
  Var(Graph* g, int idx) : graph_(g), index_(idx) {}
  Graph* graph_ = nullptr;
  int index_ = -1;
};

enum class Op {
  kLeaf,
  kConstant,
  kAdd,
  kSub,
  kMul,
  kScale,
  kAddN,
  kMatmul,
  kSigmoid,
  kTanh,
  kConcat,
  kLogSumExp,
  kLseRows,
  kAddRowBroadcast,
  kRow,
  kPick,
  kSum,
};

// Define-by-run computation tape. A Graph is built for one forward pass
// (one sample or one mini-batch) and discarded; parameters enter as
// leaves, inputs as constants. Nodes are stored in creation order, which
// is a topological order of the DAG by construction.
class Graph {
 public:
  Var leaf(Tensor value);       // gradient is tracked
  Var constant(Tensor value);   // gradient is not tracked

  // Runs reverse-mode accumulation from a scalar root. Gradients of all
  // reachable grad-tracked nodes are (re)computed; repeated uses of a
  // node accumulate additively.
  void backward(Var root);

  std::size_t size() const { return nodes_.size(); }

  // --- elementwise / linear algebra -------------------------------------
  friend Var add(Var a, Var b);
  friend Var sub(Var a, Var b);
  friend Var mul(Var a, Var b);
  friend Var scale(Var a, double c);
  friend Var add_n(const std::vector<Var>& xs);
  friend Var matmul(Var a, Var b);
  friend Var sigmoid(Var a);
  friend Var tanh(Var a);
  // Rank-1: concatenation. Rank-2: column-wise concat of equal-row blocks.
  friend Var concat(Var a, Var b);

  // --- reductions / structured helpers ----------------------------------
  friend Var log_sum_exp(Var v);              // rank-1 -> scalar
  friend Var lse_rows(Var m);                 // rank-2 -> rank-1 (per row)
  friend Var add_row_broadcast(Var m, Var v); // m[i,j] + v[j]
  friend Var row(Var m, std::size_t i);       // rank-2 -> rank-1 copy of row i
  friend Var pick(Var v, std::size_t i);      // rank-1 -> scalar element
  friend Var sum(Var a);                      // all elements -> scalar

 private:
  struct Node {
    Op op;
    std::vector<int> inputs;
    Tensor value;
    Tensor grad;           // allocated lazily by backward()
    bool requires_grad = false;
    std::size_t arg0 = 0;  // op-specific (index arguments)
    double scale = 1.0;    // for kScale
  };

  friend class Var;
  Var make(Op op, std::vector<int> inputs, Tensor value);
  Node& node(int idx) { return nodes_[idx]; }
  const Node& node(int idx) const { return nodes_[idx]; }
  void backward_node(int idx);

  std::vector<Node> nodes_;
};

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var scale(Var a, double c);
Var add_n(const std::vector<Var>& xs);
Var matmul(Var a, Var b);
Var sigmoid(Var a);
Var tanh(Var a);
Var concat(Var a, Var b);
Var log_sum_exp(Var v);
Var lse_rows(Var m);
Var add_row_broadcast(Var m, Var v);
Var row(Var m, std::size_t i);
Var pick(Var v, std::size_t i);
Var sum(Var a);

// --- value-level kernels --------------------------------------------------

// log(sum_i exp(v[i])) over [begin, begin+n) with the max-shift trick.
// Left-to-right summation; n must be >= 1.
double log_sum_exp(const double* begin, std::size_t n);

// Value-level overload of the reduction above.
double log_sum_exp(const Tensor& v);

// Compares the reverse-mode gradient of f against central finite
// differences at x and returns the worst relative error, with
// denominator max(|analytic|, |numeric|, 1e-8). f must map a leaf made
// from x to a scalar Var on the supplied graph.
double check_gradient(const std::function<Var(Graph&, Var)>& f, const Tensor& x,
                      double step);

}  // namespace evlearn::ad
