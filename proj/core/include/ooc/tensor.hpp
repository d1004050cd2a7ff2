#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "ooc/errors.hpp"
#include "ooc/rng.hpp"

namespace ooc {

class Tensor;

// Backward-graph record. One node per tensor produced during a forward pass;
// leaves (parameters, inputs) have no backfn. The graph is acyclic by
// construction: a node only ever references tensors that existed before it.
struct TensorNode {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;
  std::vector<double> grad;
  std::vector<Tensor> parents;
  std::function<void(TensorNode&)> backfn;
};

// Dense row-major matrix of doubles with an attached gradient accumulator.
// Scalars are 1x1, vectors are 1xn. Copies are shallow: tensors share the
// node, so pushing a parameter through many graphs accumulates into one grad.
class Tensor {
 public:
  Tensor() = default;

  static Tensor zeros(std::size_t rows, std::size_t cols);
  static Tensor full(std::size_t rows, std::size_t cols, double v);
  static Tensor scalar(double v) { return full(1, 1, v); }
  static Tensor from(std::size_t rows, std::size_t cols,
                     std::vector<double> data);
  static Tensor uniform(std::size_t rows, std::size_t cols, double lo,
                        double hi, Rng& rng);

  bool defined() const { return static_cast<bool>(n_); }
  std::size_t rows() const { return n_->rows; }
  std::size_t cols() const { return n_->cols; }
  std::size_t size() const { return n_->data.size(); }
  bool is_scalar() const { return defined() && size() == 1; }

  double value() const;  // scalar payload
  double at(std::size_t i, std::size_t j) const {
    return n_->data[i * n_->cols + j];
  }
  double& at(std::size_t i, std::size_t j) {
    return n_->data[i * n_->cols + j];
  }

  std::vector<double>& data() { return n_->data; }
  const std::vector<double>& data() const { return n_->data; }
  std::vector<double>& grad() { return n_->grad; }
  const std::vector<double>& grad() const { return n_->grad; }

  void zero_grad() { std::fill(n_->grad.begin(), n_->grad.end(), 0.0); }

  // Value copy with no graph attachment.
  Tensor detached() const { return from(rows(), cols(), data()); }

  TensorNode* node() const { return n_.get(); }

 private:
  std::shared_ptr<TensorNode> n_;
  friend Tensor make_op(std::size_t, std::size_t, std::vector<Tensor>,
                        std::function<void(TensorNode&)>);
};

// Builds a graph node with the given parents and backward rule. Primitive
// used by all operations (and by layers that need custom backward rules).
Tensor make_op(std::size_t rows, std::size_t cols, std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backfn);

// --- operations ------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b);
Tensor add(const Tensor& a, const Tensor& b);  // equal shape or scalar operand
Tensor mul(const Tensor& a, const Tensor& b);  // same broadcasting as add
Tensor tanh(const Tensor& a);
Tensor sigmoid(const Tensor& a);
Tensor scale(const Tensor& a, double c);
Tensor sum(const Tensor& a);  // scalar
Tensor transpose(const Tensor& a);

// matrix[m x n] + row[1 x n], broadcast over rows (bias addition).
Tensor add_rowvec(const Tensor& m, const Tensor& row);

// Stack k row vectors [1 x n] into [k x n]; backward splits the gradient.
Tensor stack_rows(std::span<const Tensor> rows);

// [m x a] ++ [m x b] -> [m x (a+b)].
Tensor concat_cols(const Tensor& a, const Tensor& b);

// Row-wise softmax, log-sum-exp stabilized.
Tensor softmax_rows(const Tensor& a);

// Mean over rows of -log softmax(logits)[target]. Stabilized by the per-row
// max; backward emits (softmax - one_hot) / batch.
Tensor softmax_cross_entropy(const Tensor& logits,
                             std::span<const int> targets);

// Weighted *sum* variant for masked batches; callers divide by the active
// count. A weight of zero makes the row contribute nothing to loss or grad.
Tensor softmax_cross_entropy_wsum(const Tensor& logits,
                                  std::span<const int> targets,
                                  std::span<const double> weights);

// Per-row -log softmax(logits)[target], values only (no graph). Scoring path.
std::vector<double> row_nll(const Tensor& logits, std::span<const int> targets);

// Weighted sum of stable binary cross-entropy over logits [n x 1].
Tensor bce_with_logits_wsum(const Tensor& logits,
                            std::span<const double> labels,
                            std::span<const double> weights);

// Reverse-mode sweep from a scalar loss. Visits each reachable node exactly
// once in reverse topological order; grads accumulate across calls.
void backward(const Tensor& loss);

// --- gradient checking -----------------------------------------------------

struct GradCheckReport {
  struct Entry {
    std::size_t param;  // index into the checked parameter list
    std::size_t coord;
    double analytic;
    double numeric;
    double rel_err;
  };
  double max_rel_err = 0.0;
  std::vector<Entry> worst;  // up to 5, sorted by rel_err descending
  bool pass(double tol) const { return max_rel_err < tol; }
};

// Compares backward gradients of f() against central finite differences over
// every coordinate of every listed parameter. f must be deterministic and
// rebuild its graph from the live parameter values on each call.
GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::span<Tensor* const> params, double h = 1e-5);

}  // namespace ooc
