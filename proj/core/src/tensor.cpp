#include "ooc/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace ooc {

namespace {

std::string shape_str(std::size_t r, std::size_t c) {
  return "[" + std::to_string(r) + "x" + std::to_string(c) + "]";
}

std::string shape_str(const Tensor& t) { return shape_str(t.rows(), t.cols()); }

}  // namespace

Tensor make_op(std::size_t rows, std::size_t cols, std::vector<Tensor> parents,
               std::function<void(TensorNode&)> backfn) {
  Tensor t;
  t.n_ = std::make_shared<TensorNode>();
  t.n_->rows = rows;
  t.n_->cols = cols;
  t.n_->data.assign(rows * cols, 0.0);
  t.n_->grad.assign(rows * cols, 0.0);
  t.n_->parents = std::move(parents);
  t.n_->backfn = std::move(backfn);
  return t;
}

Tensor Tensor::zeros(std::size_t rows, std::size_t cols) {
  return make_op(rows, cols, {}, nullptr);
}

Tensor Tensor::full(std::size_t rows, std::size_t cols, double v) {
  Tensor t = zeros(rows, cols);
  std::fill(t.data().begin(), t.data().end(), v);
  return t;
}

Tensor Tensor::from(std::size_t rows, std::size_t cols,
                    std::vector<double> data) {
  if (data.size() != rows * cols)
    throw ShapeError("Tensor::from: " + std::to_string(data.size()) +
                     " values for shape " + shape_str(rows, cols));
  Tensor t = zeros(rows, cols);
  t.data() = std::move(data);
  return t;
}

Tensor Tensor::uniform(std::size_t rows, std::size_t cols, double lo,
                       double hi, Rng& rng) {
  Tensor t = zeros(rows, cols);
  for (double& v : t.data()) v = rng.uniform(lo, hi);
  return t;
}

double Tensor::value() const {
  if (!is_scalar())
    throw ContractError("value() on non-scalar tensor " + shape_str(*this));
  return n_->data[0];
}

// --- basic ops ---------------------------------------------------------------

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (a.cols() != b.rows())
    throw ShapeError("matmul: inner dimensions differ, " + shape_str(a) +
                     " vs " + shape_str(b));
  std::size_t m = a.rows(), k = a.cols(), n = b.cols();
  Tensor out = make_op(m, n, {a, b}, [m, k, n](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    TensorNode* pb = o.parents[1].node();
    // a.grad += out.grad * b^T ; b.grad += a^T * out.grad
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double g = o.grad[i * n + j];
        if (g == 0.0) continue;
        for (std::size_t p = 0; p < k; ++p) {
          pa->grad[i * k + p] += g * pb->data[p * n + j];
          pb->grad[p * n + j] += g * pa->data[i * k + p];
        }
      }
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double acc = 0.0;
      for (std::size_t p = 0; p < k; ++p)
        acc += a.data()[i * k + p] * b.data()[p * n + j];
      out.data()[i * n + j] = acc;
    }
  return out;
}

namespace {

enum class Bcast { Equal, ScalarLeft, ScalarRight };

Bcast bcast_kind(const Tensor& a, const Tensor& b, const char* op) {
  if (a.rows() == b.rows() && a.cols() == b.cols()) return Bcast::Equal;
  if (a.is_scalar()) return Bcast::ScalarLeft;
  if (b.is_scalar()) return Bcast::ScalarRight;
  throw ShapeError(std::string(op) + ": incompatible shapes " + shape_str(a) +
                   " vs " + shape_str(b));
}

}  // namespace

Tensor add(const Tensor& a, const Tensor& b) {
  Bcast k = bcast_kind(a, b, "add");
  const Tensor& big = (k == Bcast::ScalarLeft) ? b : a;
  Tensor out = make_op(big.rows(), big.cols(), {a, b}, [k](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    TensorNode* pb = o.parents[1].node();
    for (std::size_t i = 0; i < o.grad.size(); ++i) {
      double g = o.grad[i];
      pa->grad[k == Bcast::ScalarLeft ? 0 : i] += g;
      pb->grad[k == Bcast::ScalarRight ? 0 : i] += g;
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = a.data()[k == Bcast::ScalarLeft ? 0 : i] +
                    b.data()[k == Bcast::ScalarRight ? 0 : i];
  return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
  Bcast k = bcast_kind(a, b, "mul");
  const Tensor& big = (k == Bcast::ScalarLeft) ? b : a;
  Tensor out = make_op(big.rows(), big.cols(), {a, b}, [k](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    TensorNode* pb = o.parents[1].node();
    for (std::size_t i = 0; i < o.grad.size(); ++i) {
      double g = o.grad[i];
      std::size_t ia = k == Bcast::ScalarLeft ? 0 : i;
      std::size_t ib = k == Bcast::ScalarRight ? 0 : i;
      pa->grad[ia] += g * pb->data[ib];
      pb->grad[ib] += g * pa->data[ia];
    }
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = a.data()[k == Bcast::ScalarLeft ? 0 : i] *
                    b.data()[k == Bcast::ScalarRight ? 0 : i];
  return out;
}

Tensor tanh(const Tensor& a) {
  Tensor out = make_op(a.rows(), a.cols(), {a}, [](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      pa->grad[i] += o.grad[i] * (1.0 - o.data[i] * o.data[i]);
  });
  for (std::size_t i = 0; i < out.size(); ++i)
    out.data()[i] = std::tanh(a.data()[i]);
  return out;
}

Tensor sigmoid(const Tensor& a) {
  Tensor out = make_op(a.rows(), a.cols(), {a}, [](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      pa->grad[i] += o.grad[i] * o.data[i] * (1.0 - o.data[i]);
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    double x = a.data()[i];
    // branch keeps exp() argument non-positive
    out.data()[i] =
        x >= 0.0 ? 1.0 / (1.0 + std::exp(-x))
                 : std::exp(x) / (1.0 + std::exp(x));
  }
  return out;
}

Tensor scale(const Tensor& a, double c) {
  Tensor out = make_op(a.rows(), a.cols(), {a}, [c](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    for (std::size_t i = 0; i < o.grad.size(); ++i)
      pa->grad[i] += o.grad[i] * c;
  });
  for (std::size_t i = 0; i < out.size(); ++i) out.data()[i] = a.data()[i] * c;
  return out;
}

Tensor sum(const Tensor& a) {
  Tensor out = make_op(1, 1, {a}, [](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    for (double& g : pa->grad) g += o.grad[0];
  });
  double acc = 0.0;
  for (double v : a.data()) acc += v;
  out.data()[0] = acc;
  return out;
}

Tensor transpose(const Tensor& a) {
  std::size_t m = a.rows(), n = a.cols();
  Tensor out = make_op(n, m, {a}, [m, n](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < m; ++j)
        pa->grad[j * n + i] += o.grad[i * m + j];
  });
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      out.data()[j * m + i] = a.data()[i * n + j];
  return out;
}

Tensor add_rowvec(const Tensor& m, const Tensor& row) {
  if (row.rows() != 1 || row.cols() != m.cols())
    throw ShapeError("add_rowvec: " + shape_str(m) + " + " + shape_str(row));
  std::size_t r = m.rows(), c = m.cols();
  Tensor out = make_op(r, c, {m, row}, [r, c](TensorNode& o) {
    TensorNode* pm = o.parents[0].node();
    TensorNode* pr = o.parents[1].node();
    for (std::size_t i = 0; i < r; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        double g = o.grad[i * c + j];
        pm->grad[i * c + j] += g;
        pr->grad[j] += g;
      }
  });
  for (std::size_t i = 0; i < r; ++i)
    for (std::size_t j = 0; j < c; ++j)
      out.data()[i * c + j] = m.data()[i * c + j] + row.data()[j];
  return out;
}

Tensor stack_rows(std::span<const Tensor> rows) {
  if (rows.empty()) throw ContractError("stack_rows: empty input");
  std::size_t c = rows[0].cols();
  std::vector<Tensor> parents;
  parents.reserve(rows.size());
  for (const Tensor& t : rows) {
    if (t.rows() != 1 || t.cols() != c)
      throw ShapeError("stack_rows: row " + shape_str(t) + " expected " +
                       shape_str(1, c));
    parents.push_back(t);
  }
  std::size_t k = rows.size();
  Tensor out = make_op(k, c, std::move(parents), [k, c](TensorNode& o) {
    for (std::size_t i = 0; i < k; ++i) {
      TensorNode* p = o.parents[i].node();
      for (std::size_t j = 0; j < c; ++j) p->grad[j] += o.grad[i * c + j];
    }
  });
  for (std::size_t i = 0; i < k; ++i)
    std::copy(rows[i].data().begin(), rows[i].data().end(),
              out.data().begin() + i * c);
  return out;
}

Tensor concat_cols(const Tensor& a, const Tensor& b) {
  if (a.rows() != b.rows())
    throw ShapeError("concat_cols: " + shape_str(a) + " vs " + shape_str(b));
  std::size_t r = a.rows(), ca = a.cols(), cb = b.cols();
  Tensor out = make_op(r, ca + cb, {a, b}, [r, ca, cb](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    TensorNode* pb = o.parents[1].node();
    for (std::size_t i = 0; i < r; ++i) {
      for (std::size_t j = 0; j < ca; ++j)
        pa->grad[i * ca + j] += o.grad[i * (ca + cb) + j];
      for (std::size_t j = 0; j < cb; ++j)
        pb->grad[i * cb + j] += o.grad[i * (ca + cb) + ca + j];
    }
  });
  for (std::size_t i = 0; i < r; ++i) {
    std::copy(a.data().begin() + i * ca, a.data().begin() + (i + 1) * ca,
              out.data().begin() + i * (ca + cb));
    std::copy(b.data().begin() + i * cb, b.data().begin() + (i + 1) * cb,
              out.data().begin() + i * (ca + cb) + ca);
  }
  return out;
}

// --- softmax family ----------------------------------------------------------

namespace {

// Row-wise stabilized softmax into out (same layout as in).
void softmax_values(const std::vector<double>& in, std::size_t rows,
                    std::size_t cols, std::vector<double>& out) {
  out.resize(in.size());
  for (std::size_t i = 0; i < rows; ++i) {
    const double* r = in.data() + i * cols;
    double mx = r[0];
    for (std::size_t j = 1; j < cols; ++j) mx = std::max(mx, r[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < cols; ++j) {
      out[i * cols + j] = std::exp(r[j] - mx);
      z += out[i * cols + j];
    }
    for (std::size_t j = 0; j < cols; ++j) out[i * cols + j] /= z;
  }
}

void check_targets(const Tensor& logits, std::span<const int> targets) {
  if (targets.size() != logits.rows())
    throw ShapeError("cross_entropy: " + std::to_string(targets.size()) +
                     " targets for " + std::to_string(logits.rows()) +
                     " rows");
  for (int t : targets)
    if (t < 0 || static_cast<std::size_t>(t) >= logits.cols())
      throw IndexError("cross_entropy: target " + std::to_string(t) +
                       " out of range [0," + std::to_string(logits.cols()) +
                       ")");
}

}  // namespace

Tensor softmax_rows(const Tensor& a) {
  std::size_t r = a.rows(), c = a.cols();
  Tensor out = make_op(r, c, {a}, [r, c](TensorNode& o) {
    TensorNode* pa = o.parents[0].node();
    // ds = s * (g - sum(g*s)) per row
    for (std::size_t i = 0; i < r; ++i) {
      double dot = 0.0;
      for (std::size_t j = 0; j < c; ++j)
        dot += o.grad[i * c + j] * o.data[i * c + j];
      for (std::size_t j = 0; j < c; ++j)
        pa->grad[i * c + j] += o.data[i * c + j] * (o.grad[i * c + j] - dot);
    }
  });
  softmax_values(a.data(), r, c, out.data());
  return out;
}

namespace {

// Shared core: loss = sum_i w_i * nll_i, optionally divided by `denom`.
Tensor xent_impl(const Tensor& logits, std::span<const int> targets,
                 const std::vector<double>& weights, double denom) {
  check_targets(logits, targets);
  std::size_t r = logits.rows(), c = logits.cols();
  std::vector<double> sm;
  softmax_values(logits.data(), r, c, sm);
  std::vector<int> tg(targets.begin(), targets.end());
  Tensor out = make_op(
      1, 1, {logits},
      [r, c, sm, tg, weights, denom](TensorNode& o) {
        TensorNode* pl = o.parents[0].node();
        double g = o.grad[0] / denom;
        for (std::size_t i = 0; i < r; ++i) {
          double w = weights[i];
          if (w == 0.0) continue;
          for (std::size_t j = 0; j < c; ++j)
            pl->grad[i * c + j] += g * w * sm[i * c + j];
          pl->grad[i * c + tg[i]] -= g * w;
        }
      });
  double loss = 0.0;
  for (std::size_t i = 0; i < r; ++i) {
    if (weights[i] == 0.0) continue;
    // recompute log prob stably from logits rather than log(sm) at 0
    const double* row = logits.data().data() + i * c;
    double mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    loss += weights[i] * (std::log(z) - (row[tg[i]] - mx));
  }
  out.data()[0] = loss / denom;
  return out;
}

}  // namespace

Tensor softmax_cross_entropy(const Tensor& logits,
                             std::span<const int> targets) {
  std::vector<double> w(logits.rows(), 1.0);
  return xent_impl(logits, targets, w, static_cast<double>(logits.rows()));
}

Tensor softmax_cross_entropy_wsum(const Tensor& logits,
                                  std::span<const int> targets,
                                  std::span<const double> weights) {
  if (weights.size() != logits.rows())
    throw ShapeError("cross_entropy: weight count mismatch");
  std::vector<double> w(weights.begin(), weights.end());
  return xent_impl(logits, targets, w, 1.0);
}

std::vector<double> row_nll(const Tensor& logits,
                            std::span<const int> targets) {
  check_targets(logits, targets);
  std::size_t r = logits.rows(), c = logits.cols();
  std::vector<double> out(r);
  for (std::size_t i = 0; i < r; ++i) {
    const double* row = logits.data().data() + i * c;
    double mx = row[0];
    for (std::size_t j = 1; j < c; ++j) mx = std::max(mx, row[j]);
    double z = 0.0;
    for (std::size_t j = 0; j < c; ++j) z += std::exp(row[j] - mx);
    out[i] = std::log(z) - (row[targets[i]] - mx);
  }
  return out;
}

Tensor bce_with_logits_wsum(const Tensor& logits,
                            std::span<const double> labels,
                            std::span<const double> weights) {
  if (logits.cols() != 1)
    throw ShapeError("bce_with_logits: logits must be [n x 1]");
  std::size_t n = logits.rows();
  if (labels.size() != n || weights.size() != n)
    throw ShapeError("bce_with_logits: label/weight count mismatch");
  std::vector<double> y(labels.begin(), labels.end());
  std::vector<double> w(weights.begin(), weights.end());
  Tensor out = make_op(1, 1, {logits}, [n, y, w](TensorNode& o) {
    TensorNode* pl = o.parents[0].node();
    double g = o.grad[0];
    for (std::size_t i = 0; i < n; ++i) {
      if (w[i] == 0.0) continue;
      double z = pl->data[i];
      double s = z >= 0.0 ? 1.0 / (1.0 + std::exp(-z))
                          : std::exp(z) / (1.0 + std::exp(z));
      pl->grad[i] += g * w[i] * (s - y[i]);
    }
  });
  double loss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (w[i] == 0.0) continue;
    double z = logits.data()[i];
    // max(z,0) - z*y + log(1 + exp(-|z|))
    loss += w[i] * (std::max(z, 0.0) - z * y[i] +
                    std::log1p(std::exp(-std::abs(z))));
  }
  out.data()[0] = loss;
  return out;
}

// --- backward ----------------------------------------------------------------

void backward(const Tensor& loss) {
  if (!loss.defined() || !loss.is_scalar())
    throw ContractError("backward: loss must be a defined scalar");
  // iterative post-order DFS over the parent DAG
  std::vector<TensorNode*> order;
  std::unordered_set<TensorNode*> visited;
  struct Frame {
    TensorNode* n;
    std::size_t next;
  };
  std::vector<Frame> stack{{loss.node(), 0}};
  visited.insert(loss.node());
  while (!stack.empty()) {
    Frame& f = stack.back();
    if (f.next < f.n->parents.size()) {
      TensorNode* p = f.n->parents[f.next++].node();
      if (visited.insert(p).second) stack.push_back({p, 0});
    } else {
      order.push_back(f.n);
      stack.pop_back();
    }
  }
  loss.node()->grad[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it)
    if ((*it)->backfn) (*it)->backfn(**it);
}

// --- gradient checking --------------------------------------------------------

GradCheckReport grad_check(const std::function<Tensor()>& f,
                           std::span<Tensor* const> params, double h) {
  // analytic gradients from one forward/backward
  for (Tensor* p : params) p->zero_grad();
  backward(f());
  std::vector<std::vector<double>> analytic;
  analytic.reserve(params.size());
  for (Tensor* p : params) analytic.push_back(p->grad());

  GradCheckReport rep;
  for (std::size_t pi = 0; pi < params.size(); ++pi) {
    Tensor* p = params[pi];
    for (std::size_t i = 0; i < p->size(); ++i) {
      double orig = p->data()[i];
      p->data()[i] = orig + h;
      double up = f().value();
      p->data()[i] = orig - h;
      double dn = f().value();
      p->data()[i] = orig;
      double num = (up - dn) / (2.0 * h);
      double ana = analytic[pi][i];
      double rel =
          std::abs(ana - num) / std::max(1e-6, std::abs(ana) + std::abs(num));
      if (rel > rep.max_rel_err) rep.max_rel_err = rel;
      if (rep.worst.size() < 5 || rel > rep.worst.back().rel_err) {
        rep.worst.push_back({pi, i, ana, num, rel});
        std::sort(rep.worst.begin(), rep.worst.end(),
                  [](const auto& a, const auto& b) {
                    return a.rel_err > b.rel_err;
                  });
        if (rep.worst.size() > 5) rep.worst.resize(5);
      }
    }
  }
  return rep;
}

}  // namespace ooc
