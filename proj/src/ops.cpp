#include "codesum/ops.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "codesum/errors.hpp"

namespace codesum::ops {

void check_finite(std::span<const double> values, std::string_view where) {
  for (double v : values) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "non-finite value in " + std::string(where));
    }
  }
}

Tensor conv1d_narrow(const Tensor& input, const Tensor& kernel) {
  if (input.rank() != 2 || kernel.rank() != 3 || input.dim(1) != kernel.dim(0)) {
    throw Error(ErrorCode::kDimensionMismatch,
                "conv1d input " + input.shape_string() + " kernel " + kernel.shape_string());
  }
  const std::size_t len = input.dim(0);
  const std::size_t din = kernel.dim(0);
  const std::size_t width = kernel.dim(1);
  const std::size_t dout = kernel.dim(2);
  if (width > len) {
    throw Error(ErrorCode::kKernelTooLong, "window " + std::to_string(width) +
                                               " exceeds sequence length " + std::to_string(len));
  }
  check_finite(input.values(), "conv1d input");
  Tensor out({len - width + 1, dout});
  for (std::size_t p = 0; p + width <= len; ++p) {
    auto out_row = out.row(p);
    for (std::size_t j = 0; j < width; ++j) {
      const auto in_row = input.row(p + j);
      for (std::size_t i = 0; i < din; ++i) {
        const double x = in_row[i];
        if (x == 0.0) continue;
        const double* k = kernel.values().data() + (i * width + j) * dout;
        for (std::size_t o = 0; o < dout; ++o) out_row[o] += x * k[o];
      }
    }
  }
  return out;
}

void conv1d_narrow_backward(const Tensor& input, const Tensor& kernel, const Tensor& grad_out,
                            Tensor* grad_input, Tensor* grad_kernel) {
  const std::size_t din = kernel.dim(0);
  const std::size_t width = kernel.dim(1);
  const std::size_t dout = kernel.dim(2);
  const std::size_t out_len = grad_out.dim(0);
  for (std::size_t p = 0; p < out_len; ++p) {
    const auto g = grad_out.row(p);
    for (std::size_t j = 0; j < width; ++j) {
      const auto in_row = input.row(p + j);
      for (std::size_t i = 0; i < din; ++i) {
        const double* k = kernel.values().data() + (i * width + j) * dout;
        if (grad_input) {
          double acc = 0.0;
          for (std::size_t o = 0; o < dout; ++o) acc += g[o] * k[o];
          (*grad_input)(p + j, i) += acc;
        }
        if (grad_kernel) {
          const double x = in_row[i];
          double* gk = &(*grad_kernel)(i, j, 0);
          for (std::size_t o = 0; o < dout; ++o) gk[o] += x * g[o];
        }
      }
    }
  }
}

Vec softmax(std::span<const double> logits) {
  check_finite(logits, "softmax");
  Vec out(logits.size());
  if (logits.empty()) return out;
  const double peak = *std::ranges::max_element(logits);
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

Vec softmax_backward(std::span<const double> probs, std::span<const double> grad_probs) {
  double dot = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) dot += probs[i] * grad_probs[i];
  Vec out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i) out[i] = probs[i] * (grad_probs[i] - dot);
  return out;
}

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sigmoid_grad(double x) {
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

double prelu(double x, double leak) { return x > 0 ? x : leak * x; }

Tensor prelu(const Tensor& x, double leak) {
  Tensor out = x;
  for (double& v : out.values()) v = prelu(v, leak);
  return out;
}

double prelu_backward(const Tensor& x, double leak, const Tensor& grad_out, Tensor* grad_input) {
  double grad_leak = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0) {
      if (grad_input) (*grad_input)[i] += grad_out[i];
    } else {
      if (grad_input) (*grad_input)[i] += leak * grad_out[i];
      grad_leak += x[i] * grad_out[i];
    }
  }
  return grad_leak;
}

Tensor l2_normalize(const Tensor& m) {
  const double scale = 1.0 / (std::sqrt(m.squared_norm()) + kL2NormalizeEps);
  Tensor out = m;
  for (double& v : out.values()) v *= scale;
  return out;
}

void l2_normalize_backward(const Tensor& m, const Tensor& grad_out, Tensor& grad_input) {
  const double norm = std::sqrt(m.squared_norm());
  const double denom = norm + kL2NormalizeEps;
  double dot = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) dot += grad_out[i] * m[i];
  // d/dM of M/(|M|+eps): g/denom - (g.M) M / (|M| denom^2); the second term vanishes at M = 0.
  const double radial = norm > 0.0 ? dot / (norm * denom * denom) : 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    grad_input[i] += grad_out[i] / denom - radial * m[i];
  }
}

GruParams GruParams::zeros(std::size_t input_width, std::size_t state_width) {
  GruParams p;
  p.w_xr = Tensor({input_width, state_width});
  p.w_xu = Tensor({input_width, state_width});
  p.w_xc = Tensor({input_width, state_width});
  p.w_hr = Tensor({state_width, state_width});
  p.w_hu = Tensor({state_width, state_width});
  p.w_hc = Tensor({state_width, state_width});
  p.b_r = Tensor({state_width});
  p.b_u = Tensor({state_width});
  p.b_c = Tensor({state_width});
  return p;
}

namespace {

// out[j] += sum_i v[i] * w(i, j)
void accumulate_vec_mat(std::span<const double> v, const Tensor& w, Vec& out) {
  const std::size_t cols = w.dim(1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double vi = v[i];
    if (vi == 0.0) continue;
    const auto row = w.row(i);
    for (std::size_t j = 0; j < cols; ++j) out[j] += vi * row[j];
  }
}

// out[i] += sum_j w(i, j) * g[j]
void accumulate_mat_vec(const Tensor& w, std::span<const double> g, Vec& out) {
  const std::size_t cols = w.dim(1);
  for (std::size_t i = 0; i < w.dim(0); ++i) {
    const auto row = w.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < cols; ++j) acc += row[j] * g[j];
    out[i] += acc;
  }
}

// grad(i, j) += v[i] * g[j]
void accumulate_outer(std::span<const double> v, std::span<const double> g, Tensor& grad) {
  const std::size_t cols = grad.dim(1);
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto row = grad.row(i);
    for (std::size_t j = 0; j < cols; ++j) row[j] += v[i] * g[j];
  }
}

}  // namespace

Vec gru_step(std::span<const double> x, std::span<const double> h_prev, const GruParams& p,
             GruTrace* trace) {
  const std::size_t k = p.state_width();
  if (x.size() != p.input_width() || h_prev.size() != k) {
    throw Error(ErrorCode::kDimensionMismatch, "gru_step input/state width");
  }
  Vec reset(p.b_r.values().begin(), p.b_r.values().end());
  Vec update(p.b_u.values().begin(), p.b_u.values().end());
  Vec cand(p.b_c.values().begin(), p.b_c.values().end());
  Vec h_proj(k, 0.0);
  accumulate_vec_mat(x, p.w_xr, reset);
  accumulate_vec_mat(h_prev, p.w_hr, reset);
  accumulate_vec_mat(x, p.w_xu, update);
  accumulate_vec_mat(h_prev, p.w_hu, update);
  accumulate_vec_mat(x, p.w_xc, cand);
  accumulate_vec_mat(h_prev, p.w_hc, h_proj);
  Vec h(k);
  for (std::size_t j = 0; j < k; ++j) {
    reset[j] = sigmoid(reset[j]);
    update[j] = sigmoid(update[j]);
    cand[j] = std::tanh(cand[j] + reset[j] * h_proj[j]);
    h[j] = (1.0 - update[j]) * h_prev[j] + update[j] * cand[j];
  }
  if (trace) {
    trace->x.assign(x.begin(), x.end());
    trace->h_prev.assign(h_prev.begin(), h_prev.end());
    trace->reset = std::move(reset);
    trace->update = std::move(update);
    trace->candidate = std::move(cand);
    trace->h_proj = std::move(h_proj);
  }
  return h;
}

void gru_step_backward(const GruTrace& t, const GruParams& p, std::span<const double> grad_h,
                       GruParams& g, Vec* grad_x, Vec* grad_h_prev) {
  const std::size_t k = p.state_width();
  Vec d_reset_pre(k), d_update_pre(k), d_cand_pre(k), d_hproj(k);
  Vec d_h_direct(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double u = t.update[j];
    const double c = t.candidate[j];
    const double r = t.reset[j];
    d_h_direct[j] = grad_h[j] * (1.0 - u);
    const double du = grad_h[j] * (c - t.h_prev[j]);
    const double dc = grad_h[j] * u;
    d_cand_pre[j] = dc * (1.0 - c * c);
    d_hproj[j] = d_cand_pre[j] * r;
    const double dr = d_cand_pre[j] * t.h_proj[j];
    d_reset_pre[j] = dr * r * (1.0 - r);
    d_update_pre[j] = du * u * (1.0 - u);
  }
  for (std::size_t j = 0; j < k; ++j) {
    g.b_r[j] += d_reset_pre[j];
    g.b_u[j] += d_update_pre[j];
    g.b_c[j] += d_cand_pre[j];
  }
  accumulate_outer(t.x, d_reset_pre, g.w_xr);
  accumulate_outer(t.x, d_update_pre, g.w_xu);
  accumulate_outer(t.x, d_cand_pre, g.w_xc);
  accumulate_outer(t.h_prev, d_reset_pre, g.w_hr);
  accumulate_outer(t.h_prev, d_update_pre, g.w_hu);
  accumulate_outer(t.h_prev, d_hproj, g.w_hc);
  if (grad_x) {
    grad_x->resize(t.x.size(), 0.0);
    accumulate_mat_vec(p.w_xr, d_reset_pre, *grad_x);
    accumulate_mat_vec(p.w_xu, d_update_pre, *grad_x);
    accumulate_mat_vec(p.w_xc, d_cand_pre, *grad_x);
  }
  if (grad_h_prev) {
    grad_h_prev->resize(k, 0.0);
    for (std::size_t j = 0; j < k; ++j) (*grad_h_prev)[j] += d_h_direct[j];
    accumulate_mat_vec(p.w_hr, d_reset_pre, *grad_h_prev);
    accumulate_mat_vec(p.w_hu, d_update_pre, *grad_h_prev);
    accumulate_mat_vec(p.w_hc, d_hproj, *grad_h_prev);
  }
}

}  // namespace codesum::ops
