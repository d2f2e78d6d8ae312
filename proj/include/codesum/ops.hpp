#pragma once

#include <span>
#include <string_view>
#include <vector>

#include "codesum/tensor.hpp"

// Differentiable kernels used by the attention model. Every forward op has a
// hand-derived backward companion that accumulates into caller-owned buffers;
// the unit tests check each against central finite differences.
namespace codesum::ops {

using Vec = std::vector<double>;

void check_finite(std::span<const double> values, std::string_view where);

// Narrow 1-D convolution along the sequence axis.
//   input  : L x Din
//   kernel : Din x w x Dout
//   output : (L - w + 1) x Dout,  out[p,o] = sum_j sum_i input[p+j,i] * kernel[i,j,o]
Tensor conv1d_narrow(const Tensor& input, const Tensor& kernel);

// Accumulates d(loss)/d(input) and d(loss)/d(kernel); either pointer may be null.
void conv1d_narrow_backward(const Tensor& input, const Tensor& kernel, const Tensor& grad_out,
                            Tensor* grad_input, Tensor* grad_kernel);

Vec softmax(std::span<const double> logits);
// Given p = softmax(z) and dL/dp, returns dL/dz.
Vec softmax_backward(std::span<const double> probs, std::span<const double> grad_probs);

double sigmoid(double x);
double sigmoid_grad(double x);

double prelu(double x, double leak);
Tensor prelu(const Tensor& x, double leak);
// Accumulates into grad_input (may be null) and returns d(loss)/d(leak).
double prelu_backward(const Tensor& x, double leak, const Tensor& grad_out, Tensor* grad_input);

inline constexpr double kL2NormalizeEps = 1e-8;

// M / (||M||_F + eps).
Tensor l2_normalize(const Tensor& m);
void l2_normalize_backward(const Tensor& m, const Tensor& grad_out, Tensor& grad_input);

struct GruParams {
  Tensor w_xr, w_hr, w_xu, w_hu, w_xc, w_hc;  // x-facing: D x k2, h-facing: k2 x k2
  Tensor b_r, b_u, b_c;                       // k2

  static GruParams zeros(std::size_t input_width, std::size_t state_width);
  std::size_t input_width() const { return w_xr.dim(0); }
  std::size_t state_width() const { return w_hr.dim(0); }
};

// Intermediate values of one GRU step, kept for the backward pass.
struct GruTrace {
  Vec x, h_prev, reset, update, candidate, h_proj;  // h_proj = h_prev * W_hc
};

Vec gru_step(std::span<const double> x, std::span<const double> h_prev, const GruParams& p,
             GruTrace* trace = nullptr);

// Accumulates parameter gradients into grad_params and input gradients into
// grad_x / grad_h_prev (either may be null).
void gru_step_backward(const GruTrace& trace, const GruParams& p, std::span<const double> grad_h,
                       GruParams& grad_params, Vec* grad_x, Vec* grad_h_prev);

}  // namespace codesum::ops
