/*
 * Copyright (C) 2026 The adaskip Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "adaskip/kernels.hpp"

#include <cstddef>
#include <cstdint>

namespace adaskip::kernels {

namespace {

// Small problems lose to the fork/join overhead.
constexpr std::int64_t kParallelMinWork = 1 << 14;

inline bool worth_parallel(std::size_t rows, std::size_t work_per_row) {
  return static_cast<std::int64_t>(rows * work_per_row) >= kParallelMinWork;
}

inline void forward_row(const double *x, const double *w, const double *b,
                        double *y, std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t o = 0; o < out_dim; ++o) {
    const double *wr = w + o * in_dim;
    double acc = b[o];
    for (std::size_t i = 0; i < in_dim; ++i) {
      acc += wr[i] * x[i];
    }
    y[o] = acc;
  }
}

// d(W)[o][:] and d(b)[o] for one output unit, summing samples in order.
inline void weight_grad_row(const Matrix &in, const Matrix &grad_out,
                            std::size_t o, double *gw, double *gb) {
  const std::size_t n = in.rows();
  const std::size_t in_dim = in.cols();
  double bias_acc = 0.0;
  for (std::size_t i = 0; i < in_dim; ++i) {
    gw[i] = 0.0;
  }
  for (std::size_t s = 0; s < n; ++s) {
    const double g = grad_out(s, o);
    bias_acc += g;
    const double *x = in.row(s).data();
    for (std::size_t i = 0; i < in_dim; ++i) {
      gw[i] += g * x[i];
    }
  }
  *gb = bias_acc;
}

inline void input_grad_row(const double *gy, const double *w, double *gx,
                           std::size_t in_dim, std::size_t out_dim) {
  for (std::size_t i = 0; i < in_dim; ++i) {
    gx[i] = 0.0;
  }
  for (std::size_t o = 0; o < out_dim; ++o) {
    const double g = gy[o];
    const double *wr = w + o * in_dim;
    for (std::size_t i = 0; i < in_dim; ++i) {
      gx[i] += g * wr[i];
    }
  }
}

} // namespace

void affine_forward(const Matrix &in, std::span<const double> weight,
                    std::span<const double> bias, Matrix &out) {
  const std::size_t n = in.rows();
  const std::size_t in_dim = in.cols();
  const std::size_t out_dim = bias.size();
  if (out.rows() != n || out.cols() != out_dim) {
    out = Matrix(n, out_dim);
  }
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (worth_parallel(n, in_dim * out_dim))
  for (std::int64_t s = 0; s < rows; ++s) {
    forward_row(in.row(s).data(), weight.data(), bias.data(), out.row(s).data(),
                in_dim, out_dim);
  }
}

void affine_backward(const Matrix &in, std::span<const double> weight,
                     const Matrix &grad_out, std::span<double> grad_weight,
                     std::span<double> grad_bias, Matrix *grad_in) {
  const std::size_t n = in.rows();
  const std::size_t in_dim = in.cols();
  const std::size_t out_dim = grad_out.cols();
  const auto outs = static_cast<std::int64_t>(out_dim);
#pragma omp parallel for schedule(static) if (worth_parallel(n, in_dim * out_dim))
  for (std::int64_t o = 0; o < outs; ++o) {
    weight_grad_row(in, grad_out, static_cast<std::size_t>(o),
                    grad_weight.data() + o * in_dim, grad_bias.data() + o);
  }
  if (grad_in == nullptr) {
    return;
  }
  if (grad_in->rows() != n || grad_in->cols() != in_dim) {
    *grad_in = Matrix(n, in_dim);
  }
  const auto rows = static_cast<std::int64_t>(n);
#pragma omp parallel for schedule(static) if (worth_parallel(n, in_dim * out_dim))
  for (std::int64_t s = 0; s < rows; ++s) {
    input_grad_row(grad_out.row(s).data(), weight.data(), grad_in->row(s).data(),
                   in_dim, out_dim);
  }
}

void relu_inplace(Matrix &m) {
  for (double &v : m.data()) {
    v = v > 0.0 ? v : 0.0;
  }
}

void relu_backward_inplace(const Matrix &pre, Matrix &grad) {
  auto &g = grad.data();
  const auto &p = pre.data();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(p[i] > 0.0)) {
      g[i] = 0.0;
    }
  }
}

namespace reference {

void affine_forward(const Matrix &in, std::span<const double> weight,
                    std::span<const double> bias, Matrix &out) {
  const std::size_t n = in.rows();
  const std::size_t in_dim = in.cols();
  const std::size_t out_dim = bias.size();
  out = Matrix(n, out_dim);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < out_dim; ++o) {
      double acc = bias[o];
      for (std::size_t i = 0; i < in_dim; ++i) {
        acc += weight[o * in_dim + i] * in(s, i);
      }
      out(s, o) = acc;
    }
  }
}

void affine_backward(const Matrix &in, std::span<const double> weight,
                     const Matrix &grad_out, std::span<double> grad_weight,
                     std::span<double> grad_bias, Matrix *grad_in) {
  const std::size_t n = in.rows();
  const std::size_t in_dim = in.cols();
  const std::size_t out_dim = grad_out.cols();
  for (std::size_t o = 0; o < out_dim; ++o) {
    grad_bias[o] = 0.0;
    for (std::size_t i = 0; i < in_dim; ++i) {
      grad_weight[o * in_dim + i] = 0.0;
    }
  }
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t s = 0; s < n; ++s) {
      grad_bias[o] += grad_out(s, o);
      for (std::size_t i = 0; i < in_dim; ++i) {
        grad_weight[o * in_dim + i] += grad_out(s, o) * in(s, i);
      }
    }
  }
  if (grad_in == nullptr) {
    return;
  }
  *grad_in = Matrix(n, in_dim);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t o = 0; o < out_dim; ++o) {
      for (std::size_t i = 0; i < in_dim; ++i) {
        (*grad_in)(s, i) += grad_out(s, o) * weight[o * in_dim + i];
      }
    }
  }
}

} // namespace reference
} // namespace adaskip::kernels
