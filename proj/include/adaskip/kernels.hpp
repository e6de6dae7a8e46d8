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

#pragma once

#include <span>

#include "adaskip/tensor.hpp"

// Dense kernels behind the residual network. Every kernel exists twice: an
// OpenMP version used by the library and a serial reference used by tests and
// the benchmark. Both accumulate each output element in the same order, so
// results are bitwise identical regardless of thread count.
namespace adaskip::kernels {

/// out = in * W^T + b, with W stored (out_dim x in_dim) row-major.
void affine_forward(const Matrix &in, std::span<const double> weight,
                    std::span<const double> bias, Matrix &out);

/// Given d(out), accumulates d(W) and d(b) and writes d(in).
/// grad_in may be null when the input gradient is not needed.
void affine_backward(const Matrix &in, std::span<const double> weight,
                     const Matrix &grad_out, std::span<double> grad_weight,
                     std::span<double> grad_bias, Matrix *grad_in);

void relu_inplace(Matrix &m);

/// grad *= (pre > 0), elementwise.
void relu_backward_inplace(const Matrix &pre, Matrix &grad);

namespace reference {

void affine_forward(const Matrix &in, std::span<const double> weight,
                    std::span<const double> bias, Matrix &out);

void affine_backward(const Matrix &in, std::span<const double> weight,
                     const Matrix &grad_out, std::span<double> grad_weight,
                     std::span<double> grad_bias, Matrix *grad_in);

} // namespace reference
} // namespace adaskip::kernels
