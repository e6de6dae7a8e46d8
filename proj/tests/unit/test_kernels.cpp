#include "doctest.h"

#include <omp.h>

#include "adaskip/kernels.hpp"
#include "test_support.hpp"

using namespace adaskip;
using adaskip::testing::random_batch;

namespace {

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  return random_batch(1, n, seed).data();
}

} // namespace

TEST_CASE("parallel affine kernels match the serial reference bitwise") {
  // Large enough to cross the parallel threshold; force several threads even
  // on a single core so the split actually happens.
  omp_set_num_threads(4);
  for (const auto &[rows, in, out] : {std::tuple{3u, 5u, 7u}, std::tuple{256u, 64u, 48u}}) {
    const Matrix x = random_batch(rows, in, 1);
    const auto w = random_vector(in * out, 2);
    const auto b = random_vector(out, 3);
    Matrix y(rows, out), y_ref(rows, out);
    kernels::affine_forward(x, w, b, y);
    kernels::reference::affine_forward(x, w, b, y_ref);
    CHECK(y == y_ref);

    const Matrix g = random_batch(rows, out, 4);
    std::vector<double> gw(in * out, 0.0), gb(out, 0.0), gw_ref(in * out, 0.0), gb_ref(out, 0.0);
    Matrix gx(rows, in), gx_ref(rows, in);
    kernels::affine_backward(x, w, g, gw, gb, &gx);
    kernels::reference::affine_backward(x, w, g, gw_ref, gb_ref, &gx_ref);
    CHECK(gw == gw_ref);
    CHECK(gb == gb_ref);
    CHECK(gx == gx_ref);
  }
}

TEST_CASE("affine forward computes x W^T + b") {
  Matrix x(1, 2);
  x(0, 0) = 1.0;
  x(0, 1) = 2.0;
  const std::vector<double> w{1.0, 0.0, 3.0, -1.0}; // 2 x 2
  const std::vector<double> b{0.5, 0.25};
  Matrix y(1, 2);
  kernels::affine_forward(x, w, b, y);
  CHECK(y(0, 0) == 1.5);
  CHECK(y(0, 1) == 1.25);
}

TEST_CASE("relu and its backward mask") {
  Matrix m(1, 3);
  m(0, 0) = -1.0;
  m(0, 1) = 0.0;
  m(0, 2) = 2.0;
  const Matrix pre = m;
  kernels::relu_inplace(m);
  CHECK(m(0, 0) == 0.0);
  CHECK(m(0, 2) == 2.0);
  Matrix g(1, 3, 1.0);
  kernels::relu_backward_inplace(pre, g);
  CHECK(g(0, 0) == 0.0);
  CHECK(g(0, 1) == 0.0);
  CHECK(g(0, 2) == 1.0);
}
