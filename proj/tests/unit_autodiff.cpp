#include <doctest.h>

#include <array>
#include <random>

#include "ahdd/autodiff.hpp"
#include "helpers.hpp"

using namespace ahdd;
using ahdd::testing::gradcheck_max_rel_error;
using ahdd::testing::random_matrix;
using ahdd::testing::Scalarizer;

namespace {

// Gradchecks a graph builder over the parameters it registers.
double check_graph(ParamStore& store, const std::function<VarId(Tape&)>& build) {
  auto forward = [&](bool do_backward) {
    Tape tape(&store);
    VarId root = build(tape);
    if (do_backward) tape.backward(root);
    return tape.val(root)(0, 0);
  };
  return gradcheck_max_rel_error(store, forward);
}

}  // namespace

TEST_CASE("matmul chain gradients") {
  std::mt19937_64 rng(1);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(3, 4, rng));
  ParamId b = store.add("b", random_matrix(4, 5, rng));
  Scalarizer sc(3, 5, rng);
  double err = check_graph(store, [&](Tape& t) {
    return sc.apply(t, t.matmul(t.param(a), t.param(b)));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("matmul_nt and transpose gradients") {
  std::mt19937_64 rng(3);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(3, 4, rng));
  ParamId b = store.add("b", random_matrix(5, 4, rng));
  Scalarizer sc(5, 3, rng);
  double err = check_graph(store, [&](Tape& t) {
    VarId nt = t.matmul_nt(t.param(a), t.param(b));
    return sc.apply(t, t.transpose_op(nt));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("elementwise op gradients") {
  std::mt19937_64 rng(5);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(4, 3, rng));
  ParamId b = store.add("b", random_matrix(4, 3, rng));
  ParamId bias = store.add("bias", random_matrix(1, 3, rng));
  Scalarizer sc(4, 3, rng);
  double err = check_graph(store, [&](Tape& t) {
    VarId sum = t.add(t.param(a), t.param(b));
    VarId biased = t.add_rowvec(sum, t.param(bias));
    VarId squashed = t.sigmoid_op(t.tanh_op(t.scale(biased, 0.7)));
    return sc.apply(t, squashed);
  });
  CHECK(err < 1e-6);
}

TEST_CASE("row softmax gradients") {
  std::mt19937_64 rng(7);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(4, 6, rng));
  Scalarizer sc(4, 6, rng);
  double err = check_graph(store, [&](Tape& t) {
    return sc.apply(t, t.row_softmax(t.param(a)));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("maxpool gradients away from ties") {
  std::mt19937_64 rng(9);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(5, 4, rng));
  Scalarizer sc(1, 4, rng);
  double err = check_graph(store, [&](Tape& t) {
    return sc.apply(t, t.maxpool_rows_op(t.param(a)));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("concat and slice gradients") {
  std::mt19937_64 rng(11);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(2, 3, rng));
  ParamId b = store.add("b", random_matrix(4, 3, rng));
  ParamId c = store.add("c", random_matrix(6, 2, rng));
  Scalarizer sc(4, 5, rng);
  double err = check_graph(store, [&](Tape& t) {
    std::array<VarId, 2> parts{t.param(a), t.param(b)};
    VarId stacked = t.concat_rows(parts);             // 6 x 3
    VarId wide = t.concat_cols(stacked, t.param(c));  // 6 x 5
    VarId cut = t.slice_rows(wide, 1, 4);
    return sc.apply(t, cut);
  });
  CHECK(err < 1e-6);
}

TEST_CASE("embedding lookup gradients") {
  std::mt19937_64 rng(13);
  ParamStore store;
  ParamId table = store.add("emb", random_matrix(7, 3, rng));
  std::vector<int> ids{2, 5, 2, 6};
  Scalarizer sc(4, 3, rng);
  double err = check_graph(store, [&](Tape& t) {
    return sc.apply(t, t.embed(table, ids));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("embedding padding row receives no gradient") {
  std::mt19937_64 rng(13);
  ParamStore store;
  ParamId table = store.add("emb", random_matrix(7, 3, rng));
  std::vector<int> ids{2, 5, 2, 0, 6};
  Scalarizer sc(5, 3, rng);
  store.zero_grad();
  Tape tape(&store);
  VarId root = sc.apply(tape, tape.embed(table, ids));
  tape.backward(root);
  for (int j = 0; j < 3; ++j) CHECK(store.grad(table)(0, j) == 0.0);
  // the non-padding rows that were looked up do get gradient
  double sum = 0.0;
  for (int j = 0; j < 3; ++j) sum += std::abs(store.grad(table)(2, j));
  CHECK(sum > 0.0);
}

TEST_CASE("rowwise_dot gradients") {
  std::mt19937_64 rng(15);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(4, 5, rng));
  ParamId b = store.add("b", random_matrix(4, 5, rng));
  Scalarizer sc(4, 1, rng);
  double err = check_graph(store, [&](Tape& t) {
    return sc.apply(t, t.rowwise_dot(t.param(a), t.param(b)));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("conv1d gradients") {
  std::mt19937_64 rng(17);
  ParamStore store;
  ParamId x = store.add("x", random_matrix(6, 3, rng));
  ParamId k = store.add("k", random_matrix(9, 4, rng));  // width 3, emb 3
  ParamId b = store.add("b", random_matrix(1, 4, rng));
  Scalarizer sc(6, 4, rng);
  double err = check_graph(store, [&](Tape& t) {
    return sc.apply(t, t.conv1d(t.param(x), t.param(k), t.param(b), 3));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("mean_row_cosine gradients") {
  std::mt19937_64 rng(19);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(4, 5, rng));
  ParamId b = store.add("b", random_matrix(4, 5, rng));
  double err = check_graph(store, [&](Tape& t) {
    return t.mean_row_cosine(t.param(a), t.param(b));
  });
  CHECK(err < 1e-6);
}

TEST_CASE("mean_row_cosine skips zero-norm rows without gradient blowup") {
  std::mt19937_64 rng(20);
  ParamStore store;
  Matrix a = random_matrix(3, 4, rng);
  for (int j = 0; j < 4; ++j) a(1, j) = 0.0;  // dead row
  ParamId pa = store.add("a", a);
  ParamId pb = store.add("b", random_matrix(3, 4, rng));
  store.zero_grad();
  Tape tape(&store);
  VarId root = tape.mean_row_cosine(tape.param(pa), tape.param(pb));
  tape.backward(root);
  CHECK(std::isfinite(tape.val(root)(0, 0)));
  for (int j = 0; j < 4; ++j) {
    CHECK(store.grad(pa)(1, j) == 0.0);
    CHECK(store.grad(pb)(1, j) == 0.0);
  }
}

TEST_CASE("bce gradients") {
  std::mt19937_64 rng(21);
  ParamStore store;
  ParamId s = store.add("scores", random_matrix(6, 1, rng));
  std::vector<char> y{1, 0, 1, 1, 0, 0};
  double err = check_graph(store, [&](Tape& t) {
    return t.bce(t.sigmoid_op(t.param(s)), y);
  });
  CHECK(err < 1e-6);
}

TEST_CASE("affine_scalars combines losses with coefficients") {
  std::mt19937_64 rng(22);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(3, 3, rng));
  ParamId b = store.add("b", random_matrix(3, 3, rng));
  double err = check_graph(store, [&](Tape& t) {
    VarId c1 = t.mean_row_cosine(t.param(a), t.param(b));
    std::array<VarId, 1> arg{c1};
    std::array<double, 1> coeff{-1.0};
    VarId flipped = t.affine_scalars(arg, coeff, 1.0);
    std::array<VarId, 2> terms{c1, flipped};
    std::array<double, 2> coeffs{0.4, 1.7};
    return t.affine_scalars(terms, coeffs, 0.25);
  });
  CHECK(err < 1e-6);

  Tape tape(&store);
  VarId c1 = tape.mean_row_cosine(tape.param(a), tape.param(b));
  std::array<VarId, 1> arg{c1};
  std::array<double, 1> coeff{-1.0};
  VarId flipped = tape.affine_scalars(arg, coeff, 1.0);
  CHECK(tape.val(flipped)(0, 0) == doctest::Approx(1.0 - tape.val(c1)(0, 0)).epsilon(1e-12));
}

TEST_CASE("gradients accumulate across tapes until zeroed") {
  std::mt19937_64 rng(23);
  ParamStore store;
  ParamId a = store.add("a", random_matrix(2, 2, rng));
  std::vector<char> y{1, 0};
  auto run = [&] {
    Tape tape(&store);
    VarId probs = tape.sigmoid_op(tape.rowwise_dot(tape.param(a), tape.param(a)));
    tape.backward(tape.bce(probs, y));
  };
  store.zero_grad();
  run();
  Matrix once = store.grad(a);
  run();
  for (size_t i = 0; i < once.size(); ++i)
    CHECK(store.grad(a).data()[i] == doctest::Approx(2.0 * once.data()[i]).epsilon(1e-12));
}
