#include <doctest.h>

#include <cmath>
#include <random>

#include "ahdd/attention.hpp"
#include "helpers.hpp"

using namespace ahdd;
using ahdd::testing::random_matrix;

TEST_CASE("single-position documents get weight one") {
  std::mt19937_64 rng(1);
  Matrix q = random_matrix(4, 3, rng);
  Matrix h = random_matrix(1, 3, rng);
  Matrix w = attention_weights(q, h);
  for (int i = 0; i < 4; ++i) CHECK(w(i, 0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("zero queries give uniform weights") {
  std::mt19937_64 rng(2);
  Matrix q(3, 5);
  Matrix h = random_matrix(7, 5, rng);
  Matrix w = attention_weights(q, h);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 7; ++j) CHECK(w(i, j) == doctest::Approx(1.0 / 7).epsilon(1e-12));
}

TEST_CASE("weights match a directly evaluated softmax table") {
  // width-1 vectors make the logits easy to state: row i, position j has
  // logit q_i * h_j
  Matrix q = Matrix::from_rows({{1.0}, {2.0}});
  Matrix h = Matrix::from_rows({{0.5}, {1.0}, {2.0}});
  Matrix w = attention_weights(q, h);
  for (int i = 0; i < 2; ++i) {
    double qi = q(i, 0);
    double z = std::exp(qi * 0.5) + std::exp(qi * 1.0) + std::exp(qi * 2.0);
    CHECK(w(i, 0) == doctest::Approx(std::exp(qi * 0.5) / z).epsilon(1e-12));
    CHECK(w(i, 1) == doctest::Approx(std::exp(qi * 1.0) / z).epsilon(1e-12));
    CHECK(w(i, 2) == doctest::Approx(std::exp(qi * 2.0) / z).epsilon(1e-12));
  }
}

TEST_CASE("attention rejects shape errors") {
  std::mt19937_64 rng(3);
  Matrix q = random_matrix(2, 4, rng);
  CHECK_THROWS_AS(attention_weights(q, Matrix(0, 4)), Error);
  CHECK_THROWS_AS(attention_weights(q, random_matrix(3, 5, rng)), Error);
}

TEST_CASE("code_aware_attention composes projection and attention") {
  std::mt19937_64 rng(4);
  Matrix hc = random_matrix(5, 4, rng);
  Matrix h = random_matrix(8, 4, rng);

  SUBCASE("identity projection reduces to plain attention on H_C") {
    Matrix eye(4, 4);
    for (int i = 0; i < 4; ++i) eye(i, i) = 1.0;
    Matrix a = code_aware_attention(hc, eye, h);
    Matrix b = attention_weights(hc, h);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 8; ++j) CHECK(a(i, j) == doctest::Approx(b(i, j)).epsilon(1e-12));
  }
  SUBCASE("zero projection gives uniform weights") {
    Matrix w = code_aware_attention(hc, Matrix(4, 4), h);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 8; ++j) CHECK(w(i, j) == doctest::Approx(1.0 / 8).epsilon(1e-12));
  }
  SUBCASE("matches the two steps composed independently") {
    Matrix proj = random_matrix(4, 4, rng);
    Matrix a = code_aware_attention(hc, proj, h);
    Matrix b = attention_weights(matmul(hc, proj), h);
    for (int i = 0; i < 5; ++i)
      for (int j = 0; j < 8; ++j) CHECK(a(i, j) == doctest::Approx(b(i, j)).epsilon(1e-12));
  }
}

TEST_CASE("plain_label_attention delegates to attention_weights") {
  std::mt19937_64 rng(5);
  Matrix u = random_matrix(6, 4, rng);
  Matrix h = random_matrix(9, 4, rng);
  Matrix a = plain_label_attention(u, h);
  Matrix b = attention_weights(u, h);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 9; ++j) CHECK(a(i, j) == b(i, j));
}

TEST_CASE("label_specific_repr basics") {
  SUBCASE("one-hot weights copy the selected hidden row") {
    std::mt19937_64 rng(6);
    Matrix h = random_matrix(4, 3, rng);
    Matrix w(2, 4);
    w(0, 2) = 1.0;
    w(1, 0) = 1.0;
    Matrix v = label_specific_repr(w, h);
    for (int j = 0; j < 3; ++j) {
      CHECK(v(0, j) == doctest::Approx(h(2, j)));
      CHECK(v(1, j) == doctest::Approx(h(0, j)));
    }
  }
  SUBCASE("uniform weights give column means") {
    std::mt19937_64 rng(7);
    Matrix h = random_matrix(5, 3, rng);
    Matrix w(1, 5, 0.2);
    Matrix v = label_specific_repr(w, h);
    for (int j = 0; j < 3; ++j) {
      double mean = 0.0;
      for (int i = 0; i < 5; ++i) mean += h(i, j) / 5.0;
      CHECK(v(0, j) == doctest::Approx(mean).epsilon(1e-12));
    }
  }
  SUBCASE("random instance matches the brute-force sum") {
    std::mt19937_64 rng(8);
    Matrix w = random_matrix(3, 4, rng, 0.0, 1.0);
    Matrix h = random_matrix(4, 5, rng);
    Matrix v = label_specific_repr(w, h);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 5; ++j) {
        double sum = 0.0;
        for (int k = 0; k < 4; ++k) sum += w(i, k) * h(k, j);
        CHECK(v(i, j) == doctest::Approx(sum).epsilon(1e-12));
      }
  }
  SUBCASE("shape mismatch is rejected") {
    std::mt19937_64 rng(9);
    CHECK_THROWS_AS(label_specific_repr(random_matrix(2, 3, rng), random_matrix(4, 5, rng)),
                    Error);
  }
}

TEST_CASE("attention invariants hold over random instances") {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 200; ++trial) {
    int labels = 1 + static_cast<int>(rng() % 6);
    int positions = 1 + static_cast<int>(rng() % 12);
    int width = 1 + static_cast<int>(rng() % 8);
    Matrix q = random_matrix(labels, width, rng, -3.0, 3.0);
    Matrix h = random_matrix(positions, width, rng, -3.0, 3.0);
    Matrix w = attention_weights(q, h);
    Matrix v = label_specific_repr(w, h);

    for (int i = 0; i < labels; ++i) {
      double sum = 0.0;
      for (int j = 0; j < positions; ++j) {
        CHECK(w(i, j) >= 0.0);
        sum += w(i, j);
      }
      CHECK(std::abs(sum - 1.0) <= 1e-9);
    }
    // convex-hull bound per coordinate
    for (int c = 0; c < width; ++c) {
      double lo = h(0, c), hi = h(0, c);
      for (int j = 1; j < positions; ++j) {
        lo = std::min(lo, h(j, c));
        hi = std::max(hi, h(j, c));
      }
      for (int i = 0; i < labels; ++i) {
        CHECK(v(i, c) >= lo - 1e-9);
        CHECK(v(i, c) <= hi + 1e-9);
      }
    }
  }
}

TEST_CASE("token permutation permutes weights and leaves V unchanged") {
  std::mt19937_64 rng(11);
  Matrix q = random_matrix(4, 5, rng);
  Matrix h = random_matrix(9, 5, rng);
  std::vector<int> perm(9);
  for (int i = 0; i < 9; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  Matrix hp(9, 5);
  for (int i = 0; i < 9; ++i)
    for (int j = 0; j < 5; ++j) hp(i, j) = h(perm[i], j);

  Matrix w = attention_weights(q, h);
  Matrix wp = attention_weights(q, hp);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 9; ++j) CHECK(wp(i, j) == doctest::Approx(w(i, perm[j])).epsilon(1e-12));

  Matrix v = label_specific_repr(w, h);
  Matrix vp = label_specific_repr(wp, hp);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 5; ++j) CHECK(std::abs(vp(i, j) - v(i, j)) <= 1e-12);
}

TEST_CASE("softmax weights are invariant to constant logit shifts") {
  std::mt19937_64 rng(12);
  // appending a constant column to H and matching query coordinates adds a
  // per-row constant to every logit
  Matrix q = random_matrix(3, 4, rng);
  Matrix h = random_matrix(6, 4, rng);
  Matrix q_shift(3, 5), q_zero(3, 5), h_ext(6, 5);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 4; ++j) {
      q_shift(i, j) = q(i, j);
      q_zero(i, j) = q(i, j);
    }
    q_shift(i, 4) = 2.5 + i;  // row-specific shift
    q_zero(i, 4) = 0.0;
  }
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 4; ++j) h_ext(i, j) = h(i, j);
    h_ext(i, 4) = 1.0;
  }
  Matrix shifted = attention_weights(q_shift, h_ext);
  Matrix base = attention_weights(q_zero, h_ext);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 6; ++j)
      CHECK(shifted(i, j) == doctest::Approx(base(i, j)).epsilon(1e-12));
}
