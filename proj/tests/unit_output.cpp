#include <doctest.h>

#include <cmath>
#include <random>

#include "ahdd/output_head.hpp"
#include "helpers.hpp"

using namespace ahdd;
using ahdd::testing::random_matrix;

TEST_CASE("zero label representations score zero") {
  std::mt19937_64 rng(1);
  OutputHead head;
  head.class_weights = random_matrix(4, 3, rng);
  head.desc_proj = random_matrix(4, 4, rng);
  Matrix hc = random_matrix(3, 4, rng);
  auto s = scores(Matrix(3, 4), head, hc);
  for (double v : s) CHECK(v == 0.0);
}

TEST_CASE("zero class weights with identity projection score against H_C rows") {
  std::mt19937_64 rng(2);
  const int h = 4, labels = 3;
  OutputHead head;
  head.class_weights = Matrix(h, labels);
  head.desc_proj = Matrix(h, h);
  for (int i = 0; i < h; ++i) head.desc_proj(i, i) = 1.0;
  Matrix hc = random_matrix(labels, h, rng);
  Matrix v = random_matrix(labels, h, rng);
  auto s = scores(v, head, hc);
  for (int i = 0; i < labels; ++i)
    CHECK(s[i] == doctest::Approx(dot(v.row(i), hc.row(i), h)).epsilon(1e-12));
}

TEST_CASE("random instance matches the brute-force diagonal oracle") {
  std::mt19937_64 rng(3);
  const int h = 5, labels = 3;
  OutputHead head;
  head.class_weights = random_matrix(h, labels, rng);
  head.desc_proj = random_matrix(h, h, rng);
  Matrix hc = random_matrix(labels, h, rng);
  Matrix v = random_matrix(labels, h, rng);
  auto s = scores(v, head, hc);

  // oracle: full products, then the diagonal
  Matrix wc = transpose(matmul(hc, head.desc_proj));  // h x N_L
  for (int i = 0; i < labels; ++i) {
    double expect = 0.0;
    for (int k = 0; k < h; ++k)
      expect += v(i, k) * (wc(k, i) + head.class_weights(k, i));
    CHECK(s[i] == doctest::Approx(expect).epsilon(1e-10));
  }
}

TEST_CASE("plain mode ignores the projection and equals desc-aware with zero W_l") {
  std::mt19937_64 rng(4);
  const int h = 4, labels = 6;
  Matrix v = random_matrix(labels, h, rng);
  Matrix hc = random_matrix(labels, h, rng);
  OutputHead plain;
  plain.class_weights = random_matrix(h, labels, rng);
  plain.mode = HeadMode::kPlain;
  OutputHead aware;
  aware.class_weights = plain.class_weights;
  aware.desc_proj = Matrix(h, h);
  auto sp = scores(v, plain, hc);
  auto sa = scores(v, aware, hc);
  for (int i = 0; i < labels; ++i) CHECK(sp[i] == sa[i]);
}

TEST_CASE("probabilities apply the logistic sigmoid") {
  CHECK(probabilities({0.0})[0] == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(probabilities({1e4})[0] == doctest::Approx(1.0).epsilon(1e-12));
  auto p = probabilities({0.0, std::log(3.0)});
  CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("raising one score raises exactly that probability") {
  std::mt19937_64 rng(5);
  std::vector<double> s{0.3, -1.2, 0.9, 0.0};
  auto base = probabilities(s);
  for (size_t k = 0; k < s.size(); ++k) {
    auto bumped = s;
    bumped[k] += 0.5;
    auto p = probabilities(bumped);
    for (size_t i = 0; i < s.size(); ++i) {
      if (i == k) CHECK(p[i] > base[i]);
      else CHECK(p[i] == base[i]);
    }
  }
}

TEST_CASE("score shape mismatches are rejected") {
  std::mt19937_64 rng(6);
  OutputHead head;
  head.class_weights = random_matrix(4, 3, rng);
  head.desc_proj = random_matrix(4, 4, rng);
  CHECK_THROWS_AS(scores(random_matrix(3, 5, rng), head, random_matrix(3, 5, rng)), Error);
  CHECK_THROWS_AS(scores(random_matrix(3, 4, rng), head, random_matrix(2, 4, rng)), Error);
}
