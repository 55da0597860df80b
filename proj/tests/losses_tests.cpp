#include <cmath>
#include <limits>

#include "mccnet/losses.hpp"
#include "mccnet/rng.hpp"
#include "test_support.hpp"

#include "doctest_torch.h"

using namespace mccnet;

TEST_SUITE("losses") {

TEST_CASE("feature_mse: zero on equal inputs, quadratic in the difference") {
  Rng rng(1);
  auto a = rng.normal_tensor({1, 4, 6, 6}, 1.0);
  CHECK(feature_mse(a, a).item<float>() == 0.0f);

  auto d = rng.normal_tensor({1, 4, 6, 6}, 1.0);
  auto l1 = feature_mse(a + d, a).item<float>();
  auto l2 = feature_mse(a + 2 * d, a).item<float>();
  CHECK(l2 == doctest::Approx(4.0f * l1).epsilon(1e-4));

  CHECK_THROWS_AS(feature_mse(a, torch::rand({1, 4, 5, 6})), std::exception);
}

TEST_CASE("tap_stat_distance oracle on hand-built channels") {
  // channel a [0,2]: mean 1, population std ~1; channel b [4,6]: mean 5, std ~1
  auto a = torch::tensor({0.0f, 2.0f}).view({1, 1, 1, 2});
  auto b = torch::tensor({4.0f, 6.0f}).view({1, 1, 1, 2});
  CHECK(tap_stat_distance(a, b).item<float>() == doctest::Approx(16.0).epsilon(1e-4));
  CHECK(tap_stat_distance(a, a).item<float>() == 0.0f);
}

TEST_CASE("tap_stat_distance ignores spatial arrangement") {
  Rng rng(2);
  auto a = rng.normal_tensor({1, 4, 4, 4}, 1.0);
  auto flat = a.view({1, 4, 16});
  auto perm = torch::randperm(16, torch::kInt64);
  auto shuffled = flat.index_select(2, perm).view({1, 4, 4, 4});
  auto b = rng.normal_tensor({1, 4, 4, 4}, 1.0);
  CHECK(tap_stat_distance(a, b).item<float>() ==
        doctest::Approx(tap_stat_distance(shuffled, b).item<float>()).epsilon(1e-4));
}

TEST_CASE("content and style losses vanish on their identity cases") {
  auto enc = VggEncoder::random(3);
  auto img = testing::synthetic_image(4, 32, 32);
  CHECK(content_loss(img, img, enc, Depth::deep).item<float>() == 0.0f);
  CHECK(style_loss(img, img, enc, Depth::deep).item<float>() == 0.0f);
}

TEST_CASE("content loss is symmetric in its arguments") {
  auto enc = VggEncoder::random(3);
  auto a = testing::synthetic_image(5, 32, 32);
  auto b = testing::synthetic_image(6, 32, 32);
  CHECK(content_loss(a, b, enc, Depth::deep).item<float>() ==
        doctest::Approx(content_loss(b, a, enc, Depth::deep).item<float>()).epsilon(1e-5));
}

TEST_CASE("style loss accepts differently sized images") {
  auto enc = VggEncoder::random(3);
  auto gen = testing::synthetic_image(7, 32, 32);
  auto style = testing::synthetic_image(8, 48, 40);
  auto l = style_loss(gen, style, enc, Depth::deep);
  CHECK(l.item<float>() > 0.0f);
  CHECK(std::isfinite(l.item<float>()));
}

TEST_CASE("style loss against uniform gray matches the constant-statistics computation") {
  auto enc = VggEncoder::random(3);
  auto gen = testing::synthetic_image(9, 32, 32);
  auto gray = torch::full({1, 3, 32, 32}, 0.5f);

  auto via_images = style_loss(gen, gray, enc, Depth::deep);

  auto gen_taps = enc.encode(gen, Depth::deep);
  auto gray_taps = enc.encode(gray, Depth::deep);
  auto via_taps = style_loss_taps(gen_taps, gray_taps);
  CHECK(via_images.item<float>() == doctest::Approx(via_taps.item<float>()).epsilon(1e-6));
}

TEST_CASE("identity loss against mocked generators") {
  auto c = testing::synthetic_image(10, 16, 16);
  auto s = testing::synthetic_image(11, 16, 16);

  Generator echo = [](const torch::Tensor& content, const torch::Tensor&) { return content; };
  CHECK(identity_loss(echo, c, s).item<float>() == 0.0f);

  Generator black = [](const torch::Tensor& content, const torch::Tensor&) {
    return torch::zeros_like(content);
  };
  auto expected = c.square().mean().item<float>() + s.square().mean().item<float>();
  CHECK(identity_loss(black, c, s).item<float>() == doctest::Approx(expected).epsilon(1e-6));

  // swapping (c, s) leaves the value unchanged for a symmetric generator
  CHECK(identity_loss(black, s, c).item<float>() ==
        doctest::Approx(identity_loss(black, c, s).item<float>()).epsilon(1e-6));
}

TEST_CASE("illumination loss: sigma 0, determinism, constant generator, bad sigma") {
  auto c = testing::synthetic_image(12, 16, 16);
  auto s = testing::synthetic_image(13, 16, 16);
  Generator half = [](const torch::Tensor& content, const torch::Tensor&) {
    return content * 0.5;
  };

  {
    Rng rng(7);
    CHECK(illumination_loss(half, c, s, 0.0, rng).item<float>() == 0.0f);
  }
  {
    Rng r1(7), r2(7);
    auto a = illumination_loss(half, c, s, 0.05, r1).item<float>();
    auto b = illumination_loss(half, c, s, 0.05, r2).item<float>();
    CHECK(a == b);
    CHECK(a > 0.0f);
  }
  {
    Generator constant = [](const torch::Tensor& content, const torch::Tensor&) {
      return torch::full_like(content, 0.25);
    };
    Rng rng(9);
    CHECK(illumination_loss(constant, c, s, 0.1, rng).item<float>() == 0.0f);
  }
  {
    Rng rng(10);
    CHECK_THROWS_AS(illumination_loss(half, c, s, -0.1, rng), std::exception);
  }
}

TEST_CASE("total_loss arithmetic: defaults give 3089 on all-ones terms") {
  LossWeights w;
  CHECK(w.content == 4.0);
  CHECK(w.style == 15.0);
  CHECK(w.identity == 70.0);
  CHECK(w.illumination == 3000.0);

  auto b = total_loss(1.0, 1.0, 1.0, 1.0, w);
  CHECK(b.total == doctest::Approx(3089.0));
  CHECK(total_loss(0.0, 0.0, 0.0, 0.0, w).total == 0.0);
}

TEST_CASE("total_loss is linear in each term with coefficient lambda") {
  LossWeights w;
  auto base = total_loss(0.3, 0.4, 0.1, 0.02, w).total;
  CHECK(total_loss(0.3 + 1.0, 0.4, 0.1, 0.02, w).total == doctest::Approx(base + 4.0));
  CHECK(total_loss(0.3, 0.4 + 1.0, 0.1, 0.02, w).total == doctest::Approx(base + 15.0));
  CHECK(total_loss(0.3, 0.4, 0.1 + 1.0, 0.02, w).total == doctest::Approx(base + 70.0));
  CHECK(total_loss(0.3, 0.4, 0.1, 0.02 + 1.0, w).total == doctest::Approx(base + 3000.0));
}

TEST_CASE("zero illumination weight drops the term from the total but keeps the report") {
  LossWeights w;
  w.illumination = 0.0;
  auto b = total_loss(0.5, 0.25, 0.125, 123.0, w);
  CHECK(b.illumination == 123.0);  // still reported
  CHECK(b.total == doctest::Approx(4 * 0.5 + 15 * 0.25 + 70 * 0.125));

  // and the autograd-side sum keeps the dead term out of the graph
  auto leaf = torch::ones({}, torch::requires_grad());
  auto dead = leaf * 2.0;
  auto live = leaf * 3.0;
  auto total = weighted_total(live, live, live, dead, w);
  total.backward();
  CHECK(leaf.grad().item<float>() == doctest::Approx(3.0 * (4 + 15 + 70)));
}

TEST_CASE("non-finite terms abort with the term name") {
  LossWeights w;
  auto inf = std::numeric_limits<double>::infinity();
  auto nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_WITH_AS(total_loss(inf, 0, 0, 0, w), doctest::Contains("content"),
                       std::exception);
  CHECK_THROWS_WITH_AS(total_loss(0, nan, 0, 0, w), doctest::Contains("style"),
                       std::exception);
  CHECK_THROWS_WITH_AS(total_loss(0, 0, inf, 0, w), doctest::Contains("identity"),
                       std::exception);
  CHECK_THROWS_WITH_AS(total_loss(0, 0, 0, nan, w), doctest::Contains("illumination"),
                       std::exception);
}

}  // TEST_SUITE
