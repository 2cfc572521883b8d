#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fewshot/variants/instance_merge.hpp"
#include "helpers.hpp"

using namespace fewshot;
using namespace fewshot::variants;
using data::Detection;
using data::StubDetector;
using model::Generator;
using model::GeneratorConfig;

namespace {

GeneratorConfig small_config(int size = 16) {
  GeneratorConfig cfg;
  cfg.image_size = size;
  cfg.base_channels = 4;
  cfg.n_downsample = 2;
  cfg.n_content_res_blocks = 1;
  cfg.style_dim = 8;
  cfg.n_adain_res_blocks = 1;
  cfg.n_mlp_layers = 2;
  return cfg;
}

struct Scene {
  Generator gen;
  Tensor x;
  std::vector<Tensor> styles;

  explicit Scene(std::uint64_t seed, int size = 16) : gen(small_config(size), seed) {
    Rng rng(seed + 1);
    x = testutil::random_tensor({3, size, size}, rng, -0.9, 0.9);
    styles.push_back(testutil::random_tensor({3, size, size}, rng, -0.9, 0.9));
    styles.push_back(testutil::random_tensor({3, size, size}, rng, -0.9, 0.9));
  }
};

}  // namespace

TEST_CASE("both variants equal the plain translation with no detections") {
  Scene sc(3);
  StubDetector det;  // returns nothing
  MergeConfig cfg;
  const Tensor plain = sc.gen.translate(sc.x, sc.styles);
  CHECK(translate_detect_merge(sc.x, sc.styles, det, sc.gen, cfg) == plain);
  CHECK(translate_latent_merge(sc.x, sc.styles, det, sc.gen, cfg) == plain);
}

TEST_CASE("a full-frame box reduces paste-back to the plain translation") {
  Scene sc(5);
  StubDetector det({{0, 0, 16, 16, "car", 0.9}});
  // The crop is the whole frame, so its translation is the global one and
  // the paste covers everything.
  const Tensor out = translate_detect_merge(sc.x, sc.styles, det, sc.gen, MergeConfig{});
  CHECK(out == sc.gen.translate(sc.x, sc.styles));
}

TEST_CASE("paste-back differs exactly inside the pasted boxes") {
  Scene sc(7);
  const Detection d1{1, 1, 6, 6, "car", 0.9};
  const Detection d2{9, 8, 15, 14, "person", 0.7};
  StubDetector det({d1, d2});
  MergeConfig cfg;

  const Tensor global = sc.gen.translate(sc.x, sc.styles);
  const Tensor out = translate_detect_merge(sc.x, sc.styles, det, sc.gen, cfg);

  // Object-path oracle: crop, resize through the generator, translate with
  // the same styles, resize back.
  auto object_patch = [&](const Detection& d) {
    const PixelBox box = snap_box(d.x_min, d.y_min, d.x_max, d.y_max, 16, 16);
    const Tensor crop_img = resize_bilinear(crop(sc.x, box), 16, 16);
    const Tensor translated = sc.gen.translate(crop_img, sc.styles);
    return std::pair{box, resize_bilinear(translated, box.height(), box.width())};
  };
  const auto [box1, patch1] = object_patch(d1);
  const auto [box2, patch2] = object_patch(d2);

  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) {
      for (int c = 0; c < 3; ++c) {
        if (box1.contains(x, y)) {
          CHECK(out.at(c, y, x) == patch1.at(c, y - box1.y0, x - box1.x0));
        } else if (box2.contains(x, y)) {
          CHECK(out.at(c, y, x) == patch2.at(c, y - box2.y0, x - box2.x0));
        } else {
          CHECK(out.at(c, y, x) == global.at(c, y, x));
        }
      }
    }
  }
}

TEST_CASE("overlapping boxes resolve in favor of the higher confidence") {
  Scene sc(9);
  const Detection strong{2, 2, 10, 10, "car", 0.95};
  const Detection weak{4, 4, 12, 12, "person", 0.5};
  StubDetector det({weak, strong});
  const Tensor out = translate_detect_merge(sc.x, sc.styles, det, sc.gen, MergeConfig{});

  const PixelBox sbox = snap_box(2, 2, 10, 10, 16, 16);
  const Tensor scrop = resize_bilinear(crop(sc.x, sbox), 16, 16);
  const Tensor spatch =
      resize_bilinear(sc.gen.translate(scrop, sc.styles), sbox.height(), sbox.width());
  // Every pixel of the strong box shows the strong patch, including the
  // overlap with the weaker box.
  for (int y = sbox.y0; y < sbox.y1; ++y) {
    for (int x = sbox.x0; x < sbox.x1; ++x) {
      CHECK(out.at(0, y, x) == spatch.at(0, y - sbox.y0, x - sbox.x0));
    }
  }
}

TEST_CASE("max_objects caps the pasted detections") {
  Scene sc(11);
  StubDetector det({{0, 0, 4, 4, "a", 0.9}, {4, 0, 8, 4, "b", 0.8}, {8, 0, 12, 4, "c", 0.7}});
  MergeConfig cfg;
  cfg.max_objects = 2;
  const Tensor out = translate_detect_merge(sc.x, sc.styles, det, sc.gen, cfg);
  const Tensor global = sc.gen.translate(sc.x, sc.styles);
  // The lowest-confidence box is beyond the cap and must stay global.
  const PixelBox cbox = snap_box(8, 0, 12, 4, 16, 16);
  for (int y = cbox.y0; y < cbox.y1; ++y) {
    for (int x = cbox.x0; x < cbox.x1; ++x) {
      CHECK(out.at(1, y, x) == global.at(1, y, x));
    }
  }
}

TEST_CASE("feathered pasting blends toward the box border") {
  Scene sc(13);
  StubDetector det({{4, 4, 12, 12, "car", 0.9}});
  MergeConfig hard;
  MergeConfig soft;
  soft.feather_width = 2;
  const Tensor hard_out = translate_detect_merge(sc.x, sc.styles, det, sc.gen, hard);
  const Tensor soft_out = translate_detect_merge(sc.x, sc.styles, det, sc.gen, soft);
  const Tensor global = sc.gen.translate(sc.x, sc.styles);

  // Border pixels of the feathered paste sit between global and patch.
  const PixelBox box = snap_box(4, 4, 12, 12, 16, 16);
  bool blended = false;
  for (int x = box.x0; x < box.x1; ++x) {
    const double g = global.at(0, box.y0, x);
    const double h = hard_out.at(0, box.y0, x);
    const double s = soft_out.at(0, box.y0, x);
    if (h != g) {
      CHECK(((s >= std::min(g, h) && s <= std::max(g, h))));
      blended |= (s != h && s != g);
    }
  }
  CHECK(blended);
}

TEST_CASE("latent regions follow the floor/ceil/clamp rule") {
  // Downsampling factor 4, code grid 4x4.
  CHECK(latent_region({0, 0, 16, 16, "", 1.0}, 4, 4) == PixelBox{0, 0, 4, 4});
  CHECK(latent_region({5, 6, 9, 12, "", 1.0}, 4, 4) == PixelBox{1, 1, 3, 3});
  // A box narrower than one latent cell still maps to at least 1x1.
  CHECK(latent_region({5, 5, 6, 6, "", 1.0}, 4, 4) == PixelBox{1, 1, 2, 2});
  CHECK(latent_region({14, 14, 16, 16, "", 1.0}, 4, 4) == PixelBox{3, 3, 4, 4});
}

TEST_CASE("merged content codes overwrite exactly the mapped regions") {
  Scene sc(17);
  const Detection d{3, 4, 10, 9, "car", 0.9};
  const Tensor merged = merge_content_codes(sc.x, {d}, sc.gen, MergeConfig{});

  // Hand-assembled oracle: global code with the region overwritten by the
  // resized object code.
  const Tensor global_code = sc.gen.encode_content(sc.x);
  const PixelBox box = snap_box(3, 4, 10, 9, 16, 16);
  const Tensor object_code =
      sc.gen.encode_content(resize_bilinear(crop(sc.x, box), 16, 16));
  const PixelBox region = latent_region(d, 4, 4);
  const Tensor resized_code =
      resize_bilinear(object_code, region.height(), region.width());

  CHECK(merged.shape() == global_code.shape());
  for (int c = 0; c < merged.dim(0); ++c) {
    for (int y = 0; y < merged.dim(1); ++y) {
      for (int x = 0; x < merged.dim(2); ++x) {
        if (region.contains(x, y)) {
          CHECK(merged.at(c, y, x) == resized_code.at(c, y - region.y0, x - region.x0));
        } else {
          CHECK(merged.at(c, y, x) == global_code.at(c, y, x));
        }
      }
    }
  }
}

TEST_CASE("latent merge decodes the merged code with the shared style") {
  Scene sc(19);
  const Detection d{2, 2, 9, 9, "car", 0.8};
  StubDetector det({d});
  const Tensor out = translate_latent_merge(sc.x, sc.styles, det, sc.gen, MergeConfig{});
  const Tensor merged = merge_content_codes(sc.x, {d}, sc.gen, MergeConfig{});
  const Tensor want =
      sc.gen.decode(merged, sc.gen.compute_adain_params(sc.gen.encode_style(sc.styles)));
  CHECK(out == want);
  CHECK(out.shape() == sc.x.shape());
}

TEST_CASE("variants are deterministic for fixed weights and fixtures") {
  Scene sc(23);
  StubDetector det({{1, 1, 9, 9, "car", 0.9}});
  MergeConfig cfg;
  CHECK(translate_detect_merge(sc.x, sc.styles, det, sc.gen, cfg) ==
        translate_detect_merge(sc.x, sc.styles, det, sc.gen, cfg));
  CHECK(translate_latent_merge(sc.x, sc.styles, det, sc.gen, cfg) ==
        translate_latent_merge(sc.x, sc.styles, det, sc.gen, cfg));
}
