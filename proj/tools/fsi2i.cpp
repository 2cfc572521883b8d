// fsi2i: few-shot image-to-image translation toolkit.
//
// Subcommands cover the full workflow: curate (split/balance manifests),
// expand (detector-driven object classes), train, finetune, translate
// (plain or instance-aware), evaluate (perceptual distance + diversity
// reports). Every run writes its resolved configuration next to its outputs.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "fewshot/core/errors.hpp"
#include "fewshot/core/image_ops.hpp"
#include "fewshot/core/imageio.hpp"
#include "fewshot/core/serialize.hpp"
#include "fewshot/data/expansion.hpp"
#include "fewshot/data/manifest.hpp"
#include "fewshot/eval/protocol.hpp"
#include "fewshot/model/checkpoint.hpp"
#include "fewshot/train/trainer.hpp"
#include "fewshot/variants/instance_merge.hpp"

namespace fs = std::filesystem;
using namespace fewshot;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 1;

void write_run_config(const fs::path& dir, const std::string& command,
                      std::map<std::string, std::string> kv) {
  kv["command"] = command;
  kv["version"] = "1";
  fs::create_directories(dir);
  std::ofstream os(dir / "run_config.txt", std::ios::trunc);
  for (const auto& [k, v] : kv) os << k << " = " << v << "\n";
}

fs::path default_root(const std::string& explicit_root, const fs::path& manifest_path) {
  if (!explicit_root.empty()) return explicit_root;
  return manifest_path.has_parent_path() ? manifest_path.parent_path() : fs::path(".");
}

void print_counts(const std::string& label, const data::DatasetManifest& m) {
  std::cout << label << " records: " << m.size() << " in " << m.n_classes() << " classes\n";
  for (const auto& [cls, n] : data::class_counts(m)) {
    std::cout << "  " << cls << ": " << n << "\n";
  }
}

struct Models {
  model::Generator gen;
  model::Discriminator disc;
};

Models load_models(const model::Checkpoint& ckpt) {
  Models m{model::Generator(ckpt.gen_config, 0), model::Discriminator(ckpt.disc_config, 0)};
  model::restore_params(ckpt, m.gen, m.disc);
  return m;
}

// ---------------------------------------------------------------------------
// curate
// ---------------------------------------------------------------------------

struct CurateArgs {
  std::string manifest;
  std::string out_dir;
  std::vector<std::string> test_classes;
  std::uint64_t balance = 0;
  std::uint64_t seed = 0;
};

int cmd_curate(const CurateArgs& args) {
  const auto m = data::load_manifest(args.manifest, args.seed);
  auto [train, test] = data::split_by_class(
      m, std::set<std::string>(args.test_classes.begin(), args.test_classes.end()));
  if (args.balance > 0) train = data::balance_classes(train, args.balance);

  const fs::path out(args.out_dir);
  data::save_manifest(train, out / "train.tsv");
  print_counts("train", train);
  if (!test.empty()) {
    data::save_manifest(test, out / "test.tsv");
    print_counts("test", test);
  }

  write_run_config(out, "curate",
                   {{"manifest", args.manifest},
                    {"out_dir", args.out_dir},
                    {"test_classes", [&] {
                       std::string s;
                       for (const auto& c : args.test_classes) s += (s.empty() ? "" : ",") + c;
                       return s;
                     }()},
                    {"balance", std::to_string(args.balance)},
                    {"seed", std::to_string(args.seed)}});
  return 0;
}

// ---------------------------------------------------------------------------
// expand
// ---------------------------------------------------------------------------

struct ExpandArgs {
  std::string manifest;
  std::string detections;
  std::string crop_dir;
  std::string out;
  std::string keep_list;
  std::string data_root;
  double threshold = 0.5;
  int min_box_side = 16;
  bool include_whole_images = false;
  bool skip_detector_errors = false;
  std::uint64_t seed = 0;
};

int cmd_expand(const ExpandArgs& args) {
  const auto m = data::load_manifest(args.manifest, args.seed);
  data::StubDetector detector = data::StubDetector::from_json_file(args.detections);

  data::ExpansionConfig cfg;
  cfg.confidence_threshold = args.threshold;
  cfg.min_box_side = args.min_box_side;
  cfg.include_whole_images = args.include_whole_images;
  cfg.skip_on_detector_error = args.skip_detector_errors;

  const fs::path root = default_root(args.data_root, args.manifest);
  data::DatasetManifest expanded = data::expand_dataset(m, detector, cfg, root, args.crop_dir);
  std::cout << "classes before filter: " << expanded.n_classes() << "\n";
  if (!args.keep_list.empty()) {
    expanded = data::filter_classes(expanded, data::load_keep_list(args.keep_list));
    std::cout << "classes after filter: " << expanded.n_classes() << "\n";
  }
  data::save_manifest(expanded, args.out);
  std::cout << "records: " << expanded.size() << "\n";

  write_run_config(fs::path(args.out).parent_path(), "expand",
                   {{"manifest", args.manifest},
                    {"detections", args.detections},
                    {"crop_dir", args.crop_dir},
                    {"out", args.out},
                    {"keep_list", args.keep_list},
                    {"data_root", root.string()},
                    {"threshold", io::format_double(args.threshold)},
                    {"min_box_side", std::to_string(args.min_box_side)},
                    {"include_whole_images", args.include_whole_images ? "1" : "0"},
                    {"skip_detector_errors", args.skip_detector_errors ? "1" : "0"},
                    {"seed", std::to_string(args.seed)}});
  return 0;
}

// ---------------------------------------------------------------------------
// train / finetune
// ---------------------------------------------------------------------------

struct TrainArgs {
  std::string manifest;
  std::string out_dir;
  std::string data_root;
  std::string resume;
  model::GeneratorConfig gen;
  model::DiscriminatorConfig disc;
  train::TrainConfig cfg;
};

std::map<std::string, std::string> train_kv(const TrainArgs& args) {
  std::map<std::string, std::string> kv = args.gen.to_kv("gen.");
  kv.merge(args.disc.to_kv("disc."));
  kv.merge(args.cfg.to_kv("train."));
  kv["manifest"] = args.manifest;
  kv["out_dir"] = args.out_dir;
  kv["data_root"] = args.data_root;
  kv["resume"] = args.resume;
  return kv;
}

void echo_hyperparameters(const train::TrainConfig& cfg) {
  std::cout << "learning_rate = " << io::format_double(cfg.learning_rate) << "\n"
            << "lambda_recon = " << io::format_double(cfg.lambda_recon) << "\n"
            << "lambda_feat = " << io::format_double(cfg.lambda_feat) << "\n"
            << "batch_size = " << cfg.batch_size << "\n"
            << "k_style = " << cfg.k_style << "\n"
            << "iterations = " << cfg.max_iterations << "\n";
}

int cmd_train(TrainArgs& args) {
  const auto manifest = data::load_manifest(args.manifest, args.cfg.seed);
  const auto classes = train::sorted_classes(manifest);
  const fs::path root = default_root(args.data_root, args.manifest);
  args.data_root = root.string();

  std::optional<model::Checkpoint> resume;
  if (!args.resume.empty()) {
    resume = model::Checkpoint::load(args.resume);
    args.gen = resume->gen_config;
    args.disc = resume->disc_config;
  } else {
    args.disc.n_classes = static_cast<int>(classes.size());
  }
  args.gen.validate();
  args.disc.validate();
  echo_hyperparameters(args.cfg);

  model::Generator gen(args.gen, mix_seed(args.cfg.seed, fnv1a("init.gen")));
  model::Discriminator disc(args.disc, mix_seed(args.cfg.seed, fnv1a("init.disc")));
  train::Trainer trainer(gen, disc, args.cfg, classes);
  if (resume) trainer.restore(*resume);

  const fs::path out(args.out_dir);
  write_run_config(out, "train", train_kv(args));
  train::FileImageProvider provider(root, args.gen.image_size);
  const model::Checkpoint final_ckpt =
      trainer.run(manifest, provider, out / "checkpoints", out / "train_log.jsonl");
  std::cout << "final checkpoint: " << (out / "checkpoints" / "ckpt-latest.fsckpt").string()
            << " at iteration " << final_ckpt.iteration << "\n";
  return 0;
}

struct FinetuneArgs {
  std::string checkpoint;
  std::string manifest;
  std::string out_dir;
  std::string data_root;
  double learning_rate = 1e-5;  // training rate divided by 10
  std::uint64_t iterations = 250000;
  bool reinit_head = false;
  std::uint64_t seed = 0;
};

int cmd_finetune(const FinetuneArgs& args) {
  const model::Checkpoint ckpt = model::Checkpoint::load(args.checkpoint);
  const auto manifest = data::load_manifest(args.manifest, args.seed);
  const fs::path root = default_root(args.data_root, args.manifest);
  const fs::path out(args.out_dir);

  std::cout << "learning_rate = " << io::format_double(args.learning_rate) << "\n"
            << "iterations = " << args.iterations << "\n";
  write_run_config(out, "finetune",
                   {{"checkpoint", args.checkpoint},
                    {"manifest", args.manifest},
                    {"out_dir", args.out_dir},
                    {"data_root", root.string()},
                    {"learning_rate", io::format_double(args.learning_rate)},
                    {"iterations", std::to_string(args.iterations)},
                    {"reinit_head", args.reinit_head ? "1" : "0"},
                    {"seed", std::to_string(args.seed)}});

  train::FineTuneOptions opts;
  opts.learning_rate = args.learning_rate;
  opts.iterations = args.iterations;
  opts.reinit_head = args.reinit_head;
  opts.reinit_seed = args.seed;
  opts.checkpoint_dir = out / "checkpoints";
  opts.log_path = out / "train_log.jsonl";

  train::FileImageProvider provider(root, ckpt.gen_config.image_size);
  const model::Checkpoint result = train::fine_tune(ckpt, manifest, provider, opts);
  std::cout << "final checkpoint: " << (opts.checkpoint_dir / "ckpt-latest.fsckpt").string()
            << " at iteration " << result.iteration << "\n";
  return 0;
}

// ---------------------------------------------------------------------------
// translate
// ---------------------------------------------------------------------------

struct TranslateArgs {
  std::string checkpoint;
  std::vector<std::string> content;
  std::vector<std::string> style;
  std::string out_dir;
  std::string variant = "none";
  std::string detections;
  int k = 0;  // 0: use all provided styles
  int feather = 0;
  int max_objects = 8;
};

int cmd_translate(const TranslateArgs& args) {
  const model::Checkpoint ckpt = model::Checkpoint::load(args.checkpoint);
  Models models = load_models(ckpt);
  const int size = ckpt.gen_config.image_size;

  std::vector<Tensor> styles;
  const int use_k = args.k > 0 ? std::min<int>(args.k, args.style.size())
                               : static_cast<int>(args.style.size());
  for (int i = 0; i < use_k; ++i) {
    styles.push_back(resize_bilinear(load_image(args.style[i]), size, size));
  }
  if (styles.empty()) throw InputError("translate: at least one style image is required");

  data::StubDetector detector;
  if (!args.detections.empty()) detector = data::StubDetector::from_json_file(args.detections);

  variants::MergeConfig merge_cfg;
  merge_cfg.feather_width = args.feather;
  merge_cfg.max_objects = args.max_objects;

  const fs::path out(args.out_dir);
  fs::create_directories(out);
  for (const std::string& content_path : args.content) {
    const Tensor x = resize_bilinear(load_image(content_path), size, size);
    Tensor result;
    if (args.variant == "none") {
      result = models.gen.translate(x, styles);
    } else if (args.variant == "paste") {
      result = variants::translate_detect_merge(x, styles, detector, models.gen, merge_cfg);
    } else if (args.variant == "latent") {
      result = variants::translate_latent_merge(x, styles, detector, models.gen, merge_cfg);
    } else {
      throw InputError("unknown variant: " + args.variant);
    }
    const fs::path out_path = out / (fs::path(content_path).stem().string() + "_translated.png");
    save_image(out_path, result);
    std::cout << out_path.string() << "\n";
  }

  write_run_config(out, "translate",
                   {{"checkpoint", args.checkpoint},
                    {"variant", args.variant},
                    {"detections", args.detections},
                    {"k", std::to_string(use_k)},
                    {"feather", std::to_string(args.feather)},
                    {"max_objects", std::to_string(args.max_objects)},
                    {"n_content", std::to_string(args.content.size())},
                    {"n_style_given", std::to_string(args.style.size())}});
  return 0;
}

// ---------------------------------------------------------------------------
// evaluate
// ---------------------------------------------------------------------------

struct EvaluateArgs {
  std::string checkpoint;
  std::string train_manifest;
  std::string style_manifest;
  std::string target_class;
  std::string out_dir;
  std::string train_root;
  std::string style_root;
  std::vector<int> k_values{2};
  int n_content = 20;
  int n_pairs = 5;
  int n_splits = 1;
  std::uint64_t seed = 0;
  std::uint64_t backbone_seed = 17;
  std::uint64_t classifier_seed = 23;
  int classifier_classes = 8;
};

int cmd_evaluate(const EvaluateArgs& args) {
  const model::Checkpoint ckpt = model::Checkpoint::load(args.checkpoint);
  Models models = load_models(ckpt);
  const int size = ckpt.gen_config.image_size;

  const auto train_m = data::load_manifest(args.train_manifest, args.seed);
  const auto style_m = data::load_manifest(args.style_manifest, args.seed);
  train::FileImageProvider content_provider(default_root(args.train_root, args.train_manifest), size);
  train::FileImageProvider style_provider(default_root(args.style_root, args.style_manifest), size);

  const eval::RandomConvBackbone backbone(args.backbone_seed);
  const eval::SmallConvClassifier classifier(args.classifier_seed, args.classifier_classes);

  const fs::path out(args.out_dir);
  std::map<std::string, std::string> kv = {
      {"checkpoint", args.checkpoint},
      {"train_manifest", args.train_manifest},
      {"style_manifest", args.style_manifest},
      {"target_class", args.target_class},
      {"n_content", std::to_string(args.n_content)},
      {"n_pairs", std::to_string(args.n_pairs)},
      {"n_splits", std::to_string(args.n_splits)},
      {"seed", std::to_string(args.seed)},
      {"backbone_seed", std::to_string(args.backbone_seed)},
      {"classifier_seed", std::to_string(args.classifier_seed)},
      {"classifier_classes", std::to_string(args.classifier_classes)}};

  for (const int k : args.k_values) {
    eval::EvalProtocol protocol;
    protocol.n_content_per_class = args.n_content;
    protocol.n_pairs = args.n_pairs;
    protocol.k_style = k;
    protocol.target_class = args.target_class;
    protocol.seed = args.seed;
    protocol.n_splits = args.n_splits;

    const eval::MetricReport report = eval::run_protocol(
        models.gen, train_m, style_m, protocol, content_provider, style_provider, backbone,
        classifier, fs::path(args.checkpoint).filename().string());
    const std::string base = "report_k" + std::to_string(k);
    eval::write_report(report, out / (base + ".json"), out / (base + ".txt"));
    std::cout << "with " << k << " target style images:\n"
              << eval::format_table(report) << "\n";
    kv["k_" + std::to_string(k)] = "1";
  }
  write_run_config(out, "evaluate", std::move(kv));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"few-shot image-to-image translation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key=value config file; flags override");

  CurateArgs curate;
  auto* c = app.add_subcommand("curate", "split a manifest by class and balance class sizes");
  c->add_option("--manifest", curate.manifest, "input manifest (TSV)")->required();
  c->add_option("--out-dir", curate.out_dir, "output directory")->required();
  c->add_option("--test-classes", curate.test_classes, "classes held out for testing")
      ->delimiter(',');
  c->add_option("--balance", curate.balance, "cap every train class at this many records");
  c->add_option("--seed", curate.seed, "sampling seed");

  ExpandArgs expand;
  auto* e = app.add_subcommand("expand", "create object classes from detections");
  e->add_option("--manifest", expand.manifest, "input manifest (TSV)")->required();
  e->add_option("--detections", expand.detections, "detection fixtures (JSON)")->required();
  e->add_option("--crop-dir", expand.crop_dir, "directory for object crops")->required();
  e->add_option("--out", expand.out, "output manifest path")->required();
  e->add_option("--keep-list", expand.keep_list, "class keep-list file");
  e->add_option("--data-root", expand.data_root, "image root (default: manifest directory)")
      ->envname("FSI2I_DATA_ROOT");
  e->add_option("--threshold", expand.threshold, "keep detections with confidence strictly above");
  e->add_option("--min-box-side", expand.min_box_side, "minimum crop side in pixels");
  e->add_flag("--include-whole-images", expand.include_whole_images,
              "keep original records alongside crops");
  e->add_flag("--skip-detector-errors", expand.skip_detector_errors,
              "skip images whose detection fails instead of aborting");
  e->add_option("--seed", expand.seed, "manifest seed");

  TrainArgs train_args;
  auto* t = app.add_subcommand("train", "adversarial training");
  t->add_option("--manifest", train_args.manifest, "training manifest")->required();
  t->add_option("--out-dir", train_args.out_dir, "run directory")->required();
  t->add_option("--data-root", train_args.data_root, "image root (default: manifest directory)")
      ->envname("FSI2I_DATA_ROOT");
  t->add_option("--resume", train_args.resume, "checkpoint to continue from");
  t->add_option("--image-size", train_args.gen.image_size);
  t->add_option("--base-channels", train_args.gen.base_channels);
  t->add_option("--n-downsample", train_args.gen.n_downsample);
  t->add_option("--content-res-blocks", train_args.gen.n_content_res_blocks);
  t->add_option("--style-dim", train_args.gen.style_dim);
  t->add_option("--adain-res-blocks", train_args.gen.n_adain_res_blocks);
  t->add_option("--mlp-layers", train_args.gen.n_mlp_layers);
  t->add_option("--disc-channels", train_args.disc.base_channels);
  t->add_option("--disc-layers", train_args.disc.n_layers);
  t->add_option("--lr", train_args.cfg.learning_rate, "RMSProp learning rate");
  t->add_option("--lambda-r", train_args.cfg.lambda_recon, "reconstruction weight");
  t->add_option("--lambda-f", train_args.cfg.lambda_feat, "feature-matching weight");
  t->add_option("--batch-size", train_args.cfg.batch_size);
  t->add_option("--k", train_args.cfg.k_style, "style images per sample");
  t->add_option("--iterations", train_args.cfg.max_iterations)->required();
  t->add_option("--checkpoint-every", train_args.cfg.checkpoint_every);
  t->add_option("--seed", train_args.cfg.seed);
  t->add_flag("--saturating-gan-loss", train_args.cfg.saturating_generator_loss,
              "use the saturating generator objective");

  FinetuneArgs ft;
  auto* f = app.add_subcommand("finetune", "continue training at a reduced rate");
  f->add_option("--checkpoint", ft.checkpoint, "checkpoint to start from")->required();
  f->add_option("--manifest", ft.manifest, "fine-tuning manifest")->required();
  f->add_option("--out-dir", ft.out_dir, "run directory")->required();
  f->add_option("--data-root", ft.data_root, "image root (default: manifest directory)")
      ->envname("FSI2I_DATA_ROOT");
  f->add_option("--lr", ft.learning_rate, "fine-tuning rate (training rate / 10)");
  f->add_option("--iterations", ft.iterations, "additional iterations");
  f->add_flag("--reinit-head", ft.reinit_head, "reinitialize the prediction head for new classes");
  f->add_option("--seed", ft.seed, "head reinitialization seed");

  TranslateArgs tr;
  auto* x = app.add_subcommand("translate", "translate images toward a style set");
  x->add_option("--checkpoint", tr.checkpoint)->required();
  x->add_option("--content", tr.content, "content image files")->required();
  x->add_option("--style", tr.style, "style image files (>= 1)")->required();
  x->add_option("--out-dir", tr.out_dir)->required();
  x->add_option("--k", tr.k, "use only the first k style images");
  x->add_option("--variant", tr.variant, "none | paste | latent")
      ->check(CLI::IsMember({"none", "paste", "latent"}));
  x->add_option("--detections", tr.detections, "detection fixtures (JSON) for the stub detector");
  x->add_option("--feather", tr.feather, "paste blend width in pixels");
  x->add_option("--max-objects", tr.max_objects);

  EvaluateArgs ev;
  auto* v = app.add_subcommand("evaluate", "run the translation metric protocol");
  v->add_option("--checkpoint", ev.checkpoint)->required();
  v->add_option("--train-manifest", ev.train_manifest)->required();
  v->add_option("--style-manifest", ev.style_manifest)->required();
  v->add_option("--target-class", ev.target_class)->required();
  v->add_option("--out-dir", ev.out_dir)->required();
  v->add_option("--train-root", ev.train_root)->envname("FSI2I_DATA_ROOT");
  v->add_option("--style-root", ev.style_root);
  v->add_option("--k", ev.k_values, "style-set sizes, one report each")->delimiter(',');
  v->add_option("--n-content", ev.n_content, "content images per source class");
  v->add_option("--n-pairs", ev.n_pairs, "translation pairs per content image");
  v->add_option("--n-splits", ev.n_splits, "diversity score splits");
  v->add_option("--seed", ev.seed);
  v->add_option("--backbone-seed", ev.backbone_seed);
  v->add_option("--classifier-seed", ev.classifier_seed);
  v->add_option("--classifier-classes", ev.classifier_classes);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& h) {
    return app.exit(h);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return kExitUsage;
  }

  try {
    if (*c) return cmd_curate(curate);
    if (*e) return cmd_expand(expand);
    if (*t) return cmd_train(train_args);
    if (*f) return cmd_finetune(ft);
    if (*x) return cmd_translate(tr);
    if (*v) return cmd_evaluate(ev);
  } catch (const InputError& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
