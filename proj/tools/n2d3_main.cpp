// n2d3 — command-line front end for the degradation-disentanglement pipeline.
//
// Subcommands:
//   invariant          compute the color-invariant map of an image
//   disentangle        four-region degradation map of a night image
//   synth              render a synthetic scene (image + ground-truth labels)
//   verify_corollary1  material-vs-illumination response check on a scene pair
//   reweight           entropic OT plan for one similarity block
//   nce                degradation-aware contrastive loss over feature layers
//
// Exit codes: 0 success, 1 usage or I/O error, 2 numeric failure
// (verification FAIL or Sinkhorn non-convergence).

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "n2d3/n2d3.hpp"

namespace {

using namespace n2d3;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNumeric = 2;

const char* region_name(int r) {
  switch (r) {
    case 0: return "darkness";
    case 1: return "well_lit";
    case 2: return "light_effects";
    case 3: return "high_light";
  }
  return "?";
}

// ---------------------------------------------------------------- invariant

struct InvariantArgs {
  std::string in, out;
  double sigma = 1.0;
  double eps = 1e-4;
};

int cmd_invariant(const InvariantArgs& a) {
  const RgbImage img = io::read_image(a.in);
  const SpectralPlanes sp = rgb_to_gaussian(img);
  const Plane n = combine_invariant(invariant_components(sp, a.sigma, a.eps));
  io::write_tensor(a.out, io::tensor_from_plane(n));
  return kExitOk;
}

// -------------------------------------------------------------- disentangle

struct DisentangleArgs {
  std::string in, out_labels, out_palette, dump_soft, report;
  DisentangleParams p;
};

int cmd_disentangle(const DisentangleArgs& a) {
  const RgbImage img = io::read_image(a.in);
  const DisentanglementMap dmap = disentangle(img, a.p);
  io::write_disentanglement(dmap, a.out_labels, a.out_palette);
  if (!a.dump_soft.empty())
    io::write_tensor(a.dump_soft, io::tensor_from_plane(dmap.soft_light_effects));
  if (!a.report.empty()) {
    io::Report rep;
    rep.add("sigma", a.p.sigma);
    rep.add("eps", a.p.eps);
    rep.add("seed", static_cast<long long>(a.p.seed));
    rep.add("centroid_darkness", dmap.centroids[0]);
    rep.add("centroid_well_lit", dmap.centroids[1]);
    rep.add("centroid_high_light", dmap.centroids[2]);
    rep.add("count_darkness", static_cast<long long>(dmap.darkness.count()));
    rep.add("count_well_lit", static_cast<long long>(dmap.well_lit.count()));
    rep.add("count_light_effects",
            static_cast<long long>(dmap.light_effects.count()));
    rep.add("count_high_light", static_cast<long long>(dmap.high_light.count()));
    rep.write(a.report);
  }
  return kExitOk;
}

// -------------------------------------------------------------------- synth

struct SynthArgs {
  std::string scene, out_img, out_labels;
  std::string mode;     // "", "eq1", "eq3"
  std::string variant = "a";
  int width = 0, height = 0;  // 0 = use the scene's size
};

int cmd_synth(const SynthArgs& a) {
  SceneSpec sc = load_scene(a.scene);
  if (a.mode == "eq1") sc.mode = RenderMode::kEq1;
  if (a.mode == "eq3") sc.mode = RenderMode::kEq3;
  const int w = a.width > 0 ? a.width : sc.width;
  const int h = a.height > 0 ? a.height : sc.height;
  const Variant v = a.variant == "b" ? Variant::kB : Variant::kA;
  const RgbImage img = spectral_to_rgb(render_spectral(sc, v, w, h));
  io::write_image(a.out_img, img);
  if (!a.out_labels.empty())
    io::write_label_map(a.out_labels, render_labels(sc, w, h));
  return kExitOk;
}

// --------------------------------------------------------- verify_corollary1

struct VerifyArgs {
  std::string scene_pair, report;
  double sigma = 1.0;
  double eps = 1e-4;
  double threshold = 1e-2;
  int refine = 2;
};

int cmd_verify_corollary1(const VerifyArgs& a) {
  const SceneSpec sc = load_scene(a.scene_pair);
  const CorollaryReport r = verify_corollary1(sc, a.sigma, a.eps, a.refine);

  bool pass = r.degenerate || r.ratio <= a.threshold;
  if (!r.degenerate && a.refine > 1) {
    pass = pass && r.material_decrease >= 2.0 && r.illumination_change < 0.1;
  }
  const char* verdict =
      r.degenerate ? "PASS-degenerate" : (pass ? "PASS" : "FAIL");

  io::Report rep;
  rep.add("sigma", a.sigma);
  rep.add("eps", a.eps);
  rep.add("threshold", a.threshold);
  rep.add("refine", a.refine);
  rep.add("material_response", r.material_response);
  rep.add("illumination_response", r.illumination_response);
  rep.add("ratio", r.ratio);
  rep.add("degenerate", r.degenerate);
  if (a.refine > 1) {
    rep.add("material_refined", r.material_refined);
    rep.add("illumination_refined", r.illumination_refined);
    rep.add("material_decrease", r.material_decrease);
    rep.add("illumination_change", r.illumination_change);
  }
  rep.add("verdict", std::string(verdict));
  if (!a.report.empty()) rep.write(a.report);
  std::printf("%s ratio=%.6g\n", verdict, r.ratio);
  return pass ? kExitOk : kExitNumeric;
}

// ----------------------------------------------------------------- reweight

struct ReweightArgs {
  std::string block, out;
  double epsilon = 0.05;
  int max_sweeps = 1000;
  double tol = 1e-6;
  bool negate_cost = false;
};

int cmd_reweight(const ReweightArgs& a) {
  const io::Tensor t = io::read_tensor(a.block);
  if (t.dims.size() != 2 || t.dims[0] != t.dims[1])
    throw Error(a.block + ": reweight needs a square rank-2 tensor");
  const int k = static_cast<int>(t.dims[0]);
  if (k < 2) throw Error(a.block + ": block size must be at least 2");
  std::vector<double> cost(t.data.begin(), t.data.end());

  const TransportPlan plan =
      ot_reweight(cost, k, a.epsilon, a.max_sweeps, a.tol, a.negate_cost);

  io::Tensor out;
  out.dims = {static_cast<uint32_t>(k), static_cast<uint32_t>(k)};
  out.data.assign(plan.w.begin(), plan.w.end());
  io::write_tensor(a.out, out);

  std::printf("residual = %.17g\n", plan.residual);
  std::printf("sweeps = %d\n", plan.sweeps);
  std::printf("converged = %s\n", plan.converged ? "true" : "false");
  return plan.converged ? kExitOk : kExitNumeric;
}

// ---------------------------------------------------------------------- nce

struct NceArgs {
  std::vector<std::string> src, gen;
  std::string labels, report;
  double tau = 0.07;
  uint64_t seed = 0;
  double epsilon = 0.05;
  int max_sweeps = 1000;
  double tol = 1e-6;
  int max_per_region = 256;
};

int cmd_nce(const NceArgs& a) {
  if (a.src.size() != a.gen.size())
    throw Error("--src and --gen must be given the same number of times");
  const LabelImage labels = io::read_label_map(a.labels);

  std::vector<PatchSampleSet> layers;
  std::vector<std::array<TransportPlan, 4>> plans;
  bool all_converged = true;
  for (size_t l = 0; l < a.src.size(); ++l) {
    const io::Tensor st = io::read_tensor(a.src[l]);
    const io::Tensor gt = io::read_tensor(a.gen[l]);
    const FeatureGrid src =
        feature_grid_from(st.dims, st.data, static_cast<int>(l));
    const FeatureGrid gen =
        feature_grid_from(gt.dims, gt.data, static_cast<int>(l));
    if (src.gh != gen.gh || src.gw != gen.gw || src.dim != gen.dim)
      throw Error("layer " + std::to_string(l) + ": " + a.src[l] + " and " +
                  a.gen[l] + " disagree on grid shape");
    PatchSampleSet ps = sample_patches(src, gen, labels,
                                       a.seed + static_cast<uint64_t>(l),
                                       a.max_per_region);
    std::array<TransportPlan, 4> lp;
    for (int r = 0; r < 4; ++r) {
      const RegionPatchSet& reg = ps.regions[static_cast<size_t>(r)];
      if (reg.k() < 2) continue;
      const std::vector<double> sim =
          similarity_block(reg.anchors, reg.positives, reg.k(), ps.dim, a.tau);
      lp[static_cast<size_t>(r)] =
          ot_reweight(sim, reg.k(), a.epsilon, a.max_sweeps, a.tol);
      all_converged = all_converged && lp[static_cast<size_t>(r)].converged;
    }
    layers.push_back(std::move(ps));
    plans.push_back(std::move(lp));
  }

  const DegNceResult res = deg_nce_loss(layers, plans, a.tau);

  io::Report rep;
  rep.add("tau", a.tau);
  rep.add("seed", static_cast<long long>(a.seed));
  rep.add("epsilon_ot", a.epsilon);
  rep.add("max_per_region", a.max_per_region);
  rep.add("layers", static_cast<int>(layers.size()));
  for (size_t l = 0; l < layers.size(); ++l) {
    const std::string base = "layer" + std::to_string(l);
    rep.add(base + "_loss", res.per_layer[l]);
    for (int r = 0; r < 4; ++r)
      if (res.region_counts[l][static_cast<size_t>(r)] > 0)
        rep.add(base + "_" + region_name(r) + "_k",
                res.region_counts[l][static_cast<size_t>(r)]);
  }
  rep.add("deg_nce", res.total);
  rep.add("converged", all_converged);
  rep.write(a.report);
  std::printf("deg_nce = %.17g\n", res.total);
  return all_converged ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"physics-informed nighttime degradation disentanglement"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read defaults from a key=value file");

  InvariantArgs ia;
  auto* inv = app.add_subcommand("invariant",
                                 "write the color-invariant map as a tensor");
  inv->add_option("--in", ia.in, "input image (PNG or P6 PPM)")->required();
  inv->add_option("--out", ia.out, "output tensor path")->required();
  inv->add_option("--sigma", ia.sigma, "derivative scale")->check(CLI::PositiveNumber);
  inv->add_option("--eps", ia.eps, "intensity floor")->check(CLI::PositiveNumber);

  DisentangleArgs da;
  auto* dis = app.add_subcommand("disentangle",
                                 "four-region degradation map of a night image");
  dis->add_option("--in", da.in, "input image")->required();
  dis->add_option("--out-labels", da.out_labels, "label map output (.pgm/.png)")
      ->required();
  dis->add_option("--out-palette", da.out_palette, "false-color output")
      ->required();
  dis->add_option("--sigma", da.p.sigma)->check(CLI::PositiveNumber);
  dis->add_option("--eps", da.p.eps)->check(CLI::PositiveNumber);
  dis->add_option("--seed", da.p.seed, "k-means seed");
  dis->add_option("--max-iters", da.p.max_iters)->check(CLI::PositiveNumber);
  dis->add_option("--tol", da.p.tol)->check(CLI::PositiveNumber);
  dis->add_option("--dump-soft", da.dump_soft,
                  "write the rectified light-effect response as a tensor");
  dis->add_option("--report", da.report, "write centroid/count summary");

  SynthArgs sa;
  auto* syn = app.add_subcommand("synth", "render a synthetic scene");
  syn->add_option("--scene", sa.scene, "scene description file")->required();
  syn->add_option("--out-img", sa.out_img, "rendered image output")->required();
  syn->add_option("--out-labels", sa.out_labels, "ground-truth label output");
  syn->add_option("--mode", sa.mode, "override render mode")
      ->check(CLI::IsMember({"eq1", "eq3"}));
  syn->add_option("--variant", sa.variant, "scene-pair variant")
      ->check(CLI::IsMember({"a", "b"}));
  syn->add_option("--width", sa.width, "override render width")
      ->check(CLI::PositiveNumber);
  syn->add_option("--height", sa.height, "override render height")
      ->check(CLI::PositiveNumber);

  VerifyArgs va;
  auto* ver = app.add_subcommand(
      "verify_corollary1",
      "check that material edges stay invisible to the invariant");
  ver->add_option("--scene-pair", va.scene_pair, "two-variant scene file")
      ->required();
  ver->add_option("--report", va.report, "report output path");
  ver->add_option("--sigma", va.sigma)->check(CLI::PositiveNumber);
  ver->add_option("--eps", va.eps)->check(CLI::PositiveNumber);
  ver->add_option("--threshold", va.threshold, "max material/illumination ratio")
      ->check(CLI::PositiveNumber);
  ver->add_option("--refine", va.refine, "grid refinement factor (1 = skip)")
      ->check(CLI::PositiveNumber);

  ReweightArgs ra;
  auto* rw = app.add_subcommand("reweight",
                                "entropic OT plan for one similarity block");
  rw->add_option("--block", ra.block, "square rank-2 cost tensor")->required();
  rw->add_option("--epsilon", ra.epsilon, "entropic regularization")
      ->check(CLI::PositiveNumber);
  rw->add_option("--out", ra.out, "plan tensor output")->required();
  rw->add_option("--max-sweeps", ra.max_sweeps)->check(CLI::PositiveNumber);
  rw->add_option("--tol", ra.tol, "marginal residual target")
      ->check(CLI::PositiveNumber);
  rw->add_flag("--negate-cost", ra.negate_cost,
               "treat the block as similarities to be avoided");

  NceArgs na;
  auto* nce = app.add_subcommand(
      "nce", "degradation-aware contrastive loss over feature layers");
  nce->add_option("--src", na.src, "source feature tensor, once per layer")
      ->required();
  nce->add_option("--gen", na.gen, "generated feature tensor, once per layer")
      ->required();
  nce->add_option("--labels", na.labels, "degradation label map")->required();
  nce->add_option("--tau", na.tau, "temperature")->check(CLI::PositiveNumber);
  nce->add_option("--seed", na.seed, "patch sampling seed");
  nce->add_option("--report", na.report, "loss report output")->required();
  nce->add_option("--epsilon", na.epsilon, "OT regularization")
      ->check(CLI::PositiveNumber);
  nce->add_option("--max-sweeps", na.max_sweeps)->check(CLI::PositiveNumber);
  nce->add_option("--tol", na.tol)->check(CLI::PositiveNumber);
  nce->add_option("--max-per-region", na.max_per_region)
      ->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (inv->parsed()) return cmd_invariant(ia);
    if (dis->parsed()) return cmd_disentangle(da);
    if (syn->parsed()) return cmd_synth(sa);
    if (ver->parsed()) return cmd_verify_corollary1(va);
    if (rw->parsed()) return cmd_reweight(ra);
    if (nce->parsed()) return cmd_nce(na);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "n2d3: %s\n", e.what());
    return kExitError;
  }
  return kExitError;
}
