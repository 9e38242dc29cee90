// emrecon command line: phantom generation, radial Fourier sampling,
// TV / anisotropic-quadratic reconstruction, edge-masked enhancement,
// and the bundled experiment sweeps. Every command writes a JSON manifest
// of its resolved parameters and output checksums next to its outputs; the
// `rerun` command replays a manifest and verifies the checksums match.

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "emrecon/edge_mask.hpp"
#include "emrecon/fourier.hpp"
#include "emrecon/image.hpp"
#include "emrecon/manifest.hpp"
#include "emrecon/pipeline.hpp"
#include "emrecon/solvers.hpp"

namespace fs = std::filesystem;
using namespace emrecon;

namespace {

constexpr const char* kVersion = "emrecon 1.0.0";

int dispatch(const std::vector<std::string>& args);

std::string stem_of(const std::string& path) {
  const fs::path p(path);
  return (p.parent_path() / p.stem()).string();
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void record_argv(RunManifest& man, const std::vector<std::string>& args) {
  man.params["argv"] = nlohmann::json(args).dump();
}

// report.csv carries wall-clock columns; its checksum is taken over the
// canonical form so manifests can be replayed and verified
std::string artifact_checksum(const std::string& path) {
  if (fs::path(path).filename() == "report.csv") {
    const std::string canon = report_canonical_bytes(path);
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon.data(), canon.size())));
    return buf;
  }
  return file_checksum(path);
}

void finish_manifest(RunManifest& man, const std::vector<std::string>& outputs,
                     const std::string& manifest_path) {
  for (const auto& p : outputs) man.outputs[p] = artifact_checksum(p);
  save_manifest(man, manifest_path);
}

// ---- phantom -------------------------------------------------------------

struct PhantomArgs {
  int n = 256;
  std::string out;
};

int run_phantom(const PhantomArgs& a, const std::vector<std::string>& argv) {
  const Image img = shepp_logan(a.n);
  save_image(img, a.out);
  RunManifest man;
  man.command = "phantom";
  man.params["n"] = std::to_string(a.n);
  man.params["out"] = a.out;
  record_argv(man, argv);
  finish_manifest(man, {a.out}, a.out + ".manifest.json");
  std::cout << "wrote " << a.out << " (" << a.n << "x" << a.n << ")\n";
  return 0;
}

// ---- sample ---------------------------------------------------------------

struct SampleArgs {
  std::string in_image;
  int lines = 16;
  bool full = false;
  double sigma = 0.0;
  uint64_t seed = 0;
  std::string out;
};

int run_sample(const SampleArgs& a, const std::vector<std::string>& argv) {
  const Image img = load_image(a.in_image);
  const SamplingPattern pattern = a.full ? full_pattern(img.n) : radial_pattern(img.n, a.lines);
  SampledData data = sample(dft2(img), pattern);
  if (a.sigma > 0.0) data = add_noise(data, a.sigma, a.seed);
  save_sampled_data_csv(data, a.out);
  RunManifest man;
  man.command = "sample";
  man.params["in-image"] = a.in_image;
  man.params["lines"] = a.full ? "full" : std::to_string(a.lines);
  man.params["sigma"] = fmt(a.sigma);
  man.params["seed"] = std::to_string(a.seed);
  man.params["out"] = a.out;
  record_argv(man, argv);
  man.inputs[a.in_image] = file_checksum(a.in_image);
  finish_manifest(man, {a.out}, a.out + ".manifest.json");
  std::cout << "wrote " << a.out << " (" << data.values.size() << " samples, "
            << (a.full ? std::string("full grid") : std::to_string(a.lines) + " lines") << ")\n";
  return 0;
}

// ---- reconstruct ----------------------------------------------------------

struct ReconstructArgs {
  std::string in_data;
  std::string in_image;
  int lines = 16;
  double sigma = 0.0;
  uint64_t seed = 0;
  std::string method = "tv";
  bool noisy = false;
  // solver knobs default to the library configuration
  double lambda = SolverConfig{}.lambda;
  int iters = SolverConfig{}.max_outer_iterations;
  int cg_iters = SolverConfig{}.max_cg_iterations;
  double cg_tol = SolverConfig{}.cg_tolerance;
  double penalty = SolverConfig{}.bregman_penalty;
  std::string out;
};

int run_reconstruct(const ReconstructArgs& a, const std::vector<std::string>& argv) {
  SampledData data;
  RunManifest man;
  man.command = "reconstruct";
  if (!a.in_data.empty()) {
    data = load_sampled_data_csv(a.in_data);
    man.inputs[a.in_data] = file_checksum(a.in_data);
    man.params["in-data"] = a.in_data;
  } else {
    const Image img = load_image(a.in_image);
    data = sample(dft2(img), radial_pattern(img.n, a.lines));
    if (a.sigma > 0.0) data = add_noise(data, a.sigma, a.seed);
    man.inputs[a.in_image] = file_checksum(a.in_image);
    man.params["in-image"] = a.in_image;
    man.params["lines"] = std::to_string(a.lines);
    man.params["sigma"] = fmt(a.sigma);
    man.params["seed"] = std::to_string(a.seed);
  }

  SolverConfig cfg;
  cfg.max_outer_iterations = a.iters;
  cfg.max_cg_iterations = a.cg_iters;
  cfg.cg_tolerance = a.cg_tol;
  cfg.bregman_penalty = a.penalty;
  cfg.lambda = a.lambda;
  cfg.noiseless = !a.noisy;

  Image x;
  SolveReport report;
  if (a.method == "tv")
    std::tie(x, report) = tv_reconstruct(data, cfg);
  else
    std::tie(x, report) = anisotropic_l2_reconstruct(data, cfg);

  save_image(x, a.out);
  const std::string trace = stem_of(a.out) + "_trace.csv";
  save_solve_report_csv(report, trace);

  man.params["method"] = a.method;
  man.params["lambda"] = fmt(a.lambda);
  man.params["noisy"] = a.noisy ? "true" : "false";
  man.params["iters"] = std::to_string(a.iters);
  man.params["cg-iters"] = std::to_string(a.cg_iters);
  man.params["cg-tol"] = fmt(a.cg_tol);
  man.params["penalty"] = fmt(a.penalty);
  man.params["out"] = a.out;
  record_argv(man, argv);
  finish_manifest(man, {a.out, trace}, a.out + ".manifest.json");
  std::cout << "wrote " << a.out << " (method " << a.method << ", "
            << report.iterations_used << " iterations, "
            << (report.converged ? "converged" : "not converged") << ")\n";
  return 0;
}

// ---- enhance ----------------------------------------------------------------

struct EnhanceArgs {
  std::string in_data;
  std::string init_image;
  double k = EnhanceConfig{}.k;
  double k_div = 0.0;  // 0 = unset; otherwise tau = max/k_div
  double mu = EnhanceConfig{}.mu;
  bool noiseless = false;
  int cg_iters = SolverConfig{}.max_cg_iterations;
  double cg_tol = SolverConfig{}.cg_tolerance;
  std::string truth;
  std::string out;
};

int run_enhance(const EnhanceArgs& a, const std::vector<std::string>& argv) {
  const SampledData data = load_sampled_data_csv(a.in_data);
  const Image init = load_image(a.init_image);
  if (init.n != data.pattern.n)
    throw std::runtime_error("enhance: data and initial image dimensions differ");

  const double k = a.k_div > 0.0 ? std::log2(a.k_div) : a.k;
  const EdgeMap edges = edge_map(init);
  const MaskPair masks = build_masks(edges, compute_thresholds(edges, k));

  EnhanceConfig cfg;
  cfg.k = k;
  cfg.mu = a.mu;
  cfg.noiseless = a.noiseless;
  cfg.solver.max_cg_iterations = a.cg_iters;
  cfg.solver.cg_tolerance = a.cg_tol;

  Image x;
  SolveReport report;
  if (a.mu == 0.0 && a.noiseless) {
    // inert regularizer: the enhancement degenerates to the exact data
    // projection of the image being enhanced
    x = project_onto_data(init, data);
    report.converged = true;
  } else {
    std::tie(x, report) = enhance(data, masks, cfg);
  }

  save_image(x, a.out);
  const std::string stem = stem_of(a.out);
  std::vector<std::string> outputs = {a.out};
  save_mask_pbm(masks.vertical, masks.n, stem + "_mask_v.pbm");
  save_mask_pbm(masks.horizontal, masks.n, stem + "_mask_h.pbm");
  outputs.push_back(stem + "_mask_v.pbm");
  outputs.push_back(stem + "_mask_h.pbm");
  const std::string trace = stem + "_trace.csv";
  save_solve_report_csv(report, trace);
  outputs.push_back(trace);

  RunManifest man;
  man.command = "enhance";
  man.inputs[a.in_data] = file_checksum(a.in_data);
  man.inputs[a.init_image] = file_checksum(a.init_image);
  if (!a.truth.empty()) {
    const Image truth = load_image(a.truth);
    Image err(x.n);
    for (size_t i = 0; i < err.pixels.size(); ++i)
      err.pixels[i] = std::abs(x.pixels[i] - truth.pixels[i]);
    save_image_pgm(err, stem + "_err.pgm");
    save_image_csv(err, stem + "_err.csv");
    outputs.push_back(stem + "_err.pgm");
    outputs.push_back(stem + "_err.csv");
    man.inputs[a.truth] = file_checksum(a.truth);
    man.params["truth"] = a.truth;
    std::cout << "relative error " << relative_error(x, truth) << "\n";
  }
  man.params["in-data"] = a.in_data;
  man.params["init-image"] = a.init_image;
  man.params["k"] = fmt(k);
  man.params["mu"] = fmt(a.mu);
  man.params["noiseless"] = a.noiseless ? "true" : "false";
  man.params["cg-iters"] = std::to_string(a.cg_iters);
  man.params["cg-tol"] = fmt(a.cg_tol);
  man.params["out"] = a.out;
  record_argv(man, argv);
  finish_manifest(man, outputs, a.out + ".manifest.json");
  std::cout << "wrote " << a.out << "\n";
  return 0;
}

// ---- table1 / noise ---------------------------------------------------------

struct Table1Args {
  std::string out_dir;
  double mu = 1e-2;
  int iters = 300;
  int cg_iters = 2000;
};

int run_table1_cmd(const Table1Args& a, const std::vector<std::string>& argv) {
  fs::create_directories(a.out_dir);
  EnhanceConfig cfg;
  cfg.mu = a.mu;
  cfg.noiseless = true;
  cfg.solver.max_outer_iterations = a.iters;
  cfg.solver.max_cg_iterations = a.cg_iters;
  const ExperimentReport report = run_table1(cfg, a.out_dir);

  RunManifest man;
  man.command = "table1";
  man.params["out-dir"] = a.out_dir;
  man.params["mu"] = fmt(a.mu);
  man.params["iters"] = std::to_string(a.iters);
  man.params["cg-iters"] = std::to_string(a.cg_iters);
  record_argv(man, argv);
  std::vector<std::string> outputs;
  for (const auto& entry : fs::directory_iterator(a.out_dir))
    if (entry.is_regular_file() && entry.path().extension() != ".json")
      outputs.push_back(entry.path().string());
  std::sort(outputs.begin(), outputs.end());
  finish_manifest(man, outputs, a.out_dir + "/manifest.json");

  for (const auto& r : report.rows)
    std::cout << r.lines << " lines: initial RE " << r.init_re << ", enhanced RE " << r.enh_re
              << "\n";
  return 0;
}

struct NoiseArgs {
  std::string out_dir;
  double sigma = 1e-2;
  int lines = 60;
  std::vector<uint64_t> seeds;
  double k = 4.0;
  double mu = 1e-2;
  double lambda = 1e-9;
};

int run_noise_cmd(const NoiseArgs& a, const std::vector<std::string>& argv) {
  fs::create_directories(a.out_dir);
  EnhanceConfig cfg;
  cfg.k = a.k;
  cfg.mu = a.mu;
  cfg.solver.lambda = a.lambda;
  const std::vector<uint64_t>& seeds = a.seeds.empty() ? default_noise_seeds() : a.seeds;
  const ExperimentReport report = run_noise_experiment(cfg, a.sigma, a.lines, seeds, a.out_dir);

  RunManifest man;
  man.command = "noise";
  man.params["out-dir"] = a.out_dir;
  man.params["sigma"] = fmt(a.sigma);
  man.params["lines"] = std::to_string(a.lines);
  man.params["k"] = fmt(a.k);
  man.params["mu"] = fmt(a.mu);
  man.params["lambda"] = fmt(a.lambda);
  std::string seed_list;
  for (uint64_t s : seeds) seed_list += (seed_list.empty() ? "" : ",") + std::to_string(s);
  man.params["seed"] = seed_list;
  record_argv(man, argv);
  std::vector<std::string> outputs;
  for (const auto& entry : fs::directory_iterator(a.out_dir))
    if (entry.is_regular_file() && entry.path().extension() != ".json")
      outputs.push_back(entry.path().string());
  std::sort(outputs.begin(), outputs.end());
  finish_manifest(man, outputs, a.out_dir + "/manifest.json");

  for (const auto& r : report.rows)
    std::cout << "seed " << r.seed << ": un-masked RE " << r.init_re << ", enhanced RE "
              << r.enh_re << "\n";
  return 0;
}

// ---- rerun -------------------------------------------------------------------

int run_rerun(const std::string& manifest_path) {
  const RunManifest man = load_manifest(manifest_path);
  const auto it = man.params.find("argv");
  if (it == man.params.end())
    throw std::runtime_error(manifest_path + ": manifest has no recorded argv");
  std::vector<std::string> argv;
  for (const auto& v : nlohmann::json::parse(it->second)) argv.push_back(v.get<std::string>());
  std::cout << "replaying: ";
  for (const auto& s : argv) std::cout << s << " ";
  std::cout << "\n";
  const int rc = dispatch(argv);
  if (rc != 0) return rc;
  bool ok = true;
  for (const auto& [path, checksum] : man.outputs) {
    const std::string now = artifact_checksum(path);
    if (now != checksum) {
      std::cerr << "checksum mismatch: " << path << " expected " << checksum << " got " << now
                << "\n";
      ok = false;
    }
  }
  if (!ok) throw std::runtime_error("rerun: outputs differ from manifest");
  std::cout << "rerun reproduced " << man.outputs.size() << " outputs bit-identically\n";
  return 0;
}

// ---- dispatcher ----------------------------------------------------------------

int dispatch(const std::vector<std::string>& args) {
  CLI::App app{"edge-masked image reconstruction toolkit"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "read option defaults from an INI/TOML file");
  app.require_subcommand(1);

  PhantomArgs pa;
  auto* phantom = app.add_subcommand("phantom", "generate the head phantom");
  phantom->add_option("--n", pa.n, "grid side length")->check(CLI::PositiveNumber);
  phantom->add_option("--out", pa.out, "output image (.csv or .pgm)")->required();

  SampleArgs sa;
  auto* smp = app.add_subcommand("sample", "sample an image's spectrum on radial lines");
  smp->add_option("--in-image", sa.in_image, "input image")->required();
  auto* lines_opt = smp->add_option("--lines", sa.lines, "number of radial lines")
                        ->check(CLI::NonNegativeNumber);
  smp->add_flag("--full", sa.full, "sample every frequency")->excludes(lines_opt);
  smp->add_option("--sigma", sa.sigma, "Gaussian noise std per component")
      ->check(CLI::NonNegativeNumber);
  smp->add_option("--seed", sa.seed, "noise seed");
  smp->add_option("--out", sa.out, "output data CSV")->required();

  ReconstructArgs ra;
  auto* rec = app.add_subcommand("reconstruct", "initial reconstruction from sampled data");
  auto* in_data_opt = rec->add_option("--in-data", ra.in_data, "sampled data CSV");
  auto* in_image_opt =
      rec->add_option("--in-image", ra.in_image, "ground-truth image to sample instead")
          ->excludes(in_data_opt);
  rec->add_option("--lines", ra.lines, "radial lines (with --in-image)")
      ->check(CLI::NonNegativeNumber);
  rec->add_option("--sigma", ra.sigma, "noise std (with --in-image)")
      ->check(CLI::NonNegativeNumber);
  rec->add_option("--seed", ra.seed, "noise seed (with --in-image)");
  rec->add_option("--method", ra.method, "reconstruction method")
      ->check(CLI::IsMember({"tv", "aniso-l2"}))
      ->capture_default_str();
  rec->add_option("--lambda", ra.lambda, "regularization weight")->check(CLI::NonNegativeNumber);
  rec->add_flag("--noisy", ra.noisy, "noisy mode: skip the exact data projection");
  rec->add_option("--iters", ra.iters, "max outer iterations")->check(CLI::PositiveNumber);
  rec->add_option("--cg-iters", ra.cg_iters, "max CG iterations")->check(CLI::PositiveNumber);
  rec->add_option("--cg-tol", ra.cg_tol, "CG relative residual tolerance");
  rec->add_option("--penalty", ra.penalty, "Bregman penalty weight");
  rec->add_option("--out", ra.out, "output image")->required();

  EnhanceArgs ea;
  auto* enh = app.add_subcommand("enhance", "edge-masked enhancement of an initial image");
  enh->add_option("--in-data", ea.in_data, "sampled data CSV")->required();
  enh->add_option("--init-image", ea.init_image, "initial reconstruction")->required();
  auto* k_opt = enh->add_option("--k", ea.k, "threshold exponent: tau = 2^-k * max");
  enh->add_option("--k-div", ea.k_div, "threshold divisor: tau = max / value")
      ->excludes(k_opt)
      ->check(CLI::PositiveNumber);
  enh->add_option("--mu", ea.mu, "masked regularizer weight")->check(CLI::NonNegativeNumber);
  enh->add_flag("--noiseless", ea.noiseless, "finish with the exact data projection");
  enh->add_option("--cg-iters", ea.cg_iters, "max CG iterations")->check(CLI::PositiveNumber);
  enh->add_option("--cg-tol", ea.cg_tol, "CG relative residual tolerance");
  enh->add_option("--truth", ea.truth, "ground truth for error maps");
  enh->add_option("--out", ea.out, "output image")->required();

  Table1Args ta;
  auto* tbl = app.add_subcommand("table1", "noiseless line-count sweep (12..16 lines)");
  tbl->add_option("--out-dir", ta.out_dir, "artifact directory")->required();
  tbl->add_option("--mu", ta.mu, "enhancement weight");
  tbl->add_option("--iters", ta.iters, "max TV outer iterations")->check(CLI::PositiveNumber);
  tbl->add_option("--cg-iters", ta.cg_iters, "max CG iterations")->check(CLI::PositiveNumber);

  NoiseArgs na;
  auto* noi = app.add_subcommand("noise", "noisy-data experiment");
  noi->add_option("--out-dir", na.out_dir, "artifact directory")->required();
  noi->add_option("--sigma", na.sigma, "noise std per component")->check(CLI::NonNegativeNumber);
  noi->add_option("--lines", na.lines, "radial lines")->check(CLI::PositiveNumber);
  noi->add_option("--seed", na.seeds, "seeds (repeatable)");
  noi->add_option("--k", na.k, "threshold exponent");
  noi->add_option("--mu", na.mu, "enhancement weight");
  noi->add_option("--lambda", na.lambda, "initializer regularization weight");

  std::string manifest_path;
  auto* rer = app.add_subcommand("rerun", "replay a manifest and verify checksums");
  rer->add_option("manifest", manifest_path, "manifest JSON")->required();

  for (auto* sub : {phantom, smp, rec, enh, tbl, noi, rer})
    sub->set_version_flag("--version", kVersion);

  // CLI11 wants argv-style reversed input without the program name
  std::vector<std::string> rev(args.rbegin(), args.rend());
  rev.pop_back();
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  if (phantom->parsed()) return run_phantom(pa, args);
  if (smp->parsed()) return run_sample(sa, args);
  if (rec->parsed()) {
    if (ra.in_data.empty() && ra.in_image.empty()) {
      std::cerr << "reconstruct: one of --in-data or --in-image is required\n";
      return 2;
    }
    (void)in_image_opt;
    return run_reconstruct(ra, args);
  }
  if (enh->parsed()) return run_enhance(ea, args);
  if (tbl->parsed()) return run_table1_cmd(ta, args);
  if (noi->parsed()) return run_noise_cmd(na, args);
  if (rer->parsed()) return run_rerun(manifest_path);
  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  try {
    return dispatch(args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
