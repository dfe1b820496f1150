// meshsmooth CLI: generate test meshes, smooth them (planar or surface mode),
// score mesh quality, and dump feature classifications. Exit codes: 0 on
// success, 1 on input/validation errors, 2 when smoothing hit the iteration
// cap without converging (the result is still written).

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "meshsmooth/meshsmooth.hpp"

namespace {

using namespace meshsmooth;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

Mesh embed_in_3d(const Mesh& mesh) {
  Mesh out;
  out.dim = 3;
  out.elements = mesh.elements;
  const int n = mesh.node_count();
  out.coords.resize(3 * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    out.coords[3 * i + 0] = mesh.coords[2 * i + 0];
    out.coords[3 * i + 1] = mesh.coords[2 * i + 1];
    out.coords[3 * i + 2] = 0.0;
  }
  return out;
}

std::string quality_line(const QualitySummary& q) {
  char buf[160];
  std::string line;
  if (q.tri_count > 0) {
    std::snprintf(buf, sizeof buf, "tri(%d) mq=%.6f mse=%.6f", q.tri_count, *q.mq_tri, *q.mse_tri);
    line += buf;
  }
  if (q.quad_count > 0) {
    if (!line.empty()) line += "  ";
    std::snprintf(buf, sizeof buf, "quad(%d) mq=%.6f mse=%.6f", q.quad_count, *q.mq_quad,
                  *q.mse_quad);
    line += buf;
  }
  if (line.empty()) line = "no elements";
  return line;
}

struct SmoothArgs {
  std::string input, output, report;
  std::string mode = "planar";
  std::string method = "mdm";
  std::string weight = "identity";
  std::string report_format = "json";
  double tol = 1e-6;
  bool tol_absolute = false;
  int max_iter = -1;  // -1: per-mode default
  double eps_mq = 1e-6;
  double eps_mse = 1e-4;
  double chi_c = 0.7;
  double chi_r = 0.1;
  bool fix_boundary = true;
  int threads = 1;
  bool force = false;
};

int run_smooth(const SmoothArgs& args) {
  std::vector<std::string> warnings;
  Mesh mesh = read_mesh(args.input, format_from_path(args.input), DimMode::Auto, &warnings);
  for (const std::string& w : warnings) std::cerr << "warning: " << w << '\n';

  const bool surface = args.mode == "surface";
  if (surface && mesh.dim == 2) {
    if (!args.force)
      throw std::runtime_error(args.input +
                               ": flat input needs --force to be smoothed in surface mode");
    mesh = embed_in_3d(mesh);
  }
  if (!surface && mesh.dim == 3)
    throw std::runtime_error(args.input + ": planar mode needs a flat (2D) mesh");

  const QualitySummary initial = summarize(mesh);
  std::cout << "input: " << mesh.node_count() << " nodes, " << mesh.elements.size()
            << " elements\n";
  std::cout << "initial: " << quality_line(initial) << '\n';

  SmoothResult result;
  if (surface) {
    if (args.method != "mdm")
      throw std::runtime_error("surface mode supports only --method mdm");
    SurfaceConfig cfg;
    cfg.eps_mq = args.eps_mq;
    cfg.eps_mse = args.eps_mse;
    cfg.chi_corner = args.chi_c;
    cfg.chi_ridge = args.chi_r;
    cfg.max_iter = args.max_iter > 0 ? args.max_iter : 200;
    cfg.weight_mode = args.weight == "area" ? SurfaceConfig::WeightMode::FaceArea
                                            : SurfaceConfig::WeightMode::Identity;
    cfg.threads = args.threads;
    result = smooth_surface(mesh, cfg);
  } else {
    PlanarConfig cfg;
    cfg.tol = args.tol;
    cfg.tol_relative = !args.tol_absolute;
    cfg.max_iter = args.max_iter > 0 ? args.max_iter : 1000;
    cfg.method =
        args.method == "laplacian" ? PlanarConfig::Method::Laplacian : PlanarConfig::Method::Mdm;
    cfg.fix_boundary = args.fix_boundary;
    cfg.threads = args.threads;
    result = smooth_planar(mesh, cfg);
  }

  write_mesh(result.mesh, args.output, format_from_path(args.output));
  if (!args.report.empty())
    write_report(make_report(initial, result.history), args.report,
                 args.report_format == "csv" ? ReportFormat::Csv : ReportFormat::Json);

  const QualitySummary final_q =
      result.history.empty() ? initial : result.history.back().quality;
  std::cout << "final:   " << quality_line(final_q) << '\n';
  std::cout << "iterations " << result.iterations << ", converged "
            << (result.converged ? "yes" : "no") << '\n';
  if (!result.inverted_elements.empty()) {
    std::cout << "warning: " << result.inverted_elements.size()
              << " element(s) ended up inverted:";
    for (int e : result.inverted_elements) std::cout << ' ' << e;
    std::cout << '\n';
  }
  std::cout << "wrote " << args.output << '\n';
  return result.converged ? kExitOk : kExitNotConverged;
}

int run_quality(const std::string& input, const std::string& report,
                const std::string& report_format) {
  const Mesh mesh = read_mesh(input, format_from_path(input));
  const QualitySummary q = summarize(mesh);
  std::cout << quality_line(q) << '\n';
  if (!report.empty())
    write_report(make_report(q, {}), report,
                 report_format == "csv" ? ReportFormat::Csv : ReportFormat::Json);
  return kExitOk;
}

int run_classify(const std::string& input, double chi_c, double chi_r) {
  const Mesh mesh = read_mesh(input, format_from_path(input));
  if (mesh.dim != 3)
    throw std::runtime_error(input + ": classification needs a surface (3D) mesh");
  SurfaceConfig cfg;
  cfg.chi_corner = chi_c;
  cfg.chi_ridge = chi_r;
  const NodeClassification cls = classify(mesh, face_normals(mesh), cfg);
  for (int i = 0; i < mesh.node_count(); ++i)
    std::cout << i << ' ' << to_string(cls.labels[i]) << '\n';
  return kExitOk;
}

struct GenArgs {
  std::string kind = "tri-grid";
  std::string lift = "none";
  std::string output;
  int nx = 10, ny = 10;
  double perturb = 0.0;
  std::uint64_t seed = 0;
};

int run_gen(const GenArgs& args) {
  GenSpec spec;
  if (args.kind == "tri-grid")
    spec.kind = GridKind::TriGrid;
  else if (args.kind == "quad-grid")
    spec.kind = GridKind::QuadGrid;
  else if (args.kind == "tri-dominant")
    spec.kind = GridKind::TriDominant;
  else if (args.kind == "quad-dominant")
    spec.kind = GridKind::QuadDominant;
  else
    throw std::runtime_error("unknown --kind '" + args.kind + "'");
  if (args.lift == "none")
    spec.lift = LiftKind::None;
  else if (args.lift == "sinx-cosy")
    spec.lift = LiftKind::SinxCosy;
  else if (args.lift == "paraboloid")
    spec.lift = LiftKind::Paraboloid;
  else
    throw std::runtime_error("unknown --lift '" + args.lift + "'");
  spec.nx = args.nx;
  spec.ny = args.ny;
  spec.perturb = args.perturb;
  spec.seed = args.seed;
  const Mesh mesh = generate(spec);
  write_mesh(mesh, args.output, format_from_path(args.output));
  std::cout << "wrote " << args.output << " (" << mesh.node_count() << " nodes, "
            << mesh.elements.size() << " elements)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Iterative tri/quad mesh smoothing (MDM and Laplacian) with quality reporting"};
  app.require_subcommand(1);

  SmoothArgs smooth_args;
  CLI::App* smooth = app.add_subcommand("smooth", "Smooth a planar or surface mesh");
  smooth->add_option("--input", smooth_args.input, "input mesh (.obj or .off)")->required();
  smooth->add_option("--output", smooth_args.output, "output mesh path")->required();
  smooth->add_option("--mode", smooth_args.mode, "planar|surface")
      ->check(CLI::IsMember({"planar", "surface"}));
  smooth->add_option("--method", smooth_args.method, "mdm|laplacian")
      ->check(CLI::IsMember({"mdm", "laplacian"}));
  smooth->add_option("--tol", smooth_args.tol,
                     "planar displacement tolerance (fraction of bbox diagonal)");
  smooth->add_flag("--tol-absolute", smooth_args.tol_absolute,
                   "interpret --tol in absolute units");
  smooth->add_option("--max-iter", smooth_args.max_iter,
                     "iteration cap (default 1000 planar, 200 surface)");
  smooth->add_option("--eps-mq", smooth_args.eps_mq, "surface stop threshold on |delta MQ|");
  smooth->add_option("--eps-mse", smooth_args.eps_mse, "surface stop threshold on |delta MSE|");
  smooth->add_option("--chi-c", smooth_args.chi_c, "corner eigenvalue-ratio threshold");
  smooth->add_option("--chi-r", smooth_args.chi_r, "ridge eigenvalue-ratio threshold");
  smooth->add_option("--weight", smooth_args.weight, "feature weights: identity|area")
      ->check(CLI::IsMember({"identity", "area"}));
  smooth->add_option("--fix-boundary", smooth_args.fix_boundary,
                     "keep planar boundary nodes fixed (default true)");
  smooth->add_option("--report", smooth_args.report, "write per-iteration quality report");
  smooth->add_option("--report-format", smooth_args.report_format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));
  smooth->add_option("--threads", smooth_args.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  smooth->add_flag("--force", smooth_args.force, "embed a flat mesh to smooth in surface mode");

  std::string quality_input, quality_report, quality_report_format = "json";
  CLI::App* quality = app.add_subcommand("quality", "Print MQ/MSE per element type");
  quality->add_option("--input", quality_input, "input mesh")->required();
  quality->add_option("--report", quality_report, "also write a one-record report");
  quality->add_option("--report-format", quality_report_format, "json|csv")
      ->check(CLI::IsMember({"json", "csv"}));

  std::string classify_input;
  double classify_chi_c = 0.7, classify_chi_r = 0.1;
  CLI::App* classify_cmd = app.add_subcommand("classify", "Print node id + feature label");
  classify_cmd->add_option("--input", classify_input, "input mesh")->required();
  classify_cmd->add_option("--chi-c", classify_chi_c, "corner threshold");
  classify_cmd->add_option("--chi-r", classify_chi_r, "ridge threshold");

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "Generate a deterministic test mesh");
  gen->add_option("--kind", gen_args.kind, "tri-grid|quad-grid|tri-dominant|quad-dominant")
      ->check(CLI::IsMember({"tri-grid", "quad-grid", "tri-dominant", "quad-dominant"}));
  gen->add_option("--nx", gen_args.nx, "nodes per row")->check(CLI::PositiveNumber);
  gen->add_option("--ny", gen_args.ny, "nodes per column")->check(CLI::PositiveNumber);
  gen->add_option("--perturb", gen_args.perturb, "interior jitter, fraction of cell in [0, 0.5)");
  gen->add_option("--seed", gen_args.seed, "rng seed");
  gen->add_option("--lift", gen_args.lift, "none|sinx-cosy|paraboloid")
      ->check(CLI::IsMember({"none", "sinx-cosy", "paraboloid"}));
  gen->add_option("--output", gen_args.output, "output mesh path")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand(smooth)) return run_smooth(smooth_args);
    if (app.got_subcommand(quality))
      return run_quality(quality_input, quality_report, quality_report_format);
    if (app.got_subcommand(classify_cmd))
      return run_classify(classify_input, classify_chi_c, classify_chi_r);
    if (app.got_subcommand(gen)) return run_gen(gen_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
