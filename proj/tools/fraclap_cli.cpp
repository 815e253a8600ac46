// fraclap command line tool: mesh, assemble, invert, compress, study, fit.
//
// Exit codes: 0 success, 1 usage or input error, 2 numerical failure.

#include <cstdio>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fraclap/assembly.hpp"
#include "fraclap/cluster.hpp"
#include "fraclap/error.hpp"
#include "fraclap/hmatrix.hpp"
#include "fraclap/linalg.hpp"
#include "fraclap/study.hpp"

namespace {

using namespace fraclap;

struct MeshArgs {
  std::string domain = "square";
  std::size_t refine = 37;
  std::string mesh_file;

  void add(CLI::App* app) {
    app->add_option("--domain", domain, "interval, square or lshape")
        ->check(CLI::IsMember({"interval", "square", "lshape"}));
    app->add_option("--refine", refine, "mesh parameter n");
    app->add_option("--mesh", mesh_file, "mesh JSON file (overrides --domain/--refine)");
  }

  Mesh load() const { return mesh_file.empty() ? make_domain_mesh(domain, refine) : load_mesh(mesh_file); }
};

std::vector<std::size_t> parse_ranks(const std::string& spec) {
  std::vector<std::size_t> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = spec.find(':', start);
    const std::string tok = spec.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
    std::size_t used = 0;
    unsigned long v = 0;
    try {
      v = std::stoul(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (tok.empty() || used != tok.size()) throw CLI::ValidationError("--ranks", "expected lo:hi[:step], got " + spec);
    parts.push_back(v);
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  if (parts.size() == 1) parts.push_back(parts[0]);
  if (parts.size() == 2) parts.push_back(1);
  if (parts.size() != 3 || parts[0] == 0 || parts[2] == 0 || parts[1] < parts[0])
    throw CLI::ValidationError("--ranks", "expected 1 <= lo <= hi and step >= 1, got " + spec);
  std::vector<std::size_t> ranks;
  for (std::size_t r = parts[0]; r <= parts[1]; r += parts[2]) ranks.push_back(r);
  return ranks;
}

int run(int argc, char** argv) {
  CLI::App app{"Fractional Laplacian stiffness assembly and H-matrix compression of its inverse"};
  app.require_subcommand(1);
  unsigned threads = 0;
  app.add_option("--threads", threads, "worker threads (0 = hardware concurrency)")->capture_default_str();

  // mesh
  auto* mesh_cmd = app.add_subcommand("mesh", "write a mesh as JSON");
  MeshArgs mesh_args;
  std::string mesh_out;
  mesh_args.add(mesh_cmd);
  mesh_cmd->add_option("--out", mesh_out, "output JSON file")->required();

  // assemble
  auto* asm_cmd = app.add_subcommand("assemble", "assemble the stiffness matrix (FRACMAT1)");
  MeshArgs asm_mesh;
  double asm_s = 0.5;
  std::string asm_out;
  std::vector<int> quad;
  asm_mesh.add(asm_cmd);
  asm_cmd->add_option("--s", asm_s, "fractional order in (0,1)")->required();
  asm_cmd->add_option("--quadrature", quad, "gauss,singular,complement orders")->expected(3)->delimiter(',');
  asm_cmd->add_option("--out", asm_out, "output matrix file")->required();
  asm_cmd->add_option("--threads", threads, "worker threads");

  // invert
  auto* inv_cmd = app.add_subcommand("invert", "invert a matrix by LU with partial pivoting");
  std::string inv_in, inv_out;
  inv_cmd->add_option("--in", inv_in, "input matrix file")->required();
  inv_cmd->add_option("--out", inv_out, "output matrix file")->required();

  // compress
  auto* cmp_cmd = app.add_subcommand("compress", "compress a matrix into blockwise rank-r form");
  MeshArgs cmp_mesh;
  std::string cmp_in, cmp_out;
  double cmp_eta = 2.0;
  std::size_t cmp_leaf = 20, cmp_rank = 10;
  cmp_mesh.add(cmp_cmd);
  cmp_cmd->add_option("--in", cmp_in, "matrix file (usually the inverse)")->required();
  cmp_cmd->add_option("--eta", cmp_eta, "admissibility parameter")->capture_default_str();
  cmp_cmd->add_option("--nleaf", cmp_leaf, "leaf size")->capture_default_str();
  cmp_cmd->add_option("--rank", cmp_rank, "far-block rank")->capture_default_str();
  cmp_cmd->add_option("--out", cmp_out, "output directory for the block dump");
  cmp_cmd->add_option("--threads", threads, "worker threads");

  // study
  auto* study_cmd = app.add_subcommand("study", "rank sweep of the H-matrix error of the inverse");
  StudyConfig cfg;
  std::string ranks_spec = "1:30", study_out;
  study_cmd->add_option("--domain", cfg.domain, "interval, square or lshape")
      ->check(CLI::IsMember({"interval", "square", "lshape"}))
      ->capture_default_str();
  study_cmd->add_option("--refine", cfg.refine, "mesh parameter n")->capture_default_str();
  study_cmd->add_option("--s", cfg.s_values, "fractional orders, comma separated")->delimiter(',');
  study_cmd->add_option("--eta", cfg.eta, "admissibility parameter")->capture_default_str();
  study_cmd->add_option("--nleaf", cfg.n_leaf, "leaf size")->capture_default_str();
  study_cmd->add_option("--ranks", ranks_spec, "lo:hi[:step]")->capture_default_str();
  study_cmd->add_option("--out", study_out, "output CSV")->required();
  study_cmd->add_flag("--timing", cfg.record_time, "fill elapsed_seconds (makes output run-dependent)");
  study_cmd->add_option("--threads", threads, "worker threads");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit ln(error) = c - b r^(1/3) per s");
  std::string fit_in;
  double fit_floor = 1e-13;
  fit_cmd->add_option("--in", fit_in, "study CSV")->required();
  fit_cmd->add_option("--floor", fit_floor, "errors at or below this are excluded")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*study_cmd) cfg.ranks = parse_ranks(ranks_spec);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    const auto subs = app.get_subcommands();
    std::cerr << "error: " << e.what() << "\n\n" << (subs.empty() ? app.help() : subs.front()->help());
    return 1;
  }

  if (*mesh_cmd) {
    save_mesh(mesh_out, mesh_args.load());
  } else if (*asm_cmd) {
    const Mesh m = asm_mesh.load();
    QuadratureSpec q;
    if (!quad.empty()) q = {quad[0], quad[1], quad[2]};
    save_fracmat(asm_out, assemble_stiffness(m, FracParams::make(m.dim(), asm_s), q, threads));
  } else if (*inv_cmd) {
    const DenseMatrix a = load_fracmat(inv_in);
    const DenseMatrix inv = lu_invert(a);
    std::printf("residual max|A*inv - I| = %.3e\n", inversion_residual(a, inv));
    save_fracmat(inv_out, inv);
  } else if (*cmp_cmd) {
    const Mesh m = cmp_mesh.load();
    const DenseMatrix a = load_fracmat(cmp_in);
    const ClusterTree t = build_cluster_tree(m, cmp_leaf);
    const BlockPartition p = build_partition(t, cmp_eta);
    const HMatrix h = compress(a, t, p, cmp_rank, threads);
    const NormEstimate err = approximation_error(a, h);
    std::printf("blocks far=%zu near=%zu Csp=%zu depth=%d\n", p.num_far(), p.num_near(), sparsity_constant(p),
                t.depth());
    std::printf("rank=%zu error_2norm=%.6e%s storage_bytes=%zu\n", cmp_rank, err.value,
                err.converged ? "" : " (unconverged)", storage_bytes(h));
    if (!cmp_out.empty()) save_hmatrix(cmp_out, h);
  } else if (*study_cmd) {
    cfg.threads = threads;
    const auto records = run_study(cfg, [](const StudyRecord& r) {
      std::fprintf(stderr, "s=%g r=%zu error=%.6e\n", r.s, r.r, r.error_2norm);
    });
    save_study_csv(study_out, records);
  } else if (*fit_cmd) {
    const auto records = load_study_csv(fit_in);
    std::map<double, std::vector<StudyRecord>> by_s;
    for (const auto& r : records) by_s[r.s].push_back(r);
    int status = 0;
    for (const auto& [s, sub] : by_s) {
      try {
        const ExponentialFit fit = fit_exponential(sub, fit_floor);
        std::printf("s=%g b=%.6g R2=%.6g\n", s, fit.b, fit.r_squared);
      } catch (const InputError& e) {
        // Too few points above the floor: nothing to fit for this s.
        std::fprintf(stderr, "s=%g: %s\n", s, e.what());
        status = 2;
      }
    }
    return status;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const fraclap::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
