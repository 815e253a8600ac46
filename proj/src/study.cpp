#include "fraclap/study.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "fraclap/cluster.hpp"
#include "fraclap/error.hpp"
#include "fraclap/hmatrix.hpp"
#include "fraclap/linalg.hpp"

namespace fraclap {

namespace {

constexpr const char* kHeader = "s,eta,nleaf,N,r,error_2norm,storage_bytes,elapsed_seconds";

// Runs one stage, re-raising failures with the stage and s named.
template <class F>
auto stage(const char* name, double s, F&& f) {
  try {
    return f();
  } catch (const InputError& e) {
    throw InputError(std::string("study stage '") + name + "' (s=" + std::to_string(s) + "): " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(std::string("study stage '") + name + "' (s=" + std::to_string(s) + "): " + e.what());
  }
}

template <class T>
T parse_field(std::string_view text, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw InputError("study CSV line " + std::to_string(line) + ": cannot parse '" + std::string(text) + "'");
  return value;
}

}  // namespace

Mesh make_domain_mesh(const std::string& domain, std::size_t n) {
  if (domain == "interval") return interval_mesh(n);
  if (domain == "square") return unit_square_mesh(n);
  if (domain == "lshape") return lshape_mesh(n);
  throw InputError("unknown domain '" + domain + "' (expected interval, square or lshape)");
}

std::vector<std::size_t> StudyConfig::default_ranks() {
  std::vector<std::size_t> r;
  for (std::size_t k = 1; k <= 30; ++k) r.push_back(k);
  return r;
}

void StudyConfig::validate() const {
  if (s_values.empty()) throw InputError("study: no s values");
  for (double s : s_values)
    if (!(s > 0.0 && s < 1.0)) throw InputError("study: s must lie in (0,1)");
  if (!(eta > 0.0)) throw InputError("study: eta must be positive");
  if (n_leaf == 0) throw InputError("study: n_leaf must be positive");
  if (ranks.empty()) throw InputError("study: no ranks");
  for (auto r : ranks)
    if (r == 0) throw InputError("study: ranks must be positive");
  quadrature.validate();
}

std::vector<StudyRecord> run_study(const StudyConfig& cfg, const std::function<void(const StudyRecord&)>& progress) {
  cfg.validate();
  const Mesh mesh = make_domain_mesh(cfg.domain, cfg.refine);
  std::vector<double> s_values(cfg.s_values);
  std::sort(s_values.begin(), s_values.end());
  s_values.erase(std::unique(s_values.begin(), s_values.end()), s_values.end());
  std::vector<std::size_t> ranks(cfg.ranks);
  std::sort(ranks.begin(), ranks.end());
  ranks.erase(std::unique(ranks.begin(), ranks.end()), ranks.end());

  const ClusterTree tree = stage("cluster", s_values.front(), [&] { return build_cluster_tree(mesh, cfg.n_leaf); });
  const BlockPartition partition = stage("partition", s_values.front(), [&] { return build_partition(tree, cfg.eta); });

  std::vector<StudyRecord> out;
  using clock = std::chrono::steady_clock;
  for (double s : s_values) {
    const auto t0 = clock::now();
    const DenseMatrix a = stage("assemble", s, [&] {
      return assemble_stiffness(mesh, FracParams::make(mesh.dim(), s), cfg.quadrature, cfg.threads);
    });
    const DenseMatrix inv = stage("invert", s, [&] { return lu_invert(a); });
    const FarBlockSVDs svds = stage("svd", s, [&] { return far_block_svds(inv, tree, partition, cfg.threads); });
    const double setup = std::chrono::duration<double>(clock::now() - t0).count();
    for (std::size_t r : ranks) {
      const auto t1 = clock::now();
      const HMatrix h = stage("compress", s, [&] { return compress(inv, tree, partition, r, svds); });
      const NormEstimate err =
          stage("error", s, [&] { return approximation_error(inv, h, cfg.power_tol, cfg.power_max_iter); });
      StudyRecord rec;
      rec.s = s;
      rec.eta = cfg.eta;
      rec.n_leaf = cfg.n_leaf;
      rec.n = mesh.num_dofs();
      rec.r = r;
      rec.error_2norm = err.value;
      rec.storage_bytes = storage_bytes(h);
      if (cfg.record_time)
        rec.elapsed_seconds = std::chrono::duration<double>(clock::now() - t1).count() + (r == ranks.front() ? setup : 0.0);
      out.push_back(rec);
      if (progress) progress(rec);
    }
  }
  return out;
}

void write_study_csv(std::ostream& os, std::span<const StudyRecord> records) {
  os << kHeader << '\n';
  char buf[512];
  for (const auto& r : records) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%zu,%zu,%zu,%.17g,%zu,%.17g\n", r.s, r.eta, r.n_leaf, r.n, r.r,
                  r.error_2norm, r.storage_bytes, r.elapsed_seconds);
    os << buf;
  }
}

std::vector<StudyRecord> read_study_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw InputError("study CSV: empty input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kHeader) throw InputError("study CSV: unexpected header '" + line + "'");
  std::vector<StudyRecord> out;
  std::size_t lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1))
      f.push_back(rest.substr(0, pos));
    f.push_back(rest);
    if (f.size() != 8) throw InputError("study CSV line " + std::to_string(lineno) + ": expected 8 fields");
    StudyRecord r;
    r.s = parse_field<double>(f[0], lineno);
    r.eta = parse_field<double>(f[1], lineno);
    r.n_leaf = parse_field<std::size_t>(f[2], lineno);
    r.n = parse_field<std::size_t>(f[3], lineno);
    r.r = parse_field<std::size_t>(f[4], lineno);
    r.error_2norm = parse_field<double>(f[5], lineno);
    r.storage_bytes = parse_field<std::size_t>(f[6], lineno);
    r.elapsed_seconds = parse_field<double>(f[7], lineno);
    out.push_back(r);
  }
  return out;
}

void save_study_csv(const std::string& path, std::span<const StudyRecord> records) {
  std::ostringstream os;
  write_study_csv(os, records);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path + " for writing");
  f << os.str();
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<StudyRecord> load_study_csv(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open " + path);
  return read_study_csv(f);
}

ExponentialFit fit_exponential(std::span<const StudyRecord> records, double floor) {
  std::vector<double> x, y;
  for (const auto& r : records)
    if (r.error_2norm > floor) {
      x.push_back(std::cbrt(static_cast<double>(r.r)));
      y.push_back(std::log(r.error_2norm));
    }
  if (x.size() < 3)
    throw InputError("fit_exponential: " + std::to_string(x.size()) + " usable points, at least 3 required");
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    mx += x[k];
    my += y[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxx += (x[k] - mx) * (x[k] - mx);
    sxy += (x[k] - mx) * (y[k] - my);
    syy += (y[k] - my) * (y[k] - my);
  }
  if (sxx == 0.0) throw InputError("fit_exponential: all usable points share one rank");
  const double slope = sxy / sxx;
  ExponentialFit fit;
  fit.b = -slope;
  fit.c = my - slope * mx;
  fit.points = x.size();
  double ss_res = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double e = y[k] - (fit.c + slope * x[k]);
    ss_res += e * e;
  }
  fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
  return fit;
}

std::map<double, ExponentialFit> fit_by_s(std::span<const StudyRecord> records, double floor) {
  std::set<double> values;
  for (const auto& r : records) values.insert(r.s);
  std::map<double, ExponentialFit> out;
  for (double s : values) {
    std::vector<StudyRecord> sub;
    for (const auto& r : records)
      if (r.s == s) sub.push_back(r);
    out[s] = fit_exponential(sub, floor);
  }
  return out;
}

}  // namespace fraclap
