#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "fraclap/assembly.hpp"
#include "fraclap/mesh.hpp"

namespace fraclap {

/// Mesh for a domain name ("interval", "square" or "lshape") and parameter n.
Mesh make_domain_mesh(const std::string& domain, std::size_t n);

struct StudyConfig {
  std::string domain = "square";
  std::size_t refine = 37;
  std::vector<double> s_values{0.25, 0.5, 0.75};
  double eta = 2.0;
  std::size_t n_leaf = 20;
  std::vector<std::size_t> ranks = default_ranks();
  QuadratureSpec quadrature{};
  unsigned threads = 0;
  /// Wall-clock seconds per record; off by default so output is reproducible.
  bool record_time = false;
  double power_tol = 1e-8;
  int power_max_iter = 500;

  static std::vector<std::size_t> default_ranks();
  void validate() const;
};

struct StudyRecord {
  double s = 0.0;
  double eta = 0.0;
  std::size_t n_leaf = 0;
  std::size_t n = 0;
  std::size_t r = 0;
  double error_2norm = 0.0;
  std::size_t storage_bytes = 0;
  double elapsed_seconds = 0.0;

  bool operator==(const StudyRecord&) const = default;
};

/// Per s: assemble, invert, build tree and partition once, then compress and
/// measure the error for every rank. Records come in ascending (s, r). A
/// failing stage is rethrown with the stage named. The optional callback
/// receives each record as it is produced.
std::vector<StudyRecord> run_study(const StudyConfig& cfg,
                                   const std::function<void(const StudyRecord&)>& progress = {});

/// Header "s,eta,nleaf,N,r,error_2norm,storage_bytes,elapsed_seconds", 17
/// significant digits, LF line endings.
void write_study_csv(std::ostream& os, std::span<const StudyRecord> records);
std::vector<StudyRecord> read_study_csv(std::istream& is);
void save_study_csv(const std::string& path, std::span<const StudyRecord> records);
std::vector<StudyRecord> load_study_csv(const std::string& path);

struct ExponentialFit {
  double b = 0.0;          // decay rate in ln(err) = c - b r^{1/3}
  double c = 0.0;
  double r_squared = 0.0;  // 1 when the data have no spread
  std::size_t points = 0;
};

/// Least squares of ln(error) = c - b r^{1/3} over records with error > floor.
/// Throws InputError with fewer than 3 usable points.
ExponentialFit fit_exponential(std::span<const StudyRecord> records, double floor = 1e-13);
/// fit_exponential for each distinct s.
std::map<double, ExponentialFit> fit_by_s(std::span<const StudyRecord> records, double floor = 1e-13);

}  // namespace fraclap
