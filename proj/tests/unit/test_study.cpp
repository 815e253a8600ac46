#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "doctest.h"
#include "fraclap/cluster.hpp"
#include "fraclap/error.hpp"
#include "fraclap/study.hpp"

using namespace fraclap;

namespace {

StudyRecord rec(double s, std::size_t r, double err) {
  StudyRecord x;
  x.s = s;
  x.eta = 2.0;
  x.n_leaf = 20;
  x.n = 100;
  x.r = r;
  x.error_2norm = err;
  x.storage_bytes = 800 * r;
  return x;
}

std::string csv(std::span<const StudyRecord> records) {
  std::ostringstream os;
  write_study_csv(os, records);
  return os.str();
}

StudyConfig small_config() {
  StudyConfig cfg;
  cfg.domain = "square";
  cfg.refine = 9;  // N = 64
  cfg.s_values = {0.75, 0.25};
  cfg.n_leaf = 8;
  cfg.ranks = {1, 2, 3, 4, 6};
  return cfg;
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

}  // namespace

TEST_CASE("domain meshes by name") {
  CHECK(make_domain_mesh("square", 4).num_elements() == 32);
  CHECK(make_domain_mesh("lshape", 2).num_elements() == 24);
  CHECK(make_domain_mesh("interval", 8).num_dofs() == 7);
  CHECK_THROWS_AS(make_domain_mesh("disk", 4), InputError);
}

TEST_CASE("config validation") {
  StudyConfig ok;
  CHECK_NOTHROW(ok.validate());
  CHECK(ok.ranks.size() == 30);
  CHECK(ok.ranks.front() == 1);
  CHECK(ok.ranks.back() == 30);
  auto bad = [](auto mutate) {
    StudyConfig c;
    mutate(c);
    CHECK_THROWS_AS(c.validate(), InputError);
  };
  bad([](StudyConfig& c) { c.s_values = {}; });
  bad([](StudyConfig& c) { c.s_values = {1.0}; });
  bad([](StudyConfig& c) { c.eta = 0.0; });
  bad([](StudyConfig& c) { c.n_leaf = 0; });
  bad([](StudyConfig& c) { c.ranks = {0, 1}; });
  bad([](StudyConfig& c) { c.ranks = {}; });
  bad([](StudyConfig& c) { c.quadrature.gauss_order = 0; });
}

TEST_CASE("CSV layout") {
  const std::vector<StudyRecord> rs{rec(0.5, 1, 0.1), rec(0.5, 2, 1.0 / 3.0)};
  const std::string text = csv(rs);
  CHECK(text.rfind("s,eta,nleaf,N,r,error_2norm,storage_bytes,elapsed_seconds\n", 0) == 0);
  CHECK(text.find('\r') == std::string::npos);
  CHECK(text.find("0.5,2,20,100,2,0.33333333333333331,1600,0\n") != std::string::npos);
}

TEST_CASE("CSV round trip is bit exact") {
  std::vector<StudyRecord> rs;
  for (std::size_t r = 1; r <= 10; ++r) rs.push_back(rec(0.25, r, std::exp(-10 * std::cbrt(r)) * (1 + 1e-3 * std::sin(r))));
  rs.push_back(rec(0.75, 1, 5e-324));
  rs.back().elapsed_seconds = 0.1 + 0.2;
  std::istringstream is(csv(rs));
  const auto back = read_study_csv(is);
  CHECK(back == rs);
  const auto f1 = fit_exponential(std::span(rs).first(10)), f2 = fit_exponential(std::span(back).first(10));
  CHECK(same_bits(f1.b, f2.b));
  CHECK(same_bits(f1.r_squared, f2.r_squared));
}

TEST_CASE("CSV read errors") {
  std::istringstream empty("");
  CHECK_THROWS_AS(read_study_csv(empty), InputError);
  std::istringstream header("s,eta\n");
  CHECK_THROWS_AS(read_study_csv(header), InputError);
  std::istringstream fields("s,eta,nleaf,N,r,error_2norm,storage_bytes,elapsed_seconds\n0.5,2,20\n");
  CHECK_THROWS_AS(read_study_csv(fields), InputError);
  std::istringstream number("s,eta,nleaf,N,r,error_2norm,storage_bytes,elapsed_seconds\n0.5,2,20,9,x,1,1,0\n");
  CHECK_THROWS_AS(read_study_csv(number), InputError);
  std::istringstream crlf("s,eta,nleaf,N,r,error_2norm,storage_bytes,elapsed_seconds\r\n0.5,2,20,9,1,1,1,0\r\n");
  CHECK(read_study_csv(crlf).size() == 1);
}

TEST_CASE("exponential fit") {
  std::vector<StudyRecord> exact;
  for (std::size_t r : {1u, 8u, 27u}) exact.push_back(rec(0.5, r, std::exp(-10.0 * std::cbrt(static_cast<double>(r)))));
  // e^{-30} at r = 27 sits below the default floor, so the exact model is fitted without one.
  const ExponentialFit f = fit_exponential(exact, 0.0);
  CHECK(std::abs(f.b - 10.0) <= 1e-10);
  CHECK(std::abs(f.r_squared - 1.0) <= 1e-10);
  CHECK(f.points == 3);
  CHECK(f.c == doctest::Approx(0.0).epsilon(1e-10));

  std::vector<StudyRecord> flat;
  for (std::size_t r = 1; r <= 5; ++r) flat.push_back(rec(0.5, r, 1e-3));
  CHECK(fit_exponential(flat).b == 0.0);

  // Points at or under the floor are dropped.
  std::vector<StudyRecord> floored;
  for (std::size_t r : {1u, 2u, 3u}) floored.push_back(rec(0.5, r, std::exp(-10.0 * std::cbrt(static_cast<double>(r)))));
  floored.push_back(rec(0.5, 64, 1e-13));
  floored.push_back(rec(0.5, 125, 0.0));
  const ExponentialFit g = fit_exponential(floored);
  CHECK(g.points == 3);
  CHECK(std::abs(g.b - 10.0) <= 1e-10);
  // With the default floor the r = 27 point goes and two remain.
  CHECK_THROWS_AS(fit_exponential(exact), InputError);

  CHECK_THROWS_AS(fit_exponential(std::span(exact).first(2), 0.0), InputError);
  CHECK_THROWS_AS(fit_exponential(floored, 1e-3), InputError);
}

TEST_CASE("fit per s") {
  std::vector<StudyRecord> rs;
  for (std::size_t r = 1; r <= 6; ++r) {
    rs.push_back(rec(0.25, r, std::exp(-4.0 * std::cbrt(static_cast<double>(r)))));
    rs.push_back(rec(0.75, r, 2.0 * std::exp(-7.0 * std::cbrt(static_cast<double>(r)))));
  }
  const auto fits = fit_by_s(rs);
  REQUIRE(fits.size() == 2);
  CHECK(fits.at(0.25).b == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(fits.at(0.75).b == doctest::Approx(7.0).epsilon(1e-10));
  CHECK(fits.at(0.75).c == doctest::Approx(std::log(2.0)).epsilon(1e-10));
}

TEST_CASE("study pipeline on a small mesh") {
  const StudyConfig cfg = small_config();
  std::vector<StudyRecord> seen;
  const auto rs = run_study(cfg, [&](const StudyRecord& r) { seen.push_back(r); });
  REQUIRE(rs.size() == 10);
  CHECK(seen == rs);
  const ClusterTree t = build_cluster_tree(make_domain_mesh(cfg.domain, cfg.refine), cfg.n_leaf);
  const BlockPartition p = build_partition(t, cfg.eta);
  REQUIRE(p.num_far() > 0);
  // Rank r saves memory on an a x b far block exactly when r (a + b) <= a b.
  std::size_t saving_rank = 64;
  for (const auto& b : p.blocks) {
    const std::size_t a = t.nodes[b.tau].size(), c = t.nodes[b.sigma].size();
    if (b.admissible) saving_rank = std::min(saving_rank, a * c / (a + c));
  }
  // Ascending s, then ascending r.
  for (std::size_t k = 0; k < 5; ++k) {
    CHECK(rs[k].s == 0.25);
    CHECK(rs[k + 5].s == 0.75);
    CHECK(rs[k].r == cfg.ranks[k]);
  }
  for (const auto& r : rs) {
    CHECK(r.n == 64);
    CHECK(r.eta == 2.0);
    CHECK(r.n_leaf == 8);
    CHECK(r.elapsed_seconds == 0.0);
    CHECK(r.error_2norm >= 0.0);
    if (r.r <= saving_rank) CHECK(r.storage_bytes <= 8u * 64 * 64);
  }
  for (std::size_t k = 1; k < 5; ++k) {
    CHECK(rs[k].error_2norm <= rs[k - 1].error_2norm * (1 + 1e-8));
    CHECK(rs[k].storage_bytes >= rs[k - 1].storage_bytes);
  }
}

TEST_CASE("study output is identical across runs and thread counts") {
  StudyConfig a = small_config();
  a.threads = 1;
  StudyConfig b = small_config();
  b.threads = 8;
  const auto ra = run_study(a);
  CHECK(csv(ra) == csv(run_study(b)));
  CHECK(csv(ra) == csv(run_study(a)));
}

TEST_CASE("timing is recorded on request") {
  StudyConfig cfg = small_config();
  cfg.s_values = {0.5};
  cfg.ranks = {1, 2};
  cfg.record_time = true;
  const auto rs = run_study(cfg);
  CHECK(rs[0].elapsed_seconds > 0.0);
}

TEST_CASE("study errors name the failing stage") {
  StudyConfig cfg = small_config();
  cfg.domain = "square";
  cfg.refine = 1;  // no interior dofs
  try {
    run_study(cfg);
    FAIL("expected InputError");
  } catch (const InputError& e) {
    CHECK(std::string(e.what()).find("stage") != std::string::npos);
  }
}
