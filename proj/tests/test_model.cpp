#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "chron/model.hpp"
#include "testutil.hpp"

using namespace chron;

namespace {

PhaseStructure make_phases(std::vector<double> psi, double L = 2000,
                           double U = 3500) {
  PhaseStructure p;
  p.psi = std::move(psi);
  p.L = L;
  p.U = U;
  return p;
}

}  // namespace

TEST_CASE("phase boundary prior density") {
  CHECK(log_prior_psi(make_phases({2500, 3000})) ==
        doctest::Approx(-std::log(1000.0)));
  CHECK(log_prior_psi(make_phases({2500, 2800, 3000})) ==
        doctest::Approx(-std::log(1000.0) - std::log(500.0)));
  // span equal to U - L leaves no room: invalid state sentinel
  CHECK(log_prior_psi(make_phases({2000, 3500})) == kLogZero);
  CHECK(log_prior_psi(make_phases({2500, 2500})) == kLogZero);
}

TEST_CASE("phase prior sampler matches its stated law") {
  std::mt19937_64 rng(11);
  const double L = 2000, U = 3500;

  SUBCASE("M=1 span is uniform and the interval is uniformly placed") {
    std::vector<double> spans, rel_pos;
    for (int i = 0; i < 20000; ++i) {
      const PhaseStructure p = sample_prior_psi(1, L, U, rng);
      REQUIRE(p.psi.size() == 2);
      const double s = p.span();
      spans.push_back(s);
      rel_pos.push_back((p.psi.front() - L) / (U - L - s));
    }
    CHECK(testutil::ks_p_one_sample(
              spans, [&](double x) { return x / (U - L); }) > 0.01);
    CHECK(testutil::ks_p_one_sample(
              rel_pos, [](double x) { return x; }) > 0.01);
  }

  SUBCASE("M=2 interior boundary is uniform inside the span") {
    std::vector<double> rel;
    for (int i = 0; i < 20000; ++i) {
      const PhaseStructure p = sample_prior_psi(2, L, U, rng);
      rel.push_back((p.psi[1] - p.psi[0]) / p.span());
    }
    CHECK(testutil::ks_p_one_sample(rel, [](double x) { return x; }) > 0.01);
  }

  SUBCASE("M=3 gives 4 strictly ordered ages inside (L, U)") {
    for (int i = 0; i < 1000; ++i) {
      const PhaseStructure p = sample_prior_psi(3, L, U, rng);
      REQUIRE(p.psi.size() == 4);
      CHECK(p.valid());
    }
  }

  SUBCASE("2-d histogram at M=1 matches the density (chi-square)") {
    // Expected bin masses by sub-grid quadrature of the normalized density.
    const int bins = 6, sub = 40;
    std::vector<double> expected(bins * bins, 0.0);
    const double w = (U - L) / bins;
    for (int bi = 0; bi < bins; ++bi)
      for (int bj = 0; bj < bins; ++bj) {
        double mass = 0;
        for (int si = 0; si < sub; ++si)
          for (int sj = 0; sj < sub; ++sj) {
            const double psi0 = L + (bi + (si + 0.5) / sub) * w;
            const double psiM = L + (bj + (sj + 0.5) / sub) * w;
            if (psi0 >= psiM) continue;
            const PhaseStructure p = make_phases({psi0, psiM}, L, U);
            mass += std::exp(log_prior_psi(p) +
                             log_prior_psi_norm_constant(1, L, U)) *
                    (w / sub) * (w / sub);
          }
        expected[bi * bins + bj] = mass;
      }
    const int n = 40000;
    std::vector<double> observed(bins * bins, 0.0);
    for (int k = 0; k < n; ++k) {
      const PhaseStructure p = sample_prior_psi(1, L, U, rng);
      const int bi = std::min(bins - 1, int((p.psi[0] - L) / w));
      const int bj = std::min(bins - 1, int((p.psi[1] - L) / w));
      observed[bi * bins + bj] += 1;
    }
    std::vector<double> obs_used, exp_used;
    for (int c = 0; c < bins * bins; ++c)
      if (expected[c] * n >= 5) {
        obs_used.push_back(observed[c]);
        exp_used.push_back(expected[c] * n);
      }
    CHECK(testutil::chi2_p(obs_used, exp_used) > 0.001);
  }
}

TEST_CASE("normalized psi prior integrates to one by quadrature") {
  const double L = 0, U = 10;  // small box keeps the grids cheap and sharp

  SUBCASE("M=1") {
    const int n = 2000;
    const double h = (U - L) / n;
    double total = 0;
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double psi0 = L + (i + 0.5) * h;
        const double psiM = L + (j + 0.5) * h;
        if (psi0 >= psiM) continue;
        total += std::exp(log_prior_psi(make_phases({psi0, psiM}, L, U)) +
                          log_prior_psi_norm_constant(1, L, U)) *
                 h * h;
      }
    CHECK(total == doctest::Approx(1.0).epsilon(0.01));
  }

  SUBCASE("M=2") {
    const int n = 220;
    const double h = (U - L) / n;
    double total = 0;
    for (int i = 0; i < n; ++i)
      for (int k = i; k < n; ++k)
        for (int j = i; j <= k; ++j) {
          const double psi0 = L + (i + 0.5) * h;
          const double psi1 = L + (j + 0.5) * h;
          const double psi2 = L + (k + 0.5) * h;
          if (!(psi0 < psi1 && psi1 < psi2)) continue;
          total += std::exp(
                       log_prior_psi(make_phases({psi0, psi1, psi2}, L, U)) +
                       log_prior_psi_norm_constant(2, L, U)) *
                   h * h * h;
        }
    CHECK(total == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("specimen age prior") {
  const PhaseStructure p = make_phases({2500, 3000});
  Assignment a;
  a.phase = {1};

  CHECK(log_prior_theta(std::vector<double>{2700}, p, a) ==
        doctest::Approx(-std::log(500.0)));
  const std::vector<double> onset{2800};
  CHECK(log_prior_theta(std::vector<double>{2700}, p, a, onset) ==
        doctest::Approx(-std::log(300.0)));
  CHECK(log_prior_theta(std::vector<double>{2900}, p, a, onset) == kLogZero);
  CHECK(log_prior_theta(std::vector<double>{2400}, p, a) == kLogZero);
}

TEST_CASE("theta prior is permutation-equivariant within a phase") {
  const PhaseStructure p = make_phases({2400, 2800, 3100});
  Assignment a;
  a.phase = {1, 1, 2};
  const std::vector<double> t1{2500, 2600, 3000};
  const std::vector<double> t2{2600, 2500, 3000};
  CHECK(log_prior_theta(t1, p, a) == doctest::Approx(log_prior_theta(t2, p, a)));
}

TEST_CASE("deposition span at a located pit") {
  const PhaseStructure p = make_phases({2500, 2800, 3000});
  CHECK(delta_span(1, 3200, p) == doctest::Approx(300.0));   // unclipped
  CHECK(delta_span(2, 2700, p) == doctest::Approx(0.0));     // onset too late
  CHECK(delta_span(1, 2650, p) == doctest::Approx(150.0));   // partial
}

TEST_CASE("assignment prior probabilities") {
  SUBCASE("single phase has probability one") {
    const PhaseStructure p = make_phases({2500, 3000});
    Assignment a;
    a.phase = {1, 1, 1};
    DepositionRates r{{2.0}};
    CHECK(log_prior_assignment(a, r, p) == doctest::Approx(0.0));
  }

  SUBCASE("two equal phases, unit rates, one date each") {
    const PhaseStructure p = make_phases({2500, 2750, 3000});
    Assignment a;
    a.phase = {1, 2};
    DepositionRates r{{1.0, 1.0}};
    CHECK(log_prior_assignment(a, r, p) ==
          doctest::Approx(2.0 * std::log(0.5)));
  }

  SUBCASE("weighted spans") {
    const PhaseStructure p = make_phases({2500, 2600, 2900});
    Assignment a;
    a.phase = {1};
    DepositionRates r{{2.0, 1.0}};
    // p_1 = 2*100 / (2*100 + 1*300) = 200/500
    CHECK(log_prior_assignment(a, r, p) ==
          doctest::Approx(std::log(200.0 / 500.0)));
  }

  SUBCASE("all-zero spans for a date are an invalid state") {
    const PhaseStructure p = make_phases({2500, 2800, 3000});
    Assignment a;
    a.phase = {2};
    DepositionRates r{{1.0, 1.0}};
    const std::vector<double> onset{2450};  // onset before psi_0: no span
    CHECK(log_prior_assignment(a, r, p, onset) == kLogZero);
  }
}

TEST_CASE("assignment prior sums to one over all assignments") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int M = 1; M <= 3; ++M) {
    for (int K = 1; K <= 4; ++K) {
      const PhaseStructure p = sample_prior_psi(M, 2000, 3500, rng);
      DepositionRates r;
      for (int m = 0; m < M; ++m) r.lambda.push_back(0.2 + 2 * unif(rng));
      std::vector<double> onset(K);
      for (double& o : onset)
        o = p.psi.front() + unif(rng) * (p.psi.back() - p.psi.front());
      long total_assignments = 1;
      for (int i = 0; i < K; ++i) total_assignments *= M;
      double total = 0;
      for (long code = 0; code < total_assignments; ++code) {
        Assignment a;
        long rest = code;
        for (int i = 0; i < K; ++i) {
          a.phase.push_back(1 + int(rest % M));
          rest /= M;
        }
        const double lp = log_prior_assignment(a, r, p, onset);
        if (lp != kLogZero) total += std::exp(lp);
      }
      CHECK(total == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("per-date assignment probabilities normalize and weight by span") {
  const PhaseStructure p = make_phases({2500, 2600, 2900});
  DepositionRates r{{2.0, 1.0}};
  const std::vector<double> probs =
      assignment_probabilities(r, p, std::numeric_limits<double>::infinity());
  REQUIRE(probs.size() == 2);
  CHECK(probs[0] == doctest::Approx(0.4));
  CHECK(probs[1] == doctest::Approx(0.6));
}

TEST_CASE("phase count prior is Poisson(log 2) on M-1") {
  CHECK(log_prior_M(1) == doctest::Approx(std::log(0.5)));
  CHECK(log_prior_M(2) == doctest::Approx(std::log(0.5 * std::log(2.0))));
  CHECK(log_prior_M(0) == kLogZero);
  // pmf sums to one
  double total = 0;
  for (int m = 1; m < 40; ++m) total += std::exp(log_prior_M(m));
  CHECK(total == doctest::Approx(1.0));
}

TEST_CASE("deposition rate prior is unit-mean exponential") {
  CHECK(log_prior_rates({{1.0}}) == doctest::Approx(-1.0));
  CHECK(log_prior_rates({{0.5, 2.0}}) == doctest::Approx(-2.5));
  CHECK(log_prior_rates({{1.0, 0.0}}) == kLogZero);
}

TEST_CASE("onset-rate hyperpriors") {
  Lattice lat;
  lat.c1 = 13;
  lat.c2 = 32;
  const double L = 2000, U = 3500, A = 10, B = 1;
  const double ma = prior_mean_alpha(A, lat, L, U);
  const double mb = prior_mean_beta(B, lat, L, U);
  CHECK(ma == doctest::Approx(10.0 / (416.0 * 1500.0)));
  CHECK(mb == doctest::Approx(32.0 / (2.0 * 1500.0)));

  // exponential density at its mean: log(1/mean) - 1
  CHECK(log_prior_alpha_beta(ma, mb, mb, A, B, lat, L, U) ==
        doctest::Approx(3.0 * -1.0 - std::log(ma) - 2.0 * std::log(mb)));
  // density climbs toward the mode at 0+
  CHECK(log_prior_alpha_beta(ma * 1e-9, mb, mb, A, B, lat, L, U) >
        log_prior_alpha_beta(ma, mb, mb, A, B, lat, L, U));
  // factorization: beta1 and beta2 evaluated independently
  const double split = log_prior_alpha_beta(ma, 0.7 * mb, 1.3 * mb, A, B, lat, L, U);
  const double parts = (-std::log(ma) - 1.0) +
                       (-std::log(mb) - 0.7) + (-std::log(mb) - 1.3);
  CHECK(split == doctest::Approx(parts));
  CHECK(log_prior_alpha_beta(0.0, mb, mb, A, B, lat, L, U) == kLogZero);
}

TEST_CASE("multivariate Polya pmf") {
  SUBCASE("M=1 normalizes to a point mass") {
    for (int k : {0, 1, 5, 10})
      CHECK(polya_log_pmf(std::vector<int>{k}) == doctest::Approx(0.0));
  }

  SUBCASE("M=2, K=1 symmetric") {
    CHECK(std::exp(polya_log_pmf(std::vector<int>{1, 0})) ==
          doctest::Approx(0.5));
    CHECK(std::exp(polya_log_pmf(std::vector<int>{0, 1})) ==
          doctest::Approx(0.5));
  }

  SUBCASE("M=2, K=2 matches the Gamma formula directly") {
    // oracle: K!/(prod Km!) * Gamma(M/2)/Gamma(K+M/2) * prod Gamma(Km+1/2)/sqrt(pi)
    auto oracle = [](std::vector<int> km) {
      int K = 0;
      double v = 1;
      for (int k : km) {
        K += k;
        v *= std::tgamma(k + 0.5) / std::sqrt(M_PI) / std::tgamma(k + 1.0);
      }
      const int M = int(km.size());
      v *= std::tgamma(K + 1.0) * std::tgamma(M / 2.0) /
           std::tgamma(K + M / 2.0);
      return v;
    };
    CHECK(std::exp(polya_log_pmf(std::vector<int>{2, 0})) ==
          doctest::Approx(3.0 / 8.0));
    CHECK(std::exp(polya_log_pmf(std::vector<int>{1, 1})) ==
          doctest::Approx(2.0 / 8.0));
    CHECK(std::exp(polya_log_pmf(std::vector<int>{0, 2})) ==
          doctest::Approx(3.0 / 8.0));
    CHECK(oracle({2, 0}) == doctest::Approx(3.0 / 8.0));
    // sums to one over the K=2 simplex
    double total = 0;
    for (int k1 = 0; k1 <= 2; ++k1)
      total += std::exp(polya_log_pmf(std::vector<int>{k1, 2 - k1}));
    CHECK(total == doctest::Approx(1.0));
  }
}

TEST_CASE("simulated phase counts approach the Polya law") {
  // Light version of the acceptance-scale check: M=2, K=5.
  std::mt19937_64 rng(17);
  std::exponential_distribution<double> expo(1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int M = 2, K = 5, N = 200000;
  std::map<std::vector<int>, double> empirical;
  for (int t = 0; t < N; ++t) {
    const PhaseStructure p = sample_prior_psi(M, 2000, 3500, rng);
    DepositionRates r;
    for (int m = 0; m < M; ++m) r.lambda.push_back(expo(rng));
    const std::vector<double> probs = assignment_probabilities(
        r, p, std::numeric_limits<double>::infinity());
    std::vector<int> counts(M, 0);
    for (int i = 0; i < K; ++i) {
      double u = unif(rng);
      int m = M - 1;
      for (int j = 0; j < M; ++j) {
        u -= probs[j];
        if (u <= 0) { m = j; break; }
      }
      ++counts[m];
    }
    empirical[counts] += 1.0 / N;
  }
  std::map<std::vector<int>, double> polya;
  for (int k1 = 0; k1 <= K; ++k1) {
    const std::vector<int> counts{k1, K - k1};
    polya[counts] = std::exp(polya_log_pmf(counts));
  }
  CHECK(testutil::tv_distance(empirical, polya) < 0.05);
}

TEST_CASE("assignment counts and variant helpers") {
  Assignment a;
  a.phase = {1, 2, 2, 1, 2};
  const std::vector<int> k = a.counts(2);
  CHECK(k == std::vector<int>{2, 3});
  CHECK_THROWS(a.counts(1));

  CHECK(has_field(Variant::SPOF));
  CHECK_FALSE(has_field(Variant::RP));
  CHECK(has_random_phases(Variant::RPOF));
  CHECK(variant_from_string("RP") == Variant::RP);
  CHECK_THROWS(variant_from_string("SPX"));
  CHECK(to_string(Variant::RPOF) == "RPOF");
}
