#include <doctest.h>

#include <cmath>

#include "lipwidth/case_studies.hpp"
#include "oracles.hpp"

using namespace lipwidth;

namespace {

long double power_sum(const SequenceSetSpec& spec, unsigned n, std::size_t N) {
  long double s = 0;
  for (std::size_t j = 1; j <= N; ++j) s += std::pow(static_cast<long double>(spec.sigma(j)), n);
  return s;
}

// Every check whose name starts with `prefix` passed, and there is at least one.
bool checks_pass(const nlohmann::json& report, const std::string& prefix) {
  std::size_t seen = 0;
  for (const auto& c : report["checks"])
    if (c["name"].get<std::string>().rfind(prefix, 0) == 0) {
      ++seen;
      if (!c["pass"].get<bool>()) return false;
    }
  return seen > 0;
}

}  // namespace

TEST_SUITE("case_studies") {
  TEST_CASE("sequence values") {
    const auto li = SequenceSetSpec::log_inv(8);
    CHECK(li.sigma(1) == 1.0);
    CHECK(li.sigma(3) == 0.5);
    const auto pw = SequenceSetSpec::power(0.5, 8);
    CHECK(pw.sigma(4) == 0.5);
    const auto cu = SequenceSetSpec::custom({1.0, 0.5});
    CHECK(cu.sigma(3) == 0.0);
    CHECK_THROWS_AS(SequenceSetSpec::custom({0.5, 1.0}).validate(), PreconditionError);
  }

  TEST_CASE("sequence set distances") {
    const SequenceSet set(SequenceSetSpec::log_inv(5));
    REQUIRE(set.size() == 6);
    CHECK(set.distance(0, 5) == 1.0);
    CHECK(set.distance(1, 2) == std::max(set.sigma(2), set.sigma(3)));
    CHECK(set.distance(3, 3) == 0.0);
  }

  TEST_CASE("inner entropy of truncated sets brackets sigma_{2^n}") {
    for (unsigned n = 0; n <= 5; ++n) {
      const auto spec = SequenceSetSpec::log_inv((std::size_t{1} << n) + 20);
      const auto e = inner_entropy(SequenceSet(spec), n);
      const double truth = sequence_entropy_exact(spec, n);
      CHECK(truth == doctest::Approx(1.0 / std::log2(std::ldexp(1.0, static_cast<int>(n)) + 1)));
      CHECK(e.lower <= truth * (1 + 1e-12));
      CHECK(e.upper >= truth * (1 - 1e-12));
    }
  }

  TEST_CASE("volume condition agrees with a direct sum") {
    const auto li = SequenceSetSpec::log_inv(1);
    const auto pw = SequenceSetSpec::power(1.0, 1);
    for (unsigned n : {4u, 6u, 8u})
      for (double N : {10.0, 1000.0, 50000.0}) {
        const auto a = refr_condition(li, 3.0, n, N);
        CHECK(a.method == "exact");
        CHECK(a.lhs_upper == doctest::Approx(static_cast<double>(power_sum(li, n, static_cast<std::size_t>(N)))).epsilon(1e-12));
        const auto b = refr_condition(pw, 3.0, n, N);
        CHECK(b.lhs_upper == doctest::Approx(static_cast<double>(power_sum(pw, n, static_cast<std::size_t>(N)))).epsilon(1e-12));
      }
  }

  TEST_CASE("large-N bounds dominate the exact sum") {
    const auto li = SequenceSetSpec::log_inv(1);
    const auto a = refr_condition(li, 3.0, 6, 3000000.0);
    CHECK(a.method == "dyadic_block");
    CHECK(a.lhs_upper >= static_cast<double>(power_sum(li, 6, 3000000)));
    REQUIRE(a.blocks.has_value());
    CHECK(*a.blocks == 22);
    const auto pw = SequenceSetSpec::power(1.0, 1);
    const auto b = refr_condition(pw, 3.0, 3, 2000000.0);
    CHECK(b.method == "integral_tail");
    CHECK(b.lhs_upper >= static_cast<double>(power_sum(pw, 3, 2000000)));
  }

  TEST_CASE("collapse threshold") {
    CHECK(collapse_threshold(1.0, 4.0) == 2);
    CHECK(collapse_threshold(0.1, 2.5) == 16);
    CHECK(collapse_tail_inequality(0.1, 2.5, 16));
    CHECK_FALSE(collapse_tail_inequality(0.1, 2.5, 15));
  }

  TEST_CASE("collapse refr maps") {
    const auto pts = collapse_certificates(1.0, 4.0, 2, {1000});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].condition);
    CHECK(pts[0].declared <= 4.0);
    CHECK(pts[0].sigma_N <= 1e-3);
    CHECK(pts[0].spot_check);
  }

  TEST_CASE("log-sequence separation at n = 6") {
    const auto r = separation_certificates(6, 3.0);
    CHECK(r.N == 117649.0);
    CHECK(r.condition.holds);
    CHECK(r.declared <= 3.0);
    CHECK(r.upper.value <= 1.0 / (6 * std::log2(7.0)) + 1e-15);
    CHECK(r.lower.value > 0.0);
    CHECK(r.lower.value <= r.upper.value);
    CHECK(r.ratio <= 1.0 / std::log2(7.0) + 1e-12);
    CHECK(r.spot_check);
    CHECK(verify_witness(r.upper).ok);
    CHECK(verify_witness(r.lower).ok);
  }

  TEST_CASE("Hilbert basis example") {
    const auto h = hilbert_example(4, 3.0, 1);
    CHECK(h.entropy_contains_sqrt2);
    CHECK(h.threshold_lhs == doctest::Approx(std::sqrt(2.0) / 36));
    CHECK(h.threshold_rhs == doctest::Approx(0.25));
    CHECK_FALSE(h.threshold_holds);
    CHECK(h.packing_lower.value <= std::sqrt(2.0));
  }

  TEST_CASE("transport references and true entropy") {
    const auto ref = transport_reference(3);
    CHECK(ref.entropy == 0.25);
    CHECK(ref.kolmogorov_upper == doctest::Approx(4.0 / 3));
    const FiniteSet set = transport_set(64);
    for (unsigned n = 1; n <= 4; ++n) {
      const auto e = inner_entropy(set, n);
      CHECK(e.upper <= transport_reference(n).entropy + 1e-12);
      CHECK(e.lower <= std::ldexp(1.0, -static_cast<int>(n)) * (1 + 1e-12));
      CHECK(e.upper >= std::ldexp(1.0, -static_cast<int>(n)) * (1 - 1e-12));
    }
  }

  TEST_CASE("diagonal residuals follow the tail weight") {
    const FiniteSet set = diagonal_set(32);
    for (unsigned n : {1u, 3u, 8u}) {
      std::vector<std::size_t> coords(n);
      for (unsigned i = 0; i < n; ++i) coords[i] = i;
      const auto basis = coordinate_basis(set.space().dim(), coords);
      const auto k = kolmogorov_upper(set, basis);
      CHECK(k.certificate.value == doctest::Approx(1.0 / std::sqrt(std::log2(n + 2.0))));
      double worst = 0;
      for (const auto& p : set.points()) worst = std::max(worst, oracle::projection_residual(p, basis));
      CHECK(k.certificate.value == doctest::Approx(worst));
    }
  }

  TEST_CASE("octahedron coordinate bound against the Stechkin value") {
    CHECK(stechkin_value(1) == doctest::Approx(std::sqrt(0.5) / std::sqrt(std::log2(3.0))));
    for (unsigned n = 1; n <= 4; ++n) {
      const auto b = octahedron_coordinate_upper(n);
      CHECK(b.best >= stechkin_value(n));
      std::size_t binom = 1;
      for (unsigned i = 0; i < n; ++i) binom = binom * (2 * n - i) / (i + 1);
      CHECK(b.subspaces == binom);
    }
  }

  TEST_CASE("case-study reports") {
    const auto seq = run_case_study("sequence-entropy", {{"n_max", 4}});
    CHECK(checks_pass(seq, "bracket_contains_sigma_2^n"));
    const auto col = run_case_study("collapse", {{"c", 1.0}, {"gamma", 4.0}, {"N", nlohmann::json::array({1000})}});
    CHECK(checks_pass(col, "inequality_at_n1"));
    const auto st = run_case_study("stechkin", {{"n", 3}});
    CHECK(checks_pass(st, "coordinate_upper_ge_stechkin"));
    CHECK_THROWS_AS(run_case_study("nonexistent", nlohmann::json::object()), PreconditionError);
  }
}
