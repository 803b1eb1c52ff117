#include "doctest.h"

#include <cmath>
#include <numbers>

#include "gelfond/verify.hpp"

using namespace gelfond;

namespace {

DyadicRational dy(const char* s) { return DyadicRational::parse(s); }

TripleRange small_range(int n_max) {
  TripleRange r;
  r.d_max = 6;
  r.dprime_max = n_max;
  r.n_max = n_max;
  return r;
}

VerifyConfig fast_config() {
  VerifyConfig vc;
  vc.base_level = 22;
  return vc;
}

}  // namespace

TEST_CASE("triple ranges") {
  TripleRange r{3, 4, 5, 5};
  const auto all = r.enumerate();
  // d=3: d'∈{3,4,5}, N from d' to 5 -> 3+2+1; d=4: d'∈{4,5} -> 2+1.
  CHECK(all.size() == 9);
  CHECK(all.front() == Triple{3, 3, 3});
  CHECK(all.back() == Triple{4, 5, 5});
  CHECK_THROWS(TripleRange{1, 4, 5, 5}.validate());
  CHECK_THROWS(TripleRange{5, 4, 5, 5}.validate());
  CHECK_THROWS(TripleRange{3, 4, 5, 31}.validate());
}

TEST_CASE("status strings") {
  CHECK(to_string(Status::Certified) == "Certified");
  CHECK(parse_status("Untestable") == Status::Untestable);
  CHECK_THROWS(parse_status("maybe"));
}

TEST_CASE("mirror resolution") {
  const auto direct = resolve_spec(dy("1/2"), 3, 3, true);
  REQUIRE(direct);
  CHECK_FALSE(direct->mirrored);
  const auto mirrored = resolve_spec(dy("1/4"), 3, 3, true);
  REQUIRE(mirrored);
  CHECK(mirrored->mirrored);
  CHECK(mirrored->spec.c == dy("3/4"));
  CHECK_FALSE(resolve_spec(dy("1/4"), 3, 3, false));
}

TEST_CASE("coincidence check in exact arithmetic") {
  // {1/3, 2/3} for c = 1/2 stays away from the pole and the tail.
  CHECK(coincidence_check(dy("1/2"), 3, 3, code_to_orbit(BinaryWord::parse("01"))));
  // The fixed point 0 sits on the pole of c = 1/2.
  CHECK_FALSE(coincidence_check(dy("1/2"), 3, 3, code_to_orbit(BinaryWord::parse("0"))));
  // 14/15 lies in the tail [7/8, 1).
  CHECK_FALSE(coincidence_check(dy("3/4"), 3, 3, code_to_orbit(BinaryWord::parse("0111"))));
  CHECK(coincidence_check(dy("3/4"), 3, 3, code_to_orbit(BinaryWord::parse("0001"))));
}

TEST_CASE("exponent from an orbit") {
  const auto e = exponent_from_orbit(dy("1/2"), code_to_orbit(BinaryWord::parse("01")));
  CHECK(e.beta == doctest::Approx(std::log(std::sqrt(3.0) / 2)).epsilon(1e-14));
  CHECK(e.delta == doctest::Approx(std::log(3.0) / std::log(4.0)).epsilon(1e-14));
  const auto q = exponent_from_orbit(dy("1/4"), code_to_orbit(BinaryWord::parse("0111")));
  CHECK(q.delta == doctest::Approx(0.7442276).epsilon(1e-6));
  const auto zero = exponent_from_orbit(dy("0/1"), code_to_orbit(BinaryWord::parse("0")));
  CHECK(zero.beta == 0.0);
  CHECK(zero.delta == 1.0);
  CHECK_THROWS_AS(exponent_from_orbit(dy("1/2"), code_to_orbit(BinaryWord::parse("0"))), PoleOnOrbit);
}

TEST_CASE("MRS bound") {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  CHECK(mrs_bound(dy("1/2")) == doctest::Approx(1 - pi2 / (80 * std::log(2.0))));
  CHECK(mrs_bound(dy("0/1")) == 1.0);
  CHECK(mrs_bound(dy("3/16")) == doctest::Approx(mrs_bound(dy("13/16"))).epsilon(1e-15));
}

TEST_CASE("c = 1/2 certifies at (3,3,10)") {
  const auto r = certify(dy("1/2"));
  REQUIRE(r.status == Status::Certified);
  CHECK(*r.triple == Triple{3, 3, 10});
  CHECK(r.cycle_code->to_string() == "01");
  CHECK(r.period == 2);
  CHECK(std::fabs(*r.delta - std::log(3.0) / std::log(4.0)) < 1e-12);
  CHECK(*r.delta < r.mrs_bound);
  CHECK(r.gap > r.threshold + 2 * r.epsilon);
}

TEST_CASE("soundness: a certified record re-checks at its triple") {
  for (const char* cs : {"1/2", "3/8", "5/16", "0/1"}) {
    const auto r = certify(dy(cs), small_range(16), fast_config());
    if (r.status != Status::Certified) continue;
    INFO(cs);
    const auto check = check_triple(dy(cs), *r.triple, fast_config());
    CHECK(check.passed);
    // Codes are reported for c itself; map back for mirrored certificates.
    auto code = *r.cycle_code;
    if (r.mirrored) code = code.length() == 1 ? code : code.complement().least_rotation();
    const auto c_eff = r.mirrored ? dy(cs).complement() : dy(cs);
    CHECK(coincidence_check(c_eff, r.triple->d, r.triple->dprime, code_to_orbit(code)));
    CHECK(*r.delta > 0.5);
    CHECK(*r.delta <= 1.0);
  }
}

TEST_CASE("range monotonicity") {
  for (const char* cs : {"3/8", "5/16"}) {
    const auto small = certify(dy(cs), small_range(15), fast_config());
    const auto large = certify(dy(cs), small_range(17), fast_config());
    INFO(cs);
    if (small.status == Status::Certified) {
      REQUIRE(large.status == Status::Certified);
      CHECK(*large.triple == *small.triple);
      CHECK(*large.delta == *small.delta);
    }
  }
}

TEST_CASE("the strict constant implies the published one at the same triple") {
  for (const char* cs : {"1/2", "1/4", "3/8", "5/16"}) {
    const auto strict = certify(dy(cs), small_range(16), fast_config());
    if (strict.status != Status::Certified) continue;
    auto paper = fast_config();
    paper.tail_constant = kPaperTailConstant;
    INFO(cs);
    CHECK(check_triple(dy(cs), *strict.triple, paper).passed);
  }
}

TEST_CASE("early exit does not change records") {
  auto slow = fast_config();
  slow.early_exit = false;
  for (const char* cs : {"1/4", "3/16"}) {
    const auto a = certify(dy(cs), small_range(14), fast_config());
    const auto b = certify(dy(cs), small_range(14), slow);
    INFO(cs);
    CHECK(a.status == b.status);
    CHECK(a.triple == b.triple);
    CHECK(a.cycle_code == b.cycle_code);
    CHECK(a.gap == b.gap);
  }
}

TEST_CASE("published-constant first hits come earlier") {
  auto paper = VerifyConfig{};
  paper.tail_constant = kPaperTailConstant;
  const auto r = certify(dy("1/2"), {}, paper);
  REQUIRE(r.status == Status::Certified);
  CHECK(r.triple->N <= 10);
}

TEST_CASE("inapplicable triples are rejected") {
  const auto spec = PotentialSpec::make(dy("1/4"), 3, 3);
  const auto cells = integrate_cylinders(PotentialSpec::make(dy("1/2"), 3, 3), 12, 8);
  CHECK_THROWS_AS(check_triple(spec, 8, cells), InapplicableTriple);
  VerifyConfig no_mirror;
  no_mirror.mirror = false;
  CHECK_THROWS_AS(check_triple(dy("1/4"), Triple{3, 3, 8}, no_mirror), InapplicableTriple);
}
