#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "rssd/error.hpp"
#include "rssd/lti.hpp"

using namespace rssd;
using namespace rssd::testing;

namespace {

Complex j(double w) { return {0.0, w}; }

CMatrix diag_response(const CompensatorBank& bank, double w) {
  CMatrix out = CMatrix::Zero(bank.channels(), bank.channels());
  for (int k = 0; k < bank.channels(); ++k) out(k, k) = bank.sections[k].evaluate(j(w));
  return out;
}

}  // namespace

TEST_SUITE("lti") {

TEST_CASE("plant construction validates dimensions and finiteness") {
  Matrix a = Matrix::Zero(2, 2), b = Matrix::Zero(2, 1), c = Matrix::Zero(1, 2);
  CHECK_NOTHROW(StateSpacePlant(a, b, c, Matrix::Zero(1, 1)));
  try {
    StateSpacePlant(a, b, c, Matrix::Zero(2, 1));
    FAIL("expected DimensionMismatch");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kDimensionMismatch);
  }
  a(0, 0) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(StateSpacePlant(a, b, c, Matrix::Zero(1, 1)), Error);
}

TEST_CASE("plant set requires uniform input/output dimensions") {
  std::mt19937_64 rng(1);
  CHECK_THROWS_AS(PlantSet({}), Error);
  PlantSet ok({random_plant(2, 1, 1, rng), random_plant(3, 1, 1, rng)});
  CHECK(ok.size() == 2);
  CHECK_THROWS_AS(PlantSet({random_plant(2, 1, 1, rng), random_plant(2, 2, 1, rng)}),
                  Error);
}

TEST_CASE("frequency response examples") {
  const StateSpacePlant integrator = scalar_tf(1.0, 0.0);
  const CMatrix g = freq_response(integrator, 1.0);
  CHECK(g(0, 0).real() == doctest::Approx(0.0));
  CHECK(g(0, 0).imag() == doctest::Approx(-1.0));

  Matrix gain(2, 2);
  gain << 1, 2, 3, 4;
  const CMatrix s = freq_response(StateSpacePlant::static_gain(gain), 7.0);
  CHECK((s - gain.cast<Complex>()).norm() == doctest::Approx(0.0));

  CHECK(freq_response(scalar_tf(1.0, -1.0), 0.0)(0, 0).real() == doctest::Approx(1.0));

  try {
    freq_response(integrator, 0.0);
    FAIL("expected SingularAtFrequency");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSingularAtFrequency);
  }
}

TEST_CASE("frequency response is conjugate symmetric") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const StateSpacePlant p = random_plant(4, 2, 3, rng, trial % 2, true);
    for (double w : {0.1, 1.0, 13.0}) {
      const CMatrix pos = evaluate(p, j(w));
      const CMatrix neg = evaluate(p, j(-w));
      CHECK((pos - neg.conjugate()).norm() <= 1e-10 * (1.0 + pos.norm()));
    }
  }
}

TEST_CASE("spectrum damping convention") {
  Matrix a(1, 1);
  a << -1.0;
  auto s = spectrum(a);
  REQUIRE(s.size() == 1);
  CHECK(s[0].damping == doctest::Approx(1.0));
  CHECK(s[0].natural_frequency == doctest::Approx(1.0));

  Matrix osc(2, 2);
  osc << -1.0, 3.18, -3.18, -1.0;
  s = spectrum(osc);
  REQUIRE(s.size() == 2);
  CHECK(s[0].damping == doctest::Approx(1.0 / std::sqrt(1.0 + 3.18 * 3.18)).epsilon(1e-12));
  CHECK(s[0].damping == doctest::Approx(0.3002).epsilon(1e-3));
  CHECK(s[0].damping == s[1].damping);
  CHECK(s[0].natural_frequency == s[1].natural_frequency);
  CHECK(s[0].value.imag() > 0.0);
  CHECK(s[1].value == std::conj(s[0].value));

  a << 0.951;
  CHECK(spectrum(a)[0].damping == doctest::Approx(-1.0));

  a << 0.0;
  s = spectrum(a);
  CHECK(s[0].damping == 1.0);
  CHECK(s[0].natural_frequency == 0.0);
  CHECK(s[0].marginal);
}

TEST_CASE("spectrum of a block-diagonal concatenation is the union") {
  std::mt19937_64 rng(3);
  const StateSpacePlant p = random_plant(3, 1, 1, rng);
  const StateSpacePlant q = random_plant(2, 1, 1, rng, 1);
  const auto joint = spectrum(append(p, q));
  std::vector<Complex> expect;
  for (const auto& e : spectrum(p)) expect.push_back(e.value);
  for (const auto& e : spectrum(q)) expect.push_back(e.value);
  REQUIRE(joint.size() == expect.size());
  for (const auto& e : joint) {
    double nearest = 1e9;
    for (Complex v : expect) nearest = std::min(nearest, std::abs(v - e.value));
    CHECK(nearest < 1e-9);
  }
}

TEST_CASE("realize_bank sections") {
  CompensatorBank bank;
  bank.sections = {Section::first_order(1.0, 7.36, 0.007, 10.1)};
  const StateSpacePlant w = realize_bank(bank);
  CHECK(w.states() == 1);
  CHECK(freq_response(w, 0.0)(0, 0).real() == doctest::Approx(7.36 / 10.1));
  CHECK(std::abs(freq_response(w, 0.0)(0, 0).real() - 0.7287) < 1e-4);
  CHECK(w.d()(0, 0) == doctest::Approx(1.0 / 0.007));
  CHECK(w.d()(0, 0) == doctest::Approx(142.86).epsilon(1e-4));

  bank.sections = {Section::first_order(0.0, 1.0, 0.0, 1.0)};
  try {
    realize_bank(bank);
    FAIL("expected ImproperSection");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kImproperSection);
  }

  bank.sections = {Section::gain(5.0)};
  const StateSpacePlant g = realize_bank(bank);
  CHECK(g.states() == 0);
  CHECK(g.d()(0, 0) == 5.0);
}

TEST_CASE("augment_plant examples") {
  const StateSpacePlant two = static_plant(3.0);
  CompensatorBank in{{Section::gain(2.0)}, BankSide::kInput};
  CompensatorBank out{{Section::gain(4.0)}, BankSide::kOutput};
  const StateSpacePlant aug = augment_plant(out, two, in);
  CHECK(aug.states() == 0);
  CHECK(aug.d()(0, 0) == doctest::Approx(24.0));

  std::mt19937_64 rng(11);
  const StateSpacePlant p11 = random_plant(11, 3, 5, rng);
  CompensatorBank w_in{{Section::first_order(1.0, 7.36, 0.007, 10.1),
                        Section::first_order(14.71, 59.78, 0.002, 0.099),
                        Section::first_order(0.992, 5.091, 0.0053, 11.89)},
                       BankSide::kInput};
  CompensatorBank w_out{{Section::first_order(0.61, 11, 1.6, 1.6),
                         Section::first_order(0.23, 29.58, 0.55, 0.36),
                         Section::first_order(0.813, 12.1, 7.996, 1.46),
                         Section::first_order(0.91, 9.78, 0.331, 0.342),
                         Section::first_order(0.78, 16.81, 1.41, 1.0)},
                        BankSide::kOutput};
  const StateSpacePlant big = augment_plant(w_out, p11, w_in);
  CHECK(big.states() == 19);
  for (double w : {0.01, 0.3, 2.0, 40.0, 900.0}) {
    const CMatrix series = diag_response(w_out, w) * freq_response(p11, w) *
                           diag_response(w_in, w);
    const CMatrix direct = freq_response(big, w);
    CHECK((series - direct).norm() <= 1e-8 * series.norm());
  }

  CHECK_THROWS_AS(augment_plant(w_in, p11, w_in), Error);
}

TEST_CASE("identity compensators leave the transfer matrix unchanged") {
  std::mt19937_64 rng(5);
  const StateSpacePlant p = random_plant(4, 2, 3, rng, 1, true);
  const StateSpacePlant aug = augment_plant(
      CompensatorBank::identity(3, BankSide::kOutput), p,
      CompensatorBank::identity(2, BankSide::kInput));
  std::uniform_real_distribution<double> logw(-3.0, 4.0);
  for (int k = 0; k < 20; ++k) {
    const double w = std::pow(10.0, logw(rng));
    CHECK((freq_response(aug, w) - freq_response(p, w)).norm() < 1e-10);
  }
}

TEST_CASE("frequency grid validation") {
  CHECK_THROWS_AS(FrequencyGrid({1.0}), Error);
  CHECK_THROWS_AS(FrequencyGrid({1.0, 1.0}), Error);
  CHECK_THROWS_AS(FrequencyGrid({-1.0, 1.0}), Error);
  const FrequencyGrid g = FrequencyGrid::standard();
  CHECK(g.points().size() == 400);
  CHECK(g.lo() == doctest::Approx(1e-3));
  CHECK(g.hi() == doctest::Approx(1e5));
}

}  // TEST_SUITE
