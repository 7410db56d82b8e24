#include <gtest/gtest.h>

#include <algorithm>
#include <thread>
#include <cmath>
#include <random>

#include "grwlab/errors.hpp"
#include "grwlab/warpkit.hpp"

namespace grwlab {
namespace {

// Fourth-order central differences; the independent oracle for derivatives.
double fd1(const WarpingModel& m, double t, double h) {
  auto f = [&](double x) { return m.evaluate(x).f; };
  return (-f(t + 2 * h) + 8 * f(t + h) - 8 * f(t - h) + f(t - 2 * h)) / (12 * h);
}
double fd2(const WarpingModel& m, double t, double h) {
  auto f = [&](double x) { return m.evaluate(x).f; };
  return (-f(t + 2 * h) + 16 * f(t + h) - 30 * f(t) + 16 * f(t - h) - f(t - 2 * h)) / (12 * h * h);
}

std::vector<SpacetimeSpec> whole_catalog(int n = 3) {
  std::vector<SpacetimeSpec> out;
  for (const auto& e : builtin_catalog()) out.push_back(make_spacetime(e.name, n));
  out.push_back(make_spacetime("Example2", n, {{"a", 2.0}}));
  out.push_back(make_spacetime("Radiation", n, {{"a", 0.5}}));
  return out;
}

// Finite sample interval inside the (possibly unbounded) domain.
std::pair<double, double> sample_range(const IntervalDomain& d) {
  const double lo = std::isfinite(d.lower) ? d.lower : -4.0;
  const double hi = std::isfinite(d.upper) ? d.upper : 6.0;
  const double pad = 0.02 * (hi - lo);
  return {lo + pad, hi - pad};
}

TEST(EvalWarp, Example1AtOrigin) {
  const auto spec = make_spacetime("Example1", 3);
  const WarpValues w = eval_warp(spec.warp, 0.0);
  EXPECT_EQ(w.f, 1.0);
  EXPECT_EQ(w.df, 0.0);
  EXPECT_EQ(w.d2f, -2.0);
  EXPECT_EQ(w.log_curvature(), -2.0);
}

TEST(EvalWarp, MinkowskiIsConstant) {
  const auto spec = make_spacetime("Minkowski", 2);
  const WarpValues w = eval_warp(spec.warp, 7.0);
  EXPECT_EQ(w.f, 1.0);
  EXPECT_EQ(w.df, 0.0);
  EXPECT_EQ(w.d2f, 0.0);
}

TEST(EvalWarp, Example2MatchesHandDerivativesAndFiniteDifferences) {
  const auto spec = make_spacetime("Example2", 3, {{"a", 2.0}});
  const WarpValues w = eval_warp(spec.warp, 1.0);
  // f = sqrt(a^2 - t^2), f' = -t/f, f'' = -a^2 / (a^2 - t^2)^(3/2).
  const double f = std::sqrt(3.0);
  const double df = -1.0 / std::sqrt(3.0);
  const double d2f = -4.0 / std::pow(3.0, 1.5);
  EXPECT_NEAR(w.f, f, 1e-15);
  EXPECT_NEAR(w.df, df, 1e-15);
  EXPECT_NEAR(w.d2f, d2f, 1e-15);
  EXPECT_NEAR(fd1(spec.warp, 1.0, 1e-4), df, 1e-10);
  EXPECT_NEAR(fd2(spec.warp, 1.0, 1e-4), d2f, 1e-6);
}

TEST(EvalWarp, DomainAndPositivityErrors) {
  const auto spec = make_spacetime("Example2", 2, {{"a", 1.0}});
  EXPECT_THROW(eval_warp(spec.warp, 1.0), DomainError);
  EXPECT_THROW(eval_warp(spec.warp, -3.0), DomainError);
  const auto eds = make_spacetime("EinsteinDeSitter", 3);
  EXPECT_THROW(eval_warp(eds.warp, 0.0), DomainError);
  const auto bad = make_expression_spacetime("linear", 2, "t - 1", IntervalDomain::open(0.0, 2.0));
  EXPECT_NO_THROW(eval_warp(bad.warp, 1.5));
  EXPECT_THROW(eval_warp(bad.warp, 0.5), PositivityError);
  try {
    eval_warp(spec.warp, 2.5);
    FAIL();
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("2.5"), std::string::npos);
    EXPECT_NE(msg.find("(-1,1)"), std::string::npos);
  }
}

TEST(EvalWarp, PositivityOverCatalogOnDenseGrids) {
  for (const auto& spec : whole_catalog()) {
    const auto [lo, hi] = sample_range(spec.warp.domain());
    for (int k = 0; k <= 2000; ++k) {
      const double t = lo + (hi - lo) * k / 2000.0;
      EXPECT_GT(eval_warp(spec.warp, t).f, 0.0) << spec.name << " t=" << t;
    }
  }
}

TEST(EvalWarp, DerivativeConsistencyAtRandomPoints) {
  std::mt19937_64 rng(20261019);
  for (const auto& spec : whole_catalog()) {
    auto [lo, hi] = sample_range(spec.warp.domain());
    // Keep the stencil away from the singular ends.
    lo += 0.05 * (hi - lo);
    hi -= 0.05 * (hi - lo);
    std::uniform_real_distribution<double> pick(lo, hi);
    for (int k = 0; k < 100; ++k) {
      const double t = pick(rng);
      const WarpValues w = eval_warp(spec.warp, t);
      const double h = 1e-3;
      auto f = [&](double x) { return spec.warp.evaluate(x).f; };
      const double c1 = (f(t + h) - f(t - h)) / (2 * h);
      const double c2 = (f(t + h) - 2 * f(t) + f(t - h)) / (h * h);
      const double scale = 1.0 + std::abs(w.f) + std::abs(w.df) + std::abs(w.d2f);
      EXPECT_LE(std::abs(w.df - c1), 50.0 * scale * h * h) << spec.name << " t=" << t;
      EXPECT_LE(std::abs(w.d2f - c2), 500.0 * scale * h * h) << spec.name << " t=" << t;
    }
  }
}

TEST(Phi, CatalogExamplesAndClosedForms) {
  EXPECT_NEAR(phi(make_spacetime("Example1", 3), 1.0), 10.0, 1e-13);
  EXPECT_EQ(phi(make_spacetime("Minkowski", 4), 0.3), 0.0);
  EXPECT_NEAR(phi(make_spacetime("SteadyState", 3), 0.0), 1.0, 1e-15);
}

TEST(Phi, ClosedFormAgreementAtThousandPoints) {
  for (int n : {2, 3, 5}) {
    const auto ex1 = make_spacetime("Example1", n);
    for (int k = 0; k < 1000; ++k) {
      const double t = -10.0 + 20.0 * k / 999.0;
      const double expected = 2.0 * n + 4.0 * t * t;
      EXPECT_LE(std::abs(phi(ex1, t) - expected), 1e-12 * (1.0 + std::abs(expected)));
    }
    for (double a : {1.0, 2.0}) {
      const auto ex2 = make_spacetime("Example2", n, {{"a", a}});
      for (int k = 0; k < 1000; ++k) {
        const double t = -a + 2.0 * a * (k + 0.5) / 1000.0;
        const double expected = (n * (a * a + t * t) + t * t) / std::pow(a * a - t * t, 2);
        EXPECT_LE(std::abs(phi(ex2, t) - expected), 1e-12 * std::abs(expected)) << "t=" << t;
      }
    }
  }
}

TEST(Ncc, CatalogExamples) {
  const Tolerances tol;
  EXPECT_TRUE(ncc_check(make_spacetime("Example1", 3), IntervalDomain::closed(-5, 5), 512).holds);
  EXPECT_TRUE(ncc_check(make_spacetime("SteadyState", 3), IntervalDomain::closed(-5, 5), 512).holds);
  EXPECT_TRUE(ncc_check(make_spacetime("Example2", 3, {{"a", 1.0}}),
                        IntervalDomain::closed(-0.9, 0.9), 512)
                  .holds);
  (void)tol;
}

TEST(Ncc, ViolationReportsFirstWitness) {
  // f = cosh(t): (log f)'' = 1/cosh^2 > 0 everywhere.
  const auto spec = make_expression_spacetime("cosh", 2, "(exp(t)+exp(-t))/2",
                                               IntervalDomain::real_line());
  const auto r = ncc_check(spec, IntervalDomain::closed(-2, 2), 400);
  EXPECT_FALSE(r.holds);
  ASSERT_TRUE(r.witness.has_value());
  EXPECT_DOUBLE_EQ(*r.witness, -2.0);
}

TEST(Ncc, InvalidWindows) {
  const auto spec = make_spacetime("Example2", 2);
  EXPECT_THROW(ncc_check(spec, IntervalDomain::closed(0.5, 0.5), 16), InvalidWindowError);
  EXPECT_THROW(ncc_check(spec, IntervalDomain::closed(-2, 0.5), 16), InvalidWindowError);
  EXPECT_THROW(ncc_check(spec, IntervalDomain::closed(-0.5, 0.5), 1), InvalidWindowError);
  EXPECT_THROW(ncc_check(spec, IntervalDomain::closed(-1.0, 0.5), 16), InvalidWindowError);
}

TEST(Ncc, PhiDominatesSquaredLogSlopeWhenNccHolds) {
  for (const auto& spec : whole_catalog()) {
    const auto [lo, hi] = sample_range(spec.warp.domain());
    const auto window = IntervalDomain::closed(lo, hi);
    if (!ncc_check(spec, window, 256).holds) continue;
    for (int k = 0; k <= 500; ++k) {
      const double t = lo + (hi - lo) * k / 500.0;
      const WarpValues w = eval_warp(spec.warp, t);
      EXPECT_GE(phi(spec.n, w), w.log_slope() * w.log_slope() - 1e-10) << spec.name;
    }
  }
}

TEST(InfPhi, Example1OnRealLine) {
  const auto r = inf_phi(make_spacetime("Example1", 3), IntervalDomain::real_line());
  EXPECT_NEAR(r.value, 6.0, 1e-12);
  EXPECT_NEAR(r.argmin, 0.0, 1e-6);
}

TEST(InfPhi, Example2OnFullInterval) {
  const auto r = inf_phi(make_spacetime("Example2", 2, {{"a", 1.0}}), IntervalDomain::open(-1, 1));
  EXPECT_NEAR(r.value, 2.0, 1e-10);
  EXPECT_NEAR(r.argmin, 0.0, 1e-5);
}

TEST(InfPhi, EinsteinDeSitterHalfOpenWindow) {
  const int n = 3;
  for (double T : {1.0, 10.0, 100.0}) {
    const IntervalDomain window{0.0, T, true, false};
    const auto r = inf_phi(make_spacetime("EinsteinDeSitter", n), window);
    const double expected = (6.0 * n + 4.0) / (9.0 * T * T);
    EXPECT_NEAR(r.value, expected, 1e-12 * expected + 1e-15);
    EXPECT_DOUBLE_EQ(r.argmin, T);
  }
}

TEST(InfPhi, FiniteLimitAtOpenInfiniteEndIsIncluded) {
  // Phi -> 0 as t -> inf for Einstein-de Sitter on (0, inf).
  const auto r = inf_phi(make_spacetime("EinsteinDeSitter", 3), IntervalDomain::open(0, kInfinity));
  EXPECT_LE(r.value, 1e-9);
  EXPECT_TRUE(r.endpoint_limit);
}

TEST(CriticalPoints, CatalogExamples) {
  const auto ex1 = critical_points(make_spacetime("Example1", 3).warp, IntervalDomain::closed(-5, 5));
  ASSERT_EQ(ex1.size(), 1u);
  EXPECT_LE(std::abs(ex1[0].t), 1e-10);
  EXPECT_FALSE(ex1[0].degenerate);

  const auto ss = critical_points(make_spacetime("SteadyState", 3).warp, IntervalDomain::closed(-10, 10));
  EXPECT_TRUE(ss.empty());

  const auto ex2 = critical_points(make_spacetime("Example2", 3, {{"a", 2.0}}).warp,
                                   IntervalDomain::open(-2, 2));
  ASSERT_EQ(ex2.size(), 1u);
  EXPECT_LE(std::abs(ex2[0].t), 1e-10);
}

TEST(CriticalPoints, OffGridRootIsRefinedByBisection) {
  // f = exp(-(t-0.123)^2): f' vanishes at t = 0.123, not a grid node.
  const auto spec = make_expression_spacetime("shifted", 2, "exp(-(t-0.123)^2)",
                                               IntervalDomain::real_line());
  const auto r = critical_points(spec.warp, IntervalDomain::closed(-3, 3));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_NEAR(r[0].t, 0.123, 1e-12);
  EXPECT_LE(std::abs(eval_warp(spec.warp, r[0].t).df), Tolerances{}.root);
}

TEST(CriticalPoints, TangentialZeroIsFlaggedDegenerate) {
  // f = 2 + (t-0.3)^3: f' = 3(t-0.3)^2 touches zero without changing sign.
  const auto spec = make_expression_spacetime("cubic", 2, "2 + (t-0.3)^3",
                                               IntervalDomain::open(-0.5, 1.0));
  const auto r = critical_points(spec.warp, IntervalDomain::closed(-0.4, 0.9));
  ASSERT_EQ(r.size(), 1u);
  EXPECT_TRUE(r[0].degenerate);
  EXPECT_NEAR(r[0].t, 0.3, 1e-4);
}

TEST(CriticalPoints, MultipleRoots) {
  // f = 2 + sin(t): zeros of cos(t) at pi/2 + k pi.
  const auto spec = make_expression_spacetime("wave", 2, "2 + sin(t)", IntervalDomain::real_line());
  const auto r = critical_points(spec.warp, IntervalDomain::closed(0, 10));
  ASSERT_EQ(r.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) {
    EXPECT_NEAR(r[k].t, M_PI / 2 + M_PI * static_cast<double>(k), 1e-12);
  }
}

TEST(Classify, CatalogVerdicts) {
  const auto steady = classify(make_spacetime("SteadyState", 3), IntervalDomain::real_line());
  EXPECT_EQ(steady.verdict, Verdict::kNonExistence);

  const auto ex1 = classify(make_spacetime("Example1", 3), IntervalDomain::real_line());
  EXPECT_EQ(ex1.verdict, Verdict::kUniqueSlice);
  ASSERT_EQ(ex1.slices.size(), 1u);
  EXPECT_LE(std::abs(ex1.slices[0]), 1e-10);

  const auto mink = classify(make_spacetime("Minkowski", 3), IntervalDomain::real_line());
  EXPECT_EQ(mink.verdict, Verdict::kInconclusive);
  EXPECT_NE(mink.reason.find("infimum"), std::string::npos);

  const auto eds = classify(make_spacetime("EinsteinDeSitter", 3), IntervalDomain{0, 10, true, false});
  EXPECT_EQ(eds.verdict, Verdict::kNonExistence);
}

TEST(Classify, UnboundedEinsteinDeSitterIsInconclusive) {
  const auto r = classify(make_spacetime("EinsteinDeSitter", 3), IntervalDomain::open(0, kInfinity));
  EXPECT_EQ(r.verdict, Verdict::kInconclusive);
}

TEST(Classify, NccFailureIsInconclusive) {
  const auto spec = make_expression_spacetime("cosh", 2, "(exp(t)+exp(-t))/2",
                                               IntervalDomain::real_line());
  const auto r = classify(spec, IntervalDomain::closed(-1, 1));
  EXPECT_EQ(r.verdict, Verdict::kInconclusive);
  EXPECT_NE(r.reason.find("NCC"), std::string::npos);
}

TEST(Classify, TinyPositiveInfimumIsInconclusive) {
  // Phi = (n+1) c^2 for f = exp(c t) is positive but below tol_inf.
  const auto spec = make_expression_spacetime("slow", 2, "exp(1e-5*t)", IntervalDomain::real_line());
  const auto r = classify(spec, IntervalDomain::closed(-1, 1));
  EXPECT_GT(r.inf.value, 0.0);
  EXPECT_EQ(r.verdict, Verdict::kInconclusive);
}

TEST(Classify, SoundnessOverCatalog) {
  const Tolerances tol;
  for (const auto& spec : whole_catalog()) {
    const auto r = classify(spec, spec.warp.domain());
    if (r.verdict == Verdict::kUniqueSlice) {
      EXPECT_TRUE(r.ncc.holds);
      EXPECT_GT(r.inf.value, 0.0);
      for (double t0 : r.slices) {
        EXPECT_LE(std::abs(eval_warp(spec.warp, t0).df), tol.root) << spec.name;
      }
    }
    if (r.verdict == Verdict::kNonExistence) {
      EXPECT_TRUE(r.critical.empty());
      const auto [lo, hi] = sample_range(spec.warp.domain());
      for (int k = 0; k <= 1000; ++k) {
        const WarpValues w = eval_warp(spec.warp, lo + (hi - lo) * k / 1000.0);
        EXPECT_GT(std::abs(w.log_slope()), tol.root) << spec.name;
      }
    }
  }
}

TEST(Catalog, ContainsStandardSpacetimes) {
  const auto cat = builtin_catalog();
  auto find = [&](const std::string& name) {
    return std::find_if(cat.begin(), cat.end(), [&](const auto& e) { return e.name == name; });
  };
  for (const char* name : {"Minkowski", "Example1", "Example2", "SteadyState", "EinsteinDeSitter", "Radiation"}) {
    EXPECT_NE(find(name), cat.end()) << name;
  }
  EXPECT_EQ(make_spacetime("SteadyState", 3).warp.domain(), IntervalDomain::real_line());
  EXPECT_THROW(make_spacetime("Radiation", 3, {{"a", 0.0}}), ParameterError);
  EXPECT_THROW(make_spacetime("Radiation", 3, {{"a", -1.0}}), ParameterError);
  EXPECT_THROW(make_spacetime("Example2", 3, {{"a", 0.0}}), ParameterError);
  EXPECT_THROW(make_spacetime("NoSuch", 3), ParameterError);
  EXPECT_THROW(make_spacetime("Example1", 1), ParameterError);
}

TEST(Classify, ConcurrentCallsAgreeWithSerial) {
  const auto spec = make_spacetime("Example2", 3, {{"a", 2.0}});
  const auto serial = classify(spec, spec.warp.domain());
  std::vector<ClassificationReport> results(4);
  {
    std::vector<std::jthread> pool;
    for (auto& slot : results) pool.emplace_back([&] { slot = classify(spec, spec.warp.domain()); });
  }
  for (const auto& r : results) {
    EXPECT_EQ(r.verdict, serial.verdict);
    EXPECT_EQ(r.inf.value, serial.inf.value);
    EXPECT_EQ(r.critical, serial.critical);
  }
}

}  // namespace
}  // namespace grwlab
