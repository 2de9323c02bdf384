#include "lomac/driver.hpp"
#include "lomac/errors.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace lomac;

namespace {

constexpr double kPi = std::numbers::pi;

double max_moment_gap(const Level& level, const Discretization& d) {
  const Moments1D m = moments(level.f, d.v1);
  const ElectricField e = solve_poisson(level.macro.rho, d.x1);
  const Vector kappa = recover_kappa(level.macro, e);
  return std::max({(m.rho - level.macro.rho).cwiseAbs().maxCoeff(),
                   (m.j - level.macro.j1).cwiseAbs().maxCoeff(),
                   (m.kappa - kappa).cwiseAbs().maxCoeff()});
}

}  // namespace

TEST_CASE("preset initial data") {
  SUBCASE("weak Landau is rank two") {
    const auto c = preset_config(Preset::weak_landau_1d);
    const auto d = make_discretization(c);
    const auto f = initial_1d(Preset::weak_landau_1d, c.params, d.x1, d.v1);
    // Two stored terms; the function itself is a single product.
    CHECK(f.rank() == 2);
    CHECK(recompress(f, 1e-14).rank() == 1);
    CHECK(d.x1.length() == doctest::Approx(4 * kPi));
    const Matrix dense = f.dense();
    const double x = d.x1.node(5), v = d.v1.nodes[40];
    CHECK(dense(5, 40) == doctest::Approx((1 + 0.01 * std::cos(0.5 * x)) *
                                          std::exp(-v * v / 2) / std::sqrt(2 * kPi))
                              .epsilon(1e-14));
  }
  SUBCASE("bump on tail") {
    const auto c = preset_config(Preset::bump_on_tail);
    CHECK(c.beta == 3.0);
    const auto d = make_discretization(c);
    const Matrix dense = initial_1d(Preset::bump_on_tail, c.params, d.x1, d.v1).dense();
    const double np = 9.0 / (10 * std::sqrt(2 * kPi)), nb = 2.0 / (10 * std::sqrt(2 * kPi));
    for (Eigen::Index j : {10, 128, 200, 240}) {
      const double v = d.v1.nodes[j];
      const double x = d.x1.node(7);
      const double profile =
          np * std::exp(-v * v / 2) + nb * std::exp(-(v - 4.5) * (v - 4.5) / (2 * 0.5));
      CHECK(dense(7, j) == doctest::Approx((1 + 0.04 * std::cos(0.3 * x)) * profile).epsilon(1e-13));
    }
  }
  SUBCASE("two stream") {
    const auto c = preset_config(Preset::two_stream_2d2v);
    CHECK(c.params.v0 == 2.4);
    CHECK(c.params.k == 0.2);
    CHECK(c.params.alpha == 0.001);
    const auto d = make_discretization(c);
    const auto g = initial_2d(Preset::two_stream_2d2v, c.params, d.x1, d.x2, d.v1, d.v2);
    const auto t = ht_truncate(g, 1e-13 * g.dense().norm());
    CHECK(t.r3() <= 2);
    CHECK(t.r4() <= 2);
    const Matrix dense = g.dense();
    const auto m = [&](double v) {
      return (std::exp(-(v - 2.4) * (v - 2.4) / 2) + std::exp(-(v + 2.4) * (v + 2.4) / 2)) /
             (2 * std::sqrt(2 * kPi));
    };
    const std::size_t i1 = 3, i2 = 9, j3 = 20, j4 = 45;
    const double x1 = d.x1.node(i1), x2 = d.x2.node(i2);
    const double expect = (1 + 0.001 * (std::cos(0.2 * x1) + std::cos(0.2 * x2))) *
                          m(d.v1.nodes[j3]) * m(d.v2.nodes[j4]);
    CHECK(dense(i1 + c.nx * i2, j3 + c.nv * j4) == doctest::Approx(expect).epsilon(1e-13));
  }
  SUBCASE("names") {
    for (Preset p : {Preset::forced, Preset::weak_landau_1d, Preset::strong_landau_1d,
                     Preset::bump_on_tail, Preset::weak_landau_2d2v, Preset::two_stream_2d2v})
      CHECK(parse_preset(preset_name(p)) == p);
    CHECK_THROWS_AS(parse_preset("landau"), ConfigError);
    CHECK(parse_variant("III") == Variant::lomac);
    CHECK_THROWS_AS(parse_variant("IV"), ConfigError);
  }
}

TEST_CASE("configuration validation") {
  SolverConfig c = preset_config(Preset::weak_landau_1d);
  CHECK_NOTHROW(c.validate());
  c.cfl = 1.5;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = preset_config(Preset::weak_landau_1d);
  c.dims = 2;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = preset_config(Preset::weak_landau_1d);
  c.nx = 4;
  CHECK_THROWS_AS(Solver{c}, ConfigError);
}

TEST_CASE("time step selection") {
  const auto x = make_spatial_grid(64, 0.0, 4 * kPi);
  const auto v = make_velocity_grid(129, 6.0);
  ElectricField none;
  none.e1 = Vector::Zero(64);
  CHECK(select_dt_1d(none, x, v, 0.3) == doctest::Approx(0.3 * x.h / 6.0).epsilon(1e-15));
  CHECK(select_dt_1d(none, x, v, 0.6) == doctest::Approx(2 * select_dt_1d(none, x, v, 0.3)));
  ElectricField e = none;
  e.e1[3] = -2.0;
  CHECK(select_dt_1d(e, x, v, 0.3) ==
        doctest::Approx(0.3 / (6.0 / x.h + 2.0 / v.h)).epsilon(1e-15));
  ElectricField e2;
  e2.dims = 2;
  e2.e1 = Vector::Constant(64, 0.5);
  e2.e2 = Vector::Constant(64, -1.5);
  const auto y = make_spatial_grid(8, 0.0, 1.0);
  CHECK(select_dt_2d(e2, y, y, v, v, 0.3) ==
        doctest::Approx(0.3 / (12.0 / y.h + 2.0 / v.h)).epsilon(1e-15));

  Solver s(preset_config(Preset::weak_landau_1d));
  const double dt = s.next_dt();
  CHECK(dt == doctest::Approx(0.3 / (6.0 / (4 * kPi / 64) + s.field().max_abs(1) / (12.0 / 128)))
                  .epsilon(1e-14));
  CHECK(dt < 0.3 * (4 * kPi / 64) / 6.0);
}

TEST_CASE("stepping") {
  SUBCASE("the last step lands on the end time") {
    SolverConfig c = preset_config(Preset::weak_landau_1d);
    c.t_end = 0.37;
    Solver s(c);
    while (!s.finished()) s.step();
    CHECK(s.time() == doctest::Approx(0.37).epsilon(1e-14));
    CHECK(s.history().levels.size() == 3);
  }
  SUBCASE("forced startup is second order") {
    auto startup_error = [](double dt) {
      SolverConfig c = preset_config(Preset::forced);
      c.nx = 128;
      c.nv = 256;
      c.dt = dt;
      c.t_end = 2 * dt;
      c.eps = 1e-9;
      Solver s(c);
      s.step();
      s.step();
      return forced::error(s.current().f, s.discretization().x1, s.discretization().v1, s.time())
          .linf;
    };
    // Two steps to a fixed time; local error O(dt^3) per step.
    const double e1 = startup_error(0.02), e2 = startup_error(0.01);
    CHECK(std::log2(e1 / e2) > 2.5);
  }
  SUBCASE("forced rank after startup") {
    Solver s(preset_config(Preset::forced));
    s.step();
    s.step();
    CHECK(s.current().f.rank() == 4);
  }
  SUBCASE("variant III kinetic moments follow the macro solver") {
    for (Preset p : {Preset::weak_landau_1d, Preset::forced, Preset::bump_on_tail}) {
      SolverConfig c = preset_config(p);
      c.nx = 32;
      c.nv = 64;
      Solver s(c);
      double scale = moments(s.current().f, s.discretization().v1).rho.cwiseAbs().maxCoeff();
      for (int k = 0; k < 5; ++k) {
        s.step();
        CHECK(max_moment_gap(s.current(), s.discretization()) < 1e-12 * scale);
      }
    }
  }
  SUBCASE("conservation holds during startup") {
    SolverConfig c = preset_config(Preset::weak_landau_1d);
    c.t_end = 1.0;
    const auto series = run(c);
    const auto& first = series.rows.front();
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& r = series.rows[k];
      CHECK(std::abs(r.mass - first.mass) <= 1e-11 * first.mass);
      CHECK(std::abs(r.momentum[0]) <= 1e-10);
      CHECK(std::abs(r.energy - first.energy) <= 1e-10 * first.energy);
    }
  }
  SUBCASE("variant II conserves mass and momentum") {
    SolverConfig c = preset_config(Preset::weak_landau_1d);
    c.variant = Variant::conservative;
    c.t_end = 1.0;
    // At v_max = 6 the Maxwellian tail leaks about 1e-11 through the velocity edge.
    c.v_max = 8.0;
    const auto series = run(c);
    for (const auto& r : series.rows) {
      CHECK(std::abs(r.mass - series.rows.front().mass) <= 1e-11 * r.mass);
      CHECK(std::abs(r.momentum[0]) <= 1e-10);
    }
  }
  SUBCASE("2D variant III moments follow the macro solver") {
    SolverConfig c = preset_config(Preset::weak_landau_2d2v);
    c.nx = 8;
    c.nv = 16;
    Solver s(c);
    for (int k = 0; k < 3; ++k) s.step();
    const auto& d = s.discretization();
    const Moments2D m = ht_moments(s.current().g, d.v1, d.v2);
    const auto& u = s.current().macro;
    const double scale = u.rho.cwiseAbs().maxCoeff();
    CHECK((m.rho - u.rho).cwiseAbs().maxCoeff() < 1e-12 * scale);
    CHECK((m.j1 - u.j1).cwiseAbs().maxCoeff() < 1e-12 * scale);
    CHECK((m.j2 - u.j2).cwiseAbs().maxCoeff() < 1e-12 * scale);
    const Vector kappa = recover_kappa(u, solve_poisson(u.rho, d.x1, d.x2));
    CHECK((m.kappa - kappa).cwiseAbs().maxCoeff() < 1e-12 * scale);
  }
  SUBCASE("invalid step") {
    Solver s(preset_config(Preset::weak_landau_1d));
    CHECK_THROWS_AS(s.advance(0.0), DomainError);
  }
}

TEST_CASE("runs") {
  SUBCASE("end time zero records the initial state only") {
    SolverConfig c = preset_config(Preset::strong_landau_1d);
    c.t_end = 0.0;
    const auto series = run(c);
    REQUIRE(series.rows.size() == 1);
    CHECK(series.rows.front().t == 0.0);
  }
  SUBCASE("determinism") {
    SolverConfig c = preset_config(Preset::bump_on_tail);
    c.nx = 32;
    c.nv = 64;
    c.t_end = 1.0;
    const auto a = run(c), b = run(c);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t k = 0; k < a.rows.size(); ++k) {
      CHECK(a.rows[k].t == b.rows[k].t);
      CHECK(a.rows[k].ranks == b.rows[k].ranks);
      CHECK(a.rows[k].mass == b.rows[k].mass);
      CHECK(a.rows[k].momentum == b.rows[k].momentum);
      CHECK(a.rows[k].energy == b.rows[k].energy);
    }
  }
  SUBCASE("output cadence") {
    SolverConfig c = preset_config(Preset::weak_landau_1d);
    c.dt = 0.1;
    c.t_end = 1.0;
    c.output_every = 3;
    std::size_t steps = 0;
    const auto series = run(c, RunHooks{[&](const Solver&) { ++steps; }});
    CHECK(steps == 10);
    // Initial row, every third step, and the final state.
    CHECK(series.rows.size() == 1 + 3 + 1);
    CHECK(series.rows.back().t == doctest::Approx(1.0));
  }
  SUBCASE("rank cap aborts") {
    SolverConfig c = preset_config(Preset::strong_landau_1d);
    c.rank_cap = 3;
    CHECK_THROWS_AS(run(c), RankError);
  }
}
