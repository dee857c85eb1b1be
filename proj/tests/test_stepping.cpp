#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"

#include <random>

using namespace axmcf;

namespace {

StepperState<double> state_of(const PeriodicCurve<double>& cur,
                              std::optional<PeriodicCurve<double>> prev, double t, double dt)
{
    return {cur, std::move(prev), t, dt, 1};
}

// Small perturbation of c, used as X^{m-1}.
PeriodicCurve<double> jitter(std::mt19937_64& rng, const PeriodicCurve<double>& c, double eps)
{
    std::uniform_real_distribution<double> u(-eps, eps);
    Points<double> p = c.positions();
    for (Index j = 0; j < p.rows(); ++j) {
        p(j, 0) += u(rng);
        p(j, 1) += u(rng);
    }
    return PeriodicCurve<double>(std::move(p));
}

}  // namespace

TEST_CASE("manufactured forcing matches finite differences of the strong form")
{
    const auto x = manufactured_solution<double>();
    const auto f = manufactured_source<double>();
    // Nested central differences of r |x_rho|^2 x_t - (r x_rho)_rho + |x_rho|^2 e1.
    auto strong = [&](double rho, double t, double d) {
        auto xr = [&](double q) { return Point<double>((x(q + d, t) - x(q - d, t)) / (2 * d)); };
        auto flux = [&](double q) { return Point<double>(x(q, t)(0) * xr(q)); };
        const Point<double> xt = (x(rho, t + d) - x(rho, t - d)) / (2 * d);
        const double speed2 = xr(rho).squaredNorm();
        return Point<double>(x(rho, t)(0) * speed2 * xt - (flux(rho + d) - flux(rho - d)) / (2 * d) +
                             speed2 * Point<double>(1, 0));
    };
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    const double d = 5e-4;
    for (int i = 0; i < 100; ++i) {
        const double rho = u(rng);
        const double t = u(rng);
        // Richardson step removes the d^2 term of the central differences.
        const Point<double> fd = (4.0 * strong(rho, t, d) - strong(rho, t, 2 * d)) / 3.0;
        const Point<double> fc = f(rho, t);
        worst = std::max(worst, (fd - fc).norm() / fc.norm());
    }
    MESSAGE("worst relative deviation " << worst);
    CHECK(worst < 1e-6);
}

TEST_CASE("single steps agree with the dense oracle")
{
    std::mt19937_64 rng(7);
    const auto f = manufactured_source<double>();
    for (Index n : {3, 4, 5, 8}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto cur = oracle::random_curve(rng, n);
            const auto prev = jitter(rng, cur, 0.05);
            for (auto scheme : {SchemeKind::bdf1, SchemeKind::cn, SchemeKind::bdf2}) {
                for (bool forced : {false, true}) {
                    const SourceField<double> src = forced ? f : SourceField<double>{};
                    const auto s = state_of(cur, prev, 0.25, 1e-2);
                    StepOptions opt;
                    opt.verify_residual = true;
                    const auto res = step(scheme, s, src, opt);
                    REQUIRE(res.ok());
                    const auto ref = oracle::dense_step(scheme, cur.positions(), prev.positions(),
                                                        0.25, 1e-2, src);
                    CHECK(oracle::max_rel_diff(res.next.positions(), ref) < 1e-12);
                    CHECK(oracle::dense_residual(scheme, cur.positions(), prev.positions(),
                                                 res.next.positions(), 0.25, 1e-2, src) < 1e-12);
                    CHECK(res.residual < 1e-13);
                }
            }
        }
    }
}

TEST_CASE("J = 4 end-to-end step on the torus circle")
{
    const auto c = interpolate(init_torus_circle(0.5), 4);
    const auto s = state_of(c, c, 0.0, 1e-3);
    for (auto scheme : {SchemeKind::cn, SchemeKind::bdf2}) {
        const auto res = step(scheme, s);
        REQUIRE(res.ok());
        const auto ref = oracle::dense_step(scheme, c.positions(), c.positions(), 0.0, 1e-3);
        CHECK(oracle::max_rel_diff(res.next.positions(), ref) < 1e-12);
    }
}

TEST_CASE("steps commute with cyclic relabeling")
{
    std::mt19937_64 rng(13);
    const auto cur = oracle::random_curve(rng, 20);
    const auto prev = jitter(rng, cur, 0.02);
    for (auto scheme : {SchemeKind::bdf1, SchemeKind::cn, SchemeKind::bdf2}) {
        const auto base = step(scheme, state_of(cur, prev, 0.0, 5e-3));
        for (Index k : {1, 7}) {
            const auto sh = step(scheme, state_of(cur.shifted(k), prev.shifted(k), 0.0, 5e-3));
            REQUIRE(sh.ok());
            CHECK(oracle::max_rel_diff(sh.next.positions(), base.next.shifted(k).positions()) <
                  1e-12);
        }
    }
}

TEST_CASE("steps commute with the reflection z -> -z, rho -> -rho")
{
    std::mt19937_64 rng(19);
    for (Index n : {8, 9, 32}) {
        const auto sym = oracle::symmetric_curve(rng, n);
        const auto gen = oracle::random_curve(rng, n);
        for (auto scheme : {SchemeKind::bdf1, SchemeKind::cn, SchemeKind::bdf2}) {
            const auto a = step(scheme, state_of(sym, sym, 0.0, 1e-2));
            REQUIRE(a.ok());
            CHECK(oracle::max_rel_diff(a.next.positions(), a.next.reflected().positions()) <
                  1e-12);
            const auto prev = jitter(rng, gen, 0.02);
            const auto b = step(scheme, state_of(gen, prev, 0.0, 1e-2));
            const auto br = step(scheme, state_of(gen.reflected(), prev.reflected(), 0.0, 1e-2));
            CHECK(oracle::max_rel_diff(br.next.positions(), b.next.reflected().positions()) <
                  1e-12);
        }
    }
}

TEST_CASE("forcing enters linearly")
{
    std::mt19937_64 rng(23);
    const auto cur = oracle::random_curve(rng, 16);
    const auto prev = jitter(rng, cur, 0.02);
    const SourceField<double> f1 = manufactured_source<double>();
    const SourceField<double> f2 = [](double rho, double t) {
        return Point<double>(std::cos(2 * std::numbers::pi * rho) + t, 3.0);
    };
    const SourceField<double> f12 = [&](double rho, double t) {
        return Point<double>(f1(rho, t) + f2(rho, t));
    };
    const auto s = state_of(cur, prev, 0.1, 1e-2);
    for (auto scheme : {SchemeKind::cn, SchemeKind::bdf2}) {
        const auto x0 = step(scheme, s).next.positions();
        const auto x1 = step(scheme, s, f1).next.positions();
        const auto x2 = step(scheme, s, f2).next.positions();
        const auto x12 = step(scheme, s, f12).next.positions();
        CHECK(oracle::max_rel_diff(x12 - x0, (x1 - x0) + (x2 - x0)) < 1e-10);
    }
}

TEST_CASE("BDF1 pulls the inner side of a fat torus toward the axis")
{
    const auto c = interpolate(init_torus_circle(0.7), 128);
    const auto res = bdf1_step(state_of(c, std::nullopt, 0.0, 1e-3));
    REQUIRE(res.ok());
    CHECK(min_radial(res.next) < min_radial(c));
}

TEST_CASE("step argument errors")
{
    const auto c = interpolate(init_torus_circle(0.5), 16);
    CHECK_THROWS_AS(cn_step(state_of(c, std::nullopt, 0.0, 1e-3)), std::invalid_argument);
    CHECK_THROWS_AS(bdf2_step(state_of(c, interpolate(init_torus_circle(0.5), 17), 0.0, 1e-3)),
                    std::invalid_argument);
    CHECK_THROWS_AS(bdf1_step(state_of(c, std::nullopt, 0.0, 0.0)), std::invalid_argument);
}

TEST_CASE("extrapolated coefficient curve across the axis is reported")
{
    Points<double> p = interpolate(init_torus_circle(0.5), 16).positions();
    const PeriodicCurve<double> cur(p);
    p.col(0).array() += 1.0;
    const PeriodicCurve<double> prev(p);
    // 2 X - X_prev has min r = 0.5 - 1 < 0.
    const auto res = bdf2_step(state_of(cur, prev, 0.0, 1e-3));
    REQUIRE(res.failure);
    CHECK(*res.failure == StopKind::axis_touch);
    CHECK(res.failure_value == doctest::Approx(-0.5));
}

TEST_CASE("first BDF1 step is second-order accurate")
{
    const auto x = manufactured_solution<double>();
    const auto f = manufactured_source<double>();
    const Index n = 1024;
    const auto x0 = interpolate(x, n);
    std::vector<Index> inv{32, 64, 128, 256, 512};
    std::vector<double> err;
    for (Index k : inv) {
        const double dt = 1.0 / double(k);
        const auto res = bdf1_step(state_of(x0, std::nullopt, 0.0, dt), f);
        REQUIRE(res.ok());
        err.push_back(superconvergence_error(res.next, x, dt));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < inv.size(); ++i) {
        const double lx = std::log(double(inv[i])), ly = -std::log(err[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    const double nn = double(inv.size());
    const double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
    MESSAGE("first-step slope " << slope);
    CHECK(slope >= 1.9);
}

TEST_CASE("run loop")
{
    SUBCASE("T = 0 keeps only the interpolated initial curve")
    {
        RunConfig<double> cfg;
        cfg.J = 32;
        cfg.dt = 0.1;
        cfg.steps = 0;
        const auto rep = run(init_rose<double>(), cfg);
        CHECK(rep.reached_end());
        CHECK(rep.series.size() == 1);
        CHECK(rep.steps_taken == 0);
        CHECK(rep.final_curve == interpolate(init_rose<double>(), 32));
    }
    SUBCASE("steps_for")
    {
        CHECK(RunConfig<double>::steps_for(1.0, 1e-4) == 10000);
        CHECK(RunConfig<double>::steps_for(0.0, 0.5) == 0);
        CHECK_THROWS_AS(RunConfig<double>::steps_for(1.0, 0.3), std::invalid_argument);
        CHECK_THROWS_AS(RunConfig<double>::steps_for(1.0, 0.0), std::invalid_argument);
        CHECK_THROWS_AS(RunConfig<double>::steps_for(-1.0, 0.1), std::invalid_argument);
    }
    SUBCASE("manufactured run reaches T with small errors")
    {
        for (auto scheme : {SchemeKind::cn, SchemeKind::bdf2}) {
            RunConfig<double> cfg;
            cfg.scheme = scheme;
            cfg.J = 64;
            cfg.dt = 1e-2;
            cfg.steps = 100;
            cfg.source = manufactured_source<double>();
            cfg.exact = manufactured_solution<double>();
            cfg.step_options.verify_residual = true;
            Index calls = 0;
            const auto rep = run(*cfg.exact, cfg, {[&](Index m, double, const PeriodicCurve<double>&) {
                                     CHECK(m == calls);
                                     ++calls;
                                 }});
            CHECK(rep.reached_end());
            CHECK(rep.event.t == doctest::Approx(1.0));
            CHECK(calls == 101);
            CHECK(rep.series.size() == 101);
            CHECK(rep.max_l2() < 2e-2);
            CHECK(rep.max_residual < 1e-12);
        }
    }
    SUBCASE("fat torus touches the axis")
    {
        RunConfig<double> cfg;
        cfg.J = 128;
        cfg.dt = 1e-3;
        cfg.steps = 500;
        const auto rep = run(init_torus_circle(0.7), cfg);
        CHECK(rep.event.kind == StopKind::axis_touch);
        CHECK(rep.event.t == doctest::Approx(0.081).epsilon(0.1));
        CHECK(rep.event.value < 1e-3);
        CHECK(rep.steps_taken == rep.series.back().m);
    }
    SUBCASE("runs are bitwise reproducible")
    {
        RunConfig<double> cfg;
        cfg.scheme = SchemeKind::bdf2;
        cfg.J = 96;
        cfg.dt = 1e-3;
        cfg.steps = 200;
        const auto a = run(init_rose<double>(), cfg);
        const auto b = run(init_rose<double>(), cfg);
        CHECK(a.final_curve == b.final_curve);
    }
    SUBCASE("mismatched J is rejected")
    {
        RunConfig<double> cfg;
        cfg.J = 10;
        cfg.steps = 1;
        CHECK_THROWS_AS(run(interpolate(init_rose<double>(), 12), cfg), std::invalid_argument);
    }
}
