#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracles.hpp"

#include <random>

using namespace axmcf;

namespace {

// r = 1 everywhere and z zig-zags by h, so every chord has length h and
// |W_rho| = 1 on all elements.
PeriodicCurve<double> unit_zigzag(Index n)
{
    Points<double> p(n, 2);
    for (Index j = 0; j < n; ++j) {
        p(j, 0) = 1.0;
        p(j, 1) = (j % 2) / double(n);
    }
    return PeriodicCurve<double>(std::move(p));
}

}  // namespace

TEST_CASE("unit fixture gives the textbook periodic P1 matrices")
{
    const Index n = 4;
    const double h = 0.25;
    const auto c = unit_zigzag(n);
    const auto m = assemble_weighted_mass(c);
    const auto k = assemble_weighted_stiffness(c);
    const auto l = assemble_e1_load(c);
    for (Index j = 0; j < n; ++j) {
        CHECK(m.diag[j] == doctest::Approx(2 * h / 3).epsilon(1e-15));
        CHECK(m.sub[j] == doctest::Approx(h / 6).epsilon(1e-15));
        CHECK(m.sup[j] == doctest::Approx(h / 6).epsilon(1e-15));
        CHECK(k.diag[j] == doctest::Approx(2 / h).epsilon(1e-15));
        CHECK(k.sub[j] == doctest::Approx(-1 / h).epsilon(1e-15));
        CHECK(k.sup[j] == doctest::Approx(-1 / h).epsilon(1e-15));
        CHECK(l(j, 0) == doctest::Approx(h).epsilon(1e-15));
        CHECK(l(j, 1) == 0.0);
    }
}

TEST_CASE("J = 3 torus circle matches the dense quadrature oracle")
{
    const auto c = interpolate(init_torus_circle(0.5), 3);
    for (double lambda : {1.0, 2.0}) {
        Points<double> p = c.positions();
        p.col(0) *= lambda;
        const PeriodicCurve<double> w(p);
        const auto o = oracle::dense_terms(p, 3);
        CHECK(oracle::max_rel_diff(assemble_weighted_mass(w).dense(), o.mass) < 1e-14);
        CHECK(oracle::max_rel_diff(assemble_weighted_stiffness(w).dense(), o.stiffness) < 1e-14);
        CHECK(oracle::max_rel_diff(assemble_e1_load(w), o.e1_load) < 1e-14);
    }
}

TEST_CASE("scaling r by lambda scales the assembled entries by the integrand law")
{
    const auto c = interpolate(init_torus_circle(0.5), 5);
    Points<double> p = c.positions();
    p *= 2.0;  // W -> 2W: r doubles and |W_rho|^2 quadruples
    const PeriodicCurve<double> w(p);
    CHECK(oracle::max_rel_diff(assemble_weighted_mass(w).dense(),
                               8.0 * assemble_weighted_mass(c).dense()) < 1e-14);
    CHECK(oracle::max_rel_diff(assemble_weighted_stiffness(w).dense(),
                               2.0 * assemble_weighted_stiffness(c).dense()) < 1e-14);
    CHECK(oracle::max_rel_diff(assemble_e1_load(w), 4.0 * assemble_e1_load(c)) < 1e-14);
}

TEST_CASE("stiffness rows sum to zero and mass/stiffness are stored symmetric")
{
    std::mt19937_64 rng(5);
    for (Index n : {3, 4, 9, 30}) {
        const auto c = oracle::random_curve(rng, n);
        const auto k = assemble_weighted_stiffness(c);
        const auto m = assemble_weighted_mass(c);
        for (Index j = 0; j < n; ++j) {
            CHECK(std::abs(k.diag[j] + k.sub[j] + k.sup[j]) < 1e-12 * k.diag[j]);
            CHECK(k.sub[(j + 1) % n] == k.sup[j]);
            CHECK(m.sub[(j + 1) % n] == m.sup[j]);
            CHECK(m.diag[j] > std::abs(m.sub[j]) + std::abs(m.sup[j]));
        }
        const Eigen::MatrixXd kd = k.dense();
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kd);
        CHECK(es.eigenvalues().minCoeff() > -1e-12 * es.eigenvalues().maxCoeff());
        CHECK((kd * Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff() < 1e-12 * k.norm_inf());
    }
}

TEST_CASE("e1 load on equal chords")
{
    const Index n = 64;
    const auto c = interpolate(init_torus_circle(0.3), n);
    const double chord = c.edge_length(1);
    const auto l = assemble_e1_load(c);
    for (Index j = 0; j < n; ++j) {
        CHECK(l(j, 0) == doctest::Approx(chord * chord * double(n)).epsilon(1e-12));
    }
}

TEST_CASE("random triangles and small curves match the dense oracle")
{
    std::mt19937_64 rng(17);
    for (Index n : {3, 4, 5, 8}) {
        for (int trial = 0; trial < 10; ++trial) {
            const auto c = oracle::random_curve(rng, n);
            const auto o = oracle::dense_terms(c.positions(), 5);
            CHECK(oracle::max_rel_diff(assemble_weighted_mass(c).dense(), o.mass) < 1e-12);
            CHECK(oracle::max_rel_diff(assemble_weighted_stiffness(c).dense(), o.stiffness) <
                  1e-12);
            CHECK(oracle::max_rel_diff(assemble_e1_load(c), o.e1_load) < 1e-12);
        }
    }
}

TEST_CASE("assembly is equivariant under cyclic relabeling")
{
    std::mt19937_64 rng(23);
    const Index n = 11;
    const auto c = oracle::random_curve(rng, n);
    for (Index k : {1, 4, 10}) {
        const auto s = c.shifted(k);
        Eigen::PermutationMatrix<Eigen::Dynamic> perm(n);
        for (Index j = 0; j < n; ++j) {
            perm.indices()[j] = int((j + k) % n);
        }
        // row j of the shifted system is row j + k of the original.
        const Eigen::MatrixXd pm = perm.transpose() * assemble_weighted_mass(c).dense() * perm;
        const Eigen::MatrixXd pk =
            perm.transpose() * assemble_weighted_stiffness(c).dense() * perm;
        const Eigen::MatrixXd pl = perm.transpose() * assemble_e1_load(c);
        CHECK(oracle::max_rel_diff(assemble_weighted_mass(s).dense(), pm) == 0.0);
        CHECK(oracle::max_rel_diff(assemble_weighted_stiffness(s).dense(), pk) == 0.0);
        CHECK(oracle::max_rel_diff(assemble_e1_load(s), pl) == 0.0);
    }
}

TEST_CASE("inadmissible curves are rejected")
{
    Points<double> p(4, 2);
    p << 1, 0, -0.5, 1, 1, 2, 2, 1;
    const PeriodicCurve<double> c(p);
    CHECK_THROWS_AS(assemble_weighted_mass(c), std::domain_error);
    CHECK_THROWS_AS(assemble_weighted_stiffness(c), std::domain_error);
    CHECK_THROWS_AS(assemble_e1_load(c), std::domain_error);
}

TEST_CASE("source load")
{
    const Index n = 16;
    const double h = 1.0 / n;
    CHECK(assemble_source_load<double>({}, 0.0, n).isZero());
    SourceField<double> zero = [](double, double) { return Point<double>(0, 0); };
    CHECK(assemble_source_load(zero, 0.0, n).isZero());
    SourceField<double> unit = [](double, double) { return Point<double>(1, 0); };
    for (auto q : {SourceQuadrature::gauss3, SourceQuadrature::nodal}) {
        const auto l = assemble_source_load(unit, 0.0, n, q);
        for (Index j = 0; j < n; ++j) {
            CHECK(l(j, 0) == doctest::Approx(h).epsilon(1e-14));
            CHECK(l(j, 1) == 0.0);
        }
    }

    const auto f = manufactured_source<double>();
    const auto l = assemble_source_load(f, 0.0, 64);
    const auto ref = oracle::dense_source(f, 0.0, 64, 10);
    CHECK(oracle::max_rel_diff(l, ref) < 1e-8);
    // Same 3-point rule in the oracle reproduces the load to rounding.
    CHECK(oracle::max_rel_diff(l, oracle::dense_source(f, 0.0, 64, 3)) < 1e-13);
}
