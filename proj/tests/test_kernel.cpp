#include <doctest.h>

#include <Eigen/Dense>

#include "netkrr/kernel.hpp"
#include "netkrr/rng.hpp"
#include "oracles.hpp"

using namespace netkrr;

TEST_CASE("kernel_eval closed forms") {
    const Eigen::Vector2d x(1, 0), z(1, 1);
    CHECK(kernel_eval(KernelSpec::rbf(2.0), x, x) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(kernel_eval(KernelSpec::polynomial(2, 1.0), x, z) == doctest::Approx(4.0).epsilon(1e-15));
    CHECK(kernel_eval(KernelSpec::cosine(), Eigen::Vector2d(1, 0), Eigen::Vector2d(0, 1)) ==
          doctest::Approx(0.0).epsilon(1e-15));
    CHECK(kernel_eval(KernelSpec::laplace(1.0), Eigen::Vector2d(0, 0), Eigen::Vector2d(3, 4)) ==
          doctest::Approx(std::exp(-5.0)).epsilon(1e-14));
    CHECK(kernel_eval(KernelSpec::tangent(0.5, 0.25), x, z) ==
          doctest::Approx(std::tanh(0.75)).epsilon(1e-14));
}

TEST_CASE("kernel_eval error cases") {
    CHECK_THROWS_AS(kernel_eval(KernelSpec::rbf(1.0), Eigen::Vector2d(1, 0), Eigen::Vector3d(1, 0, 0)),
                    DimensionError);
    CHECK_THROWS_AS(kernel_eval(KernelSpec::cosine(), Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 0)),
                    ConfigError);
}

TEST_CASE("gram closed forms") {
    CHECK(gram(KernelSpec::rbf(1.0), Eigen::MatrixXd::Zero(1, 1))(0, 0) == 1.0);

    Eigen::MatrixXd x(2, 1);
    x << 0, 1;
    const Eigen::MatrixXd k = gram(KernelSpec::rbf(1.0), x);
    CHECK(k(0, 0) == doctest::Approx(1.0));
    CHECK(k(0, 1) == doctest::Approx(std::exp(-1.0)).epsilon(1e-15));
    CHECK(k(1, 0) == k(0, 1));
}

TEST_CASE("gram and cross_gram match the double-loop oracle for all families") {
    Rng rng(31);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 8, 3);
    const Eigen::MatrixXd z = oracles::random_matrix(rng, 5, 3);
    const KernelSpec specs[] = {KernelSpec::rbf(0.7), KernelSpec::laplace(0.5), KernelSpec::cosine(),
                                KernelSpec::polynomial(3, 0.5), KernelSpec::tangent(0.4, 0.1)};
    for (const KernelSpec& spec : specs) {
        const Eigen::MatrixXd k = gram(spec, x);
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.rows(); ++j) {
                CHECK(k(i, j) ==
                      doctest::Approx(oracles::kernel_value(spec, x.row(i), x.row(j))).epsilon(1e-12));
            }
        }
        const Eigen::MatrixXd c = cross_gram(spec, z, x);
        for (Eigen::Index i = 0; i < z.rows(); ++i) {
            for (Eigen::Index j = 0; j < x.rows(); ++j) {
                CHECK(c(i, j) ==
                      doctest::Approx(oracles::kernel_value(spec, z.row(i), x.row(j))).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("gram symmetry and bounded families") {
    Rng rng(37);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 12, 4);
    for (const KernelSpec& spec :
         {KernelSpec::rbf(0.9), KernelSpec::laplace(0.9), KernelSpec::cosine()}) {
        const Eigen::MatrixXd k = gram(spec, x);
        CHECK((k - k.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(k.maxCoeff() <= 1.0 + 1e-12);
        CHECK(k.minCoeff() >= -1.0 - 1e-12);
        CHECK((k.diagonal().array() - 1.0).abs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("rbf, laplace and even-degree polynomial grams are PSD") {
    Rng rng(41);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 15, 3);
    for (const KernelSpec& spec :
         {KernelSpec::rbf(0.8), KernelSpec::laplace(0.6), KernelSpec::polynomial(2, 1.0)}) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(spec, x));
        CHECK(es.eigenvalues().minCoeff() >= -1e-8 * static_cast<double>(x.rows()));
    }
}

TEST_CASE("cross_gram consistency with gram") {
    Rng rng(43);
    const Eigen::MatrixXd x = oracles::random_matrix(rng, 6, 2);
    const KernelSpec spec = KernelSpec::rbf(1.3);
    CHECK((cross_gram(spec, x, x) - gram(spec, x)).cwiseAbs().maxCoeff() <= 1e-15);

    // duplicated training row -> unit entry at its position
    Eigen::MatrixXd one_row = x.row(3);
    const Eigen::MatrixXd c = cross_gram(spec, one_row, x);
    CHECK(c(0, 3) == doctest::Approx(1.0).epsilon(1e-15));

    CHECK_THROWS_AS(cross_gram(spec, oracles::random_matrix(rng, 2, 3), x), DimensionError);
}

TEST_CASE("default gamma tracks the feature scale") {
    Rng rng(47);
    Eigen::MatrixXd x = oracles::random_matrix(rng, 50, 2);
    const double g1 = default_gamma(x);
    const double g2 = default_gamma(Eigen::MatrixXd(2.0 * x));
    CHECK(g2 == doctest::Approx(g1 / 4.0).epsilon(1e-12));
    CHECK(default_gamma(Eigen::MatrixXd::Zero(5, 2)) == 1.0);
}
