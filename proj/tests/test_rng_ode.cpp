// test_rng_ode.cpp — random stream reproducibility and integrator accuracy.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "oqs/ode.hpp"
#include "oqs/qstate.hpp"
#include "oqs/rng.hpp"

using namespace oqs;

TEST_CASE("rng streams are reproducible and stream-separated", "[rng]") {
    RngStream a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 1000; ++i) {
        const auto x = a.next_u64();
        REQUIRE(x == b.next_u64());
    }
    bool any_diff_stream = false, any_diff_seed = false;
    RngStream a2(42, 7);
    for (int i = 0; i < 64; ++i) {
        const auto x = a2.next_u64();
        if (x != c.next_u64()) any_diff_stream = true;
        if (x != d.next_u64()) any_diff_seed = true;
    }
    REQUIRE(any_diff_stream);
    REQUIRE(any_diff_seed);
}

TEST_CASE("rng uniform range and mean", "[rng]") {
    RngStream r(1234, 0);
    double sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = r.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    REQUIRE(sum / 100000.0 == Catch::Approx(0.5).margin(0.01));
}

TEST_CASE("dopri5 reproduces exponential decay", "[ode]") {
    auto rhs = [](double, const Vector& y, Vector& dy) { dy = -y; };
    Vector y0(1);
    y0(0) = 1.0;
    std::vector<double> grid;
    for (int i = 0; i <= 20; ++i) grid.push_back(0.25 * i);
    const auto out = integrate_at<Vector>(rhs, y0, grid);
    REQUIRE(out.size() == grid.size());
    REQUIRE(out.front()(0) == Complex(1.0, 0.0)); // first output is y0 itself
    for (std::size_t i = 0; i < grid.size(); ++i)
        REQUIRE(std::abs(out[i](0) - std::exp(-grid[i])) < 1e-9);
}

TEST_CASE("dopri5 oscillator with complex phase", "[ode]") {
    // y' = i w y  ->  y = exp(i w t)
    const double w = 3.0;
    auto rhs = [w](double, const Vector& y, Vector& dy) { dy = Complex(0, w) * y; };
    Vector y0(1);
    y0(0) = 1.0;
    std::vector<double> grid{0.0, 0.5, 1.5, 2.0, 5.0};
    const auto out = integrate_at<Vector>(rhs, y0, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
        REQUIRE(std::abs(out[i](0) - std::exp(Complex(0, w * grid[i]))) < 1e-8);
}

TEST_CASE("dopri5 dense output interpolates mid-step", "[ode]") {
    auto rhs = [](double, const Vector& y, Vector& dy) { dy = -y; };
    Vector y0(1);
    y0(0) = 1.0;
    Dopri5<Vector, decltype(rhs)> stepper(rhs, 0.0, y0);
    while (stepper.t() < 2.0) {
        stepper.advance(2.0);
        const auto& d = stepper.dense();
        for (double theta : {0.25, 0.5, 0.75}) {
            const double tm = d.t0 + theta * d.h;
            REQUIRE(std::abs(d.eval(tm)(0) - std::exp(-tm)) < 1e-9);
        }
    }
}

TEST_CASE("dopri5 works on matrix states", "[ode]") {
    // dY/dt = A Y with A = -i sigma_z; solution exp(-i sigma_z t)
    Matrix a(2, 2);
    a << Complex(0, -1), 0, 0, Complex(0, 1);
    auto rhs = [&](double, const Matrix& y, Matrix& dy) { dy.noalias() = a * y; };
    const Matrix y0 = Matrix::Identity(2, 2);
    const auto out = integrate_at<Matrix>(rhs, y0, {0.0, 1.0});
    Matrix expect = Matrix::Zero(2, 2);
    expect(0, 0) = std::exp(Complex(0, -1.0));
    expect(1, 1) = std::exp(Complex(0, 1.0));
    REQUIRE(max_abs(out.back() - expect) < 1e-9);
}

TEST_CASE("dopri5 rejects bad grids and reports blowup", "[ode]") {
    auto rhs = [](double, const Vector& y, Vector& dy) { dy = y.cwiseProduct(y); };
    Vector y0(1);
    y0(0) = 1.0;
    REQUIRE_THROWS_AS(integrate_at<Vector>(rhs, y0, {0.0, 0.5, 0.25}), ValidationError);
    // y' = y^2 from 1 blows up at t = 1
    REQUIRE_THROWS_AS(integrate_at<Vector>(rhs, y0, {0.0, 2.0}), NumericalError);
}
