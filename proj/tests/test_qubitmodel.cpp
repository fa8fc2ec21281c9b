#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "qsecure/behavior.hpp"
#include "qsecure/cert222.hpp"
#include "qsecure/qubitmodel.hpp"

using namespace qsecure;

namespace {

const double s2 = std::sqrt(2.0);

// Dense oracle: sum_{s,x} c(x|s) kron_i F_i(x_i|s_i), party 0 leftmost.
ComplexMatrix dense_bell_operator(const BellFunctional& f, const std::vector<double>& angles) {
    const auto& sc = f.scenario;
    const std::size_t dim = std::size_t{1} << sc.parties;
    ComplexMatrix c(dim, dim);
    std::vector<ProjectorSet> proj;
    for (double t : angles) proj.push_back(measurement_projectors(t));
    for (std::size_t s = 0; s < sc.setting_tuples(); ++s)
        for (std::size_t x = 0; x < sc.outcome_tuples(); ++x) {
            const double w = f.c[sc.index(s, x)];
            if (w == 0.0) continue;
            ComplexMatrix term = proj[0][sc.outcome_of(x, 0)][sc.setting_of(s, 0)];
            for (std::size_t i = 1; i < sc.parties; ++i)
                term = kron(term, proj[i][sc.outcome_of(x, i)][sc.setting_of(s, i)]);
            c += w * term;
        }
    return c;
}

std::vector<cplx> random_state(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<cplx> v(std::size_t{1} << n);
    for (auto& a : v) a = cplx(g(rng), g(rng));
    const double nv = norm2(v);
    for (auto& a : v) a /= nv;
    return v;
}

std::vector<double> random_angles(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, pi);
    std::vector<double> a(n);
    for (auto& t : a) t = u(rng);
    return a;
}

BellFunctional random_functional(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    const Scenario sc{n, 2, 2};
    std::vector<double> c(sc.table_size());
    for (auto& v : c) v = g(rng);
    return BellFunctional(sc, c, "random");
}

double operator_expectation(const ComplexMatrix& m, const std::vector<cplx>& psi) {
    const auto mv = m * psi;
    return inner(psi, mv).real();
}

} // namespace

TEST(Projectors, LawsOnSweep) {
    const ComplexMatrix id = ComplexMatrix::identity(2);
    for (int k = 0; k <= 1000; ++k) {
        const double t = pi * k / 1000.0;
        const auto f = measurement_projectors(t);
        for (std::size_t s = 0; s < 2; ++s) {
            for (std::size_t x = 0; x < 2; ++x) {
                EXPECT_LE((f[x][s] * f[x][s] - f[x][s]).max_abs(), 1e-12);
                EXPECT_LE((f[x][s].adjoint() - f[x][s]).max_abs(), 1e-12);
            }
            EXPECT_LE((f[0][s] + f[1][s] - id).max_abs(), 1e-12);
        }
    }
}

TEST(Projectors, Examples) {
    const ComplexMatrix up{{1, 0}, {0, 0}};
    const ComplexMatrix down{{0, 0}, {0, 1}};
    auto f0 = measurement_projectors(0.0);
    EXPECT_LE((f0[0][1] - up).max_abs(), 1e-15);
    EXPECT_LE((f0[0][0] - up).max_abs(), 1e-15);
    auto f1 = measurement_projectors(pi / 2);
    EXPECT_LE((f1[0][1] - ComplexMatrix{{0.5, 0.5}, {0.5, 0.5}}).max_abs(), 1e-15);
    auto f2 = measurement_projectors(pi);
    EXPECT_LE((f2[0][1] - down).max_abs(), 1e-15);
    EXPECT_LE((f2[0][1] - f2[1][0]).max_abs(), 1e-15);
    try {
        measurement_projectors(-0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::AngleOutOfRange);
    }
    EXPECT_THROW(measurement_projectors(pi + 0.01), Error);
}

TEST(BehaviorOf, DeterministicAtZeroAngles) {
    const auto b = behavior_of(QubitRepresentation({0.0, 0.0}, product_zero_state(2)));
    for (std::size_t s = 0; s < 4; ++s) EXPECT_NEAR(b(s, 0), 1.0, 1e-15);
    EXPECT_TRUE(validate(b).valid());
}

TEST(BehaviorOf, ChshPointReachesTwoSqrt2) {
    const auto b = behavior_of(representation_of(chsh_optimal_params()));
    EXPECT_NEAR(evaluate(chsh_functional(), b), 2 * s2, 1e-12);
}

TEST(BehaviorOf, ProductStateFactorizes) {
    std::mt19937_64 rng(42);
    for (std::size_t n = 1; n <= 4; ++n)
        EXPECT_TRUE(is_product(behavior_of(QubitRepresentation(random_angles(n, rng), product_zero_state(n)))));
}

TEST(BehaviorOf, MatchesDenseProjectorTrace) {
    std::mt19937_64 rng(42);
    for (std::size_t n = 1; n <= 3; ++n)
        for (int trial = 0; trial < 10; ++trial) {
            const auto angles = random_angles(n, rng);
            const auto psi = random_state(n, rng);
            const Behavior b = behavior_of(QubitRepresentation(angles, psi));
            const Scenario sc = b.scenario;
            for (std::size_t e = 0; e < sc.table_size(); ++e) {
                std::vector<double> c(sc.table_size(), 0.0);
                c[e] = 1.0;
                const auto op = dense_bell_operator(BellFunctional(sc, c), angles);
                EXPECT_NEAR(b.p[e], operator_expectation(op, psi), 1e-12);
            }
        }
}

TEST(BehaviorOf, AlwaysValid) {
    std::mt19937_64 rng(42);
    for (std::size_t n = 1; n <= 5; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            const auto r = validate(behavior_of(QubitRepresentation(random_angles(n, rng), random_state(n, rng))));
            EXPECT_LE(r.normalization_defect, 1e-9);
            EXPECT_LE(r.negativity_defect, 1e-9);
            EXPECT_LE(r.signaling_defect, 1e-9);
        }
}

TEST(BehaviorOf, MaximallyEntangledMarginalsVanish) {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> ux(0.0, pi);
    std::uniform_real_distribution<double> ut(0.01, pi - 0.01);
    for (int trial = 0; trial < 200; ++trial) {
        const RepParams222 rep{ux(rng), trial % 2 ? Sign::Plus : Sign::Minus, ut(rng), ut(rng)};
        const auto t = correlation_table(behavior_of(representation_of(rep)));
        for (double m : t.marginals_a) EXPECT_NEAR(m, 0.0, 1e-10);
        for (double m : t.marginals_b) EXPECT_NEAR(m, 0.0, 1e-10);
    }
}

TEST(Representation, Invariants) {
    EXPECT_THROW(QubitRepresentation({0.1}, {1.0, 1.0}), Error);
    EXPECT_THROW(QubitRepresentation({0.1, 4.0}, product_zero_state(2)), Error);
    try {
        QubitRepresentation({0.1}, {1.0, 0.0, 0.0, 0.0});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
    }
}

TEST(BellOperator, AgreesWithDenseOracle) {
    std::mt19937_64 rng(42);
    for (std::size_t n = 1; n <= 4; ++n)
        for (int trial = 0; trial < 5; ++trial) {
            const auto f = random_functional(n, rng);
            const auto angles = random_angles(n, rng);
            const RealMatrix fast = bell_operator(f, angles);
            EXPECT_LE((to_complex(fast) - dense_bell_operator(f, angles)).max_abs(), 1e-12);
            EXPECT_LE(hermitian_defect(fast), 1e-14);
        }
}

TEST(BellOperator, ExpectationEqualsEvaluate) {
    std::mt19937_64 rng(42);
    for (std::size_t n = 2; n <= 4; ++n)
        for (int trial = 0; trial < 20; ++trial) {
            const auto f = random_functional(n, rng);
            const auto angles = random_angles(n, rng);
            const auto psi = random_state(n, rng);
            EXPECT_NEAR(expectation(bell_operator(f, angles), psi),
                        evaluate(f, behavior_of(QubitRepresentation(angles, psi))), 1e-10);
        }
}

TEST(BellOperator, ChshTopEigenvalues) {
    EXPECT_NEAR(top_eigenpair(bell_operator(chsh_functional(), {pi / 2, pi / 2})).value, 2 * s2, 1e-12);
    EXPECT_NEAR(top_eigenpair(bell_operator(chsh_functional(), {0.0, 0.0})).value, 2.0, 1e-12);
    EXPECT_EQ(bell_operator(zero_functional({3, 2, 2}), {0.3, 0.2, 1.0}).max_abs(), 0.0);
    try {
        bell_operator(zero_functional({2, 3, 2}), {0.1, 0.2});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::ScenarioMismatch);
    }
}

TEST(QuantumMax, Chsh) {
    const auto r = quantum_max(chsh_functional());
    EXPECT_NEAR(r.value, 2 * s2, 1e-6);
    EXPECT_LE(r.value, 2 * s2 + 1e-6);
    EXPECT_NEAR(expectation(bell_operator(chsh_functional(), r.best.angles), r.best.psi), r.value, 1e-9);
    bool found = false;
    for (const auto& a : r.angle_optima) found = found || (std::abs(a[0] - pi / 2) < 1e-4 && std::abs(a[1] - pi / 2) < 1e-4);
    EXPECT_TRUE(found);
    EXPECT_TRUE(r.unique_flag);
}

TEST(QuantumMax, MerminThreeAgainstIndependentGrid) {
    // Oracle: dense projector construction on a 5-degree grid (contains 90 degrees).
    const auto f = mermin_functional(3);
    double oracle = -1e300;
    for (int a = 0; a <= 36; ++a)
        for (int b = 0; b <= 36; ++b)
            for (int c = 0; c <= 36; ++c) {
                const std::vector<double> t = {a * pi / 36, b * pi / 36, c * pi / 36};
                oracle = std::max(oracle, hermitian_eig(dense_bell_operator(f, t)).values.back());
            }
    EXPECT_NEAR(oracle, 4.0, 1e-9);
    const auto r = quantum_max(f);
    EXPECT_NEAR(r.value, oracle, 1e-6);
    EXPECT_GT(r.eigen_gap, 1e-6);
    EXPECT_TRUE(r.unique_flag);
    EXPECT_TRUE(r.face_point_unique);
}

TEST(QuantumMax, MerminFiveOnCoarseGrid) {
    MaximizationOptions opt;
    opt.grid_steps = 4;
    const auto r = quantum_max(mermin_functional(5), opt);
    EXPECT_NEAR(r.value, 16.0, 1e-6);
}

TEST(QuantumMax, ZeroFunctionalIsDegenerate) {
    const auto r = quantum_max(zero_functional({2, 2, 2}));
    EXPECT_EQ(r.value, 0.0);
    EXPECT_FALSE(r.unique_flag);
    EXPECT_FALSE(r.face_point_unique);
}

TEST(QuantumMax, DegenerateTopEigenspaceNotUnique) {
    // Constant coefficients: C(theta) = 4 * identity for every theta.
    const Scenario sc{2, 2, 2};
    const auto r = quantum_max(BellFunctional(sc, std::vector<double>(sc.table_size(), 1.0)));
    EXPECT_NEAR(r.value, 4.0, 1e-12);
    EXPECT_LE(r.eigen_gap, 1e-6);
    EXPECT_FALSE(r.unique_flag);
}

TEST(QuantumMax, SoundAgainstRandomRepresentations) {
    std::mt19937_64 rng(42);
    const auto f = chsh_functional();
    const double q = quantum_max(f).value;
    for (int trial = 0; trial < 500; ++trial) {
        const double v = evaluate(f, behavior_of(QubitRepresentation(random_angles(2, rng), random_state(2, rng))));
        EXPECT_LE(v, q + 1e-9);
    }
    const auto g = random_functional(2, rng);
    const double qg = quantum_max(g).value;
    for (int trial = 0; trial < 500; ++trial)
        EXPECT_LE(evaluate(g, behavior_of(QubitRepresentation(random_angles(2, rng), random_state(2, rng)))),
                  qg + 1e-9);
}

TEST(QuantumMax, Budget) {
    MaximizationOptions opt;
    opt.grid_steps = 1000;
    try {
        quantum_max(chsh_functional(), opt);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::BudgetExceeded);
    }
    EXPECT_EQ(default_grid_steps(3, 250'000), 60u);
    EXPECT_EQ(default_grid_steps(4, 250'000), 20u);
    EXPECT_EQ(default_grid_steps(5, 250'000), 12u);
}

TEST(Classify, Rules) {
    ClassificationEvidence ev;
    EXPECT_EQ(classify(ev).verdict, SecurityClass::Unknown);
    ev.classical = true;
    EXPECT_EQ(classify(ev).verdict, SecurityClass::Classical);

    ev.classical = false;
    EXPECT_EQ(classify(ev).verdict, SecurityClass::Unknown);
    ev.certificate_verified = true;
    EXPECT_EQ(classify(ev).verdict, SecurityClass::SecureCandidate);
    ev.even_rank = true;
    EXPECT_EQ(classify(ev).verdict, SecurityClass::AlgebraicallySecureCandidate);
    ev.even_rank = false;
    ev.unique_representation = true;
    EXPECT_EQ(classify(ev).verdict, SecurityClass::SecureCandidate);

    ClassificationEvidence face;
    face.classical = false;
    face.saturated_unique_face = true;
    EXPECT_EQ(classify(face).verdict, SecurityClass::SecureCandidate);
    face.unique_representation = true;
    EXPECT_EQ(classify(face).verdict, SecurityClass::AlgebraicallySecureCandidate);
    EXPECT_FALSE(classify(face).trail.empty());

    ClassificationEvidence uniq_only;
    uniq_only.classical = false;
    uniq_only.unique_representation = true;
    EXPECT_EQ(classify(uniq_only).verdict, SecurityClass::Unknown);
}
