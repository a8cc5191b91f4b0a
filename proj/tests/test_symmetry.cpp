#include <gtest/gtest.h>

#include "bohrlat/symmetry.hpp"

using namespace bohrlat;

namespace {

Matrix hadamard() {
  Matrix h(2, 2);
  h << 1, 1, 1, -1;
  return h / std::sqrt(2.0);
}

Generator random_generator(int n, Rng& rng, bool anti) { return {random_unitary(n, rng), anti}; }

}  // namespace

TEST(HermitianBasis, OrthogonalAndSpanning) {
  for (int n = 1; n <= 4; ++n) {
    const auto basis = hermitian_basis(n);
    ASSERT_EQ(basis.size(), static_cast<std::size_t>(n * n));
    for (std::size_t i = 0; i < basis.size(); ++i) {
      EXPECT_TRUE(is_self_adjoint(basis[i], 1e-15));
      for (std::size_t j = i + 1; j < basis.size(); ++j) {
        EXPECT_NEAR(std::abs((basis[i] * basis[j]).trace()), 0.0, 1e-15);
      }
    }
  }
  Rng rng(1);
  const Matrix a = random_hermitian(3, rng);
  EXPECT_LE((LinearMapTable::identity(3).apply(a) - a).norm(), 1e-12);
}

TEST(Generator, ActionAndValidation) {
  Rng rng(2);
  const Generator g = random_generator(3, rng, true);
  const Matrix a = random_hermitian(3, rng);
  EXPECT_LE((g.act(a) - g.u * a.conjugate() * g.u.adjoint()).norm(), 1e-12);
  EXPECT_THROW((Generator{2.0 * identity(2), false}).validate(), PreconditionError);
  EXPECT_THROW(g.act(identity(2)), DimensionMismatch);
}

TEST(Jordan, GeneratorsInduceJordanMaps) {
  Rng rng(3);
  for (bool anti : {false, true}) {
    EXPECT_TRUE(is_jordan(jordan_from_generator(random_generator(3, rng, anti))));
  }
  // Doubling is linear but not unital.
  const auto twice = LinearMapTable::from_function(2, [](const Matrix& a) { return Matrix(2.0 * a); });
  EXPECT_FALSE(is_jordan(twice));
}

TEST(Jordan, ComplexificationIsMultiplicativeForUnitaries) {
  Rng rng(4);
  const Generator g = random_generator(3, rng, false);
  const auto j = jordan_from_generator(g);
  const Matrix x = random_gaussian_matrix(3, rng), y = random_gaussian_matrix(3, rng);
  EXPECT_LE((complexify(j, x * y) - complexify(j, x) * complexify(j, y)).norm(), 1e-10);
}

TEST(KadisonJordan, TracePairingDuality) {
  Rng rng(5);
  for (bool anti : {false, true}) {
    const Generator g = random_generator(3, rng, anti);
    const auto k = jordan_from_generator(g);
    const auto j = jordan_from_kadison(k);
    EXPECT_TRUE(kadison_jordan_duality_check(k, j, Tolerance::uniform(1e-10)));
    // Independent check of the adjoint on a density matrix and observable.
    const Matrix rho = random_with_spectrum({0.5, 0.3, 0.2}, rng);
    const Matrix a = random_hermitian(3, rng);
    EXPECT_NEAR((g.act(rho) * a).trace().real(), (rho * j.apply(a)).trace().real(), 1e-10);
  }
}

TEST(Wigner, PreservesTransitionProbabilities) {
  Rng rng(6);
  for (bool anti : {false, true}) {
    const Generator g = random_generator(4, rng, anti);
    for (int i = 0; i < 20; ++i) {
      const Matrix e = random_rank_one_projection(4, rng), f = random_rank_one_projection(4, rng);
      EXPECT_NEAR(transition_probability(wigner_apply(g, e), wigner_apply(g, f)),
                  transition_probability(e, f), 1e-10);
    }
  }
  EXPECT_THROW(wigner_apply(Generator::identity(2), identity(2)), PreconditionError);
}

TEST(Wigner, TraceNormIdentity) {
  Rng rng(7);
  for (int n = 2; n <= 6; ++n) {
    for (int i = 0; i < 50; ++i) {
      const Matrix e = random_rank_one_projection(n, rng), f = random_rank_one_projection(n, rng);
      EXPECT_NEAR(trace_norm(e - f), 2.0 * std::sqrt(1.0 - transition_probability(e, f)), 1e-10);
    }
  }
}

TEST(Kadison, DegenerateExpansionsAgree) {
  Rng rng(8);
  for (int i = 0; i < 30; ++i) {
    const int n = 3 + i % 3;
    std::vector<double> spec(n, 0.0);
    spec[0] = spec[1] = 0.35;
    spec[2] = 0.3;
    const auto rho = DensityMatrix::make(random_with_spectrum(spec, rng));
    const Generator g = random_generator(n, rng, i % 2 == 0);
    const Matrix k1 = kadison_from_wigner(wigner_of(g), random_eigen_expansion(rho, rng));
    const Matrix k2 = kadison_from_wigner(wigner_of(g), random_eigen_expansion(rho, rng));
    EXPECT_LE((k1 - k2).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((k1 - g.act(rho.matrix())).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Kadison, DensityMatrixValidation) {
  EXPECT_THROW(DensityMatrix::make(identity(2)), PreconditionError);
  EXPECT_THROW(DensityMatrix::make(diagonal({1.5, -0.5})), PreconditionError);
  EXPECT_THROW(DensityMatrix::make(matrix_unit(2, 0, 1)), PreconditionError);
  EXPECT_NO_THROW(DensityMatrix::make(0.5 * identity(2)));
}

TEST(Ludwig, ExtensionRecoversTheJordanMap) {
  Rng rng(9);
  const auto j = jordan_from_generator(random_generator(3, rng, true));
  const auto l = ludwig_restrict(j);
  for (int i = 0; i < 20; ++i) {
    const Matrix a = random_hermitian(3, rng);
    EXPECT_LE((jordan_from_ludwig(l, a) - j.apply(a)).norm(), 1e-10);
    EXPECT_LE((jordan_from_ludwig(l, a, {}, 3.0 * op_norm(a)) - j.apply(a)).norm(), 1e-10);
  }
  EXPECT_THROW(l(2.0 * identity(3)), PreconditionError);
  EXPECT_THROW(jordan_from_ludwig(l, random_hermitian(3, rng), {}, 1e-6), PreconditionError);
}

TEST(Ludwig, IdentityOnAnEffectReturnsIt) {
  Rng rng(10);
  const Matrix b = random_effect(3, rng);
  const EffectMap id = [](const Matrix& x) { return x; };
  EXPECT_LE((jordan_from_ludwig(id, b) - b).norm(), 1e-12);
}

TEST(VonNeumann, SpectralExtensionIsAdditiveForUnitaries) {
  Rng rng(11);
  const Generator g = random_generator(4, rng, false);
  for (int i = 0; i < 20; ++i) {
    const Matrix a = random_hermitian(4, rng), b = random_hermitian(4, rng);
    const auto n = projection_map_of(g);
    EXPECT_LE((vonneumann_extend(n, Matrix(a + b)) - vonneumann_extend(n, a) - vonneumann_extend(n, b))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-10);
  }
}

TEST(VonNeumann, TwistMapIsAnOrthoIsomorphismButNotAdditive) {
  const auto wild = qubit_twist_map(1.0);
  Rng rng(12);
  for (int i = 0; i < 50; ++i) {
    const Matrix p = random_rank_one_projection(2, rng);
    const Matrix wp = wild(p);
    EXPECT_TRUE(is_rank_one_projection(wp));
    EXPECT_LE((wild(Matrix(identity(2) - p)) - (identity(2) - wp)).norm(), 1e-12);
  }
  EXPECT_LE((wild(identity(2)) - identity(2)).norm(), 1e-15);
  Matrix sx(2, 2), sz(2, 2);
  sx << 0, 1, 1, 0;
  sz << 1, 0, 0, -1;
  const Matrix gap =
      vonneumann_extend(wild, Matrix(sx + sz)) - vonneumann_extend(wild, sx) - vonneumann_extend(wild, sz);
  EXPECT_GT(gap.cwiseAbs().maxCoeff(), 1e-3);
}

TEST(Bohr, JordanImageOfDiagonalIsConjugatedResolution) {
  Rng rng(13);
  const AlgebraShape s(std::vector<int>{3});
  const Generator g = random_generator(3, rng, false);
  const Resolution d = Resolution::diagonal(s);
  const Resolution image = bohr_from_jordan(jordan_from_generator(g), d);
  EXPECT_TRUE(same_subalgebra(image, d.conjugated(AlgebraElement(s, {g.u}))));
}

TEST(Phase, EquivalenceDetectsScalarMultiples) {
  Rng rng(14);
  const Generator g = random_generator(3, rng, false);
  const Complex z = std::polar(1.0, 0.7);
  const auto found = phase_equivalence(g, Generator{z * g.u, false});
  ASSERT_TRUE(found.has_value());
  EXPECT_NEAR(std::abs(*found - z), 0.0, 1e-12);
  EXPECT_FALSE(phase_equivalence(g, Generator{g.u, true}).has_value());
  EXPECT_FALSE(phase_equivalence(g, random_generator(3, rng, false)).has_value());
  const Generator h{hadamard(), false};
  EXPECT_TRUE(phase_equivalence(h, Generator{Complex(0, 1) * hadamard(), false}).has_value());
}

TEST(TransitionProbability, InfimumEstimateNeverUndercuts) {
  Rng rng(15);
  for (int i = 0; i < 30; ++i) {
    const int n = 2 + i % 3;
    const Matrix e = random_rank_one_projection(n, rng), f = random_rank_one_projection(n, rng);
    EXPECT_NEAR(tp_infimum_estimate(e, f, 30, i), (e * f).trace().real(), 1e-12);
    EXPECT_NEAR(tp_infimum_estimate(e, f, 0, i), (e * f).trace().real(), 0.0);
  }
  EXPECT_THROW(tp_infimum_estimate(identity(2), identity(2), 1, 0), PreconditionError);
}

TEST(MapTable, LookupByTolerance) {
  ProjectionMapTable t(1e-9);
  t.add(matrix_unit(2, 0, 0), matrix_unit(2, 1, 1));
  EXPECT_TRUE(t.find(matrix_unit(2, 0, 0) + 1e-12 * identity(2)).has_value());
  EXPECT_THROW(t(matrix_unit(2, 1, 1)), UndefinedInput);
  EXPECT_THROW(t.add(matrix_unit(2, 0, 0), identity(2)), PreconditionError);
}
