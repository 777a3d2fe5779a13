#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include "granular/collision.hpp"
#include "granular/diagnostics.hpp"

using namespace granular;

namespace {

double rel_l2(std::span<const cplx> a, std::span<const cplx> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

// Nonnegative field supported in B_S with random cell values.
std::vector<cplx> random_coeffs(const GridSpec& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  DistributionField f(g);
  auto v = f.values();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto idx = unflatten(i, g.d, g.n);
    double r2 = 0.0;
    for (int a = 0; a < g.d; ++a) r2 += g.node(idx[a]) * g.node(idx[a]);
    v[i] = r2 <= g.s * g.s ? u(rng) : 0.0;
  }
  to_spectral(f);
  return {f.coeffs().begin(), f.coeffs().end()};
}

std::vector<double> to_values(const GridSpec& g, std::span<const cplx> c) {
  SpectralTransform t(g);
  AlignedVector<cplx> w(c.begin(), c.end());
  t.backward_in_place(w);
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) out[i] = w[i].real();
  return out;
}

struct Tables {
  LossTable loss;
  GainTensor gain;
};

Tables build(const CollisionModel& m) { return {precompute_loss(m), precompute_gain(m)}; }

}  // namespace

TEST(PrecomputeLoss, MaxwellZeroModeIsDiscArea) {
  const auto g = make_grid(2, 16, 10.0);
  const auto m = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.95}, 16, 16);
  const auto loss = precompute_loss(m);
  EXPECT_NEAR(loss.values[0].real() / (400.0 * std::numbers::pi), 1.0, 1e-6);
  EXPECT_NEAR(loss.values[0].imag(), 0.0, 1e-9);
}

TEST(PrecomputeLoss, HardSphereZeroMode) {
  const auto g = make_grid(2, 16, 10.0);
  const auto m = make_collision_model(g, KernelSpec::hard_spheres_2d(), ConstantRestitution{0.95}, 16, 16);
  const auto loss = precompute_loss(m);
  EXPECT_NEAR(loss.values[0].real() / (2.0 * std::numbers::pi * 8000.0 / 3.0), 1.0, 1e-6);
}

TEST(PrecomputeLoss, Hermitian) {
  for (int d : {2, 3}) {
    const auto g = make_grid(d, 8, 1.0);
    const auto m = make_collision_model(g, KernelSpec{0.5, 0.3, 0.0}, ConstantRestitution{0.5}, 8, d == 2 ? 16 : 12);
    const auto loss = precompute_loss(m);
    double scale = std::abs(loss.values[0]);
    for (std::size_t k = 0; k < g.size(); ++k) {
      const std::size_t mk = conjugate_index(k, d, g.n);
      const int nyq = g.n / 2;
      const auto idx = unflatten(k, d, g.n);
      bool has_nyquist = false;
      for (int a = 0; a < d; ++a) has_nyquist |= idx[a] == nyq;
      if (has_nyquist) continue;  // -(-N/2) is outside the mode set
      EXPECT_LE(std::abs(loss.values[mk] - std::conj(loss.values[k])), 1e-14 * scale);
    }
  }
}

TEST(PrecomputeGain, ZeroFrequencyIdentity) {
  for (int d : {2, 3}) {
    const auto g = make_grid(d, 8, 2.0);
    const KernelSpec k = d == 2 ? KernelSpec::hard_spheres_2d() : KernelSpec::hard_spheres_3d();
    const auto m = make_collision_model(g, k, TanhRestitution{0.3}, 6, d == 2 ? 16 : 32);
    const auto gain = precompute_gain(m);
    for (std::size_t j = 0; j < gain.radial_size(); ++j) {
      const double want = kernel_amplitude(k, m.radial.nodes[j]) * sphere_area(d);
      for (std::size_t a = 0; a < gain.angular_size(); ++a) {
        EXPECT_NEAR(std::abs(gain.at(0, j, a) - want) / want, 0.0, 1e-12);
      }
    }
  }
}

TEST(PrecomputeGain, ElasticDiagonalReconstructsLoss) {
  const auto g = make_grid(2, 16, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{1.0}, 16, 16);
  const auto t = build(model);
  for (std::size_t l = 0; l < g.size(); ++l) {
    const std::size_t m = conjugate_index(l, 2, g.n);
    // G_gain(l, -l) - G_loss(-l): the reconstructed full weight
    EXPECT_LE(std::abs(reconstruct_weight(t.gain, t.loss, l, m)), 1e-8);
  }
}

TEST(PrecomputeGain, MemoryEstimate) {
  const auto big = make_grid(3, 32, 4.0, {.r = 8.0});
  EXPECT_EQ(gain_tensor_entries(big, 30, 32), 31457280u);
  EXPECT_DOUBLE_EQ(gain_tensor_bytes(big, 30, 32), 503316480.0);

  const auto g = make_grid(2, 8, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.5}, 4, 8);
  std::vector<std::string> messages;
  PrecomputeOptions opts;
  opts.report = [&](const std::string& s) { messages.push_back(s); };
  precompute_gain(model, opts);
  ASSERT_EQ(messages.size(), 1u);
  EXPECT_NE(messages[0].find("2048 complex entries"), std::string::npos) << messages[0];
}

TEST(PrecomputeGain, SpillsToMappedFileAboveBudget) {
  const auto g = make_grid(2, 8, 1.0);
  const auto model = make_collision_model(g, KernelSpec::hard_spheres_2d(), ConstantRestitution{0.7}, 5, 8);
  const auto heap = precompute_gain(model);
  PrecomputeOptions opts;
  opts.memory_budget_bytes = 1024;
  const auto mapped = precompute_gain(model, opts);
  EXPECT_FALSE(heap.is_mapped());
  EXPECT_TRUE(mapped.is_mapped());
  ASSERT_EQ(heap.data().size(), mapped.data().size());
  for (std::size_t i = 0; i < heap.data().size(); ++i) EXPECT_EQ(heap.data()[i], mapped.data()[i]);
}

TEST(PrecomputeGain, DeterministicAcrossWorkerCounts) {
  const auto g = make_grid(2, 16, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), TanhRestitution{0.5}, 8, 16);
  PrecomputeOptions one, four;
  one.workers = 1;
  four.workers = 4;
  const auto a = precompute_gain(model, one);
  const auto b = precompute_gain(model, four);
  for (std::size_t i = 0; i < a.data().size(); ++i) ASSERT_EQ(a.data()[i], b.data()[i]);
}

TEST(PrecomputeDirect, VanishesOnAntiDiagonal) {
  const auto g = make_grid(2, 8, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.5}, 8, 16);
  const auto w = precompute_direct(model);
  EXPECT_EQ(w.at(0, 0), cplx{});
  for (std::size_t l = 0; l < g.size(); ++l) EXPECT_EQ(w.at(l, conjugate_index(l, 2, g.n)), cplx{});
}

TEST(PrecomputeDirect, MatchesReconstructionFromFastTables) {
  const auto g = make_grid(2, 16, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.95}, 16, 16);
  const auto w = precompute_direct(model);
  const auto t = build(model);
  double worst = 0.0;
  for (std::size_t l = 0; l < g.size(); ++l)
    for (std::size_t m = 0; m < g.size(); ++m)
      worst = std::max(worst, std::abs(w.at(l, m) - reconstruct_weight(t.gain, t.loss, l, m)));
  EXPECT_LE(worst, 1e-8);
}

TEST(PrecomputeDirect, MemoryBudget) {
  const auto g = make_grid(3, 32, 4.0, {.r = 8.0});
  const auto model = make_collision_model(g, KernelSpec::hard_spheres_3d(), ConstantRestitution{0.5}, 4, 12);
  try {
    precompute_direct(model);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MemoryBudgetExceeded);
  }
}

TEST(EvalDirect, ZeroAndMassAndSingleMode) {
  const auto g = make_grid(2, 8, 1.0);
  const auto model = make_collision_model(g, KernelSpec::hard_spheres_2d(), ConstantRestitution{0.5}, 8, 16);
  const auto w = precompute_direct(model);
  std::vector<cplx> zero(g.size());
  for (const auto& q : eval_direct(w, zero)) EXPECT_EQ(q, cplx{});

  const auto f = random_coeffs(g, 11);
  EXPECT_LE(std::abs(eval_direct(w, f)[0]), 1e-13);

  std::vector<cplx> single(g.size());
  const std::array<int, 3> p{1, 2, 0};
  const std::size_t pi = 1 * 8 + 2;
  single[pi] = 1.0;
  const auto q = eval_direct(w, single);
  const std::size_t two_p = detail::wrap_add(p, p, 2, 8);
  EXPECT_EQ(q[two_p], w.at(pi, pi));
  for (std::size_t k = 0; k < q.size(); ++k)
    if (k != two_p) EXPECT_EQ(q[k], cplx{});
}

TEST(EvalDirect, GridMismatch) {
  const auto g = make_grid(2, 8, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.5}, 4, 8);
  const auto w = precompute_direct(model);
  std::vector<cplx> wrong(10);
  EXPECT_THROW(eval_direct(w, wrong), Error);
}

TEST(EvalFast, ZeroInZeroOut) {
  const auto g = make_grid(2, 8, 1.0);
  const auto t = build(make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.5}, 8, 16));
  std::vector<cplx> zero(g.size());
  for (const auto& q : eval_fast(t.gain, t.loss, zero)) EXPECT_EQ(q, cplx{});
}

TEST(EvalFast, MatchesDirectMaxwell) {
  const auto g = make_grid(2, 16, 1.0);
  const auto model = make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.95}, 32, 16);
  const auto w = precompute_direct(model);
  const auto t = build(model);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto f = random_coeffs(g, seed);
    const auto qd = eval_direct(w, f);
    const auto qf = eval_fast(t.gain, t.loss, f);
    EXPECT_LE(rel_l2(qf, qd), 1e-8) << "seed " << seed;
    EXPECT_LE(std::abs(qf[0]), 1e-13);
  }
}

TEST(EvalFast, MatchesDirectOtherKernelsAndRestitutions) {
  struct Case {
    int d;
    KernelSpec kernel;
    RestitutionModel e;
    int m;
  };
  const Case cases[] = {
      {2, KernelSpec::hard_spheres_2d(), TanhRestitution{0.3}, 16},
      {2, KernelSpec{0.5, 0.2, 0.0}, ViscoelasticRestitution{0.2}, 12},
      {3, KernelSpec::hard_spheres_3d(), ConstantRestitution{0.5}, 12},
      {3, KernelSpec::hard_spheres_3d(), ToscaniRestitution{0.1, 1.0}, 32},
  };
  for (const auto& c : cases) {
    const auto g = make_grid(c.d, 8, 1.0);
    const auto model = make_collision_model(g, c.kernel, c.e, 8, c.m);
    const auto w = precompute_direct(model);
    const auto t = build(model);
    const auto f = random_coeffs(g, 99);
    EXPECT_LE(rel_l2(eval_fast(t.gain, t.loss, f), eval_direct(w, f)), 1e-8) << "d=" << c.d;
  }
}

TEST(EvalFast, EnergyFactor) {
  const auto g = make_grid(2, 8, 1.0);
  KernelSpec k = KernelSpec::maxwell_2d();
  k.gamma = 0.5;
  const auto t = build(make_collision_model(g, k, ConstantRestitution{0.5}, 8, 16));
  const auto f = random_coeffs(g, 5);
  try {
    eval_fast(t.gain, t.loss, f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::MissingEnergy);
  }
  const auto q1 = eval_fast(t.gain, t.loss, f, 1.0);
  const auto q4 = eval_fast(t.gain, t.loss, f, 4.0);
  for (std::size_t i = 0; i < q1.size(); ++i) EXPECT_NEAR(std::abs(q4[i] - 2.0 * q1[i]), 0.0, 1e-14 * (1 + std::abs(q4[i])));
}

TEST(EvalFast, GridMismatch) {
  const auto g = make_grid(2, 8, 1.0);
  const auto t8 = build(make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{0.5}, 4, 8));
  const auto g2 = make_grid(2, 8, 1.5);
  const auto loss2 = precompute_loss(make_collision_model(g2, KernelSpec::maxwell_2d(), ConstantRestitution{0.5}, 4, 8));
  std::vector<cplx> f(g.size());
  EXPECT_THROW(eval_fast(t8.gain, loss2, f), Error);
  std::vector<cplx> wrong(3);
  EXPECT_THROW(eval_fast(t8.gain, t8.loss, wrong), Error);
}

TEST(EvalFast, DeterministicAcrossWorkerCounts) {
  const auto g = make_grid(2, 16, 1.0);
  const auto model = make_collision_model(g, KernelSpec::hard_spheres_2d(), ConstantRestitution{0.5}, 16, 16);
  auto gain = std::make_shared<const GainTensor>(precompute_gain(model));
  auto loss = std::make_shared<const LossTable>(precompute_loss(model));
  const auto f = random_coeffs(g, 3);
  const auto a = FastCollisionOperator(gain, loss, 1)(f);
  const auto b = FastCollisionOperator(gain, loss, 3)(f);
  for (std::size_t i = 0; i < a.size(); ++i) ASSERT_EQ(a[i], b[i]);
}

// A well-resolved Maxwellian: f(S) / f(0) ~ 1e-8, spectrum decays to 1e-13.
class ResolvedMaxwellian : public ::testing::Test {
 protected:
  GridSpec g = make_grid(2, 64, 6.0);
  DistributionField field = build_initial(Maxwellian2D{1.0, {0.0, 0.0}, 1.0}, g);

  // int phi(v) Q(v) dv on the grid.
  double moment(std::span<const double> q, int which) const {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      const auto idx = unflatten(i, 2, g.n);
      const double v1 = g.node(idx[0]), v2 = g.node(idx[1]);
      s += q[i] * (which == 0 ? 0.5 * (v1 * v1 + v2 * v2) : which == 1 ? v1 : v2);
    }
    return s * g.cell_volume();
  }
};

TEST_F(ResolvedMaxwellian, ElasticOperatorVanishes) {
  const auto t = build(make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{1.0}, 64, 16));
  const auto q = to_values(g, eval_fast(t.gain, t.loss, std::as_const(field).coeffs()));
  double qmax = 0.0, fmax = 0.0;
  for (double x : q) qmax = std::max(qmax, std::abs(x));
  for (double x : field.values()) fmax = std::max(fmax, x);
  EXPECT_LE(qmax, 1e-5 * fmax);
  const double e = moments(field).energy;
  EXPECT_LE(std::abs(moment(q, 0)), 1e-6 * e);
}

TEST_F(ResolvedMaxwellian, InelasticMomentsAndEnergySign) {
  for (double e : {0.2, 0.5, 0.95}) {
    const auto t = build(make_collision_model(g, KernelSpec::hard_spheres_2d(), ConstantRestitution{e}, 64, 16));
    const auto q = to_values(g, eval_fast(t.gain, t.loss, std::as_const(field).coeffs()));
    EXPECT_LT(moment(q, 0), 0.0);
    const auto m = moments(field);
    EXPECT_LE(std::abs(moment(q, 1)), 1e-6 * m.rho * std::sqrt(m.temperature));
    EXPECT_LE(std::abs(moment(q, 2)), 1e-6 * m.rho * std::sqrt(m.temperature));
  }
}

// Maxwell molecules lose energy at the exact rate rho (1-e^2)/4 * E for a
// centred field (the identity behind the temperature law).
TEST_F(ResolvedMaxwellian, MaxwellEnergyDissipationRate) {
  const double e = 0.5;
  const auto t = build(make_collision_model(g, KernelSpec::maxwell_2d(), ConstantRestitution{e}, 64, 16));
  const auto q = to_values(g, eval_fast(t.gain, t.loss, std::as_const(field).coeffs()));
  const auto m = moments(field);
  EXPECT_NEAR(moment(q, 0) / (-m.rho * (1 - e * e) / 4 * m.energy), 1.0, 1e-6);
}

TEST(TableCache, RoundTripAndFingerprint) {
  const auto g = make_grid(2, 8, 1.0);
  const auto model = make_collision_model(g, KernelSpec::hard_spheres_2d(), TanhRestitution{0.4}, 6, 8);
  const auto t = build(model);
  const auto path = std::filesystem::temp_directory_path() / "granular_cache_test.bin";
  save_tables(path, t.loss, t.gain);
  EXPECT_EQ(std::filesystem::file_size(path), 12 + (64 + 64 * 6 * 8) * sizeof(cplx));
  const auto loaded = load_tables(path, model);
  ASSERT_TRUE(loaded.has_value());
  for (std::size_t i = 0; i < t.gain.data().size(); ++i) ASSERT_EQ(loaded->gain.data()[i], t.gain.data()[i]);
  for (std::size_t i = 0; i < t.loss.values.size(); ++i) ASSERT_EQ(loaded->loss.values[i], t.loss.values[i]);

  const auto other = make_collision_model(g, KernelSpec::hard_spheres_2d(), TanhRestitution{0.5}, 6, 8);
  EXPECT_NE(table_fingerprint(other), table_fingerprint(model));
  EXPECT_FALSE(load_tables(path, other).has_value());
  EXPECT_FALSE(load_tables(path.string() + ".missing", model).has_value());
  std::filesystem::remove(path);
}
