#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <vector>

#include "tvcs/grid.hpp"
#include "tvcs/mask.hpp"
#include "tvcs/prox.hpp"
#include "tvcs/solvers.hpp"
#include "tvcs/spectral.hpp"

using namespace tvcs;

namespace {

Image<double> make_truth(const GridShape& s, bool staircase) {
  Image<double> u(s);
  if (staircase && s.d == 1) {
    for (index_t j = 0; j < s.size(); ++j) u.v[j] = (j < s.n[0] / 2) ? 1.0 : 0.0;
  } else {
    Rng rng(5);
    for (auto& x : u.v) x = rng.normal();
  }
  return u;
}

struct Instance {
  GridShape s;
  Image<double> ustar;
  SamplingMask mask;
  SpectralOperator<double> spec;
  GradientDataProjector<double> proj;
  Instance(std::vector<int> dims, double frac, std::uint64_t mask_seed, bool staircase = false)
      : s(dims),
        ustar(make_truth(s, staircase)),
        mask(measure(ustar, sample_mask(s, frac, mask_seed))),
        spec(s),
        proj(spec, mask) {}
};

double field_gap(const VectorField<double>& a, const VectorField<double>& b) {
  return dist2(a, b);
}

}  // namespace

TEST_CASE("pdhg: observed frequencies pinned to b bitwise after every step") {
  Instance ins({16}, 0.5, 3);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.05;
  auto st = init_pdhg(ins.proj);
  for (int k = 0; k < 20; ++k) {
    pdhg_step(st, ins.proj, cfg);
    const auto& b = ins.proj.b_embedded();
    for (index_t l : ins.mask.omega) {
      CHECK(st.uhat[l].real() == b[l].real());
      CHECK(st.uhat[l].imag() == b[l].imag());
    }
  }
}

TEST_CASE("pdhg: zero extragradient leaves unobserved spectrum bitwise unchanged") {
  Instance ins({12}, 0.4, 9);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.1;
  auto st = init_pdhg(ins.proj);
  auto before = st.uhat;
  pdhg_step(st, ins.proj, cfg);  // w starts at zero
  const auto& on = ins.proj.on_omega();
  for (index_t l = 0; l < ins.s.size(); ++l) {
    if (on[l]) continue;
    CHECK(st.uhat[l].real() == before[l].real());
    CHECK(st.uhat[l].imag() == before[l].imag());
  }
}

TEST_CASE("pdhg: full observation recovers the measured image in one step") {
  Instance ins({8}, 1.0, 1);
  REQUIRE(ins.mask.omega.size() == 8);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.3;
  Rng rng(77);
  auto u0 = random_image<double>(ins.s, rng);
  auto st = init_pdhg(ins.proj, &u0);
  pdhg_step(st, ins.proj, cfg);
  auto want = zero_fill_image(ins.proj);  // inverse of the fully pinned spectrum
  for (index_t j = 0; j < 8; ++j) CHECK(std::abs(st.u.v[j] - want.v[j]) < 1e-12);
}

TEST_CASE("pdhg: dual iterate stays in the unit block-norm ball") {
  Instance ins({6, 6}, 0.35, 4);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.02;
  auto st = init_pdhg(ins.proj);
  for (int k = 0; k < 50; ++k) {
    pdhg_step(st, ins.proj, cfg);
    for (index_t j = 0; j < ins.s.size(); ++j) CHECK(block_norm(st.v, j) <= 1.0 + 1e-12);
  }
}

TEST_CASE("drs: hand-built dual certificate gives a fixed point, also for relaxed steps") {
  GridShape s({4});
  Image<double> ustar(s);
  ustar.v = {1, 1, 0, 0};
  SamplingMask mask;
  mask.shape = s;
  mask.omega = {0, 1, 3};
  mask.fraction = 0.75;
  mask.symmetric = true;
  mask = measure(ustar, mask);
  SpectralOperator<double> spec(s);
  GradientDataProjector<double> proj(spec, mask);

  const double tau = 0.7;
  // K ustar = [0,-1,0,1]; eta matches its signs on support, stays strictly
  // inside the unit ball off support, and has vanishing frequency 2 so the
  // divergence-free condition holds off omega
  VectorField<double> kus(s), eta(s);
  kus.c[0] = {0, -1, 0, 1};
  eta.c[0] = {0.3, -1, -0.3, 1};
  VectorField<double> q0(s);
  for (int j = 0; j < 4; ++j) q0.c[0][j] = kus.c[0][j] + tau * eta.c[0][j];

  for (double lambda : {1.0, 0.5, 1.5}) {
    SolverConfig cfg;
    cfg.method = Method::drs;
    cfg.tau = tau;
    cfg.lambda = lambda;
    DrsState<double> st;
    st.q = q0;
    st.v = shrink(q0, tau);
    drs_step(st, proj, cfg);
    CHECK(field_gap(st.q, q0) <= 1e-10 * (1 + norm2(q0)));
    // the prox of the fixed point is the solution's gradient
    CHECK(field_gap(st.v, kus) <= 1e-12);
  }
}

TEST_CASE("drs: lambda=1 step equals the direct unrelaxed composition bitwise") {
  Instance ins({10}, 0.5, 6);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.2;
  auto st = init_drs(ins.proj, cfg);
  for (int k = 0; k < 3; ++k) drs_step(st, ins.proj, cfg);

  auto q = st.q;
  auto v = st.v;
  drs_step(st, ins.proj, cfg);
  auto refl = reflect_from(v, q);
  auto kx = ins.proj.apply(refl);
  for (index_t j = 0; j < ins.s.size(); ++j) {
    double direct = kx.c[0][j] + (q.c[0][j] - v.c[0][j]);
    CHECK(st.q.c[0][j] == direct);
  }
}

TEST_CASE("drs: full observation lands the primal on the solution in one step") {
  GridShape s({4});
  Rng rng(23);
  auto ustar = random_image<double>(s, rng);
  auto mask = measure(ustar, sample_mask(s, 1.0, 2));
  SpectralOperator<double> spec(s);
  GradientDataProjector<double> proj(spec, mask);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.5;
  DrsState<double> st;
  st.q = random_field<double>(s, rng);
  st.v = shrink(st.q, cfg.tau);
  auto want = zero_fill_image(proj);  // unique feasible image
  drs_step(st, proj, cfg);
  for (index_t j = 0; j < 4; ++j) CHECK(std::abs(st.u.v[j] - want.v[j]) < 1e-12);
  // q settles on a fixed point within a few more steps
  double gap = 1;
  for (int k = 0; k < 10; ++k) {
    auto prev = st.q;
    drs_step(st, proj, cfg);
    gap = field_gap(st.q, prev);
  }
  CHECK(gap <= 1e-13 * (1 + norm2(st.q)));
}

TEST_CASE("admm/drs synchronization: dual and primal correspondence over 50 iterations") {
  Instance ins({16}, 0.4, 3);
  SolverConfig cfg;
  cfg.method = Method::admm;
  cfg.tau = 0.1;
  auto admm = init_admm(ins.proj);
  admm_step(admm, ins.proj, cfg);  // one step makes y a prox_f output
  auto drs = drs_from_admm(admm, cfg.tau);
  SolverConfig dcfg = cfg;
  dcfg.method = Method::drs;
  for (int k = 0; k < 50; ++k) {
    admm_step(admm, ins.proj, cfg);
    drs_step(drs, ins.proj, dcfg);
    double scale = 1 + norm2(drs.q);
    // dual row: z = (q - v)/tau; v = y
    for (index_t j = 0; j < ins.s.size(); ++j) {
      CHECK(std::abs(admm.z.c[0][j] - (drs.q.c[0][j] - drs.v.c[0][j]) / cfg.tau) <=
            1e-10 * scale);
      CHECK(std::abs(admm.y.c[0][j] - drs.v.c[0][j]) <= 1e-10 * scale);
    }
    // primal row: K x = q - (q_prev - v_prev)
    for (index_t j = 0; j < ins.s.size(); ++j)
      CHECK(std::abs(admm.kx.c[0][j] -
                     (drs.q.c[0][j] - (drs.prev_q.c[0][j] - drs.prev_v.c[0][j]))) <=
            1e-10 * scale);
  }
}

TEST_CASE("admm/pdhg synchronization: extragradient correspondence from the shared default start") {
  Instance ins({16}, 0.5, 8);
  SolverConfig acfg;
  acfg.method = Method::admm;
  acfg.tau = 0.08;
  SolverConfig pcfg = acfg;
  pcfg.method = Method::pdhg;
  auto admm = init_admm(ins.proj);
  auto pdhg = init_pdhg(ins.proj);
  for (int k = 0; k < 50; ++k) {
    admm_step(admm, ins.proj, acfg);
    pdhg_step(pdhg, ins.proj, pcfg);
    double scale = 1 + norm2(admm.y);
    for (index_t j = 0; j < ins.s.size(); ++j) {
      double w_from_admm =
          (admm.kx.c[0][j] - admm.y.c[0][j]) / acfg.tau + admm.z.c[0][j];
      CHECK(std::abs(w_from_admm - pdhg.w.c[0][j]) <= 1e-10 * scale);
      CHECK(std::abs(admm.z.c[0][j] - pdhg.v.c[0][j]) <= 1e-10 * scale);
    }
    for (index_t j = 0; j < ins.s.size(); ++j)
      CHECK(std::abs(admm.x.v[j] - pdhg.u.v[j]) <= 1e-10 * scale);
  }
}

TEST_CASE("three methods from translated-consistent starts trace one trajectory") {
  Instance ins({16}, 0.45, 12);
  SolverConfig cfg;
  cfg.tau = 0.12;
  SolverConfig acfg = cfg, dcfg = cfg, pcfg = cfg;
  acfg.method = Method::admm;
  dcfg.method = Method::drs;
  pcfg.method = Method::pdhg;

  auto admm = init_admm(ins.proj);
  auto pdhg = init_pdhg(ins.proj);
  auto seed_admm = init_admm(ins.proj);
  admm_step(seed_admm, ins.proj, acfg);
  auto drs = drs_from_admm(seed_admm, cfg.tau);

  admm_step(admm, ins.proj, acfg);
  pdhg_step(pdhg, ins.proj, pcfg);
  for (int k = 1; k < 100; ++k) {
    admm_step(admm, ins.proj, acfg);
    pdhg_step(pdhg, ins.proj, pcfg);
    drs_step(drs, ins.proj, dcfg);
    auto qa = detail::equivalent_q(admm, cfg.tau);
    auto qd = detail::equivalent_q(drs, cfg.tau);
    auto qp = detail::equivalent_q(pdhg, cfg.tau);
    double scale = 1 + norm2(qa);
    CHECK(field_gap(qa, qd) <= 1e-9 * scale);
    CHECK(field_gap(qa, qp) <= 1e-9 * scale);
  }
}

TEST_CASE("feasibility invariant: pinned-spectrum residual is exactly zero for all methods") {
  Instance ins({8, 4}, 0.4, 21);
  SolverConfig cfg;
  cfg.tau = 0.07;
  SolverConfig acfg = cfg, dcfg = cfg, pcfg = cfg;
  acfg.method = Method::admm;
  dcfg.method = Method::drs;
  pcfg.method = Method::pdhg;
  auto admm = init_admm(ins.proj);
  auto drs = init_drs(ins.proj, dcfg);
  auto pdhg = init_pdhg(ins.proj);
  for (int k = 0; k < 10; ++k) {
    admm_step(admm, ins.proj, acfg);
    drs_step(drs, ins.proj, dcfg);
    pdhg_step(pdhg, ins.proj, pcfg);
    CHECK(detail::omega_residual(admm.xhat, ins.proj) == 0.0);
    CHECK(detail::omega_residual(drs.uhat, ins.proj) == 0.0);
    CHECK(detail::omega_residual(pdhg.uhat, ins.proj) == 0.0);
  }
}

TEST_CASE("translators: round trips are the identity") {
  Instance ins({12}, 0.5, 14);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.15;
  auto drs = init_drs(ins.proj, cfg);
  for (int k = 0; k < 5; ++k) drs_step(drs, ins.proj, cfg);

  auto admm = admm_from_drs(drs, ins.proj, cfg.tau);
  auto back = drs_from_admm(admm, cfg.tau);
  CHECK(field_gap(back.q, drs.q) <= 1e-12 * (1 + norm2(drs.q)));
  CHECK(field_gap(back.v, drs.v) <= 1e-12 * (1 + norm2(drs.v)));
  // history survives in the only combination the table consumes
  for (index_t j = 0; j < ins.s.size(); ++j)
    CHECK(std::abs((back.prev_q.c[0][j] - back.prev_v.c[0][j]) -
                   (drs.prev_q.c[0][j] - drs.prev_v.c[0][j])) <= 1e-12);

  auto pdhg = pdhg_from_admm(admm, cfg.tau);
  auto admm2 = admm_from_pdhg(pdhg, cfg.tau);
  CHECK(field_gap(admm2.y, admm.y) <= 1e-12 * (1 + norm2(admm.y)));
  CHECK(field_gap(admm2.z, admm.z) <= 1e-12 * (1 + norm2(admm.z)));
  for (index_t j = 0; j < ins.s.size(); ++j)
    CHECK(std::abs(admm2.x.v[j] - admm.x.v[j]) <= 1e-12);

  auto pdhg2 = pdhg_from_drs(drs, ins.proj, cfg.tau);
  auto drs2 = drs_from_pdhg(pdhg2, cfg.tau);
  CHECK(field_gap(drs2.q, drs.q) <= 1e-11 * (1 + norm2(drs.q)));
  CHECK(field_gap(drs2.v, drs.v) <= 1e-11 * (1 + norm2(drs.v)));
}

TEST_CASE("translators: primal row identity along a drs run") {
  Instance ins({14}, 0.5, 2);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.3;
  auto st = init_drs(ins.proj, cfg);
  for (int k = 0; k < 8; ++k) {
    drs_step(st, ins.proj, cfg);
    auto kx = gradient(st.u);
    for (index_t j = 0; j < ins.s.size(); ++j)
      CHECK(std::abs(kx.c[0][j] -
                     (st.q.c[0][j] - (st.prev_q.c[0][j] - st.prev_v.c[0][j]))) <= 1e-10);
  }
}

TEST_CASE("translators: missing history is rejected") {
  Instance ins({8}, 0.5, 4);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.2;
  auto st = init_drs(ins.proj, cfg);  // no step taken, no history
  CHECK_FALSE(st.prev_valid);
  CHECK_THROWS_AS(admm_from_drs(st, ins.proj, cfg.tau), std::invalid_argument);
  CHECK_THROWS_AS(pdhg_from_drs(st, ins.proj, cfg.tau), std::invalid_argument);
}

TEST_CASE("run: max_iters=0 returns the initial state with a single log row") {
  Instance ins({8}, 0.5, 4);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.1;
  cfg.max_iters = 0;
  auto res = run(ins.proj, cfg);
  CHECK(res.iters == 0);
  CHECK_FALSE(res.converged);
  CHECK(res.log.rows.size() == 1);
  CHECK(res.log.rows[0].iter == 0);
  auto& st = std::get<PdhgState<double>>(res.state);
  auto u0 = zero_fill_image(ins.proj);
  for (index_t j = 0; j < 8; ++j) CHECK(st.u.v[j] == u0.v[j]);
}

TEST_CASE("run: exact-recovery staircase terminates on tolerance with zero residual") {
  Instance ins({16}, 0.5, 11, true);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.1;
  cfg.max_iters = 20000;
  cfg.tol = 1e-14;
  RunRefs refs;
  refs.u_ref = &ins.ustar;
  auto res = run(ins.proj, cfg, refs);
  CHECK(res.converged);
  CHECK(res.iters < cfg.max_iters);
  const auto& last = res.log.rows.back();
  CHECK(last.residual == 0.0);
  CHECK(last.rel_err < 1e-6);
}

TEST_CASE("run: identical invocations produce identical states and logs") {
  Instance ins({16}, 0.4, 19);
  SolverConfig cfg;
  cfg.method = Method::admm;
  cfg.tau = 0.05;
  cfg.max_iters = 50;
  cfg.tol = 0;
  auto r1 = run(ins.proj, cfg);
  auto r2 = run(ins.proj, cfg);
  auto& s1 = std::get<AdmmState<double>>(r1.state);
  auto& s2 = std::get<AdmmState<double>>(r2.state);
  CHECK(std::memcmp(s1.y.c[0].data(), s2.y.c[0].data(), sizeof(double) * 16) == 0);
  CHECK(std::memcmp(s1.z.c[0].data(), s2.z.c[0].data(), sizeof(double) * 16) == 0);
  REQUIRE(r1.log.rows.size() == r2.log.rows.size());
  for (std::size_t i = 0; i < r1.log.rows.size(); ++i) {
    CHECK(r1.log.rows[i].tv == r2.log.rows[i].tv);
    CHECK(r1.log.rows[i].residual == r2.log.rows[i].residual);
  }
}

TEST_CASE("run: log cadence keeps every log_every-th row plus first and last") {
  Instance ins({16}, 0.5, 11, true);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.1;
  cfg.max_iters = 95;
  cfg.tol = 0;
  cfg.log_every = 10;
  auto res = run(ins.proj, cfg);
  std::vector<std::int64_t> want = {0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 95};
  REQUIRE(res.log.rows.size() == want.size());
  for (std::size_t i = 0; i < want.size(); ++i) CHECK(res.log.rows[i].iter == want[i]);
}

TEST_CASE("run: three-way equivalence shows up in the convergence logs") {
  Instance ins({16}, 0.45, 12, true);
  SolverConfig cfg;
  cfg.tau = 0.12;
  cfg.max_iters = 100;
  cfg.tol = 0;
  RunRefs refs;
  refs.u_ref = &ins.ustar;

  SolverConfig acfg = cfg;
  acfg.method = Method::admm;
  auto ra = run(ins.proj, acfg, refs);

  SolverConfig pcfg = cfg;
  pcfg.method = Method::pdhg;
  auto rp = run(ins.proj, pcfg, refs);

  auto seed_admm = init_admm(ins.proj);
  admm_step(seed_admm, ins.proj, acfg);
  SolverConfig dcfg = cfg;
  dcfg.method = Method::drs;
  dcfg.max_iters = 99;
  auto rd = run_from(drs_from_admm(seed_admm, cfg.tau), ins.proj, dcfg, refs);

  REQUIRE(ra.log.rows.size() == 101);
  REQUIRE(rp.log.rows.size() == 101);
  REQUIRE(rd.log.rows.size() == 100);  // iters 1..100
  for (std::size_t i = 0; i < 101; ++i) {
    CHECK(std::abs(ra.log.rows[i].rel_err - rp.log.rows[i].rel_err) <= 1e-9);
    CHECK(std::abs(ra.log.rows[i].tv - rp.log.rows[i].tv) <= 1e-9 * (1 + ra.log.rows[i].tv));
  }
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(rd.log.rows[i].iter == ra.log.rows[i + 1].iter);
    CHECK(std::abs(rd.log.rows[i].rel_err - ra.log.rows[i + 1].rel_err) <= 1e-9);
    CHECK(std::abs(rd.log.rows[i].tv - ra.log.rows[i + 1].tv) <=
          1e-9 * (1 + ra.log.rows[i + 1].tv));
  }
}

TEST_CASE("drs trajectory is Fejer monotone toward its limit") {
  Instance ins({16}, 0.5, 11, true);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.1;
  cfg.max_iters = 4000;
  cfg.tol = 1e-13;
  auto res = run(ins.proj, cfg);
  auto qstar = std::get<DrsState<double>>(res.state).q;

  auto st = init_drs(ins.proj, cfg);
  double prev = field_gap(st.q, qstar);
  for (int k = 0; k < 2000; ++k) {
    drs_step(st, ins.proj, cfg);
    double now = field_gap(st.q, qstar);
    CHECK(now <= prev + 1e-10);
    prev = now;
  }
}

TEST_CASE("config validation rejects bad parameters and misplaced relaxation") {
  Instance ins({8}, 0.5, 4);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0;
  CHECK_THROWS_AS(run(ins.proj, cfg), std::invalid_argument);
  cfg.tau = 0.1;
  cfg.lambda = 2.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.lambda = 0.5;  // valid range but wrong engine
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.lambda = 1.0;
  cfg.alpha = 3.0;  // regularization outside drs
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.method = Method::drs;
  CHECK_NOTHROW(cfg.validate());
  cfg.alpha = -1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg.alpha.reset();
  cfg.log_every = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("steps abort with a diagnostic on non-finite state") {
  Instance ins({8}, 0.5, 4);
  SolverConfig cfg;
  cfg.tau = 0.1;
  cfg.method = Method::pdhg;
  auto pst = init_pdhg(ins.proj);
  pst.w.c[0][2] = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(pdhg_step(pst, ins.proj, cfg), numerical_error);

  cfg.method = Method::admm;
  auto ast = init_admm(ins.proj);
  ast.y.c[0][1] = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(admm_step(ast, ins.proj, cfg), numerical_error);
}

TEST_CASE("regularized drs converges with alpha set and shrinks toward smaller v") {
  Instance ins({16}, 0.5, 11, true);
  SolverConfig cfg;
  cfg.method = Method::drs;
  cfg.tau = 0.1;
  cfg.alpha = 50.0;
  cfg.max_iters = 3000;
  cfg.tol = 1e-13;
  auto res = run(ins.proj, cfg);
  CHECK(res.converged);
  // the regularized prox contracts norms relative to the plain shrink
  auto& st = std::get<DrsState<double>>(res.state);
  auto plain = shrink(st.q, cfg.tau);
  CHECK(norm2(st.v) <= norm2(plain) + 1e-12);
}

TEST_CASE("f32 runs with widened accumulators track the f64 trajectory") {
  GridShape s({16});
  auto ustar64 = make_truth(s, true);
  auto mask = measure(ustar64, sample_mask(s, 0.5, 11));
  SpectralOperator<double> spec64(s);
  GradientDataProjector<double> proj64(spec64, mask);
  SpectralOperator<float> spec32(s);
  GradientDataProjector<float> proj32(spec32, mask);
  SolverConfig cfg;
  cfg.method = Method::pdhg;
  cfg.tau = 0.1;
  cfg.max_iters = 200;
  cfg.tol = 0;
  RunRefs refs;
  refs.u_ref = &ustar64;
  auto r64 = run(proj64, cfg, refs);
  auto r32 = run(proj32, cfg, refs);
  REQUIRE(r32.log.rows.size() == r64.log.rows.size());
  CHECK(r32.log.rows.back().rel_err < r32.log.rows.front().rel_err);
  for (std::size_t i = 0; i < r64.log.rows.size(); ++i) {
    double e64 = r64.log.rows[i].rel_err;
    double e32 = r32.log.rows[i].rel_err;
    CHECK(std::abs(e32 - e64) <= 1e-3 + 0.2 * e64);
  }
}
