// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "afw3d/assembly.hpp"
#include "afw3d/cli.hpp"
#include "afw3d/errors.hpp"
#include "afw3d/interp.hpp"
#include "afw3d/mesh.hpp"
#include "afw3d/report.hpp"
#include "afw3d/stability.hpp"
#include "afw3d/verify.hpp"

using namespace afw3d;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
    passed = passed && ok;
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

const Check& find_check(const std::vector<Check>& checks, const std::string& name) {
  for (const auto& c : checks)
    if (c.name == name) return c;
  throw Error("missing check " + name);
}

void require_check(Outcome& o, const std::vector<Check>& checks, const std::string& name) {
  const Check& c = find_check(checks, name);
  o.require(c.passed, name + " " + num(c.value) + " " + c.relation + " " + num(c.threshold));
}

Outcome algebraic() {
  Outcome o;
  const auto checks = tensor_suite(1, 1.0);
  for (const char* name : {"s1_inverse", "s1_by_parts", "s2_vec"}) require_check(o, checks, name);
  return o;
}

Outcome differential() {
  Outcome o;
  require_check(o, tensor_suite(2, 1.0), "div_s1_plus_s2_curl");
  return o;
}

Outcome trace() {
  Outcome o;
  require_check(o, tensor_suite(3, 1.0), "trace_lemma");
  return o;
}

Outcome dimensions() {
  Outcome o;
  require_check(o, spaces_suite(4, 1.0), "curl_image_dimension");
  return o;
}

Outcome moment_systems() {
  Outcome o;
  std::mt19937_64 rng(5);
  int singular = 0;
  double repro = 0.0;
  for (int r = 0; r <= 3; ++r) {
    const double t = select_t(r);
    for (int k = 0; k < 5; ++k) {
      const OrderSignature sig = random_signature(r, rng);
      singular += equilibrated_log_det(build_moment_system_2minus(sig, t).c) == -HUGE_VAL;
      singular += equilibrated_log_det(build_moment_system_1minus(sig, t).c) == -HUGE_VAL;
      const SimplicialMesh tet = random_tet(rng);
      repro = std::max(repro, reproduction_error(tet, MomentKind::TwoMinus, sig, 20, rng));
      repro = std::max(repro, reproduction_error(tet, MomentKind::OneMinus, sig, 20, rng));
    }
  }
  o.require(singular == 0, "singular systems " + std::to_string(singular));
  o.require(repro <= 1e-10, "reproduction " + num(repro) + " <= 1e-10");
  return o;
}

Outcome diagrams() {
  Outcome o;
  const SimplicialMesh mesh = unit_cube_mesh(2);
  const OrderMap r = random_policy(0, 2, 6)(mesh);
  const DiagramTable d = commuting_diagram_suite(mesh, r, 10, 6);
  for (int k = 1; k <= 3; ++k) {
    const double v = d.max_residual(k);
    o.require(v <= 1e-8, "diagram " + std::to_string(k) + " " + num(v) + " <= 1e-8");
  }
  o.detail = std::to_string(mesh.num_tets()) + " tets; " + o.detail;
  return o;
}

Outcome pullback() {
  Outcome o;
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const SimplicialMesh tet = random_tet(rng);
    const OrderSignature sig = random_signature(k % 4, rng);
    const FieldSample u = transcendental_field(k % 3);
    worst = std::max(worst, (interp_p2minus(tet, 0, sig, u).coef - interp_p2minus_physical(tet, 0, sig, u).coef)
                                .cwiseAbs()
                                .maxCoeff());
    worst = std::max(worst, (interp_p1minus(tet, 0, sig, u).coef - interp_p1minus_physical(tet, 0, sig, u).coef)
                                .cwiseAbs()
                                .maxCoeff());
  }
  o.require(worst <= 1e-10, "max difference " + num(worst) + " <= 1e-10");
  return o;
}

Outcome stability() {
  Outcome o;
  const auto meshes = cube_sequence({1, 2});
  const std::vector<std::pair<std::string, OrderPolicy>> policies = {
      {"r=0", uniform_policy(0)}, {"r=1", uniform_policy(1)}, {"mixed", random_policy(0, 1, 42)}};
  for (const auto& [label, policy] : policies) {
    std::vector<double> betas;
    for (const auto& m : meshes) betas.push_back(infsup_constant(m, policy(m)).beta);
    const double lo = *std::min_element(betas.begin(), betas.end());
    const double drift = relative_drift(betas);
    o.require(lo > 1e-6, label + " beta " + num(betas[0]) + "," + num(betas[1]));
    o.require(drift <= 0.2, label + " drift " + num(drift) + " <= 0.2");
  }
  const SimplicialMesh mesh = unit_cube_mesh(1);
  for (const double lambda : {1.0, 1e4}) {
    for (const int r : {0, 1}) {
      const KernelCoercivity k = kernel_coercivity(mesh, uniform_order(mesh, r), Material{lambda, 1.0});
      o.require(k.ratio >= k.bound * (1.0 - 1e-8),
                "coercivity lambda/mu=" + num(lambda) + " r=" + std::to_string(r) + " " + num(k.ratio) +
                    " >= " + num(k.bound));
    }
  }
  return o;
}

Outcome convergence() {
  Outcome o;
  const ManufacturedCase c = sine_bubble(Material{1.0, 1.0});
  const auto meshes = cube_sequence({1, 2, 4});
  const ConvergenceReport r0 = convergence_study(c, uniform_policy(0), meshes);
  const ConvergenceReport r1 = convergence_study(c, uniform_policy(1), meshes);
  const double rate0 = r0.rows.back().rate_total;
  const double rate1 = r1.rows.back().rate_u;
  o.require(rate0 >= 0.9, "r=0 total rate " + num(rate0) + " >= 0.9");
  o.require(rate1 >= 1.9, "r=1 displacement rate " + num(rate1) + " >= 1.9");
  for (const auto* rep : {&r0, &r1}) {
    const double drift = rep->ratio_drift();
    o.require(drift <= 0.3, std::string(rep == &r0 ? "r=0" : "r=1") + " quasi-optimality drift " + num(drift) +
                                " <= 0.3");
  }
  return o;
}

Outcome patch() {
  Outcome o;
  Mat3 s;
  s << 1.0, 0.2, 0.3, 0.2, 2.0, 0.4, 0.3, 0.4, 3.0;
  std::mt19937_64 rng(10);
  struct Setup {
    std::string label;
    SimplicialMesh mesh;
    OrderPolicy policy;
  };
  std::vector<Setup> setups;
  setups.push_back({"n=1 r=0", unit_cube_mesh(1), uniform_policy(0)});
  setups.push_back({"n=2 r=1", unit_cube_mesh(2), uniform_policy(1)});
  setups.push_back({"n=1 r=3", unit_cube_mesh(1), uniform_policy(3)});
  setups.push_back({"n=2 random 0-2", unit_cube_mesh(2), random_policy(0, 2, 11)});
  setups.push_back({"refined random 0-1", refine_uniform(unit_cube_mesh(1)), random_policy(0, 1, 12)});
  setups.push_back({"random tet r=2", random_tet(rng), uniform_policy(2)});
  double worst = 0.0;
  std::string where;
  for (const Material m : {Material{1.0, 1.0}, Material{1e4, 1.0}}) {
    const ManufacturedCase c = constant_stress(m, s);
    for (const auto& st : setups) {
      const BlockSaddleSystem sys = assemble(st.mesh, st.policy(st.mesh), c);
      const SaddleSolution sol = solve_saddle(st.mesh, sys);
      const ErrorNorms e = error_norms(st.mesh, sys, sol.stress, sol.displacement, sol.rotation, c);
      const double v = std::max({e.stress_l2, e.stress_div, e.rotation_l2});
      if (v >= worst) {
        worst = v;
        where = st.label;
      }
    }
  }
  o.require(worst <= 1e-10, "worst stress/rotation error " + num(worst) + " (" + where + ") <= 1e-10");
  return o;
}

Outcome determinism() {
  Outcome o;
  std::vector<RunConfig> configs(3);
  configs[0].command = {"verify", "commute"};
  configs[0].n = 1;
  configs[0].samples = 3;
  configs[0].orders = "random:0-2";
  configs[1].command = {"solve"};
  configs[1].n = 2;
  configs[1].orders = "random:0-1";
  configs[2].command = {"verify", "tensor"};
  for (auto& c : configs) c.seed = 2024;
  for (const auto& c : configs) {
    const Report a = build_report(c), b = build_report(c);
    const bool same = to_json(a) == to_json(b) && to_csv(a.table) == to_csv(b.table);
    std::string label;
    for (const auto& w : c.command) label += (label.empty() ? "" : " ") + w;
    o.require(same, label + (same ? " identical" : " differs"));
  }
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Outcome (*)()>> criteria = {
      {"algebraic identities", algebraic},
      {"differential identity", differential},
      {"trace lemma", trace},
      {"curl image dimensions", dimensions},
      {"moment systems", moment_systems},
      {"commuting diagrams", diagrams},
      {"pullback consistency", pullback},
      {"discrete stability", stability},
      {"convergence", convergence},
      {"patch test", patch},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    failures += !o.passed;
    std::cout << (o.passed ? "PASS" : "FAIL") << " criterion " << i + 1 << " " << criteria[i].first << ": "
              << o.detail << " (" << num(secs) << " s)" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failures == 0 ? 0 : 1;
}
