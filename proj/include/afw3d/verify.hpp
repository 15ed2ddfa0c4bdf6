#pragma once

// Verification suites behind the `verify` subcommands.

#include <cstdint>
#include <random>
#include <vector>

#include "afw3d/interp.hpp"
#include "afw3d/report.hpp"

namespace afw3d {

/// Matrix identities, the differential identity, the trace lemma and the
/// compliance bound (six checks).
std::vector<Check> tensor_suite(std::uint64_t seed, double tol_scale, Table* table = nullptr);

/// Dimension formulas, trace degrees, ring traces and the divergence sequence.
std::vector<Check> spaces_suite(std::uint64_t seed, double tol_scale, Table* table = nullptr);

/// t selection, moment-system well-posedness and reproduction, pullback
/// consistency and the three commuting diagrams on the given mesh.
std::vector<Check> commute_suite(const SimplicialMesh& mesh, const OrderMap& r, int samples, std::uint64_t seed,
                                 double tol_scale, Table* table = nullptr);

/// Random order signature with tet order r, faces in [0, r] and edges at most
/// the smaller adjacent face order.
OrderSignature random_signature(int r, std::mt19937_64& rng);

/// Tet with random vertices whose shape ratio stays moderate.
SimplicialMesh random_tet(std::mt19937_64& rng);

/// Largest coefficient difference after re-interpolating random members of
/// the target space of `kind` on tet 0 of `mesh`.
double reproduction_error(const SimplicialMesh& mesh, MomentKind kind, const OrderSignature& sig, int members,
                          std::mt19937_64& rng);

}  // namespace afw3d
