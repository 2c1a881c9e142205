#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "seqtrace/glass.hpp"
#include "seqtrace/merit.hpp"
#include "seqtrace/system.hpp"

namespace seqtrace {

enum class VariableKind { curvature, thickness, material };

struct Variable {
  VariableKind kind;
  std::size_t surface;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

struct VariableSet {
  std::vector<Variable> entries;

  std::vector<Variable> continuous() const;
  std::vector<std::size_t> material_surfaces() const;
};

// Tokens such as `C1` (curvature), `T3` (thickness, bounded below by 0) and `G1`
// (material), 1-based surface numbers, separated by commas or whitespace. Bounds
// may follow as `T3:0.5:4` (either side may be empty). Throws InvalidArgument.
VariableSet parse_variables(std::string_view spec, const LensSystem& system);
// Curvatures of every refracting surface plus the material of every glass-bearing one.
VariableSet default_variables(const LensSystem& system);

double variable_value(const LensSystem& system, const Variable& v);
LensSystem with_variable(const LensSystem& system, const Variable& v, double value);

struct LocalResult {
  LensSystem system;
  std::vector<double> mf_trace;  // start value then each accepted step
  int iterations = 0;
  bool jacobian_degenerate = false;
  std::string stop_reason;
};

// Damped least squares over the continuous variables (forward-difference
// Jacobian, Levenberg damping ×10 on rejection, ÷10 on acceptance). Throws
// NoVariables.
LocalResult local_optimize(const LensSystem& system, std::span<const Operand> operands,
                           const VariableSet& variables, int max_iterations = 50);

struct HammerOptions {
  int budget = 20;            // outer iterations
  std::uint64_t seed = 0;
  int nearest = 5;            // substitution candidates per move
  int restart_period = 4;     // every m-th iteration perturbs all curvatures
  double perturbation = 0.02; // relative curvature perturbation of a restart
  int local_iterations = 8;
};

struct HammerEvent {
  int iteration;
  std::string move;     // "substitute S<n> <glass>" or "restart"
  double candidate_mf;
  double incumbent_mf;
  std::string flags;
};

struct HammerResult {
  LensSystem system;
  double initial_mf;
  double final_mf;
  std::vector<HammerEvent> history;
};

// Glass-substitution global loop around local_optimize; see HammerOptions.
HammerResult hammer_optimize(const LensSystem& system, std::span<const Operand> operands,
                             const VariableSet& variables, const glass::GlassCatalog& catalog,
                             const HammerOptions& options = {});

}  // namespace seqtrace
