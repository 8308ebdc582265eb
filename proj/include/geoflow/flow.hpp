#pragma once

#include <geoflow/boundary.hpp>
#include <geoflow/mesh.hpp>
#include <geoflow/solve.hpp>
#include <geoflow/types.hpp>

#include <optional>
#include <string>

namespace geoflow {

/// SDF: surface diffusion, WF: Willmore, QSDF: quasi surface diffusion
/// (biharmonic), MCF: mean curvature flow (second-order baseline).
enum class FlowKind { SDF, WF, QSDF, MCF };

std::string to_string(FlowKind kind);
FlowKind flow_kind_from_string(const std::string& name);
constexpr bool is_fourth_order(FlowKind kind) { return kind != FlowKind::MCF; }

enum class Scheme { Explicit, SemiImplicit };

std::string to_string(Scheme scheme);
Scheme scheme_from_string(const std::string& name);

/// Operators and curvatures evaluated at one set of positions.
struct Geometry
{
    SparseOperator L;
    ScalarField mass;
    /// M^{-1} L rho = 2 H n.
    VectorField curvature_normal;
    VectorField normals;
    ScalarField H;
    ScalarField K;

    /// Throws DegenerateFaceError / Error for meshes the operators reject.
    static Geometry compute(const TriMesh& mesh);
};

/// One time slice M(t) of a flow. Geometry is rebuilt whenever positions
/// change, so a state's caches always describe its own mesh.
class FlowState
{
public:
    FlowState(TriMesh mesh, BoundaryConstraint constraint);

    const TriMesh& mesh() const { return mesh_; }
    const Geometry& geometry() const { return geometry_; }
    const BoundaryConstraint& constraint() const { return constraint_; }
    double time() const { return time_; }
    long step() const { return step_; }
    /// Size of the initial surface, used to flag runaway positions.
    double reference_scale() const { return reference_scale_; }

    /// Next state after a step of length dt. Throws BlowUpError on
    /// non-finite or runaway positions.
    FlowState advanced(Positions next, double dt) const;

private:
    TriMesh mesh_;
    BoundaryConstraint constraint_;
    Geometry geometry_;
    double time_ = 0.0;
    long step_ = 0;
    double reference_scale_ = 1.0;
};

/// Positions beyond this multiple of the initial size count as blow-up.
inline constexpr double kRunawayFactor = 4.0;

struct StepConfig
{
    Scheme scheme = Scheme::SemiImplicit;
    /// Empty selects stable_dt on the initial mesh.
    std::optional<double> dt;
    /// Empty selects 0.1 (explicit) or 1.0 (semi-implicit).
    std::optional<double> safety;
    long steps = 1;
    SolverConfig solver;
    /// Stop once the flow's monitored energy changes by less than this per step.
    std::optional<double> stop_energy_change;

    double safety_factor() const;
    /// Throws ConfigError.
    void validate() const;
};

/// Per-vertex velocity with outward normals n and Delta = -M^{-1} L:
///   SDF  (Delta H) n
///   WF   (Delta H + 2H(H^2 - K)) n
///   QSDF -Delta^2 rho
///   MCF  Delta rho = -2 H n
VectorField velocity(const FlowState& state, FlowKind kind);

/// Explicit: c h^4 (fourth order) or c h^2 (MCF); semi-implicit: c h^2.
/// h is the minimum edge length; capped at c * 1e-2 * diag^2.
double stable_dt(const TriMesh& mesh, FlowKind kind, Scheme scheme, double safety);

double min_edge_length(const TriMesh& mesh);

/// Forward Euler on the free vertices.
FlowState step_explicit(const FlowState& state, FlowKind kind, double dt);

/// Frozen-operator backward step:
///   MCF        (M + dt L) x = M rho
///   QSDF       (M + dt L M^{-1} L) x = M rho
///   SDF, WF    (M + dt L M^{-1} L) x = M (rho + dt (v + Delta^2 rho))
/// with clamped vertices eliminated before solving.
FlowState step_semi_implicit(const FlowState& state, FlowKind kind, double dt, const SolverConfig& solver);

FlowState step(const FlowState& state, FlowKind kind, Scheme scheme, double dt, const SolverConfig& solver);

} // namespace geoflow
