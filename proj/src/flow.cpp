#include <geoflow/error.hpp>
#include <geoflow/flow.hpp>
#include <geoflow/operators.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace geoflow {

namespace {

double extent(const Positions& V)
{
    if (V.rows() == 0) return 1.0;
    const double diag = (V.colwise().maxCoeff() - V.colwise().minCoeff()).norm();
    return std::max({diag, V.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min()});
}

// Delta^2 rho = M^{-1} L (M^{-1} L rho).
VectorField bilaplacian(const Geometry& g)
{
    VectorField out = g.L * g.curvature_normal;
    return out.array().colwise() / g.mass.array();
}

ScalarField laplacian_of(const Geometry& g, const ScalarField& f)
{
    return -(g.L * f).cwiseQuotient(g.mass);
}

Positions keep_clamped(const FlowState& state, Positions next)
{
    const Positions& current = state.mesh().positions();
    for (int v : state.constraint().clamped()) next.row(v) = current.row(v);
    return next;
}

} // namespace

std::string to_string(FlowKind kind)
{
    switch (kind) {
    case FlowKind::SDF: return "sdf";
    case FlowKind::WF: return "wf";
    case FlowKind::QSDF: return "qsdf";
    case FlowKind::MCF: return "mcf";
    }
    return "unknown";
}

FlowKind flow_kind_from_string(const std::string& name)
{
    if (name == "sdf") return FlowKind::SDF;
    if (name == "wf" || name == "willmore") return FlowKind::WF;
    if (name == "qsdf" || name == "biharmonic") return FlowKind::QSDF;
    if (name == "mcf") return FlowKind::MCF;
    throw ConfigError("unknown flow '" + name + "'");
}

std::string to_string(Scheme scheme)
{
    return scheme == Scheme::Explicit ? "explicit" : "semi-implicit";
}

Scheme scheme_from_string(const std::string& name)
{
    if (name == "explicit") return Scheme::Explicit;
    if (name == "semi-implicit" || name == "implicit") return Scheme::SemiImplicit;
    throw ConfigError("unknown scheme '" + name + "'");
}

Geometry Geometry::compute(const TriMesh& mesh)
{
    Geometry g;
    const Positions& V = mesh.positions();
    const Faces& F = mesh.faces();
    g.L = cotan_laplacian(V, F);
    g.mass = mass_diagonal(V, F);
    g.curvature_normal = mean_curvature_normal(V, g.L, g.mass);
    g.normals = vertex_normals(V, F);
    g.H = mean_curvature(g.curvature_normal, g.normals);
    g.K = gauss_curvature(V, F, g.mass, boundary_flags(mesh));
    return g;
}

FlowState::FlowState(TriMesh mesh, BoundaryConstraint constraint)
    : mesh_(std::move(mesh))
    , constraint_(std::move(constraint))
    , geometry_(Geometry::compute(mesh_))
    , reference_scale_(extent(mesh_.positions()))
{
    if (constraint_.vertex_count() != mesh_.vertex_count()) {
        throw Error("boundary constraint does not match the mesh");
    }
}

FlowState FlowState::advanced(Positions next, double dt) const
{
    const long next_step = step_ + 1;
    if (!next.allFinite() || next.cwiseAbs().maxCoeff() > kRunawayFactor * reference_scale_) {
        throw BlowUpError(next_step);
    }
    FlowState out = *this;
    out.mesh_ = mesh_.with_positions(std::move(next));
    out.geometry_ = Geometry::compute(out.mesh_);
    out.time_ = time_ + dt;
    out.step_ = next_step;
    return out;
}

double StepConfig::safety_factor() const
{
    if (safety) return *safety;
    return scheme == Scheme::Explicit ? 0.1 : 1.0;
}

void StepConfig::validate() const
{
    if (dt && !(*dt > 0.0)) throw ConfigError("dt must be > 0");
    if (safety && !(*safety > 0.0)) throw ConfigError("dt safety factor must be > 0");
    if (steps < 1) throw ConfigError("steps must be >= 1");
    if (stop_energy_change && !(*stop_energy_change > 0.0)) throw ConfigError("stop tolerance must be > 0");
    solver.validate();
}

VectorField velocity(const FlowState& state, FlowKind kind)
{
    const Geometry& g = state.geometry();
    switch (kind) {
    case FlowKind::SDF: {
        const ScalarField speed = laplacian_of(g, g.H);
        return g.normals.array().colwise() * speed.array();
    }
    case FlowKind::WF: {
        const ScalarField speed =
            laplacian_of(g, g.H).array() + 2.0 * g.H.array() * (g.H.array().square() - g.K.array());
        return g.normals.array().colwise() * speed.array();
    }
    case FlowKind::QSDF: return -bilaplacian(g);
    case FlowKind::MCF: return -g.curvature_normal;
    }
    return VectorField::Zero(state.mesh().vertex_count(), 3);
}

double min_edge_length(const TriMesh& mesh)
{
    const Positions& V = mesh.positions();
    double h = std::numeric_limits<double>::infinity();
    for (const Edge& e : mesh.topology().edges()) h = std::min(h, (V.row(e.v0) - V.row(e.v1)).norm());
    return h;
}

double stable_dt(const TriMesh& mesh, FlowKind kind, Scheme scheme, double safety)
{
    const double h = min_edge_length(mesh);
    const Positions& V = mesh.positions();
    const double diag = (V.colwise().maxCoeff() - V.colwise().minCoeff()).norm();
    const double h2 = h * h;
    double dt = safety * h2;
    if (scheme == Scheme::Explicit && is_fourth_order(kind)) dt = safety * h2 * h2;
    return std::min(dt, safety * diag * diag * 1e-2);
}

FlowState step_explicit(const FlowState& state, FlowKind kind, double dt)
{
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    Positions next = state.mesh().positions() + dt * velocity(state, kind);
    return state.advanced(keep_clamped(state, std::move(next)), dt);
}

FlowState step_semi_implicit(const FlowState& state, FlowKind kind, double dt, const SolverConfig& solver)
{
    if (!(dt > 0.0)) throw ConfigError("dt must be > 0");
    const Geometry& g = state.geometry();
    const Positions& rho = state.mesh().positions();
    const long n = state.mesh().vertex_count();

    SparseOperator M(n, n);
    M.reserve(Eigen::VectorXi::Constant(n, 1));
    for (long i = 0; i < n; ++i) M.insert(i, i) = g.mass(i);
    M.makeCompressed();

    SparseOperator A;
    Positions rhs_positions = rho;
    if (kind == FlowKind::MCF) {
        A = M + dt * g.L;
    } else {
        const ScalarField inv_mass = g.mass.cwiseInverse();
        const SparseOperator scaled = inv_mass.asDiagonal() * g.L;
        const SparseOperator stiff = g.L * scaled;
        A = M + dt * stiff;
        if (kind != FlowKind::QSDF) rhs_positions += dt * (velocity(state, kind) + bilaplacian(g));
    }
    const Eigen::MatrixXd rhs = g.mass.asDiagonal() * rhs_positions;

    const ReducedSystem sys = reduce_system(A, rhs, state.constraint(), rho);
    const SolveResult solved = solve_spd(sys.A, sys.b, solver);
    return state.advanced(sys.expand(solved.x), dt);
}

FlowState step(const FlowState& state, FlowKind kind, Scheme scheme, double dt, const SolverConfig& solver)
{
    return scheme == Scheme::Explicit ? step_explicit(state, kind, dt)
                                      : step_semi_implicit(state, kind, dt, solver);
}

} // namespace geoflow
