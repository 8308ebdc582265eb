#pragma once

#include <geoflow/diagnostics.hpp>
#include <geoflow/flow.hpp>

#include <functional>
#include <optional>
#include <string>

namespace geoflow {

enum class StopReason { Completed, Converged, BlowUp, Degenerate, SolverFailure };

std::string to_string(StopReason reason);

struct RunResult
{
    FlowState final_state;
    DiagnosticsSeries series;
    double dt = 0.0;
    StopReason reason = StopReason::Completed;
    std::string message;

    bool stopped_early() const { return reason != StopReason::Completed && reason != StopReason::Converged; }
};

/// Called with each record as it is produced (including the initial one).
using DiagnosticsSink = std::function<void(const DiagnosticsRecord&)>;

/// Energy tracked by the convergence stop: W for WF, the biharmonic energy
/// for QSDF, area otherwise.
double monitored_energy(const DiagnosticsRecord& record, FlowKind kind);

/// Runs up to cfg.steps steps from `initial`, recording diagnostics before
/// the first step and after every step. Auto dt is evaluated once on the
/// initial mesh. A step that fails ends the run early with the partial
/// series (possibly only the initial record) and the last good state.
RunResult run_flow(const TriMesh& initial, FlowKind kind, const BoundaryConstraint& constraint,
    const StepConfig& cfg, RunMetadata metadata = {}, const DiagnosticsSink& sink = {});

} // namespace geoflow
