#include <geoflow/error.hpp>
#include <geoflow/run.hpp>

#include <cmath>

namespace geoflow {

std::string to_string(StopReason reason)
{
    switch (reason) {
    case StopReason::Completed: return "completed";
    case StopReason::Converged: return "converged";
    case StopReason::BlowUp: return "blow-up";
    case StopReason::Degenerate: return "degenerate";
    case StopReason::SolverFailure: return "solver-failure";
    }
    return "unknown";
}

double monitored_energy(const DiagnosticsRecord& record, FlowKind kind)
{
    switch (kind) {
    case FlowKind::WF: return record.willmore;
    case FlowKind::QSDF: return record.biharmonic;
    default: return record.area;
    }
}

RunResult run_flow(const TriMesh& initial, FlowKind kind, const BoundaryConstraint& constraint,
    const StepConfig& cfg, RunMetadata metadata, const DiagnosticsSink& sink)
{
    cfg.validate();
    FlowState state(initial, constraint);
    const double dt = cfg.dt ? *cfg.dt : stable_dt(initial, kind, cfg.scheme, cfg.safety_factor());

    metadata.flow = to_string(kind);
    metadata.scheme = to_string(cfg.scheme);
    metadata.dt = dt;
    metadata.boundary = to_string(constraint.mode());

    RunResult result{state, DiagnosticsSeries(std::move(metadata)), dt, StopReason::Completed, {}};
    auto record = [&](const FlowState& s) {
        DiagnosticsRecord r = measure(s, kind);
        result.series.append(r);
        if (sink) sink(r);
    };
    record(state);

    for (long k = 0; k < cfg.steps; ++k) {
        try {
            state = step(state, kind, cfg.scheme, dt, cfg.solver);
        } catch (const Error& e) {
            if (dynamic_cast<const BlowUpError*>(&e)) {
                result.reason = StopReason::BlowUp;
            } else if (dynamic_cast<const SolverError*>(&e)) {
                result.reason = StopReason::SolverFailure;
            } else {
                result.reason = StopReason::Degenerate;
            }
            result.message = e.what();
            break;
        }
        record(state);
        if (cfg.stop_energy_change) {
            const auto& recs = result.series.records();
            const double change = monitored_energy(recs.back(), kind) - monitored_energy(recs[recs.size() - 2], kind);
            if (std::abs(change) < *cfg.stop_energy_change) {
                result.reason = StopReason::Converged;
                break;
            }
        }
    }
    result.final_state = std::move(state);
    return result;
}

} // namespace geoflow
