#pragma once

#include <geoflow/flow.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace geoflow {

/// One measurement of M(t). Field order is the CSV column order.
struct DiagnosticsRecord
{
    long step = 0;
    double time = 0.0;
    double area = 0.0;
    /// Absent for meshes with boundary.
    std::optional<double> volume;
    double willmore = 0.0;
    double dirichlet_h = 0.0;
    double biharmonic = 0.0;
    double min_edge = 0.0;
    double min_angle_deg = 0.0;
    /// Largest velocity magnitude over the free vertices.
    double max_speed = 0.0;

    bool operator==(const DiagnosticsRecord&) const = default;
};

struct RunMetadata
{
    std::string flow;
    std::string scheme;
    double dt = 0.0;
    std::string boundary = "free";
    std::string provenance;
    std::optional<std::uint64_t> seed;

    bool operator==(const RunMetadata&) const = default;
};

/// Ordered records of one run; step indices strictly increase.
class DiagnosticsSeries
{
public:
    DiagnosticsSeries() = default;
    explicit DiagnosticsSeries(RunMetadata metadata)
        : metadata_(std::move(metadata))
    {}

    const RunMetadata& metadata() const { return metadata_; }
    const std::vector<DiagnosticsRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Throws Error if the step index does not increase.
    void append(DiagnosticsRecord record);

    bool operator==(const DiagnosticsSeries&) const = default;

private:
    RunMetadata metadata_;
    std::vector<DiagnosticsRecord> records_;
};

DiagnosticsRecord measure(const FlowState& state, FlowKind kind);

/// Smallest interior angle over all faces, in degrees.
double min_angle_degrees(const TriMesh& mesh);

/// Mass-weighted mean deviation of |Delta rho| from its one-ring
/// mass-weighted average. Uses barycentric masses, whose small valence
/// dependent ripple on a clean mesh gives a stable nonzero baseline.
double roughness(const TriMesh& mesh);

/// Shared defaults for the identity checks and the acceptance suite.
struct IdentityTolerances
{
    /// |Vol(end) - Vol(start)| / |Vol(start)| for SDF.
    double volume_drift = 1e-2;
    /// Allowed per-step relative increase of a monotone quantity.
    double monotone_slack = 1e-9;
    /// Relative mismatch of dArea/dt against -H^T L H for SDF.
    double area_rate = 0.15;
    /// Leading records excluded from the area-rate comparison.
    long area_rate_skip = 5;
};

struct IdentityCheck
{
    std::string name;
    bool passed = true;
    /// False when the series held nothing the check could test.
    bool exercised = true;
    /// Informational entries are reported but never fail.
    bool informational = false;
    double worst = 0.0;
    double threshold = 0.0;
    long at_step = -1;
    std::string detail;

    bool operator==(const IdentityCheck&) const = default;
};

struct IdentityReport
{
    FlowKind kind = FlowKind::SDF;
    std::vector<IdentityCheck> checks;

    bool passed() const;
    const IdentityCheck* find(const std::string& name) const;
    bool operator==(const IdentityReport&) const = default;
};

/// Checks selected by flow kind:
///   SDF   volume_drift, area_monotone, area_rate
///   WF    willmore_monotone
///   QSDF  biharmonic_monotone, volume_change (informational)
///   MCF   none
/// Throws Error when the series holds fewer than two records.
IdentityReport check_identities(
    const DiagnosticsSeries& series, FlowKind kind, const IdentityTolerances& tolerances = {});

std::string format_report(const IdentityReport& report);

enum class SeriesFormat { Csv, Json };

void write_csv(std::ostream& out, const DiagnosticsSeries& series);
void write_json(std::ostream& out, const DiagnosticsSeries& series);
DiagnosticsSeries read_json(std::istream& in);
void emit(const DiagnosticsSeries& series, const std::filesystem::path& path, SeriesFormat format);

} // namespace geoflow
