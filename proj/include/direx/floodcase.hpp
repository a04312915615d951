#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <vector>

#include "direx/copulas.hpp"
#include "direx/detector.hpp"
#include "direx/sample.hpp"

namespace direx {

// One synthetic flood year: peak discharge Q [m^3/s], event volume V
// [10^6 m^3] and the reservoir level L [m a.s.l.] found at the start of the
// event.
struct FloodEvent {
    double peak_flow = 0.0;
    double volume = 0.0;
    double initial_level = 0.0;
};

// Triangular inflow hydrograph: linear rise to the peak over the rise time,
// linear recession back to zero, total duration tied to the event volume so
// the area under the curve reproduces it exactly:
//   base = 2 V / Q,  rise = base / 2.67,  recession = 1.67 * rise.
struct Hydrograph {
    double peak_flow = 0.0;       // m^3/s
    double base_time = 0.0;       // hours
    double rise_time = 0.0;       // hours
    double recession_time = 0.0;  // hours

    static Hydrograph from_event(double peak_flow, double volume);
    double inflow_at(double t_hours) const;  // m^3/s
};

// Elevation-to-volume table, strictly increasing in both columns.  Linear
// interpolation inside the table, linear extrapolation with the edge slopes
// outside it (starting levels below the table's first entry are legitimate
// drawdown states).
struct StorageCurve {
    std::vector<std::array<double, 2>> points;  // (level m, volume m^3)

    void validate() const;
    double volume_at(double level) const;
    double level_at(double volume) const;
};

struct SpillwayRating {
    double coefficient = 0.0;  // m^(1/2)/s
    double width = 0.0;        // m
};

struct DamSpec {
    double spillway_level = 0.0;
    double max_regulation_level = 0.0;
    double crest_level = 0.0;
    StorageCurve storage;
    SpillwayRating rating;

    void validate() const;
    // Free-weir law over the uncontrolled spillway; zero below its sill.
    double outflow_at(double level) const;
};

// The bundled synthetic reservoir the default experiment runs against.
// Its storage and spillway rating are calibrated so that under
// default_flood_model() roughly half a percent of simulated years exceed the
// maximum regulation level, while the design flood (both Q and V at their
// 99.9% quantiles, starting half a metre below the crest) overtops the dam.
DamSpec default_dam_spec();

// Q and V coupled by a Gumbel copula (theta = 3.1378, Kendall tau 0.68), L
// independent of both; GEV margins for all three coordinates.
JointModel default_flood_model();

enum class EventClass { Regular, Risky, Catastrophic };

const char* to_string(EventClass c);

// Regular up to the maximum regulation level, Risky up to the crest,
// Catastrophic above it (both upper boundaries inclusive on the safe side).
EventClass classify_level(double max_level, const DamSpec& dam);

struct RoutingOutcome {
    double max_level = 0.0;
    EventClass category = EventClass::Regular;
    // Volume bookkeeping of the integration, for mass-balance checks.
    double inflow_volume = 0.0;   // m^3
    double outflow_volume = 0.0;  // m^3
    double storage_change = 0.0;  // m^3
};

// Level-pool routing of the event's hydrograph through the reservoir:
// dS/dt = I(t) - O(h(S)), explicit fixed-step integration with midpoint
// inflow sampling.  The default step is rise_time/50; anything coarser than
// rise_time/10 is rejected.  Integration stops at the hydrograph's end,
// after which the level can only fall.
RoutingOutcome route_event(const FloodEvent& event, const DamSpec& dam, double dt_hours);
RoutingOutcome route_event(const FloodEvent& event, const DamSpec& dam);

// years independent flood events from the model (coordinate order Q, V, L).
// Draws whose Q or V land outside the physical range (possible because the
// GEV supports extend below zero) are redrawn, so every returned event
// routes cleanly.
Sample simulate_floods(const JointModel& model, int years, std::uint64_t seed);

FloodEvent event_from_row(const Sample& s, int row);

// Confusion-style ratios of a detection run against routed ground truth.
// "Detected" means labelled Upper or Quantile; "critical" means the routed
// outcome was Risky or Catastrophic.  The false-positive ratio is reported
// absent when nothing was detected, the true-positive ratio when nothing was
// critical.
struct EvaluationReport {
    std::optional<double> false_positive_ratio;
    std::optional<double> true_positive_ratio;
    double detection_ratio = 0.0;
    double true_extremes_ratio = 0.0;
    std::int64_t detected_count = 0;
    std::int64_t critical_count = 0;
    std::int64_t detected_critical_count = 0;
    std::int64_t sample_size = 0;
};

EvaluationReport evaluate_detection(const std::vector<PointLabel>& labels,
                                    const std::vector<RoutingOutcome>& truth);

struct ExperimentConfig {
    int replicas = 20;
    int years = 1000;
    double alpha = 0.01;
    DetectionMode mode = DetectionMode::Survival;
    std::uint64_t seed = 0;
    std::optional<double> slack_h;  // unset: 1/(2m)
};

struct ReplicaResult {
    int index;
    Sample events;
    std::vector<RoutingOutcome> outcomes;
    DirectionVector pca_direction;
    DetectionResult detection_classical;  // direction e
    DetectionResult detection_pca;
    EvaluationReport report_classical;
    EvaluationReport report_pca;
};

struct ExperimentSummary {
    ExperimentConfig config;
    std::vector<ReplicaResult> replicas;

    // Means over replicas; ratio means skip replicas where the ratio is
    // absent (the counts say how many contributed).
    double mean_detection_ratio_classical = 0.0;
    double mean_detection_ratio_pca = 0.0;
    double mean_true_extremes_ratio = 0.0;
    std::optional<double> mean_fpr_classical, mean_fpr_pca;
    std::optional<double> mean_tpr_classical, mean_tpr_pca;
    int fpr_defined_in_both = 0;
    int fpr_pca_below_classical = 0;         // replicas where FPR(pca) < FPR(e)
    int detection_ratio_classical_above_pca = 0;
};

// Repeats simulate -> route -> detect(e) / detect(first PCA) over seeded
// replicas (replica r uses the derived seed f(seed, r)) and aggregates the
// evaluation ratios.
ExperimentSummary run_experiment(const JointModel& model, const DamSpec& dam,
                                 const ExperimentConfig& config);

}  // namespace direx
