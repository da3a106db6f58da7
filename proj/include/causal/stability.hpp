#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "causal/dataset.hpp"
#include "causal/graph.hpp"

namespace causal {

// A graph producer under audit. run() must be a pure function of the table
// and the seed; algorithms without internal randomness ignore the seed.
class Generator {
  public:
    virtual ~Generator() = default;
    virtual std::string name() const = 0;
    virtual MixedGraph run(const Table& t, std::uint64_t seed) const = 0;
};

class PcGenerator : public Generator {
  public:
    explicit PcGenerator(double alpha = 0.01, int max_cond = -1)
        : alpha_(alpha), max_cond_(max_cond) {}
    std::string name() const override { return "pc"; }
    MixedGraph run(const Table& t, std::uint64_t seed) const override;

  private:
    double alpha_;
    int max_cond_;
};

class FciGenerator : public Generator {
  public:
    explicit FciGenerator(double alpha = 0.01, int pds_cap = 3)
        : alpha_(alpha), pds_cap_(pds_cap) {}
    std::string name() const override { return "fci"; }
    MixedGraph run(const Table& t, std::uint64_t seed) const override;

  private:
    double alpha_;
    int pds_cap_;
};

class GesGenerator : public Generator {
  public:
    std::string name() const override { return "ges"; }
    MixedGraph run(const Table& t, std::uint64_t seed) const override;
};

class LingamGenerator : public Generator {
  public:
    explicit LingamGenerator(double prune = 0.05) : prune_(prune) {}
    std::string name() const override { return "lingam"; }
    MixedGraph run(const Table& t, std::uint64_t seed) const override;

  private:
    double prune_;
};

// pc, fci, ges, lingam with their default settings, in that order.
std::vector<std::unique_ptr<Generator>> make_default_generators();

// Intersection over union of the token sets; two empty graphs agree fully.
double jaccard(const EdgeTokenSet& a, const EdgeTokenSet& b);

struct ComparisonRow {
    std::string protocol, dataset, generator, parameter, left, right;
    double jaccard = 0.0;
};

struct SummaryRow {
    std::string group, protocol, generator;
    double mean = 0.0, stdev = 0.0;  // sample stdev, 0 when fewer than 2 rows
};

struct GraphStat {
    std::string id;
    double parameter = 0.0;
    std::size_t edge_count = 0;
};

struct StabilityReport {
    std::vector<ComparisonRow> rows;
    std::vector<SummaryRow> summary;
    std::vector<GraphStat> graph_stats;
    std::vector<std::string> warnings;
    std::optional<double> median;  // cross-generator agreement
    std::size_t planned = 0;       // rows the protocol aims for when nothing fails
};

struct AuditOptions {
    std::uint64_t seed = 0;
    int jobs = 1;
    int sweep_points = 999;  // thresholds (i + 1) / 1000
    int sweep_max_cond = 3;
    int subsample_runs = 20;
    double subsample_fraction = 0.9;
    int cross_trials = 100;
};

// Group rows by (dataset, protocol, generator) in first-appearance order.
std::vector<SummaryRow> summarize(const std::vector<ComparisonRow>& rows);

// Consecutive pairs over the tables in input order.
StabilityReport run_releases(const Generator& gen, const std::vector<Table>& tables,
                             const AuditOptions& opt = {});

// All pairs over tables restricted to a shared column set. The base set is
// the most frequent full column set; tables sharing fewer than two columns
// with the running intersection are excluded and logged.
StabilityReport run_projects(const Generator& gen, const std::vector<Table>& tables,
                             const AuditOptions& opt = {});

// Constraint-based search across the significance range, every graph compared
// against the lowest threshold. Records per-graph edge counts.
StabilityReport run_alpha_sweep(const std::vector<Table>& tables, const AuditOptions& opt = {});

// Repeated draws without replacement at a fixed fraction, runs 1.. compared
// against run 0. Degenerate draws are skipped and logged.
StabilityReport run_subsample(const Generator& gen, const std::vector<Table>& tables,
                              const AuditOptions& opt = {});

// Random table plus two distinct default generators per trial; failed draws
// are redrawn a bounded number of times. Reports the median agreement.
StabilityReport run_cross_generator(const std::vector<Table>& tables,
                                    const AuditOptions& opt = {});

// CSV renderings. Doubles in the report use shortest round-trip form; the
// summary keeps two decimals.
std::string report_csv(const StabilityReport& r);
std::string summary_csv(const StabilityReport& r);
std::string graphs_csv(const StabilityReport& r);

}  // namespace causal
