#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "parcs/graph.hpp"
#include "parcs/guideline.hpp"
#include "parcs/randomizer.hpp"

namespace parcs {

// Missingness mechanisms as indicator-graph shapes.  R_i = 1 means the cell
// of the column R_i masks is missing.
enum class Mechanism {
    mcar,              // indicators have no parents
    mar,               // fully observed columns drive the indicators of the rest
    mnar_general,      // any column may drive any indicator
    self_censoring,    // each column drives exactly its own indicator
    no_self_censoring, // any column except itself may drive an indicator
    mar_mcar,          // mar, plus mcar indicators on the observed columns
};

struct MechanismSpec {
    Mechanism kind = Mechanism::mcar;
    std::vector<std::string> observed; // mar / mar_mcar: fully observed columns
    double rr_density = 0.0;           // optional indicator-to-indicator edge density

    bool operator==(const MechanismSpec&) const = default;
};

const char* mechanism_name(Mechanism m);
bool mechanism_from_name(std::string_view name, Mechanism& out);

// 0/1 admissibility matrix, |z_names| x |r_names|; entry (j, i) = 1 permits
// an edge from column z_names[j] to indicator r_names[i].  r_names must be a
// subset of z_names (the columns that get indicators).  Throws
// InvalidObservedSet when mar's observed set is empty, not a strict subset,
// or unknown.
Matrix mechanism_mask(const MechanismSpec& mech, std::span<const std::string> z_names,
                      std::span<const std::string> r_names);

struct MgraphOptions {
    std::size_t burn_in = 10000;
    bool nonlinear = false; // non-identity edge functions + quadratic terms,
                            // and every indicator is guaranteed a parent
    std::optional<double> sparsity_override;

    bool operator==(const MgraphOptions&) const = default;
};

// A calibrated graph that jointly samples the source columns and their
// missingness indicators.
struct Mgraph {
    Graph graph;
    std::vector<std::string> z_columns;           // original column order
    std::vector<std::string> r_nodes;             // indicator node names
    std::map<std::string, std::string> r_for;     // column name -> indicator name
    Matrix mask;                                  // admissibility used for the build
    RandomizationTrace trace;
};

// Builds indicators over an existing source graph: Bernoulli nodes squeezed
// into (0,1) with target mean = ratio, parents drawn under the mechanism's
// mask with guideline sparsity and coefficients, then calibrates the whole
// graph.  Deterministic in all arguments.
Mgraph build_mgraph(const Graph& z_graph, const MechanismSpec& mech,
                    const Guideline& guideline, double ratio, std::uint64_t seed,
                    const MgraphOptions& opts = {});

// Same, over an ingested dataset: columns become data-backed source nodes
// resampled by whole rows under the master seed.
Mgraph build_mgraph(const IngestedTable& data, const MechanismSpec& mech,
                    const Guideline& guideline, double ratio, std::uint64_t seed,
                    const MgraphOptions& opts = {});

struct MaskedDataset {
    std::vector<std::string> columns;   // source column order
    Matrix values;                      // raw sampled values
    Matrix missing;                     // 0/1 flags, 1 = missing
    std::vector<double> achieved_ratio; // per column; 0 where no indicator exists
};

// Splits a batch sampled from mg.graph into values + flags; cell (r, j) is
// missing iff the column's indicator sampled 1 on row r.
MaskedDataset apply_missingness(const Mgraph& mg, const SampleBatch& batch);

} // namespace parcs
