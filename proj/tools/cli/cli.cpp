#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "cli.hpp"
#include "parcs/csv.hpp"
#include "parcs/errors.hpp"
#include "parcs/graph.hpp"
#include "parcs/guideline.hpp"
#include "parcs/lingam.hpp"
#include "parcs/missingness.hpp"
#include "parcs/pdl.hpp"
#include "parcs/randomizer.hpp"
#include "parcs/rng.hpp"
#include "parcs/version.hpp"

namespace parcs::cli {

namespace {

namespace fs = std::filesystem;

// Every run can emit a manifest: the resolved argument vector plus derived
// seeds, enough to reproduce each output byte-for-byte with the same build.
struct Manifest {
    std::string subcommand;
    std::vector<std::string> argv;
    std::map<std::string, std::string> inputs;
    std::uint64_t master_seed = 0;
    std::size_t iterations = 1;
    std::vector<std::uint64_t> derived_seeds;
    std::vector<std::string> outputs;

    void write(const std::string& path) const {
        nlohmann::json j;
        j["version"] = kVersion;
        j["subcommand"] = subcommand;
        j["argv"] = argv;
        j["inputs"] = inputs;
        j["master_seed"] = master_seed;
        j["iterations"] = iterations;
        j["derived_seeds"] = derived_seeds;
        j["outputs"] = outputs;
        io::write_file(path, j.dump(2) + "\n");
    }
};

void make_outdir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

std::string padded(std::size_t i, std::size_t total) {
    std::size_t width = 4;
    for (std::size_t v = total; v > 10000; v /= 10) ++width;
    std::string s = std::to_string(i);
    return std::string(width > s.size() ? width - s.size() : 0, '0') + s;
}

PartialGraph load_description(const std::string& path) {
    return parse_description(io::read_file(path));
}

Graph full_graph(const PartialGraph& pg) {
    if (!pg.fully_specified())
        throw Error("the description still has randomized parts (holes, 'random', or "
                    "'optional'); resolve it with `parcs randomize` first");
    return pg.to_graph();
}

// caller-provided error matrix, reordered to the graph's topological order
Matrix errors_from_csv(const Graph& g, const io::CsvTable& t) {
    if (t.any_missing) throw Error("the error matrix has missing cells");
    Matrix errors(t.values.rows(), g.nodes.size());
    for (std::size_t c = 0; c < g.topo_order().size(); ++c) {
        const std::string& name = g.nodes[g.topo_order()[c]].name;
        const auto it = std::find(t.header.begin(), t.header.end(), name);
        if (it == t.header.end())
            throw Error("the error matrix has no column '" + name + "'");
        const std::size_t src = static_cast<std::size_t>(it - t.header.begin());
        for (std::size_t r = 0; r < errors.rows(); ++r) errors(r, c) = t.values(r, src);
    }
    return errors;
}

// ------------------------------------------------------------------ validate

struct ValidateArgs {
    std::string graph_path;
    std::string manifest_path;
    std::uint64_t seed = 0;
};

int cmd_validate(const ValidateArgs& a) {
    const PartialGraph pg = load_description(a.graph_path);
    std::size_t unresolved = 0;
    for (const PartialNode& n : pg.nodes) {
        if (n.random || n.optional || !n.body) ++unresolved;
        else
            for (const ParamExpression& e : n.body->params) unresolved += e.has_holes() ? 1 : 0;
    }
    for (const PartialEdge& e : pg.edges)
        if (e.mode != EdgeMode::fixed) ++unresolved;

    if (pg.fully_specified()) {
        const Graph g = pg.to_graph();
        std::printf("valid: %zu nodes, %zu edges\n", g.nodes.size(), g.edges.size());
    } else {
        // a partial description is valid iff it resolves under a default guideline
        randomize(pg, Guideline{}, 0);
        std::printf("valid partial description: %zu nodes, %zu edges, %zu randomized element(s)\n",
                    pg.nodes.size(), pg.edges.size(), unresolved);
    }
    if (!a.manifest_path.empty()) {
        Manifest m;
        m.subcommand = "validate";
        m.argv = {"validate", a.graph_path};
        m.inputs["description"] = a.graph_path;
        m.write(a.manifest_path);
    }
    return 0;
}

// -------------------------------------------------------------------- sample

struct SampleArgs {
    std::string graph_path;
    std::string out_path;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    std::size_t burn_in = 10000;
    std::vector<std::string> interventions;
    std::string errors_out;
    std::string errors_in;
    std::string manifest_path;
};

Intervention parse_interventions(const std::vector<std::string>& raw) {
    Intervention iv;
    for (const std::string& item : raw) {
        const std::size_t eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error("intervention '" + item + "' is not of the form NAME=VALUE");
        const std::string name = item.substr(0, eq);
        const std::string value = item.substr(eq + 1);
        try {
            std::size_t used = 0;
            const double v = std::stod(value, &used);
            if (used != value.size()) throw std::invalid_argument(value);
            iv[name] = SetConstant{v};
        } catch (const std::exception&) {
            throw Error("intervention value '" + value + "' is not a number");
        }
    }
    return iv;
}

int cmd_sample(const SampleArgs& a) {
    Graph g = full_graph(load_description(a.graph_path));
    if (g.needs_calibration()) g = instantiate(std::move(g), a.burn_in, a.seed);

    const Intervention iv = parse_interventions(a.interventions);
    if (!iv.empty()) g = intervene(g, iv);

    SampleBatch batch;
    if (!a.errors_in.empty()) {
        batch = sample_with_errors(g, errors_from_csv(g, io::read_csv(a.errors_in)));
    } else {
        if (a.n == 0) throw Error("--n must be a positive row count");
        batch = sample(g, a.n, a.seed);
    }
    io::write_csv(a.out_path, batch.columns, batch.data);
    if (!a.errors_out.empty()) io::write_csv(a.errors_out, batch.columns, batch.errors);

    if (!a.manifest_path.empty()) {
        Manifest m;
        m.subcommand = "sample";
        m.argv = {"sample", a.graph_path, "--out", a.out_path,
                  "--seed", std::to_string(a.seed), "--burn-in", std::to_string(a.burn_in)};
        if (!a.errors_in.empty()) {
            m.argv.insert(m.argv.end(), {"--errors-in", a.errors_in});
        } else {
            m.argv.insert(m.argv.end(), {"--n", std::to_string(a.n)});
        }
        for (const std::string& item : a.interventions)
            m.argv.insert(m.argv.end(), {"--intervene", item});
        if (!a.errors_out.empty()) m.argv.insert(m.argv.end(), {"--errors-out", a.errors_out});
        m.inputs["description"] = a.graph_path;
        if (!a.errors_in.empty()) m.inputs["errors"] = a.errors_in;
        m.master_seed = a.seed;
        m.outputs.push_back(a.out_path);
        if (!a.errors_out.empty()) m.outputs.push_back(a.errors_out);
        m.write(a.manifest_path);
    }
    return 0;
}

// ----------------------------------------------------------------- randomize

struct RandomizeArgs {
    std::string graph_path;
    std::string guideline_path;
    std::string outdir;
    std::size_t iterations = 10;
    std::uint64_t seed = 0;
    std::string manifest_path;
};

int cmd_randomize(const RandomizeArgs& a) {
    const PartialGraph pg = load_description(a.graph_path);
    const Guideline gl = a.guideline_path.empty()
                             ? Guideline{}
                             : parse_guideline(io::read_file(a.guideline_path));
    make_outdir(a.outdir);

    Manifest m;
    m.subcommand = "randomize";
    m.argv = {"randomize", a.graph_path, "--out", a.outdir,
              "--iterations", std::to_string(a.iterations), "--seed", std::to_string(a.seed)};
    if (!a.guideline_path.empty())
        m.argv.insert(m.argv.begin() + 2, a.guideline_path);
    m.inputs["description"] = a.graph_path;
    if (!a.guideline_path.empty()) m.inputs["guideline"] = a.guideline_path;
    m.master_seed = a.seed;
    m.iterations = a.iterations;

    for (std::size_t i = 0; i < a.iterations; ++i) {
        const std::uint64_t s = derive_seed(a.seed, i);
        m.derived_seeds.push_back(s);
        const RandomizeResult res = randomize(pg, gl, s);
        const std::string stem = a.outdir + "/graph_" + padded(i, a.iterations);
        io::write_file(stem + ".pdl", serialize(res.graph));
        io::write_file(stem + ".trace.json", res.trace.to_json());
        m.outputs.push_back(stem + ".pdl");
        m.outputs.push_back(stem + ".trace.json");
    }
    m.write(a.manifest_path.empty() ? a.outdir + "/manifest.json" : a.manifest_path);
    return 0;
}

// ------------------------------------------------------------------- missing

struct MissingArgs {
    std::string input_path;
    std::string outdir;
    std::string mechanism = "mcar";
    double ratio = 0.3;
    std::vector<std::string> observed;
    double rr_density = 0.0;
    std::optional<double> sparsity;
    bool nonlinear = false;
    std::string guideline_path;
    std::size_t n = 10000;
    std::size_t burn_in = 10000;
    std::size_t iterations = 10;
    std::uint64_t seed = 0;
    std::string manifest_path;
};

int cmd_missing(const MissingArgs& a) {
    MechanismSpec mech;
    if (!mechanism_from_name(a.mechanism, mech.kind))
        throw Error("unknown mechanism '" + a.mechanism +
                    "' (use mcar, mar, mnar, sc, nsc, or mar+mcar)");
    mech.observed = a.observed;
    mech.rr_density = a.rr_density;

    const Guideline gl = a.guideline_path.empty()
                             ? Guideline{}
                             : parse_guideline(io::read_file(a.guideline_path));
    MgraphOptions opts;
    opts.burn_in = a.burn_in;
    opts.nonlinear = a.nonlinear;
    opts.sparsity_override = a.sparsity;

    const bool table_mode = a.input_path.ends_with(".csv");
    IngestedTable table;
    Graph z_graph;
    if (table_mode) {
        const io::CsvTable t = io::read_csv(a.input_path);
        if (t.any_missing) throw Error("the input dataset already has missing cells");
        table.columns = t.header;
        table.rows = t.values;
    } else {
        z_graph = full_graph(load_description(a.input_path));
    }
    make_outdir(a.outdir);

    Manifest m;
    m.subcommand = "missing";
    m.argv = {"missing", a.input_path, "--out", a.outdir, "--mechanism", a.mechanism,
              "--ratio", io::format_double(a.ratio),
              "--iterations", std::to_string(a.iterations),
              "--seed", std::to_string(a.seed),
              "--n", std::to_string(a.n), "--burn-in", std::to_string(a.burn_in)};
    if (!a.observed.empty()) {
        std::string joined;
        for (const std::string& o : a.observed) joined += (joined.empty() ? "" : ",") + o;
        m.argv.insert(m.argv.end(), {"--observed", joined});
    }
    if (a.rr_density > 0.0)
        m.argv.insert(m.argv.end(), {"--rr-density", io::format_double(a.rr_density)});
    if (a.sparsity) m.argv.insert(m.argv.end(), {"--sparsity", io::format_double(*a.sparsity)});
    if (a.nonlinear) m.argv.push_back("--nonlinear");
    if (!a.guideline_path.empty())
        m.argv.insert(m.argv.end(), {"--guideline", a.guideline_path});
    m.inputs["source"] = a.input_path;
    if (!a.guideline_path.empty()) m.inputs["guideline"] = a.guideline_path;
    m.master_seed = a.seed;
    m.iterations = a.iterations;

    for (std::size_t i = 0; i < a.iterations; ++i) {
        const std::uint64_t s = derive_seed(a.seed, i);
        m.derived_seeds.push_back(s);
        const Mgraph mg = table_mode ? build_mgraph(table, mech, gl, a.ratio, s, opts)
                                     : build_mgraph(z_graph, mech, gl, a.ratio, s, opts);

        SampleBatch batch;
        if (table_mode) {
            // mask the ingested rows in their original order: the row selector
            // of every data-backed column resolves to the row's own index
            const std::size_t n = table.rows.rows();
            Matrix errors(n, mg.graph.nodes.size());
            for (std::size_t c = 0; c < mg.graph.topo_order().size(); ++c) {
                const NodeSpec& node = mg.graph.nodes[mg.graph.topo_order()[c]];
                if (node.data_column) {
                    for (std::size_t r = 0; r < n; ++r)
                        errors(r, c) = (static_cast<double>(r) + 0.5) / static_cast<double>(n);
                } else {
                    UniformStream st(stream_seed(s, node.name));
                    for (std::size_t r = 0; r < n; ++r) errors(r, c) = st.next();
                }
            }
            batch = sample_with_errors(mg.graph, errors);
        } else {
            batch = sample(mg.graph, a.n, s);
        }
        const MaskedDataset masked = apply_missingness(mg, batch);

        const std::string stem = a.outdir + "/masked_" + padded(i, a.iterations);
        io::write_csv(stem + ".csv", masked.columns, masked.values, &masked.missing);
        io::write_csv(stem + ".mask.csv", masked.columns, masked.missing);
        std::string meta = "seed: " + std::to_string(s) + "\n";
        for (std::size_t j = 0; j < masked.columns.size(); ++j)
            meta += masked.columns[j] + ": " + io::format_double(masked.achieved_ratio[j]) + "\n";
        io::write_file(stem + ".meta", meta);
        io::write_file(stem + ".trace.json", mg.trace.to_json());
        m.outputs.insert(m.outputs.end(),
                         {stem + ".csv", stem + ".mask.csv", stem + ".meta",
                          stem + ".trace.json"});
    }
    m.write(a.manifest_path.empty() ? a.outdir + "/manifest.json" : a.manifest_path);
    return 0;
}

// -------------------------------------------------------------------- lingam

struct LingamArgs {
    std::size_t p = 5;
    std::string weight_range = "[-2,-0.5] U [0.5,2]";
    double phi = 1.0;
    std::string phi_range;
    std::string edge_correction = "off";
    std::size_t datasets = 500;
    std::size_t n = 1000;
    std::size_t burn_in = 10000;
    std::uint64_t seed = 0;
    std::string outdir;
    std::string manifest_path;
};

int cmd_lingam(const LingamArgs& a) {
    const IntervalUnion range = parse_interval_union(a.weight_range);
    LingamOptions opts;
    if (!a.phi_range.empty())
        opts.phi_range = parse_interval_union(a.phi_range);
    else
        opts.phi = a.phi;
    if (a.edge_correction != "on" && a.edge_correction != "off")
        throw Error("--edge-correction takes 'on' or 'off'");
    opts.edge_corrections = a.edge_correction == "on";
    make_outdir(a.outdir);

    Manifest m;
    m.subcommand = "lingam";
    m.argv = {"lingam", "--out", a.outdir, "--p", std::to_string(a.p),
              "--weight-range", a.weight_range,
              "--edge-correction", a.edge_correction,
              "--datasets", std::to_string(a.datasets), "--n", std::to_string(a.n),
              "--burn-in", std::to_string(a.burn_in), "--seed", std::to_string(a.seed)};
    if (!a.phi_range.empty())
        m.argv.insert(m.argv.end(), {"--phi-range", a.phi_range});
    else
        m.argv.insert(m.argv.end(), {"--phi", io::format_double(a.phi)});
    m.master_seed = a.seed;
    m.iterations = a.datasets;

    std::vector<std::string> names(a.p);
    for (std::size_t j = 0; j < a.p; ++j) names[j] = "X" + std::to_string(j + 1);

    for (std::size_t i = 0; i < a.datasets; ++i) {
        const std::uint64_t s = derive_seed(a.seed, i);
        m.derived_seeds.push_back(s);
        const LingamResult res = lingam_preset(a.p, range, s, opts);
        Graph g = res.graph;
        if (g.needs_calibration()) g = instantiate(std::move(g), a.burn_in, s);
        const SampleBatch batch = sample(g, a.n, s);

        const std::string dir = a.outdir + "/dataset_" + padded(i, a.datasets);
        make_outdir(dir);
        io::write_csv(dir + "/samples.csv", batch.columns, batch.data);
        io::write_csv(dir + "/b_matrix.csv", names, res.b);
        std::string order;
        for (const std::string& name : res.causal_order) order += name + "\n";
        io::write_file(dir + "/causal_order.txt", order);
        io::write_file(dir + "/meta.txt",
                       "seed: " + std::to_string(s) + "\nphi: " + io::format_double(res.phi) +
                           "\n");
        m.outputs.insert(m.outputs.end(),
                         {dir + "/samples.csv", dir + "/b_matrix.csv",
                          dir + "/causal_order.txt", dir + "/meta.txt"});
    }
    m.write(a.manifest_path.empty() ? a.outdir + "/manifest.json" : a.manifest_path);
    return 0;
}

void add_seed(CLI::App* cmd, std::uint64_t& seed) {
    cmd->add_option("--seed", seed, "master seed (env PARCS_SEED when omitted)")
        ->envname("PARCS_SEED");
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"causal data-generating processes: describe, randomize, sample"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));

    int rc = 0;

    ValidateArgs va;
    CLI::App* validate = app.add_subcommand("validate", "check a graph description");
    validate->add_option("description", va.graph_path, "graph description file")->required();
    validate->add_option("--manifest", va.manifest_path, "write a run manifest");
    add_seed(validate, va.seed);
    validate->callback([&] { rc = cmd_validate(va); });

    SampleArgs sa;
    CLI::App* sample = app.add_subcommand("sample", "draw rows from a fully specified graph");
    sample->add_option("description", sa.graph_path, "graph description file")->required();
    sample->add_option("--out", sa.out_path, "output CSV path")->required();
    sample->add_option("--n", sa.n, "row count");
    sample->add_option("--burn-in", sa.burn_in, "calibration sample size");
    sample->add_option("--intervene", sa.interventions,
                       "NAME=VALUE constant intervention (repeatable)");
    sample->add_option("--errors-out", sa.errors_out, "also write the uniform error matrix");
    sample->add_option("--errors-in", sa.errors_in,
                       "reuse a stored error matrix instead of drawing");
    sample->add_option("--manifest", sa.manifest_path, "write a run manifest");
    add_seed(sample, sa.seed);
    sample->callback([&] { rc = cmd_sample(sa); });

    RandomizeArgs ra;
    CLI::App* rand_cmd = app.add_subcommand("randomize", "resolve a partial description N times");
    rand_cmd->add_option("description", ra.graph_path, "partial description file")->required();
    rand_cmd->add_option("guideline", ra.guideline_path, "guideline file (defaults apply)");
    rand_cmd->add_option("--out", ra.outdir, "output directory")->required();
    rand_cmd->add_option("--iterations", ra.iterations, "number of resolved graphs");
    rand_cmd->add_option("--manifest", ra.manifest_path, "manifest path (default <out>/manifest.json)");
    add_seed(rand_cmd, ra.seed);
    rand_cmd->callback([&] { rc = cmd_randomize(ra); });

    MissingArgs ma;
    CLI::App* missing = app.add_subcommand("missing", "induce missingness via an m-graph");
    missing->add_option("input", ma.input_path, "complete dataset (.csv) or graph description")
        ->required();
    missing->add_option("--out", ma.outdir, "output directory")->required();
    missing->add_option("--mechanism", ma.mechanism, "mcar, mar, mnar, sc, nsc, or mar+mcar");
    missing->add_option("--ratio", ma.ratio, "target missingness ratio in (0,1)");
    missing->add_option("--observed", ma.observed, "fully observed columns (mar, mar+mcar)")
        ->delimiter(',');
    missing->add_option("--rr-density", ma.rr_density, "indicator-to-indicator edge density");
    missing->add_option("--sparsity", ma.sparsity, "override the guideline sparsity");
    missing->add_flag("--nonlinear", ma.nonlinear,
                      "draw edge functions and quadratic terms; force one parent per indicator");
    missing->add_option("--guideline", ma.guideline_path, "guideline file");
    missing->add_option("--n", ma.n, "rows per iteration (graph input)");
    missing->add_option("--burn-in", ma.burn_in, "calibration sample size");
    missing->add_option("--iterations", ma.iterations, "iteration count");
    missing->add_option("--manifest", ma.manifest_path, "manifest path (default <out>/manifest.json)");
    add_seed(missing, ma.seed);
    missing->callback([&] { rc = cmd_missing(ma); });

    LingamArgs la;
    CLI::App* lingam = app.add_subcommand("lingam", "linear non-Gaussian benchmark datasets");
    lingam->add_option("--out", la.outdir, "output directory")->required();
    lingam->add_option("--p", la.p, "node count");
    lingam->add_option("--weight-range", la.weight_range, "adjacency weight interval union");
    lingam->add_option("--phi", la.phi, "power-transform exponent");
    lingam->add_option("--phi-range", la.phi_range, "draw one exponent per dataset");
    lingam->add_option("--edge-correction", la.edge_correction, "standardize edges: on|off");
    lingam->add_option("--datasets", la.datasets, "dataset count");
    lingam->add_option("--n", la.n, "rows per dataset");
    lingam->add_option("--burn-in", la.burn_in, "calibration sample size");
    lingam->add_option("--manifest", la.manifest_path, "manifest path (default <out>/manifest.json)");
    add_seed(lingam, la.seed);
    lingam->callback([&] { rc = cmd_lingam(la); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return rc;
}

} // namespace parcs::cli
