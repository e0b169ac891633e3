#include <cmath>
#include <string_view>

#include "parcs/errors.hpp"
#include "parcs/graph.hpp"
#include "parcs/rng.hpp"

namespace parcs {

namespace {

// data-backed nodes share one row selector derived from the error column of
// the first data-backed node in evaluation order, so a stored error matrix
// reproduces ingested rows exactly
constexpr std::size_t no_driver = static_cast<std::size_t>(-1);

void zeta_into(std::span<const double> x, std::vector<double>& out) {
    out.clear();
    out.push_back(1.0);
    for (double v : x) out.push_back(v);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i; j < x.size(); ++j) out.push_back(x[i] * x[j]);
}

} // namespace

class Sampler {
public:
    static Matrix fill_errors(const Graph& g, std::size_t n, std::uint64_t seed) {
        Matrix errors(n, g.nodes.size());
        for (std::size_t pos = 0; pos < g.topo_order_.size(); ++pos) {
            UniformStream stream(stream_seed(seed, g.nodes[g.topo_order_[pos]].name));
            for (std::size_t r = 0; r < n; ++r) errors(r, pos) = stream.next();
        }
        return errors;
    }

    // evaluates all columns; with calibrate=true also freezes edge moments and
    // target-mean offsets (in evaluation order, against already-corrected
    // upstream columns)
    static Matrix evaluate(Graph& g, const Matrix& errors, bool calibrate) {
        const std::size_t n = errors.rows();
        const std::size_t d = g.nodes.size();
        Matrix data(n, d);

        std::vector<std::size_t> topo_pos(d);
        for (std::size_t pos = 0; pos < d; ++pos) topo_pos[g.topo_order_[pos]] = pos;

        // shared row selector for data-backed columns
        std::vector<std::size_t> row_idx;
        if (g.table) {
            std::size_t driver = no_driver;
            for (std::size_t i : g.topo_order_) {
                if (g.nodes[i].data_column) {
                    driver = topo_pos[i];
                    break;
                }
            }
            if (driver != no_driver) {
                const auto n_rows = static_cast<double>(g.table->rows.rows());
                if (g.table->rows.rows() == 0) throw Error("ingested table has no rows");
                row_idx.resize(n);
                for (std::size_t r = 0; r < n; ++r) {
                    auto idx = static_cast<std::size_t>(errors(r, driver) * n_rows);
                    row_idx[r] = idx >= g.table->rows.rows() ? g.table->rows.rows() - 1 : idx;
                }
            }
        }

        std::vector<double> tvals, zeta_buf, theta, raw;
        Matrix tv;

        for (std::size_t pos = 0; pos < d; ++pos) {
            const std::size_t i = g.topo_order_[pos];
            NodeSpec& node = g.nodes[i];

            if (node.data_column) {
                for (std::size_t r = 0; r < n; ++r)
                    data(r, pos) = g.table->rows(row_idx[r], *node.data_column);
                continue;
            }

            const auto& plan = g.in_edges_[i];
            const std::size_t np = plan.size();

            // transformed parent values, one column per in-edge
            tv = Matrix(n, np);
            for (std::size_t k = 0; k < np; ++k) {
                const auto [pi, ei] = plan[k];
                EdgeSpec& e = g.edges[ei];
                const std::size_t src = topo_pos[pi];
                for (std::size_t r = 0; r < n; ++r)
                    tv(r, k) = apply_edge_function(e.function, data(r, src));
                if (e.correction.enabled) {
                    if (calibrate) {
                        raw.assign(n, 0.0);
                        for (std::size_t r = 0; r < n; ++r) raw[r] = tv(r, k);
                        const Moments m = estimate_moments(raw);
                        e.correction.mu = m.mu;
                        e.correction.sigma = m.sigma;
                        e.correction.frozen = true;
                    }
                    for (std::size_t r = 0; r < n; ++r)
                        tv(r, k) = apply_edge_correction(tv(r, k), e.correction);
                }
            }

            if (calibrate) {
                for (std::size_t k = 0; k < node.weights.size(); ++k) {
                    auto& corr = node.corrections[k];
                    if (!corr || !corr->target_mean) continue;
                    raw.assign(n, 0.0);
                    for (std::size_t r = 0; r < n; ++r) {
                        tvals.assign(np, 0.0);
                        for (std::size_t c = 0; c < np; ++c) tvals[c] = tv(r, c);
                        zeta_into(tvals, zeta_buf);
                        double acc = 0.0;
                        for (std::size_t j = 0; j < zeta_buf.size(); ++j)
                            acc += node.weights[k][j] * zeta_buf[j];
                        raw[r] = acc;
                    }
                    corr->offset =
                        calibrate_offset(raw, *corr->target_mean, corr->lower, corr->upper);
                    corr->frozen = true;
                }
            }

            theta.assign(node.weights.size(), 0.0);
            for (std::size_t r = 0; r < n; ++r) {
                tvals.assign(np, 0.0);
                for (std::size_t c = 0; c < np; ++c) tvals[c] = tv(r, c);
                zeta_into(tvals, zeta_buf);
                for (std::size_t k = 0; k < node.weights.size(); ++k) {
                    const auto& row = node.weights[k];
                    double acc = 0.0;
                    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * zeta_buf[j];
                    if (node.corrections[k]) acc = node_correction(acc, *node.corrections[k]);
                    theta[k] = acc;
                }
                data(r, pos) = icdf_sample(node.kind, theta, errors(r, pos));
            }
        }
        return data;
    }

    static std::vector<std::string> column_names(const Graph& g) {
        std::vector<std::string> out;
        out.reserve(g.nodes.size());
        for (std::size_t i : g.topo_order_) out.push_back(g.nodes[i].name);
        return out;
    }
};

Graph instantiate(Graph g, std::size_t burn_in_n, std::uint64_t seed) {
    g = validate(std::move(g));
    if (g.needs_calibration()) {
        if (burn_in_n < 2)
            throw InvalidParameter("calibration needs a burn-in of at least 2 rows");
        const Matrix errors = Sampler::fill_errors(g, burn_in_n, seed);
        Sampler::evaluate(g, errors, /*calibrate=*/true);
    }
    g.calibrated_ = true;
    g.burn_in_used_ = burn_in_n;
    return g;
}

SampleBatch sample(const Graph& g, std::size_t n, std::uint64_t seed) {
    if (!g.validated()) throw Error("sample: validate the graph first");
    if (g.needs_calibration() && !g.calibrated())
        throw NotCalibrated("graph carries uncalibrated corrections; instantiate it first");
    SampleBatch batch;
    batch.seed = seed;
    batch.columns = Sampler::column_names(g);
    batch.errors = Sampler::fill_errors(g, n, seed);
    Graph scratch = g; // evaluate() only mutates under calibrate=true
    batch.data = Sampler::evaluate(scratch, batch.errors, /*calibrate=*/false);
    return batch;
}

SampleBatch sample_with_errors(const Graph& g, Matrix errors) {
    if (!g.validated()) throw Error("sample: validate the graph first");
    if (g.needs_calibration() && !g.calibrated())
        throw NotCalibrated("graph carries uncalibrated corrections; instantiate it first");
    if (errors.cols() != g.nodes.size())
        throw ShapeMismatch("error matrix has " + std::to_string(errors.cols()) +
                            " columns for " + std::to_string(g.nodes.size()) + " nodes");
    SampleBatch batch;
    batch.columns = Sampler::column_names(g);
    Graph scratch = g;
    batch.data = Sampler::evaluate(scratch, errors, /*calibrate=*/false);
    batch.errors = std::move(errors);
    return batch;
}

} // namespace parcs
