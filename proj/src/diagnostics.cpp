#include "mcstruct/diagnostics.hpp"

#include "mcstruct/structural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mcstruct {

std::vector<int> checkpoint_grid(int m_max) {
    require(m_max >= 1, "m_max must be positive");
    std::vector<int> grid;
    for (int m : {1, 2, 5, 10, 20, 50, 100, 200, 400}) {
        if (m <= m_max) grid.push_back(m);
    }
    if (grid.back() != m_max && m_max < 400) grid.push_back(m_max);
    return grid;
}

namespace {

std::vector<std::string> provenance_lines(const AttributedGraph& g, const SamplerSpec& spec,
                                          std::uint64_t seed, int m_max) {
    std::ostringstream line;
    line << "sampler=" << spec.describe() << " seed=" << seed << " n=" << g.n()
         << " m_max=" << m_max;
    return {line.str()};
}

double sample_variance(const std::vector<double>& xs, std::size_t count, double mean) {
    if (count < 2) return 0.0;
    double acc = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        const double d = xs[i] - mean;
        acc += d * d;
    }
    return acc / static_cast<double>(count - 1);
}

} // namespace

ConvergenceCurve node_convergence(const AttributedGraph& g, const SamplerSpec& spec,
                                  int u, int v, int m_max, std::uint64_t seed) {
    require(u != v, "node_convergence requires two distinct nodes");
    require(u >= 0 && v >= 0 && u < g.n() && v < g.n(), "node index out of range");
    const auto samples = draw_samples(g, spec, seed, m_max);

    ConvergenceCurve curve;
    curve.provenance = provenance_lines(g, spec, seed, m_max);
    const std::string stat = "node-gap:" + std::to_string(u) + "-" + std::to_string(v);

    // Per-sample difference vectors; the statistic at m is the norm of
    // their prefix mean.
    const int d = static_cast<int>(samples.front().Z.cols());
    for (int m : checkpoint_grid(m_max)) {
        std::vector<EmbeddingSample> prefix(samples.begin(), samples.begin() + m);
        const Vector gap = mu_node(u, prefix) - mu_node(v, prefix);

        double var_sum = 0.0;
        if (m >= 2) {
            for (int j = 0; j < d; ++j) {
                std::vector<double> coord(static_cast<std::size_t>(m));
                double mean = 0.0;
                for (int i = 0; i < m; ++i) {
                    coord[static_cast<std::size_t>(i)] =
                        samples[static_cast<std::size_t>(i)].Z(u, j) -
                        samples[static_cast<std::size_t>(i)].Z(v, j);
                    mean += coord[static_cast<std::size_t>(i)];
                }
                mean /= m;
                var_sum += sample_variance(coord, static_cast<std::size_t>(m), mean);
            }
        }
        curve.rows.push_back(CurveRow{stat, m, gap.norm(),
                                      std::sqrt(var_sum / static_cast<double>(m))});
    }
    return curve;
}

ConvergenceCurve pair_convergence(const AttributedGraph& g, const SamplerSpec& spec,
                                  const std::vector<std::pair<int, int>>& pairs,
                                  int m_max, std::uint64_t seed) {
    require(!pairs.empty(), "pair_convergence needs at least one pair");
    for (const auto& [u, v] : pairs) {
        require(u != v, "pair_convergence requires distinct nodes in each pair");
        require(u >= 0 && v >= 0 && u < g.n() && v < g.n(), "node index out of range");
    }
    const auto samples = draw_samples(g, spec, seed, m_max);

    ConvergenceCurve curve;
    curve.provenance = provenance_lines(g, spec, seed, m_max);
    for (const auto& [u, v] : pairs) {
        const std::string stat = "pair-mu:" + std::to_string(u) + "-" + std::to_string(v);
        std::vector<double> distances(samples.size());
        for (std::size_t i = 0; i < samples.size(); ++i) {
            distances[i] = (samples[i].Z.row(u) - samples[i].Z.row(v)).norm();
        }
        for (int m : checkpoint_grid(m_max)) {
            std::vector<double> prefix(distances.begin(), distances.begin() + m);
            const double value = balanced_mean(prefix);
            double mean = 0.0;
            for (double x : prefix) mean += x;
            mean /= m;
            const double sd =
                std::sqrt(sample_variance(prefix, static_cast<std::size_t>(m), mean));
            curve.rows.push_back(CurveRow{stat, m, value, sd / std::sqrt(double(m))});
        }
    }
    return curve;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    require(!a.empty() && !b.empty(), "KS test needs nonempty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

double ks_threshold(double alpha, int n1, int n2) {
    const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
    return c * std::sqrt(static_cast<double>(n1 + n2) /
                         (static_cast<double>(n1) * static_cast<double>(n2)));
}

EquivarianceReport equivariance_report(const AttributedGraph& g, const SamplerSpec& spec,
                                       int n_samples, std::uint64_t seed) {
    require(n_samples >= 4, "equivariance report needs at least 4 samples");
    const OrbitPartition orbits = node_orbits(g); // throws size_limit_error for n > 10

    std::vector<std::tuple<int, int, int>> pairs; // (u, v, class)
    const auto classes = orbits.node_classes();
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (std::size_t i = 0; i < classes[c].size(); ++i) {
            for (std::size_t j = i + 1; j < classes[c].size(); ++j) {
                pairs.emplace_back(classes[c][i], classes[c][j], static_cast<int>(c));
            }
        }
    }

    EquivarianceReport report;
    report.samples_used = n_samples;
    if (pairs.empty()) return report; // trivial automorphism group

    const auto samples = draw_samples(g, spec, seed, n_samples);
    Matrix norms(n_samples, g.n());
    for (int i = 0; i < n_samples; ++i) {
        for (int v = 0; v < g.n(); ++v) {
            norms(i, v) = samples[static_cast<std::size_t>(i)].Z.row(v).norm();
        }
    }

    const int half = n_samples / 2;
    const double alpha = 0.01 / static_cast<double>(pairs.size()); // Bonferroni
    const double threshold = ks_threshold(alpha, half, n_samples - half);
    for (const auto& [u, v, cls] : pairs) {
        // Disjoint halves of the stream keep the two samples independent.
        std::vector<double> nu(half), nv(n_samples - half);
        for (int i = 0; i < half; ++i) nu[static_cast<std::size_t>(i)] = norms(i, u);
        for (int i = half; i < n_samples; ++i) {
            nv[static_cast<std::size_t>(i - half)] = norms(i, v);
        }
        const double d = ks_statistic(std::move(nu), std::move(nv));
        const bool violation = d > threshold;
        report.rows.push_back(EquivarianceRow{u, v, cls, d, threshold, violation});
        if (violation) ++report.violations;
    }
    return report;
}

void write_curve_csv(const std::string& path, const ConvergenceCurve& curve) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    for (const auto& line : curve.provenance) out << "# provenance: " << line << '\n';
    out.precision(17);
    out << "statistic,m,value,stderr\n";
    for (const auto& row : curve.rows) {
        out << row.statistic << ',' << row.m << ',' << row.value << ',' << row.stderr_value
            << '\n';
    }
}

void write_equivariance_csv(const std::string& path, const EquivarianceReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << "# samples: " << report.samples_used << '\n';
    out.precision(17);
    out << "node_u,node_v,orbit_class,ks_statistic,threshold,violation\n";
    for (const auto& row : report.rows) {
        out << row.node_u << ',' << row.node_v << ',' << row.orbit_class << ','
            << row.ks_statistic << ',' << row.threshold << ',' << (row.violation ? 1 : 0)
            << '\n';
    }
}

} // namespace mcstruct
