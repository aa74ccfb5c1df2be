#ifndef MCSTRUCT_DIAGNOSTICS_HPP
#define MCSTRUCT_DIAGNOSTICS_HPP

#include "mcstruct/samplers.hpp"

#include <string>
#include <vector>

namespace mcstruct {

struct CurveRow {
    std::string statistic;
    int m = 0;
    double value = 0.0;
    double stderr_value = 0.0;
};

/// Sample-count convergence trajectories, reproducible bit-exactly from
/// (graph, sampler spec, seed). stderr is the sample standard deviation of
/// the underlying per-sample statistic divided by sqrt(m); vector-valued
/// statistics aggregate coordinate variances as sqrt(sum_j var_j / m).
struct ConvergenceCurve {
    std::vector<CurveRow> rows;
    std::vector<std::string> provenance;
};

/// Checkpoints {1,2,5,10,20,50,100,200,400} clipped to m_max.
std::vector<int> checkpoint_grid(int m_max);

/// ||mu_node(u) - mu_node(v)|| as a function of m, evaluated on prefixes of
/// one fixed sample stream.
ConvergenceCurve node_convergence(const AttributedGraph& g, const SamplerSpec& spec,
                                  int u, int v, int m_max, std::uint64_t seed);

/// mu_pair trajectories (mean pairwise embedding distance) with running
/// standard errors, one statistic per requested pair, all sharing one
/// sample stream.
ConvergenceCurve pair_convergence(const AttributedGraph& g, const SamplerSpec& spec,
                                  const std::vector<std::pair<int, int>>& pairs,
                                  int m_max, std::uint64_t seed);

struct EquivarianceRow {
    int node_u = 0;
    int node_v = 0;
    int orbit_class = 0;
    double ks_statistic = 0.0;
    double threshold = 0.0;
    bool violation = false;
};

struct EquivarianceReport {
    std::vector<EquivarianceRow> rows;
    int violations = 0;
    int samples_used = 0;
};

/// Tests, for every same-orbit node pair of an exact-orbit graph (n <= 10),
/// whether ||Z_u|| and ||Z_v|| are identically distributed: a two-sample
/// Kolmogorov-Smirnov test at the 1% level with Bonferroni correction
/// across pairs. The draws are split in half so the two samples are
/// independent. Graphs with a trivial automorphism group produce no rows.
EquivarianceReport equivariance_report(const AttributedGraph& g, const SamplerSpec& spec,
                                       int n_samples, std::uint64_t seed);

/// Two-sample Kolmogorov-Smirnov statistic (max CDF gap).
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Critical value c(alpha) * sqrt((n1+n2)/(n1*n2)) of the two-sample KS
/// test, asymptotic form.
double ks_threshold(double alpha, int n1, int n2);

/// CSV `statistic,m,value,stderr` with `# provenance:` header lines.
void write_curve_csv(const std::string& path, const ConvergenceCurve& curve);

void write_equivariance_csv(const std::string& path, const EquivarianceReport& report);

} // namespace mcstruct

#endif
