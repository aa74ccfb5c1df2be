#ifndef MCSTRUCT_SAMPLERS_HPP
#define MCSTRUCT_SAMPLERS_HPP

#include "mcstruct/graph.hpp"
#include "mcstruct/linalg.hpp"
#include "mcstruct/neural.hpp"

#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace mcstruct {

/// Everything needed to regenerate a sample bit-exactly (together with the
/// graph and, for CGNN, the parameter checkpoint).
struct SampleProvenance {
    std::string sampler_id;
    std::uint64_t seed = 0;
    std::vector<int> input_permutation;
    int power_steps = 0; // MC-SVD
    int gibbs_sweeps = 0; // CGNN
    int d = 0;
};

/// One Monte Carlo draw Z. Row i corresponds to node i of the unpermuted
/// graph regardless of the input permutation recorded in the provenance.
struct EmbeddingSample {
    Matrix Z; // n x d
    SampleProvenance provenance;
};

enum class SvdMode { single_step, converged };

/// MC-SVD draw: a seed-derived random permutation is applied to the
/// adjacency, the permuted matrix is factorized by randomized_svd
/// (power_steps = 1) or svd_converged, and the left vectors are re-indexed
/// through the inverse permutation so row i lines up with node i. The
/// permutation and the factorization randomness are the two sources of
/// sampling noise. Deterministic given (g, d, mode, seed).
EmbeddingSample mc_svd_sample(const AttributedGraph& g, int d, SvdMode mode,
                              std::uint64_t seed, double tol = 1e-10,
                              int max_steps = 500);

// -- CGNN ----------------------------------------------------------------------

/// Latent-variable sampler parameters. Dimension contract:
/// update_mlp input = neighbor_encoder.out + feature_encoder.out + k,
/// output = 2d (mean and log-variance); decoder_mlp scores a symmetric
/// pair encoding of size 2d.
struct CgnnParams {
    SetEncoder neighbor_encoder; // f, over latent rows
    SetEncoder feature_encoder;  // g, over neighbor features
    DenseNet update_mlp;
    DenseNet decoder_mlp;
    std::optional<DenseNet> feature_decoder; // only with the feature-reconstruction flag
    int d = 0;
    int feature_dim = 0;
};

CgnnParams make_cgnn_params(int d, int feature_dim, int hidden, Rng& rng,
                            bool with_feature_decoder = false);

/// i.i.d. standard normal n x d initial latents, deterministic per seed.
Matrix cgnn_init(int n, int d, std::uint64_t seed);

struct GibbsOptions {
    bool deterministic_mean = false; // test hook: suppress the noise term
};

/// One Gibbs sweep: sequentially for u in ascending node order, pool the
/// current latents and features of u's neighbors (row u of the adjacency),
/// run the update MLP to get (mean, log-variance), and resample
/// Z_u = mean + exp(logvar/2) * eps with eps drawn from `seed`'s stream
/// (the reparametrization form). Isolated nodes pool an all-zero summary.
/// Non-finite latents raise divergence_error.
Matrix cgnn_gibbs_sweep(const AttributedGraph& g, const CgnnParams& params,
                        const Matrix& Z, std::uint64_t seed,
                        const GibbsOptions& options = {});

/// Full CGNN draw: seed-derived random input permutation, normal init,
/// `sweeps` Gibbs sweeps on the permuted graph, rows mapped back to the
/// original node order. The input permutation makes the sampling
/// distribution exactly permutation-equivariant irrespective of the
/// fixed ascending scan order inside a sweep.
EmbeddingSample cgnn_sample(const AttributedGraph& g, const CgnnParams& params,
                            int sweeps, std::uint64_t seed);

struct CgnnHyper {
    int d = 32;
    int sweeps = 3;
    int epochs = 40;
    double lr = 1e-3;
    int neg_ratio = 1;
    int hidden = 256;
    std::uint64_t seed = 0;
    bool reconstruct_features = false;
    double feature_loss_weight = 1.0;
};

struct CgnnTrainResult {
    CgnnParams params;
    std::vector<double> loss_curve; // pre-update loss per epoch
};

/// One evaluation of the unsupervised reconstruction objective at fixed
/// noise: a seed-determined input permutation, init, per-update noise, and
/// negative pairs, with the unrolled-sweep sample scored against the
/// observed edges. Returns the mean binary cross-entropy and the exact
/// parameter gradients (reverse mode through every sweep). Shared by the
/// trainer and by gradient checks.
struct CgnnObjective {
    double loss = 0.0;
    NetGrads neighbor_inner, neighbor_outer;
    NetGrads feature_inner, feature_outer;
    NetGrads update, decoder;
    NetGrads feature_decoder; // empty unless params carry one
};

CgnnObjective cgnn_objective(const AttributedGraph& g, const CgnnParams& params,
                             int sweeps, int neg_ratio, std::uint64_t epoch_seed,
                             double feature_loss_weight = 0.0);

/// Unsupervised trainer: per epoch one fresh unrolled-Gibbs sample is drawn
/// (fresh input permutation included), every observed edge plus
/// neg_ratio x sampled non-edges are scored with
/// sigmoid(decoder(Z_u, Z_v)), and the binary cross-entropy is minimized by
/// Adam with gradients backpropagated through the unrolled sweeps via the
/// reparametrization of the noise. The graph is treated as undirected for
/// the reconstruction objective. Non-finite losses raise divergence_error
/// carrying the epoch index.
CgnnTrainResult cgnn_train(const AttributedGraph& g, const CgnnHyper& hyper);

/// Symmetric pair encoding fed to the decoder: [z_u .* z_v ; |z_u - z_v|].
Vector pair_encoding(const Vector& zu, const Vector& zv);

// -- sampler specs --------------------------------------------------------------

/// Config-level sampler descriptor used by readouts, diagnostics, and the
/// CLI. Known ids: "mc-svd" (single step), "mc-svd-converged", "cgnn"
/// (requires params), and "planted-violation" (an intentionally broken
/// sampler that adds the node id to every embedding row; used to validate
/// the equivariance diagnostics).
struct SamplerSpec {
    std::string id = "mc-svd";
    int d = 32;
    int sweeps = 3;
    double tol = 1e-10;
    int max_steps = 500;
    std::shared_ptr<const CgnnParams> cgnn;

    std::string describe() const;
};

EmbeddingSample draw_sample(const AttributedGraph& g, const SamplerSpec& spec,
                            std::uint64_t seed);

/// m independent draws; draw i uses the substream seed of `stream_seed`
/// keyed by i, so any prefix of the stream is reproducible.
std::vector<EmbeddingSample> draw_samples(const AttributedGraph& g,
                                          const SamplerSpec& spec,
                                          std::uint64_t stream_seed, int m);

// -- embedding files -------------------------------------------------------------

/// CSV `node_id,z_0..z_{d-1}` plus a plain key:value sidecar
/// (`<path>.prov`) holding the provenance record.
void write_embedding(const std::string& path, const EmbeddingSample& sample);
EmbeddingSample read_embedding(const std::string& path);

// CGNN checkpoint files.
void save_cgnn(const std::string& path, const CgnnParams& params);
CgnnParams load_cgnn(const std::string& path);

} // namespace mcstruct

#endif
