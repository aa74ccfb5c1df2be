#ifndef MCSTRUCT_STRUCTURAL_HPP
#define MCSTRUCT_STRUCTURAL_HPP

#include "mcstruct/samplers.hpp"
#include "mcstruct/tasks.hpp"

#include <string>
#include <vector>

namespace mcstruct {

/// Balanced ascending-order mean: even-length lists combine as the exact
/// average of the two half-means, so the estimate over the concatenation of
/// two equal-size sample lists is bit-identical to the average of the two
/// half-estimates.
Vector balanced_mean(const std::vector<Vector>& terms);
double balanced_mean(const std::vector<double>& terms);

/// Monte Carlo structural representation of a node subset: the balanced
/// mean over samples of the permutation-invariant set encoding of the
/// subset's embedding rows.
struct StructuralEstimate {
    VertexSubset subset;
    Vector value;
    int m = 0;
    std::string provenance;
};

StructuralEstimate estimate_structural(const std::vector<EmbeddingSample>& samples,
                                       const VertexSubset& subset, const SetEncoder& f);

/// Mean embedding row of node v across samples (the arity-1 diagnostic
/// estimator).
Vector mu_node(int v, const std::vector<EmbeddingSample>& samples);

/// Mean Euclidean distance between rows u and v across samples (the arity-2
/// diagnostic estimator). u == v is a precondition violation.
double mu_pair(int u, int v, const std::vector<EmbeddingSample>& samples);

// -- supervised readout -----------------------------------------------------------

/// f^(k) realized as a learned set encoder plus a classification head.
struct ReadoutModel {
    SetEncoder set_encoder;
    DenseNet head;
    int arity = 1;
    int class_count = 2;
};

struct ReadoutHyper {
    int hidden = 256;
    int repr_dim = 256;
    int epochs = 50;
    double lr = 1e-3;
    int batch = 128;
    std::uint64_t seed = 0;
};

struct ReadoutTrainResult {
    ReadoutModel model;
    std::vector<double> loss_curve;
};

/// Trains the set encoder and head jointly with Adam on softmax
/// cross-entropy. One fresh embedding sample is drawn per epoch (the
/// per-epoch Monte Carlo resampling of the training representations); all
/// minibatches of that epoch share it. Training seeds come from the `train`
/// substream of hyper.seed; evaluation should use a disjoint stream.
ReadoutTrainResult train_readout(const AttributedGraph& g,
                                 const std::vector<TaskInstance>& train_instances,
                                 const SamplerSpec& spec, const ReadoutHyper& hyper);

/// Class scores for one subset: the head applied to the structural estimate
/// over m_test fresh samples drawn from `stream_seed`. The argmax is the
/// predicted class.
Vector predict(const ReadoutModel& model, const AttributedGraph& g,
               const SamplerSpec& spec, const VertexSubset& subset, int m_test,
               std::uint64_t stream_seed);

struct EvalResult {
    std::vector<int> predictions;
    std::vector<int> truth;
    double micro_f1 = 0.0;
};

/// Evaluates many instances against one shared batch of m_test samples
/// (honest out-of-sample Monte Carlo, one stream for the whole split).
EvalResult evaluate_readout(const ReadoutModel& model, const AttributedGraph& g,
                            const SamplerSpec& spec,
                            const std::vector<TaskInstance>& instances, int m_test,
                            std::uint64_t stream_seed);

/// Representation of one subset against a fixed sample batch.
Vector readout_representation(const ReadoutModel& model,
                              const std::vector<EmbeddingSample>& samples,
                              const VertexSubset& subset);

void save_readout(const std::string& path, const ReadoutModel& model);
ReadoutModel load_readout(const std::string& path);

/// CSV export `subset;m;value...` for structural estimates.
void write_estimates_csv(const std::string& path,
                         const std::vector<StructuralEstimate>& estimates);

} // namespace mcstruct

#endif
