#ifndef MCSTRUCT_NEURAL_HPP
#define MCSTRUCT_NEURAL_HPP

#include "mcstruct/rng.hpp"
#include "mcstruct/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace mcstruct {

enum class Activation { identity, relu, sigmoid, tanh };

struct DenseLayer {
    Matrix W;  // out x in
    Vector b;  // out
    Activation act = Activation::identity;
};

struct DenseNet {
    std::vector<DenseLayer> layers;

    int input_dim() const { return static_cast<int>(layers.front().W.cols()); }
    int output_dim() const { return static_cast<int>(layers.back().W.rows()); }
};

/// MLP with `hidden` relu layers and an identity-activation output layer.
/// Glorot-uniform weights, zero biases.
DenseNet make_mlp(int in, const std::vector<int>& hidden, int out, Rng& rng);

// -- forward / backward -------------------------------------------------------
// Batched variants treat columns as instances; the single-vector forms are
// the batch-1 case. backward returns exact reverse-mode gradients.

Matrix forward(const DenseNet& net, const Matrix& X);
Vector forward(const DenseNet& net, const Vector& x);

struct ForwardCache {
    std::vector<Matrix> inputs; // inputs[l] is the input to layer l
    Matrix output;
};

Matrix forward_cached(const DenseNet& net, const Matrix& X, ForwardCache& cache);

struct NetGrads {
    std::vector<Matrix> dW;
    std::vector<Vector> db;

    void scale(double s);
    void add(const NetGrads& other);
};

NetGrads zero_grads(const DenseNet& net);

/// Reverse pass over a cached forward; accumulates into `grads` and returns
/// the gradient with respect to the layer-0 input.
Matrix backward(const DenseNet& net, const ForwardCache& cache, const Matrix& upstream,
                NetGrads& grads);

struct BackwardResult {
    NetGrads grads;
    Vector input_grad;
};

BackwardResult backward(const DenseNet& net, const Vector& x, const Vector& upstream);

// -- Adam ----------------------------------------------------------------------

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    Matrix m, v; // sized on first use
};

/// One Adam update with bias correction. `t` counts steps from 1.
/// Non-finite gradients are an error.
void adam_step(Matrix& param, const Matrix& grad, AdamState& state, long t,
               const AdamConfig& cfg);
void adam_step(Vector& param, const Vector& grad, AdamState& state, long t,
               const AdamConfig& cfg);

/// Adam over all tensors of one DenseNet.
struct NetAdam {
    std::vector<AdamState> w_states, b_states;

    explicit NetAdam(const DenseNet& net);
    void apply(DenseNet& net, const NetGrads& grads, long t, const AdamConfig& cfg);
};

// -- permutation-invariant set encoder ------------------------------------------

/// Deep-sets encoder: `inner` per element, exact sum pooling, `outer` on the
/// pooled vector. Elements are folded in a canonical order (lexicographic on
/// their contents), which makes the output bit-identical across input
/// orderings, not merely equal up to rounding.
struct SetEncoder {
    DenseNet inner;
    DenseNet outer;

    int input_dim() const { return inner.input_dim(); }
    int output_dim() const { return outer.output_dim(); }
};

SetEncoder make_set_encoder(int in, int hidden, int out, Rng& rng);

/// Encodes a nonempty set of equal-dimension vectors.
Vector encode_set(const SetEncoder& enc, const std::vector<Vector>& elements);

/// outer(pooled); the pooled vector for an empty set is all-zero.
Vector encode_pooled(const SetEncoder& enc, const Vector& pooled);

/// Canonical fold order: indices of `elements` sorted lexicographically by
/// content (stable). Exposed so backward passes can replay the same order.
std::vector<int> canonical_order(const std::vector<Vector>& elements);

// -- losses ----------------------------------------------------------------------

struct LossGrad {
    double loss = 0.0; // mean over the batch
    Matrix dlogits;
};

LossGrad softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels);

/// Numerically stable binary cross-entropy on a logit; returns the loss and
/// writes d(loss)/d(logit).
double bce_with_logits(double logit, double target, double& dlogit);

double sigmoid(double x);

// -- checkpoints -------------------------------------------------------------------
// Flat CSV of named tensors: `# tensor <name> <rows> <cols>` headers followed
// by one comma-separated line per row.

void write_tensors(const std::string& path,
                   const std::vector<std::pair<std::string, Matrix>>& tensors);
std::map<std::string, Matrix> read_tensors(const std::string& path);

void append_net_tensors(const std::string& prefix, const DenseNet& net,
                        std::vector<std::pair<std::string, Matrix>>& out);
DenseNet net_from_tensors(const std::string& prefix,
                          const std::map<std::string, Matrix>& tensors);
void append_set_encoder_tensors(const std::string& prefix, const SetEncoder& enc,
                                std::vector<std::pair<std::string, Matrix>>& out);
SetEncoder set_encoder_from_tensors(const std::string& prefix,
                                    const std::map<std::string, Matrix>& tensors);

} // namespace mcstruct

#endif
