#include "mcstruct/structural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mcstruct {

namespace {

template <typename T>
T balanced_mean_range(const std::vector<T>& xs, std::size_t lo, std::size_t hi) {
    const std::size_t len = hi - lo;
    if (len == 1) return xs[lo];
    const std::size_t half = len / 2;
    const T left = balanced_mean_range(xs, lo, lo + half);
    const T right = balanced_mean_range(xs, lo + half, hi);
    if (len % 2 == 0) return (left + right) / 2.0;
    return (static_cast<double>(half) * left + static_cast<double>(len - half) * right) /
           static_cast<double>(len);
}

std::vector<Vector> subset_rows(const EmbeddingSample& sample, const VertexSubset& subset) {
    std::vector<Vector> rows;
    rows.reserve(static_cast<std::size_t>(subset.size()));
    for (int v : subset.nodes()) {
        require(v < sample.Z.rows(), "subset node index exceeds the sample's node count");
        rows.push_back(sample.Z.row(v).transpose());
    }
    return rows;
}

void check_uniform_samples(const std::vector<EmbeddingSample>& samples) {
    require(!samples.empty(), "at least one sample required");
    for (const auto& s : samples) {
        require(s.Z.cols() == samples.front().Z.cols() &&
                    s.Z.rows() == samples.front().Z.rows(),
                "samples must share one graph and one embedding dimension");
    }
}

} // namespace

Vector balanced_mean(const std::vector<Vector>& terms) {
    require(!terms.empty(), "balanced_mean of an empty list");
    return balanced_mean_range(terms, 0, terms.size());
}

double balanced_mean(const std::vector<double>& terms) {
    require(!terms.empty(), "balanced_mean of an empty list");
    return balanced_mean_range(terms, 0, terms.size());
}

StructuralEstimate estimate_structural(const std::vector<EmbeddingSample>& samples,
                                       const VertexSubset& subset, const SetEncoder& f) {
    check_uniform_samples(samples);
    std::vector<Vector> encoded;
    encoded.reserve(samples.size());
    for (const auto& sample : samples) {
        encoded.push_back(encode_set(f, subset_rows(sample, subset)));
    }
    return StructuralEstimate{subset, balanced_mean(encoded),
                              static_cast<int>(samples.size()),
                              samples.front().provenance.sampler_id + ", m=" +
                                  std::to_string(samples.size()) + ", d=" +
                                  std::to_string(samples.front().Z.cols())};
}

Vector mu_node(int v, const std::vector<EmbeddingSample>& samples) {
    check_uniform_samples(samples);
    std::vector<Vector> rows;
    rows.reserve(samples.size());
    for (const auto& s : samples) {
        require(v >= 0 && v < s.Z.rows(), "node index out of range");
        rows.push_back(s.Z.row(v).transpose());
    }
    return balanced_mean(rows);
}

double mu_pair(int u, int v, const std::vector<EmbeddingSample>& samples) {
    require(u != v, "mu_pair is undefined for u == v");
    check_uniform_samples(samples);
    std::vector<double> distances;
    distances.reserve(samples.size());
    for (const auto& s : samples) {
        require(u >= 0 && v >= 0 && u < s.Z.rows() && v < s.Z.rows(),
                "node index out of range");
        distances.push_back((s.Z.row(u) - s.Z.row(v)).norm());
    }
    return balanced_mean(distances);
}

namespace {

struct ReadoutGrads {
    NetGrads inner, outer, head;
};

// Batched forward/backward over instances of one arity. Element columns of
// each instance are folded in the canonical content order so results match
// the single-instance encode_set path bit for bit.
struct ReadoutBatch {
    Matrix elements;               // in x (arity * batch)
    std::vector<std::vector<int>> fold_order; // per instance, slot order
    std::vector<int> labels;
};

ReadoutBatch assemble_batch(const std::vector<TaskInstance>& instances,
                            const std::vector<int>& index, std::size_t lo, std::size_t hi,
                            const Matrix& Z, int arity) {
    ReadoutBatch batch;
    const int count = static_cast<int>(hi - lo);
    const int in_dim = static_cast<int>(Z.cols());
    batch.elements.resize(in_dim, arity * count);
    batch.fold_order.resize(static_cast<std::size_t>(count));
    batch.labels.resize(static_cast<std::size_t>(count));
    for (int b = 0; b < count; ++b) {
        const auto& inst = instances[static_cast<std::size_t>(
            index[lo + static_cast<std::size_t>(b)])];
        std::vector<Vector> rows;
        rows.reserve(static_cast<std::size_t>(arity));
        for (int v : inst.subset.nodes()) rows.push_back(Z.row(v).transpose());
        batch.fold_order[static_cast<std::size_t>(b)] = canonical_order(rows);
        for (int slot = 0; slot < arity; ++slot) {
            batch.elements.col(b * arity + slot) = rows[static_cast<std::size_t>(slot)];
        }
        batch.labels[static_cast<std::size_t>(b)] = inst.label;
    }
    return batch;
}

double readout_batch_step(const ReadoutModel& model, const ReadoutBatch& batch, int arity,
                          ReadoutGrads& grads) {
    const int count = static_cast<int>(batch.labels.size());
    ForwardCache inner_cache, outer_cache, head_cache;
    const Matrix H = forward_cached(model.set_encoder.inner, batch.elements, inner_cache);
    Matrix pooled(H.rows(), count);
    for (int b = 0; b < count; ++b) {
        Vector acc = Vector::Zero(H.rows());
        for (int slot : batch.fold_order[static_cast<std::size_t>(b)]) {
            acc += H.col(b * arity + slot);
        }
        pooled.col(b) = acc;
    }
    const Matrix repr = forward_cached(model.set_encoder.outer, pooled, outer_cache);
    const Matrix logits = forward_cached(model.head, repr, head_cache);
    const LossGrad loss = softmax_cross_entropy(logits, batch.labels);

    const Matrix drepr = backward(model.head, head_cache, loss.dlogits, grads.head);
    const Matrix dpooled = backward(model.set_encoder.outer, outer_cache, drepr, grads.outer);
    Matrix dH(H.rows(), H.cols());
    for (int b = 0; b < count; ++b) {
        for (int slot = 0; slot < arity; ++slot) {
            dH.col(b * arity + slot) = dpooled.col(b);
        }
    }
    backward(model.set_encoder.inner, inner_cache, dH, grads.inner);
    return loss.loss;
}

} // namespace

ReadoutTrainResult train_readout(const AttributedGraph& g,
                                 const std::vector<TaskInstance>& train_instances,
                                 const SamplerSpec& spec, const ReadoutHyper& hyper) {
    require(!train_instances.empty(), "readout training needs at least one instance");
    const int arity = train_instances.front().subset.size();
    int class_count = 0;
    for (const auto& inst : train_instances) {
        require(inst.subset.size() == arity, "instances must share one arity");
        class_count = std::max(class_count, inst.label + 1);
    }
    class_count = std::max(class_count, 2);

    Rng rng(hyper.seed);
    Rng init_rng = rng.fork(0x696e6974);
    ReadoutTrainResult result;
    result.model.arity = arity;
    result.model.class_count = class_count;
    result.model.set_encoder = make_set_encoder(spec.d, hyper.hidden, hyper.repr_dim, init_rng);
    result.model.head = make_mlp(hyper.repr_dim, {hyper.hidden, hyper.hidden}, class_count,
                                 init_rng);
    ReadoutModel& model = result.model;

    NetAdam inner_adam(model.set_encoder.inner);
    NetAdam outer_adam(model.set_encoder.outer);
    NetAdam head_adam(model.head);
    const AdamConfig adam_cfg{hyper.lr, 0.9, 0.999, 1e-8};
    long adam_t = 0;

    const std::uint64_t train_stream = rng.substream(0x747261696e);
    Rng shuffle_rng = rng.fork(0x73687566);
    std::vector<int> index(train_instances.size());
    std::iota(index.begin(), index.end(), 0);

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        // Fresh Monte Carlo sample for this epoch's representations.
        const EmbeddingSample sample = draw_sample(
            g, spec, Rng(train_stream).substream(static_cast<std::uint64_t>(epoch)));
        shuffle_rng.shuffle(index);

        double epoch_loss = 0.0;
        int batches = 0;
        for (std::size_t lo = 0; lo < index.size(); lo += static_cast<std::size_t>(hyper.batch)) {
            const std::size_t hi = std::min(index.size(),
                                            lo + static_cast<std::size_t>(hyper.batch));
            const ReadoutBatch batch =
                assemble_batch(train_instances, index, lo, hi, sample.Z, arity);
            ReadoutGrads grads{zero_grads(model.set_encoder.inner),
                               zero_grads(model.set_encoder.outer), zero_grads(model.head)};
            epoch_loss += readout_batch_step(model, batch, arity, grads);
            ++batches;
            ++adam_t;
            inner_adam.apply(model.set_encoder.inner, grads.inner, adam_t, adam_cfg);
            outer_adam.apply(model.set_encoder.outer, grads.outer, adam_t, adam_cfg);
            head_adam.apply(model.head, grads.head, adam_t, adam_cfg);
        }
        epoch_loss /= std::max(batches, 1);
        if (!std::isfinite(epoch_loss)) {
            throw divergence_error("readout training loss is non-finite", epoch);
        }
        result.loss_curve.push_back(epoch_loss);
    }
    return result;
}

Vector readout_representation(const ReadoutModel& model,
                              const std::vector<EmbeddingSample>& samples,
                              const VertexSubset& subset) {
    require(subset.size() == model.arity, "subset arity does not match the model");
    return estimate_structural(samples, subset, model.set_encoder).value;
}

Vector predict(const ReadoutModel& model, const AttributedGraph& g,
               const SamplerSpec& spec, const VertexSubset& subset, int m_test,
               std::uint64_t stream_seed) {
    const auto samples = draw_samples(g, spec, stream_seed, m_test);
    return forward(model.head, readout_representation(model, samples, subset));
}

EvalResult evaluate_readout(const ReadoutModel& model, const AttributedGraph& g,
                            const SamplerSpec& spec,
                            const std::vector<TaskInstance>& instances, int m_test,
                            std::uint64_t stream_seed) {
    require(!instances.empty(), "evaluation needs at least one instance");
    const auto samples = draw_samples(g, spec, stream_seed, m_test);
    EvalResult result;
    result.predictions.reserve(instances.size());
    result.truth.reserve(instances.size());
    for (const auto& inst : instances) {
        const Vector scores =
            forward(model.head, readout_representation(model, samples, inst.subset));
        int argmax = 0;
        scores.maxCoeff(&argmax);
        result.predictions.push_back(argmax);
        result.truth.push_back(inst.label);
    }
    result.micro_f1 = micro_f1(result.predictions, result.truth);
    return result;
}

void save_readout(const std::string& path, const ReadoutModel& model) {
    std::vector<std::pair<std::string, Matrix>> tensors;
    Matrix meta(1, 2);
    meta << static_cast<double>(model.arity), static_cast<double>(model.class_count);
    tensors.emplace_back("readout.meta", std::move(meta));
    append_set_encoder_tensors("readout.f", model.set_encoder, tensors);
    append_net_tensors("readout.head", model.head, tensors);
    write_tensors(path, tensors);
}

ReadoutModel load_readout(const std::string& path) {
    const auto tensors = read_tensors(path);
    const auto meta_it = tensors.find("readout.meta");
    if (meta_it == tensors.end()) {
        throw std::runtime_error(path + ": missing readout.meta tensor");
    }
    ReadoutModel model;
    model.arity = static_cast<int>(meta_it->second(0, 0));
    model.class_count = static_cast<int>(meta_it->second(0, 1));
    model.set_encoder = set_encoder_from_tensors("readout.f", tensors);
    model.head = net_from_tensors("readout.head", tensors);
    return model;
}

void write_estimates_csv(const std::string& path,
                         const std::vector<StructuralEstimate>& estimates) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    out << "subset,m,value\n";
    for (const auto& est : estimates) {
        for (std::size_t i = 0; i < est.subset.nodes().size(); ++i) {
            if (i) out << ' ';
            out << est.subset.nodes()[i];
        }
        out << ',' << est.m;
        for (int j = 0; j < est.value.size(); ++j) out << ',' << est.value(j);
        out << '\n';
    }
}

} // namespace mcstruct
