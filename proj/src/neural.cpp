#include "mcstruct/neural.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace mcstruct {

namespace {

Matrix apply_activation(Activation act, Matrix z) {
    switch (act) {
        case Activation::identity: return z;
        case Activation::relu: return z.cwiseMax(0.0);
        case Activation::sigmoid:
            return z.unaryExpr([](double x) { return 1.0 / (1.0 + std::exp(-x)); });
        case Activation::tanh:
            return z.unaryExpr([](double x) { return std::tanh(x); });
    }
    return z;
}

// Derivative expressed through the activation output a = act(z).
Matrix activation_grad_from_output(Activation act, const Matrix& a) {
    switch (act) {
        case Activation::identity: return Matrix::Ones(a.rows(), a.cols());
        case Activation::relu:
            return a.unaryExpr([](double y) { return y > 0.0 ? 1.0 : 0.0; });
        case Activation::sigmoid: return a.array() * (1.0 - a.array());
        case Activation::tanh: return 1.0 - a.array().square();
    }
    return Matrix::Ones(a.rows(), a.cols());
}

double glorot_bound(int fan_in, int fan_out) {
    return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

DenseLayer make_layer(int in, int out, Activation act, Rng& rng) {
    const double bound = glorot_bound(in, out);
    Matrix W(out, in);
    for (int i = 0; i < out; ++i) {
        for (int j = 0; j < in; ++j) W(i, j) = (2.0 * rng.uniform() - 1.0) * bound;
    }
    return DenseLayer{std::move(W), Vector::Zero(out), act};
}

} // namespace

DenseNet make_mlp(int in, const std::vector<int>& hidden, int out, Rng& rng) {
    require(in >= 1 && out >= 1, "mlp dimensions must be positive");
    DenseNet net;
    int prev = in;
    for (int width : hidden) {
        net.layers.push_back(make_layer(prev, width, Activation::relu, rng));
        prev = width;
    }
    net.layers.push_back(make_layer(prev, out, Activation::identity, rng));
    return net;
}

Matrix forward(const DenseNet& net, const Matrix& X) {
    require(X.rows() == net.input_dim(), "input dimension mismatch");
    Matrix a = X;
    for (const auto& layer : net.layers) {
        a = apply_activation(layer.act, (layer.W * a).colwise() + layer.b);
    }
    return a;
}

Vector forward(const DenseNet& net, const Vector& x) {
    return Vector(forward(net, Matrix(x)));
}

Matrix forward_cached(const DenseNet& net, const Matrix& X, ForwardCache& cache) {
    require(X.rows() == net.input_dim(), "input dimension mismatch");
    cache.inputs.assign(net.layers.size(), Matrix());
    Matrix a = X;
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        cache.inputs[l] = a;
        const auto& layer = net.layers[l];
        a = apply_activation(layer.act, (layer.W * a).colwise() + layer.b);
    }
    cache.output = a;
    return a;
}

void NetGrads::scale(double s) {
    for (auto& g : dW) g *= s;
    for (auto& g : db) g *= s;
}

void NetGrads::add(const NetGrads& other) {
    for (std::size_t l = 0; l < dW.size(); ++l) {
        dW[l] += other.dW[l];
        db[l] += other.db[l];
    }
}

NetGrads zero_grads(const DenseNet& net) {
    NetGrads g;
    for (const auto& layer : net.layers) {
        g.dW.push_back(Matrix::Zero(layer.W.rows(), layer.W.cols()));
        g.db.push_back(Vector::Zero(layer.b.size()));
    }
    return g;
}

Matrix backward(const DenseNet& net, const ForwardCache& cache, const Matrix& upstream,
                NetGrads& grads) {
    require(upstream.rows() == net.output_dim(), "upstream dimension mismatch");
    Matrix delta = upstream;
    Matrix activated = cache.output;
    for (int l = static_cast<int>(net.layers.size()) - 1; l >= 0; --l) {
        const auto& layer = net.layers[static_cast<std::size_t>(l)];
        delta = delta.cwiseProduct(activation_grad_from_output(layer.act, activated));
        grads.dW[static_cast<std::size_t>(l)] +=
            delta * cache.inputs[static_cast<std::size_t>(l)].transpose();
        grads.db[static_cast<std::size_t>(l)] += delta.rowwise().sum();
        delta = (layer.W.transpose() * delta).eval();
        activated = cache.inputs[static_cast<std::size_t>(l)];
    }
    return delta;
}

BackwardResult backward(const DenseNet& net, const Vector& x, const Vector& upstream) {
    ForwardCache cache;
    forward_cached(net, Matrix(x), cache);
    BackwardResult result;
    result.grads = zero_grads(net);
    result.input_grad = backward(net, cache, Matrix(upstream), result.grads);
    return result;
}

namespace {

template <typename T>
void adam_update(T& param, const T& grad, AdamState& state, long t, const AdamConfig& cfg) {
    require(param.rows() == grad.rows() && param.cols() == grad.cols(),
            "adam_step: parameter/gradient shape mismatch");
    require(grad.allFinite(), "adam_step: non-finite gradient");
    require(t >= 1, "adam_step: step count starts at 1");
    if (state.m.size() == 0) {
        state.m = Matrix::Zero(param.rows(), param.cols());
        state.v = Matrix::Zero(param.rows(), param.cols());
    }
    state.m = cfg.beta1 * state.m + (1.0 - cfg.beta1) * grad;
    state.v = cfg.beta2 * state.v + (1.0 - cfg.beta2) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(t));
    param.array() -= cfg.lr * (state.m.array() / bc1) /
                     ((state.v.array() / bc2).sqrt() + cfg.eps);
}

} // namespace

void adam_step(Matrix& param, const Matrix& grad, AdamState& state, long t,
               const AdamConfig& cfg) {
    adam_update(param, grad, state, t, cfg);
}

void adam_step(Vector& param, const Vector& grad, AdamState& state, long t,
               const AdamConfig& cfg) {
    adam_update(param, grad, state, t, cfg);
}

NetAdam::NetAdam(const DenseNet& net)
    : w_states(net.layers.size()), b_states(net.layers.size()) {}

void NetAdam::apply(DenseNet& net, const NetGrads& grads, long t, const AdamConfig& cfg) {
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        adam_step(net.layers[l].W, grads.dW[l], w_states[l], t, cfg);
        adam_step(net.layers[l].b, grads.db[l], b_states[l], t, cfg);
    }
}

SetEncoder make_set_encoder(int in, int hidden, int out, Rng& rng) {
    SetEncoder enc;
    enc.inner = make_mlp(in, {hidden}, hidden, rng);
    enc.outer = make_mlp(hidden, {hidden}, out, rng);
    return enc;
}

std::vector<int> canonical_order(const std::vector<Vector>& elements) {
    std::vector<int> order(elements.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        const Vector& va = elements[static_cast<std::size_t>(a)];
        const Vector& vb = elements[static_cast<std::size_t>(b)];
        return std::lexicographical_compare(va.begin(), va.end(), vb.begin(), vb.end());
    });
    return order;
}

Vector encode_set(const SetEncoder& enc, const std::vector<Vector>& elements) {
    require(!elements.empty(), "encode_set requires a nonempty set");
    for (const auto& e : elements) {
        require(e.size() == enc.inner.input_dim(), "set element dimension mismatch");
    }
    const auto order = canonical_order(elements);
    Vector pooled = Vector::Zero(enc.inner.output_dim());
    for (int idx : order) {
        pooled += forward(enc.inner, elements[static_cast<std::size_t>(idx)]);
    }
    return encode_pooled(enc, pooled);
}

Vector encode_pooled(const SetEncoder& enc, const Vector& pooled) {
    return forward(enc.outer, pooled);
}

LossGrad softmax_cross_entropy(const Matrix& logits, const std::vector<int>& labels) {
    require(static_cast<int>(labels.size()) == logits.cols(),
            "one label per logit column required");
    const int batch = static_cast<int>(logits.cols());
    LossGrad out;
    out.dlogits = Matrix::Zero(logits.rows(), logits.cols());
    for (int i = 0; i < batch; ++i) {
        const int y = labels[static_cast<std::size_t>(i)];
        require(y >= 0 && y < logits.rows(), "label out of range");
        const double zmax = logits.col(i).maxCoeff();
        const Vector shifted = logits.col(i).array() - zmax;
        const Vector expz = shifted.array().exp();
        const double total = expz.sum();
        out.loss += std::log(total) - shifted(y);
        out.dlogits.col(i) = expz / total;
        out.dlogits(y, i) -= 1.0;
    }
    out.loss /= batch;
    out.dlogits /= batch;
    return out;
}

double bce_with_logits(double logit, double target, double& dlogit) {
    dlogit = sigmoid(logit) - target;
    return std::max(logit, 0.0) - logit * target + std::log1p(std::exp(-std::abs(logit)));
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

void write_tensors(const std::string& path,
                   const std::vector<std::pair<std::string, Matrix>>& tensors) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    for (const auto& [name, M] : tensors) {
        out << "# tensor " << name << ' ' << M.rows() << ' ' << M.cols() << '\n';
        for (int i = 0; i < M.rows(); ++i) {
            for (int j = 0; j < M.cols(); ++j) {
                if (j) out << ',';
                out << M(i, j);
            }
            out << '\n';
        }
    }
}

std::map<std::string, Matrix> read_tensors(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::map<std::string, Matrix> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream header(line);
        std::string hash, keyword, name;
        int rows = 0, cols = 0;
        if (!(header >> hash >> keyword >> name >> rows >> cols) || hash != "#" ||
            keyword != "tensor") {
            throw std::runtime_error(path + ": expected `# tensor <name> <rows> <cols>`");
        }
        Matrix M(rows, cols);
        for (int i = 0; i < rows; ++i) {
            if (!std::getline(in, line)) {
                throw std::runtime_error(path + ": tensor " + name + " is truncated");
            }
            std::istringstream ss(line);
            std::string cell;
            for (int j = 0; j < cols; ++j) {
                if (!std::getline(ss, cell, ',')) {
                    throw std::runtime_error(path + ": tensor " + name + " row " +
                                             std::to_string(i) + " is short");
                }
                M(i, j) = std::stod(cell);
            }
        }
        out.emplace(name, std::move(M));
    }
    return out;
}

void append_net_tensors(const std::string& prefix, const DenseNet& net,
                        std::vector<std::pair<std::string, Matrix>>& out) {
    Matrix acts(1, static_cast<int>(net.layers.size()));
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
        acts(0, static_cast<int>(l)) = static_cast<double>(net.layers[l].act);
        out.emplace_back(prefix + ".l" + std::to_string(l) + ".W", net.layers[l].W);
        out.emplace_back(prefix + ".l" + std::to_string(l) + ".b", Matrix(net.layers[l].b));
    }
    out.emplace_back(prefix + ".acts", std::move(acts));
}

DenseNet net_from_tensors(const std::string& prefix,
                          const std::map<std::string, Matrix>& tensors) {
    const auto acts_it = tensors.find(prefix + ".acts");
    if (acts_it == tensors.end()) {
        throw std::runtime_error("checkpoint is missing tensor " + prefix + ".acts");
    }
    DenseNet net;
    const Matrix& acts = acts_it->second;
    for (int l = 0; l < acts.cols(); ++l) {
        const std::string stem = prefix + ".l" + std::to_string(l);
        const auto w_it = tensors.find(stem + ".W");
        const auto b_it = tensors.find(stem + ".b");
        if (w_it == tensors.end() || b_it == tensors.end()) {
            throw std::runtime_error("checkpoint is missing tensors for " + stem);
        }
        net.layers.push_back(DenseLayer{w_it->second, Vector(b_it->second.col(0)),
                                        static_cast<Activation>(static_cast<int>(acts(0, l)))});
    }
    return net;
}

void append_set_encoder_tensors(const std::string& prefix, const SetEncoder& enc,
                                std::vector<std::pair<std::string, Matrix>>& out) {
    append_net_tensors(prefix + ".inner", enc.inner, out);
    append_net_tensors(prefix + ".outer", enc.outer, out);
}

SetEncoder set_encoder_from_tensors(const std::string& prefix,
                                    const std::map<std::string, Matrix>& tensors) {
    SetEncoder enc;
    enc.inner = net_from_tensors(prefix + ".inner", tensors);
    enc.outer = net_from_tensors(prefix + ".outer", tensors);
    return enc;
}

} // namespace mcstruct
