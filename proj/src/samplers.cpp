#include "mcstruct/samplers.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mcstruct {

namespace {

constexpr double kLogVarClamp = 8.0;

// Resamples the factorization's gauge freedom uniformly: a Haar-random
// rotation inside every numerically degenerate singular block and a random
// sign on every isolated column. (U R) diag(s) (V R)^T equals U diag(s) V^T
// when R is block-diagonal over equal singular values, so the result is
// the same factorization; without this step the small-SVD routine locks
// degenerate blocks to a data-dependent orientation and the sample mean of
// Z acquires a spurious bias.
void randomize_gauge(SvdResult& svd, Rng& rng) {
    const int d = static_cast<int>(svd.singular_values.size());
    const double scale = d > 0 ? std::max(svd.singular_values(0), 1e-300) : 1.0;
    int lo = 0;
    while (lo < d) {
        int hi = lo + 1;
        while (hi < d &&
               svd.singular_values(lo) - svd.singular_values(hi) <= 1e-6 * scale) {
            ++hi;
        }
        const int width = hi - lo;
        if (width == 1) {
            if (rng.uniform() < 0.5) {
                svd.left_vectors.col(lo) *= -1.0;
                svd.right_vectors.col(lo) *= -1.0;
            }
        } else {
            Matrix gauss(width, width);
            for (int i = 0; i < width; ++i) {
                for (int j = 0; j < width; ++j) gauss(i, j) = rng.normal();
            }
            Eigen::HouseholderQR<Matrix> qr(gauss);
            Matrix rotation = qr.householderQ() * Matrix::Identity(width, width);
            // Fix the QR sign convention so the rotation is Haar, not biased.
            const Matrix r_factor = qr.matrixQR().topRows(width).triangularView<Eigen::Upper>();
            for (int j = 0; j < width; ++j) {
                if (r_factor(j, j) < 0.0) rotation.col(j) *= -1.0;
            }
            svd.left_vectors.middleCols(lo, width) =
                (svd.left_vectors.middleCols(lo, width) * rotation).eval();
            svd.right_vectors.middleCols(lo, width) =
                (svd.right_vectors.middleCols(lo, width) * rotation).eval();
        }
        lo = hi;
    }
}

std::vector<std::vector<int>> neighbor_lists(const AttributedGraph& g) {
    std::vector<std::vector<int>> nbrs(static_cast<std::size_t>(g.n()));
    for (int u = 0; u < g.n(); ++u) {
        for (int v = 0; v < g.n(); ++v) {
            if (v != u && g.adjacency(u, v) != 0.0) {
                nbrs[static_cast<std::size_t>(u)].push_back(v);
            }
        }
    }
    return nbrs;
}

Matrix permuted_rows_back(const Matrix& permuted, const Permutation& p) {
    Matrix out(permuted.rows(), permuted.cols());
    for (int i = 0; i < permuted.rows(); ++i) {
        out.row(i) = permuted.row(p(i));
    }
    return out;
}

// Pooled sum of net(inputs[v]) for v in the canonical content order; empty
// sets pool to zero.
Vector pooled_sum(const DenseNet& inner, const std::vector<Vector>& elements) {
    Vector pooled = Vector::Zero(inner.output_dim());
    const auto order = canonical_order(elements);
    for (int idx : order) {
        pooled += forward(inner, elements[static_cast<std::size_t>(idx)]);
    }
    return pooled;
}

struct UpdateForward {
    std::vector<Vector> latents;  // neighbor latent inputs
    std::vector<Vector> features; // neighbor feature inputs
    Vector mu, logvar_raw, logvar;
};

// Forward computation of one node update; shared by sampling and training.
UpdateForward update_forward(const CgnnParams& params, const AttributedGraph& g,
                             const std::vector<int>& nbrs, const Matrix& Z_rows_source,
                             const Matrix* Z_old_rows, int split_at, int u) {
    UpdateForward fwd;
    fwd.latents.reserve(nbrs.size());
    fwd.features.reserve(nbrs.size());
    for (int v : nbrs) {
        // Nodes below `split_at` carry this sweep's fresh value.
        const Matrix& source = (Z_old_rows != nullptr && v >= split_at) ? *Z_old_rows
                                                                        : Z_rows_source;
        fwd.latents.push_back(source.row(v).transpose());
        fwd.features.push_back(g.node_features.row(v).transpose());
    }
    const Vector hidden = encode_pooled(params.neighbor_encoder,
                                        pooled_sum(params.neighbor_encoder.inner, fwd.latents));
    const Vector visible = encode_pooled(params.feature_encoder,
                                         pooled_sum(params.feature_encoder.inner, fwd.features));
    Vector mlp_in(hidden.size() + visible.size() + g.node_features.cols());
    mlp_in << hidden, visible, g.node_features.row(u).transpose();
    const Vector out = forward(params.update_mlp, mlp_in);
    // Bounded latent mean; the log-variance half stays linear (clamped).
    fwd.mu = out.head(params.d).array().tanh().matrix();
    fwd.logvar_raw = out.tail(params.d);
    fwd.logvar = fwd.logvar_raw.cwiseMax(-kLogVarClamp).cwiseMin(kLogVarClamp);
    return fwd;
}

void sweep_in_place(const AttributedGraph& g, const CgnnParams& params,
                    const std::vector<std::vector<int>>& nbrs, Matrix& Z, Rng& rng,
                    const GibbsOptions& options, Matrix* eps_out) {
    const int n = g.n();
    for (int u = 0; u < n; ++u) {
        const auto fwd = update_forward(params, g, nbrs[static_cast<std::size_t>(u)], Z,
                                        nullptr, 0, u);
        Vector eps = Vector::Zero(params.d);
        if (!options.deterministic_mean) {
            for (int j = 0; j < params.d; ++j) eps(j) = rng.normal();
        }
        Z.row(u) = (fwd.mu.array() + (fwd.logvar.array() / 2.0).exp() * eps.array())
                       .matrix()
                       .transpose();
        if (eps_out != nullptr) eps_out->row(u) = eps.transpose();
    }
    if (!Z.allFinite()) {
        throw divergence_error("Gibbs sweep produced non-finite latents", -1);
    }
}

} // namespace

EmbeddingSample mc_svd_sample(const AttributedGraph& g, int d, SvdMode mode,
                              std::uint64_t seed, double tol, int max_steps) {
    require(d >= 1 && d <= g.n(), "embedding dimension must satisfy 1 <= d <= n");
    Rng rng(seed);
    Rng perm_rng = rng.fork(0x7065726d);
    const Permutation p = Permutation::random(g.n(), perm_rng);
    const AttributedGraph permuted = apply_permutation(g, p);
    const std::uint64_t svd_seed = rng.substream(0x737664);

    SvdResult svd;
    EmbeddingSample sample;
    if (mode == SvdMode::single_step) {
        svd = randomized_svd(permuted.adjacency, d, 1, svd_seed);
        sample.provenance.sampler_id = "mc-svd";
        sample.provenance.power_steps = 1;
    } else {
        svd = svd_converged(permuted.adjacency, d, tol, max_steps, svd_seed);
        sample.provenance.sampler_id = "mc-svd-converged";
        sample.provenance.power_steps = svd.iterations_run;
    }
    Rng gauge_rng = rng.fork(0x6761756765);
    randomize_gauge(svd, gauge_rng);
    sample.Z = permuted_rows_back(svd.left_vectors, p);
    sample.provenance.seed = seed;
    sample.provenance.input_permutation = p.mapping();
    sample.provenance.d = d;
    return sample;
}

CgnnParams make_cgnn_params(int d, int feature_dim, int hidden, Rng& rng,
                            bool with_feature_decoder) {
    require(d >= 1 && feature_dim >= 1 && hidden >= 1, "CGNN dimensions must be positive");
    CgnnParams params;
    params.d = d;
    params.feature_dim = feature_dim;
    params.neighbor_encoder = make_set_encoder(d, hidden, hidden, rng);
    params.feature_encoder = make_set_encoder(feature_dim, hidden, hidden, rng);
    params.update_mlp = make_mlp(2 * hidden + feature_dim, {hidden}, 2 * d, rng);
    // Sum pooling scales the update inputs with the neighbor count, and an
    // unbounded mean head lets the latents blow up multiplicatively across
    // sweeps; the mean half of the output therefore passes through tanh
    // (see update_forward). Scaling the output layer keeps the head in
    // tanh's active region at initialization.
    params.update_mlp.layers.back().W *= 0.25;
    params.decoder_mlp = make_mlp(2 * d, {hidden}, 1, rng);
    if (with_feature_decoder) {
        params.feature_decoder = make_mlp(d, {hidden}, feature_dim, rng);
    }
    return params;
}

Matrix cgnn_init(int n, int d, std::uint64_t seed) {
    Rng rng(seed);
    Matrix Z(n, d);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < d; ++j) Z(i, j) = rng.normal();
    }
    return Z;
}

Matrix cgnn_gibbs_sweep(const AttributedGraph& g, const CgnnParams& params,
                        const Matrix& Z, std::uint64_t seed,
                        const GibbsOptions& options) {
    require(Z.rows() == g.n() && Z.cols() == params.d, "latent matrix shape mismatch");
    require(g.node_features.cols() == params.feature_dim, "feature dimension mismatch");
    Matrix next = Z;
    Rng rng(seed);
    const auto nbrs = neighbor_lists(g);
    sweep_in_place(g, params, nbrs, next, rng, options, nullptr);
    return next;
}

EmbeddingSample cgnn_sample(const AttributedGraph& g, const CgnnParams& params,
                            int sweeps, std::uint64_t seed) {
    require(sweeps >= 1, "cgnn_sample requires at least one sweep");
    Rng rng(seed);
    Rng perm_rng = rng.fork(0x7065726d);
    const Permutation p = Permutation::random(g.n(), perm_rng);
    const AttributedGraph permuted = apply_permutation(g, p);
    const auto nbrs = neighbor_lists(permuted);

    Matrix Z = cgnn_init(g.n(), params.d, rng.substream(0x696e6974));
    for (int t = 1; t <= sweeps; ++t) {
        Rng sweep_rng(rng.substream(0x73770000ULL + static_cast<std::uint64_t>(t)));
        sweep_in_place(permuted, params, nbrs, Z, sweep_rng, GibbsOptions{}, nullptr);
    }

    EmbeddingSample sample;
    sample.Z = permuted_rows_back(Z, p);
    sample.provenance.sampler_id = "cgnn";
    sample.provenance.seed = seed;
    sample.provenance.input_permutation = p.mapping();
    sample.provenance.gibbs_sweeps = sweeps;
    sample.provenance.d = params.d;
    return sample;
}

Vector pair_encoding(const Vector& zu, const Vector& zv) {
    Vector pe(2 * zu.size());
    pe.head(zu.size()) = zu.cwiseProduct(zv);
    pe.tail(zu.size()) = (zu - zv).cwiseAbs();
    return pe;
}

namespace {

struct CgnnAdam {
    NetAdam f_inner, f_outer, g_inner, g_outer, update, decoder;

    explicit CgnnAdam(const CgnnParams& p)
        : f_inner(p.neighbor_encoder.inner),
          f_outer(p.neighbor_encoder.outer),
          g_inner(p.feature_encoder.inner),
          g_outer(p.feature_encoder.outer),
          update(p.update_mlp),
          decoder(p.decoder_mlp) {}

    void apply(CgnnParams& p, const CgnnObjective& g, long t, const AdamConfig& cfg) {
        f_inner.apply(p.neighbor_encoder.inner, g.neighbor_inner, t, cfg);
        f_outer.apply(p.neighbor_encoder.outer, g.neighbor_outer, t, cfg);
        g_inner.apply(p.feature_encoder.inner, g.feature_inner, t, cfg);
        g_outer.apply(p.feature_encoder.outer, g.feature_outer, t, cfg);
        update.apply(p.update_mlp, g.update, t, cfg);
        decoder.apply(p.decoder_mlp, g.decoder, t, cfg);
    }
};

} // namespace

// Shared by cgnn_train and gradient checks: the per-epoch objective with
// seed-fixed randomness, differentiated through the unrolled sweeps.
CgnnObjective cgnn_objective(const AttributedGraph& g, const CgnnParams& params,
                             int sweeps, int neg_ratio, std::uint64_t epoch_seed,
                             double feature_loss_weight) {
    require(sweeps >= 1, "cgnn_objective requires at least one sweep");
    const int n = g.n();
    const int d = params.d;
    const int T = sweeps;
    Rng epoch_rng(epoch_seed);

    CgnnObjective obj;
    obj.neighbor_inner = zero_grads(params.neighbor_encoder.inner);
    obj.neighbor_outer = zero_grads(params.neighbor_encoder.outer);
    obj.feature_inner = zero_grads(params.feature_encoder.inner);
    obj.feature_outer = zero_grads(params.feature_encoder.outer);
    obj.update = zero_grads(params.update_mlp);
    obj.decoder = zero_grads(params.decoder_mlp);
    if (params.feature_decoder) obj.feature_decoder = zero_grads(*params.feature_decoder);

    // One Monte Carlo draw of the unrolled sampler, with versions and noise
    // recorded for the reverse pass.
    Rng perm_rng = epoch_rng.fork(1);
    const Permutation p = Permutation::random(n, perm_rng);
    const AttributedGraph gp = apply_permutation(g, p);
    const auto nbrs = neighbor_lists(gp);

    std::vector<Matrix> versions(static_cast<std::size_t>(T) + 1);
    std::vector<Matrix> eps(static_cast<std::size_t>(T));
    versions[0] = cgnn_init(n, d, epoch_rng.substream(2));
    for (int t = 1; t <= T; ++t) {
        Matrix Z = versions[static_cast<std::size_t>(t - 1)];
        Matrix eps_t(n, d);
        Rng sweep_rng(epoch_rng.substream(0x100ULL + static_cast<std::uint64_t>(t)));
        sweep_in_place(gp, params, nbrs, Z, sweep_rng, GibbsOptions{}, &eps_t);
        versions[static_cast<std::size_t>(t)] = std::move(Z);
        eps[static_cast<std::size_t>(t - 1)] = std::move(eps_t);
    }
    const Matrix& Zfinal = versions[static_cast<std::size_t>(T)];

    // Scored pairs: the permuted graph's edges plus sampled non-edges.
    std::vector<std::pair<int, int>> edges;
    for (int u = 0; u < n; ++u) {
        for (int v = u + 1; v < n; ++v) {
            if (gp.adjacency(u, v) != 0.0) edges.emplace_back(u, v);
        }
    }
    std::vector<std::pair<int, int>> negatives;
    Rng neg_rng = epoch_rng.fork(3);
    const std::size_t want = edges.size() * static_cast<std::size_t>(neg_ratio);
    std::size_t attempts = 0;
    while (negatives.size() < want && attempts < 50 * want + 100) {
        ++attempts;
        const int u = neg_rng.uniform_int(0, n - 1);
        const int v = neg_rng.uniform_int(0, n - 1);
        if (u == v || gp.adjacency(u, v) != 0.0) continue;
        negatives.emplace_back(std::min(u, v), std::max(u, v));
    }

    Matrix gZ_final = Matrix::Zero(n, d);
    const std::size_t pair_count = edges.size() + negatives.size();

    auto score_pair = [&](int u, int v, double target) {
        const Vector zu = Zfinal.row(u).transpose();
        const Vector zv = Zfinal.row(v).transpose();
        ForwardCache cache;
        const double logit =
            forward_cached(params.decoder_mlp, Matrix(pair_encoding(zu, zv)), cache)(0, 0);
        double dlogit = 0.0;
        obj.loss += bce_with_logits(logit, target, dlogit);
        Matrix upstream(1, 1);
        upstream(0, 0) = dlogit / static_cast<double>(pair_count);
        const Vector dpe = backward(params.decoder_mlp, cache, upstream, obj.decoder).col(0);
        const Vector dprod = dpe.head(d);
        const Vector dabs = dpe.tail(d);
        const Vector diff_sign =
            (zu - zv).unaryExpr([](double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); });
        gZ_final.row(u) += (dprod.cwiseProduct(zv) + dabs.cwiseProduct(diff_sign)).transpose();
        gZ_final.row(v) += (dprod.cwiseProduct(zu) - dabs.cwiseProduct(diff_sign)).transpose();
    };

    if (pair_count > 0) {
        for (auto [u, v] : edges) score_pair(u, v, 1.0);
        for (auto [u, v] : negatives) score_pair(u, v, 0.0);
        obj.loss /= static_cast<double>(pair_count);
    }
    // The gradient of the mean loss: each pair contributed dlogit/pair_count
    // already, so gZ_final and the decoder grads are consistent with
    // obj.loss as the mean.
    if (params.feature_decoder && feature_loss_weight != 0.0) {
        for (int u = 0; u < n; ++u) {
            ForwardCache cache;
            const Vector xhat = forward_cached(*params.feature_decoder,
                                               Matrix(Zfinal.row(u).transpose()), cache)
                                    .col(0);
            const Vector err = xhat - gp.node_features.row(u).transpose();
            obj.loss += feature_loss_weight * err.squaredNorm() / n;
            const Matrix upstream =
                2.0 * feature_loss_weight / static_cast<double>(n) * Matrix(err);
            const Matrix dz =
                backward(*params.feature_decoder, cache, upstream, obj.feature_decoder);
            gZ_final.row(u) += dz.col(0).transpose();
        }
    }

    // Reverse pass through the unrolled sweeps. gZ[t] holds gradients with
    // respect to version t of each row; updates are consumed in reverse
    // chronological order, so every gradient is complete when its update
    // is processed.
    std::vector<Matrix> gZ(static_cast<std::size_t>(T) + 1);
    for (int t = 0; t <= T; ++t) gZ[static_cast<std::size_t>(t)] = Matrix::Zero(n, d);
    gZ[static_cast<std::size_t>(T)] = gZ_final;

    for (int t = T; t >= 1; --t) {
        const Matrix& fresh = versions[static_cast<std::size_t>(t)];
        const Matrix& stale = versions[static_cast<std::size_t>(t - 1)];
        for (int u = n - 1; u >= 0; --u) {
            const Vector g_out = gZ[static_cast<std::size_t>(t)].row(u).transpose();
            const auto& u_nbrs = nbrs[static_cast<std::size_t>(u)];
            const Vector eps_u = eps[static_cast<std::size_t>(t - 1)].row(u).transpose();

            // Recompute this update's forward pass once, caching every net.
            std::vector<Vector> latents, features;
            latents.reserve(u_nbrs.size());
            features.reserve(u_nbrs.size());
            for (int v : u_nbrs) {
                // Nodes below u carried this sweep's fresh value.
                const Matrix& source = v < u ? fresh : stale;
                latents.push_back(source.row(v).transpose());
                features.push_back(gp.node_features.row(v).transpose());
            }
            const auto f_order = canonical_order(latents);
            std::vector<ForwardCache> f_inner_caches(latents.size());
            Vector pooled_f = Vector::Zero(params.neighbor_encoder.inner.output_dim());
            for (int idx : f_order) {
                pooled_f += forward_cached(params.neighbor_encoder.inner,
                                           Matrix(latents[static_cast<std::size_t>(idx)]),
                                           f_inner_caches[static_cast<std::size_t>(idx)])
                                .col(0);
            }
            ForwardCache f_outer_cache;
            const Vector hidden =
                forward_cached(params.neighbor_encoder.outer, Matrix(pooled_f), f_outer_cache)
                    .col(0);

            const auto g_order = canonical_order(features);
            std::vector<ForwardCache> g_inner_caches(features.size());
            Vector pooled_g = Vector::Zero(params.feature_encoder.inner.output_dim());
            for (int idx : g_order) {
                pooled_g += forward_cached(params.feature_encoder.inner,
                                           Matrix(features[static_cast<std::size_t>(idx)]),
                                           g_inner_caches[static_cast<std::size_t>(idx)])
                                .col(0);
            }
            ForwardCache g_outer_cache;
            const Vector visible =
                forward_cached(params.feature_encoder.outer, Matrix(pooled_g), g_outer_cache)
                    .col(0);

            Vector mlp_in(hidden.size() + visible.size() + gp.node_features.cols());
            mlp_in << hidden, visible, gp.node_features.row(u).transpose();
            ForwardCache update_cache;
            const Vector update_out =
                forward_cached(params.update_mlp, Matrix(mlp_in), update_cache).col(0);
            const Vector mu = update_out.head(d).array().tanh().matrix();
            const Vector logvar_raw = update_out.tail(d);
            const Vector logvar = logvar_raw.cwiseMax(-kLogVarClamp).cwiseMin(kLogVarClamp);
            const Vector std_dev = (logvar.array() / 2.0).exp();

            Vector dout(2 * d);
            dout.head(d) = g_out.cwiseProduct((1.0 - mu.array().square()).matrix());
            // d/dlogvar of exp(logvar/2)*eps, masked where the clamp is active.
            for (int j = 0; j < d; ++j) {
                const bool clamped = std::abs(logvar_raw(j)) > kLogVarClamp;
                dout(d + j) = clamped ? 0.0 : 0.5 * g_out(j) * eps_u(j) * std_dev(j);
            }
            const Vector dmlp_in =
                backward(params.update_mlp, update_cache, Matrix(dout), obj.update).col(0);

            const int h = params.neighbor_encoder.output_dim();
            const Vector dhidden = dmlp_in.head(h);
            const Vector dvisible = dmlp_in.segment(h, params.feature_encoder.output_dim());

            const Matrix dpool_f = backward(params.neighbor_encoder.outer, f_outer_cache,
                                            Matrix(dhidden), obj.neighbor_outer);
            for (std::size_t i = 0; i < u_nbrs.size(); ++i) {
                const Matrix dz = backward(params.neighbor_encoder.inner, f_inner_caches[i],
                                           dpool_f, obj.neighbor_inner);
                const int v = u_nbrs[i];
                const int version = v < u ? t : t - 1;
                gZ[static_cast<std::size_t>(version)].row(v) += dz.col(0).transpose();
            }
            const Matrix dpool_g = backward(params.feature_encoder.outer, g_outer_cache,
                                            Matrix(dvisible), obj.feature_outer);
            for (std::size_t i = 0; i < u_nbrs.size(); ++i) {
                backward(params.feature_encoder.inner, g_inner_caches[i], dpool_g,
                         obj.feature_inner);
            }
        }
    }
    return obj;
}

CgnnTrainResult cgnn_train(const AttributedGraph& g_in, const CgnnHyper& hyper) {
    const AttributedGraph g = g_in.directed ? symmetrized(g_in) : g_in;
    require(hyper.sweeps >= 1, "cgnn_train requires at least one sweep");
    require(hyper.epochs >= 0, "epochs must be nonnegative");

    Rng rng(hyper.seed);
    Rng init_rng = rng.fork(0x706172616d);
    CgnnTrainResult result;
    result.params = make_cgnn_params(hyper.d, g.feature_dim(), hyper.hidden, init_rng,
                                     hyper.reconstruct_features);
    CgnnParams& params = result.params;
    CgnnAdam adam(params);
    NetAdam feature_decoder_adam(params.feature_decoder ? *params.feature_decoder
                                                        : params.decoder_mlp);
    const AdamConfig adam_cfg{hyper.lr, 0.9, 0.999, 1e-8};

    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        CgnnObjective obj;
        try {
            obj = cgnn_objective(g, params, hyper.sweeps, hyper.neg_ratio,
                                 rng.substream(0x65700000ULL +
                                               static_cast<std::uint64_t>(epoch)),
                                 hyper.reconstruct_features ? hyper.feature_loss_weight
                                                            : 0.0);
        } catch (const divergence_error&) {
            throw divergence_error("CGNN training diverged in the Gibbs sweep", epoch);
        }
        if (!std::isfinite(obj.loss)) {
            throw divergence_error("CGNN training loss is non-finite", epoch);
        }
        result.loss_curve.push_back(obj.loss);
        adam.apply(params, obj, epoch + 1, adam_cfg);
        if (params.feature_decoder) {
            feature_decoder_adam.apply(*params.feature_decoder, obj.feature_decoder,
                                       epoch + 1, adam_cfg);
        }
    }
    return result;
}

std::string SamplerSpec::describe() const {
    std::ostringstream out;
    out << id << "(d=" << d;
    if (id == "cgnn") out << ",sweeps=" << sweeps;
    out << ')';
    return out.str();
}

EmbeddingSample draw_sample(const AttributedGraph& g, const SamplerSpec& spec,
                            std::uint64_t seed) {
    if (spec.id == "mc-svd") {
        return mc_svd_sample(g, spec.d, SvdMode::single_step, seed);
    }
    if (spec.id == "mc-svd-converged") {
        return mc_svd_sample(g, spec.d, SvdMode::converged, seed, spec.tol, spec.max_steps);
    }
    if (spec.id == "cgnn") {
        require(spec.cgnn != nullptr, "cgnn sampler spec needs trained parameters");
        return cgnn_sample(g, *spec.cgnn, spec.sweeps, seed);
    }
    if (spec.id == "planted-violation") {
        // Deliberately non-equivariant: leaks the node id into the rows.
        EmbeddingSample sample = mc_svd_sample(g, spec.d, SvdMode::single_step, seed);
        for (int i = 0; i < sample.Z.rows(); ++i) {
            sample.Z.row(i).array() += static_cast<double>(i);
        }
        sample.provenance.sampler_id = "planted-violation";
        return sample;
    }
    throw std::invalid_argument("unknown sampler id: " + spec.id);
}

std::vector<EmbeddingSample> draw_samples(const AttributedGraph& g,
                                          const SamplerSpec& spec,
                                          std::uint64_t stream_seed, int m) {
    require(m >= 1, "sample count must be at least 1");
    Rng stream(stream_seed);
    std::vector<EmbeddingSample> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        out.push_back(draw_sample(g, spec, stream.substream(static_cast<std::uint64_t>(i))));
    }
    return out;
}

void write_embedding(const std::string& path, const EmbeddingSample& sample) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out.precision(17);
    out << "node_id";
    for (int j = 0; j < sample.Z.cols(); ++j) out << ",z_" << j;
    out << '\n';
    for (int i = 0; i < sample.Z.rows(); ++i) {
        out << i;
        for (int j = 0; j < sample.Z.cols(); ++j) out << ',' << sample.Z(i, j);
        out << '\n';
    }

    std::ofstream prov(path + ".prov");
    if (!prov) throw std::runtime_error("cannot write file: " + path + ".prov");
    prov << "sampler_id: " << sample.provenance.sampler_id << '\n';
    prov << "seed: " << sample.provenance.seed << '\n';
    prov << "d: " << sample.provenance.d << '\n';
    prov << "power_steps: " << sample.provenance.power_steps << '\n';
    prov << "gibbs_sweeps: " << sample.provenance.gibbs_sweeps << '\n';
    prov << "input_permutation:";
    for (int v : sample.provenance.input_permutation) prov << ' ' << v;
    prov << '\n';
}

EmbeddingSample read_embedding(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path + ": empty embedding file");
    const auto cols = std::count(line.begin(), line.end(), ',');
    std::vector<std::vector<double>> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        std::getline(ss, cell, ','); // node id, implicit by row order
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (static_cast<long>(row.size()) != cols) {
            throw std::runtime_error(path + ": ragged embedding row");
        }
        rows.push_back(std::move(row));
    }
    EmbeddingSample sample;
    sample.Z = Matrix(static_cast<int>(rows.size()), static_cast<int>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            sample.Z(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
        }
    }

    std::ifstream prov(path + ".prov");
    if (prov) {
        while (std::getline(prov, line)) {
            const auto colon = line.find(':');
            if (colon == std::string::npos) continue;
            const std::string key = line.substr(0, colon);
            std::istringstream value(line.substr(colon + 1));
            if (key == "sampler_id") value >> sample.provenance.sampler_id;
            else if (key == "seed") value >> sample.provenance.seed;
            else if (key == "d") value >> sample.provenance.d;
            else if (key == "power_steps") value >> sample.provenance.power_steps;
            else if (key == "gibbs_sweeps") value >> sample.provenance.gibbs_sweeps;
            else if (key == "input_permutation") {
                int v;
                while (value >> v) sample.provenance.input_permutation.push_back(v);
            }
        }
    }
    return sample;
}

void save_cgnn(const std::string& path, const CgnnParams& params) {
    std::vector<std::pair<std::string, Matrix>> tensors;
    Matrix meta(1, 3);
    meta << static_cast<double>(params.d), static_cast<double>(params.feature_dim),
        params.feature_decoder ? 1.0 : 0.0;
    tensors.emplace_back("cgnn.meta", std::move(meta));
    append_set_encoder_tensors("cgnn.f", params.neighbor_encoder, tensors);
    append_set_encoder_tensors("cgnn.g", params.feature_encoder, tensors);
    append_net_tensors("cgnn.update", params.update_mlp, tensors);
    append_net_tensors("cgnn.decoder", params.decoder_mlp, tensors);
    if (params.feature_decoder) {
        append_net_tensors("cgnn.feature_decoder", *params.feature_decoder, tensors);
    }
    write_tensors(path, tensors);
}

CgnnParams load_cgnn(const std::string& path) {
    const auto tensors = read_tensors(path);
    const auto meta_it = tensors.find("cgnn.meta");
    if (meta_it == tensors.end()) {
        throw std::runtime_error(path + ": missing cgnn.meta tensor");
    }
    CgnnParams params;
    params.d = static_cast<int>(meta_it->second(0, 0));
    params.feature_dim = static_cast<int>(meta_it->second(0, 1));
    params.neighbor_encoder = set_encoder_from_tensors("cgnn.f", tensors);
    params.feature_encoder = set_encoder_from_tensors("cgnn.g", tensors);
    params.update_mlp = net_from_tensors("cgnn.update", tensors);
    params.decoder_mlp = net_from_tensors("cgnn.decoder", tensors);
    if (meta_it->second(0, 2) != 0.0) {
        params.feature_decoder = net_from_tensors("cgnn.feature_decoder", tensors);
    }
    return params;
}

} // namespace mcstruct
