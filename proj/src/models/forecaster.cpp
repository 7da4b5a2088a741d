#include "tsf/forecaster.hpp"

#include <numeric>

#include "tsf/error.hpp"
#include "tsf/train.hpp"

namespace tsf {

std::vector<Tensor> Forecaster::parameters() {
    std::vector<Tensor> out;
    for (auto& [name, tensor] : named_parameters()) out.push_back(tensor);
    return out;
}

std::vector<double> Forecaster::predict_all(const WindowedDataset& ds) {
    std::vector<std::size_t> idx(ds.size());
    std::iota(idx.begin(), idx.end(), 0);
    return predict(ds, idx);
}

void Forecaster::check_dataset(const WindowedDataset& ds) const {
    if (ds.window_size() != window_size() || ds.horizon() != horizon())
        throw ContractError("dataset (w=" + std::to_string(ds.window_size()) + ", k=" +
                            std::to_string(ds.horizon()) + ") does not match model (w=" +
                            std::to_string(window_size()) + ", k=" +
                            std::to_string(horizon()) + ")");
    if (ds.num_features() != input_size())
        throw ContractError("dataset has " + std::to_string(ds.num_features()) +
                            " features, model expects " + std::to_string(input_size()));
}

namespace {

class PersistenceForecaster final : public Forecaster {
public:
    PersistenceForecaster(std::size_t m, std::size_t w, std::size_t k)
        : m_(m), w_(w), k_(k) {}

    ModelKind kind() const override { return ModelKind::persistence; }
    std::size_t window_size() const override { return w_; }
    std::size_t horizon() const override { return k_; }
    std::size_t input_size() const override { return m_; }
    std::vector<NamedParam> named_parameters() override { return {}; }

    Tensor training_loss(const WindowedDataset& ds, std::span<const std::size_t> idx,
                         Rng*) override {
        check_dataset(ds);
        const auto preds = predict(ds, idx);
        double sum = 0.0;
        for (std::size_t b = 0; b < idx.size(); ++b) {
            const double d = preds[b] - ds.label(idx[b]);
            sum += d * d;
        }
        return Tensor::from_data({sum / static_cast<double>(idx.size())}, 1, 1);
    }

    std::vector<double> predict(const WindowedDataset& ds,
                                std::span<const std::size_t> idx) override {
        check_dataset(ds);
        std::vector<double> out(idx.size());
        for (std::size_t b = 0; b < idx.size(); ++b)
            out[b] = ds.target_at_row(ds.start_row(idx[b]) + w_ - 1);
        return out;
    }

private:
    std::size_t m_, w_, k_;
};

class RecurrentForecaster final : public Forecaster {
public:
    RecurrentForecaster(ModelKind kind, std::size_t m, std::size_t n,
                        HeadActivation head, std::size_t w, std::size_t k,
                        std::uint64_t seed)
        : w_(w), k_(k) {
        Rng rng(seed);
        cell_ = make_recurrent_cell(kind, m, n, rng);
        head_ = make_output_head(n, head, rng);
    }

    ModelKind kind() const override { return cell_.kind; }
    std::size_t window_size() const override { return w_; }
    std::size_t horizon() const override { return k_; }
    std::size_t input_size() const override { return cell_.input_size; }

    std::vector<NamedParam> named_parameters() override {
        static const char* const kRnnGates[] = {"xs"};
        static const char* const kLstmGates[] = {"f", "i", "c", "o"};
        static const char* const kGruGates[] = {"r", "z", "s"};
        const char* const* gates = cell_.kind == ModelKind::rnn    ? kRnnGates
                                   : cell_.kind == ModelKind::lstm ? kLstmGates
                                                                   : kGruGates;
        std::vector<NamedParam> out;
        for (std::size_t g = 0; g < cell_.weights.size(); ++g) {
            out.push_back({std::string("cell.w_") + gates[g], cell_.weights[g]});
            out.push_back({std::string("cell.b_") + gates[g], cell_.biases[g]});
        }
        out.push_back({"head.weight", head_.weight});
        out.push_back({"head.bias", head_.bias});
        return out;
    }

    Tensor training_loss(const WindowedDataset& ds, std::span<const std::size_t> idx,
                         Rng*) override {
        check_dataset(ds);
        return mse_loss(forward(ds, idx), ds.gather_labels(idx));
    }

    std::vector<double> predict(const WindowedDataset& ds,
                                std::span<const std::size_t> idx) override {
        check_dataset(ds);
        detail::NoGradGuard guard;
        const Tensor preds = forward(ds, idx);
        return {preds.data().begin(), preds.data().end()};
    }

    RecurrentCellParams& cell() { return cell_; }
    OutputHead& head() { return head_; }

private:
    Tensor forward(const WindowedDataset& ds, std::span<const std::size_t> idx) {
        std::vector<Tensor> steps;
        steps.reserve(w_);
        for (std::size_t t = 0; t < w_; ++t) steps.push_back(ds.gather_step(idx, t));
        return run_recurrent_batch(cell_, head_, steps);
    }

    RecurrentCellParams cell_;
    OutputHead head_;
    std::size_t w_, k_;
};

class TransformerForecaster final : public Forecaster {
public:
    TransformerForecaster(const TransformerConfig& config, std::size_t m, std::size_t w,
                          std::size_t k, std::uint64_t seed)
        : w_(w), k_(k) {
        Rng rng(seed);
        params_ = make_transformer(config, m, rng);
    }

    ModelKind kind() const override { return ModelKind::transformer; }
    std::size_t window_size() const override { return w_; }
    std::size_t horizon() const override { return k_; }
    std::size_t input_size() const override { return params_.input_size; }

    std::vector<NamedParam> named_parameters() override {
        std::vector<NamedParam> out;
        out.push_back({"input_proj", params_.input_proj});
        out.push_back({"input_proj_bias", params_.input_proj_bias});
        out.push_back({"target_proj", params_.target_proj});
        out.push_back({"target_proj_bias", params_.target_proj_bias});
        auto add_attention = [&out](const std::string& base, const AttentionParams& a) {
            for (std::size_t h = 0; h < a.wq.size(); ++h) {
                const std::string hs = std::to_string(h);
                out.push_back({base + ".wq" + hs, a.wq[h]});
                out.push_back({base + ".wk" + hs, a.wk[h]});
                out.push_back({base + ".wv" + hs, a.wv[h]});
            }
            out.push_back({base + ".wo", a.wo});
            out.push_back({base + ".bo", a.bo});
        };
        auto add_norm = [&out](const std::string& base, const LayerNormParams& ln) {
            out.push_back({base + ".gamma", ln.gamma});
            out.push_back({base + ".beta", ln.beta});
        };
        for (std::size_t l = 0; l < params_.encoder.size(); ++l) {
            const std::string base = "enc" + std::to_string(l);
            auto& layer = params_.encoder[l];
            add_attention(base + ".self", layer.self_attn);
            add_norm(base + ".ln1", layer.ln1);
            add_norm(base + ".ln2", layer.ln2);
            out.push_back({base + ".ff_w1", layer.ff_w1});
            out.push_back({base + ".ff_b1", layer.ff_b1});
            out.push_back({base + ".ff_w2", layer.ff_w2});
            out.push_back({base + ".ff_b2", layer.ff_b2});
        }
        for (std::size_t l = 0; l < params_.decoder.size(); ++l) {
            const std::string base = "dec" + std::to_string(l);
            auto& layer = params_.decoder[l];
            add_attention(base + ".self", layer.self_attn);
            add_attention(base + ".cross", layer.cross_attn);
            add_norm(base + ".ln1", layer.ln1);
            add_norm(base + ".ln2", layer.ln2);
            add_norm(base + ".ln3", layer.ln3);
            out.push_back({base + ".ff_w1", layer.ff_w1});
            out.push_back({base + ".ff_b1", layer.ff_b1});
            out.push_back({base + ".ff_w2", layer.ff_w2});
            out.push_back({base + ".ff_b2", layer.ff_b2});
        }
        add_norm("encoder_norm", params_.encoder_norm);
        add_norm("decoder_norm", params_.decoder_norm);
        out.push_back({"output_proj", params_.output_proj});
        out.push_back({"output_bias", params_.output_bias});
        return out;
    }

    Tensor training_loss(const WindowedDataset& ds, std::span<const std::size_t> idx,
                         Rng* dropout_rng) override {
        check_dataset(ds);
        Tensor total = Tensor::zeros(1, 1);
        for (const std::size_t i : idx) {
            const Tensor window = ds.window_matrix(i);
            const auto targets = future_targets(ds, i);
            const Tensor preds =
                transformer_forward(params_, window, start_token(ds, i), k_,
                                    DecodeMode::teacher_forced, targets, dropout_rng);
            const Tensor labels =
                Tensor::from_data(std::vector<double>(targets), 1, k_);
            const Tensor diff = sub(preds, labels);
            total = add(total, sum(mul(diff, diff)));
        }
        return scale(total, 1.0 / static_cast<double>(idx.size() * k_));
    }

    std::vector<double> predict(const WindowedDataset& ds,
                                std::span<const std::size_t> idx) override {
        check_dataset(ds);
        detail::NoGradGuard guard;
        std::vector<double> out;
        out.reserve(idx.size());
        for (const std::size_t i : idx) {
            const Tensor preds =
                transformer_forward(params_, ds.window_matrix(i), start_token(ds, i),
                                    k_, DecodeMode::autoregressive);
            out.push_back(preds.at(0, k_ - 1));
        }
        return out;
    }

    TransformerParams& params() { return params_; }

private:
    double start_token(const WindowedDataset& ds, std::size_t i) const {
        return ds.target_at_row(ds.start_row(i) + w_ - 1);
    }

    std::vector<double> future_targets(const WindowedDataset& ds, std::size_t i) const {
        std::vector<double> t(k_);
        const std::size_t last = ds.start_row(i) + w_ - 1;
        for (std::size_t j = 0; j < k_; ++j) t[j] = ds.target_at_row(last + 1 + j);
        return t;
    }

    TransformerParams params_;
    std::size_t w_, k_;
};

}  // namespace

std::unique_ptr<Forecaster> make_forecaster(const ModelConfig& config,
                                            std::size_t input_size, std::size_t w,
                                            std::size_t k, std::uint64_t init_seed) {
    switch (config.kind) {
        case ModelKind::persistence:
            return std::make_unique<PersistenceForecaster>(input_size, w, k);
        case ModelKind::rnn:
        case ModelKind::lstm:
        case ModelKind::gru:
            return std::make_unique<RecurrentForecaster>(config.kind, input_size,
                                                         config.hidden_size, config.head,
                                                         w, k, init_seed);
        case ModelKind::transformer:
            return std::make_unique<TransformerForecaster>(config.transformer,
                                                           input_size, w, k, init_seed);
    }
    throw ConfigError("unknown model kind");
}

}  // namespace tsf
