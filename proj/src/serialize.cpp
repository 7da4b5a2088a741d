#include "tsf/serialize.hpp"

#include <algorithm>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "tsf/error.hpp"

namespace tsf {

namespace {

using nlohmann::json;

constexpr const char* kFormatTag = "tsf-model-v1";

json scaler_to_json(const Scaler& s) {
    json j;
    j["columns"] = s.column_names;
    j["mins"] = s.mins;
    j["maxs"] = s.maxs;
    j["target_min"] = s.target_min;
    j["target_max"] = s.target_max;
    return j;
}

Scaler scaler_from_json(const json& j) {
    Scaler s;
    s.column_names = j.at("columns").get<std::vector<std::string>>();
    s.mins = j.at("mins").get<std::vector<double>>();
    s.maxs = j.at("maxs").get<std::vector<double>>();
    s.target_min = j.at("target_min").get<double>();
    s.target_max = j.at("target_max").get<double>();
    s.constant.resize(s.mins.size());
    for (std::size_t i = 0; i < s.mins.size(); ++i)
        s.constant[i] = s.mins[i] == s.maxs[i];
    s.target_constant = s.target_min == s.target_max;
    return s;
}

}  // namespace

TrainedModel snapshot_model(Forecaster& model, const ModelConfig& config,
                            const FeatureConfig& features, const Scaler& scaler,
                            std::uint64_t init_seed) {
    TrainedModel tm;
    tm.model = config;
    tm.features = features;
    tm.scaler = scaler;
    tm.input_size = model.input_size();
    tm.w = model.window_size();
    tm.k = model.horizon();
    tm.init_seed = init_seed;
    for (auto& [name, tensor] : model.named_parameters()) {
        TrainedModel::Param p;
        p.name = name;
        p.rows = tensor.rows();
        p.cols = tensor.cols();
        p.data.assign(tensor.data().begin(), tensor.data().end());
        tm.params.push_back(std::move(p));
    }
    return tm;
}

std::unique_ptr<Forecaster> restore_forecaster(const TrainedModel& tm) {
    auto model = make_forecaster(tm.model, tm.input_size, tm.w, tm.k, tm.init_seed);
    auto live = model->named_parameters();
    if (live.size() != tm.params.size())
        throw DataError("model file has " + std::to_string(tm.params.size()) +
                        " parameters, architecture expects " +
                        std::to_string(live.size()));
    for (auto& [name, tensor] : live) {
        const auto it = std::find_if(tm.params.begin(), tm.params.end(),
                                     [&](const auto& p) { return p.name == name; });
        if (it == tm.params.end())
            throw DataError("model file is missing parameter '" + name + "'");
        if (it->rows != tensor.rows() || it->cols != tensor.cols())
            throw DataError("parameter '" + name + "' has the wrong shape");
        std::copy(it->data.begin(), it->data.end(), tensor.mutable_data().begin());
    }
    return model;
}

void save_trained_model(const TrainedModel& tm, std::ostream& out) {
    json j;
    j["format"] = kFormatTag;
    j["kind"] = to_string(tm.model.kind);
    j["w"] = tm.w;
    j["k"] = tm.k;
    j["input_size"] = tm.input_size;
    j["init_seed"] = tm.init_seed;
    j["hidden_size"] = tm.model.hidden_size;
    j["head"] = tm.model.head == HeadActivation::sigmoid ? "sigmoid" : "linear";
    j["transformer"] = {
        {"d_model", tm.model.transformer.d_model},
        {"num_heads", tm.model.transformer.num_heads},
        {"num_encoder_layers", tm.model.transformer.num_encoder_layers},
        {"num_decoder_layers", tm.model.transformer.num_decoder_layers},
        {"feedforward_size", tm.model.transformer.feedforward_size},
        {"dropout_rate", tm.model.transformer.dropout_rate},
    };
    j["features"] = {{"cyclical_time", tm.features.cyclical_time}};
    j["scaler"] = scaler_to_json(tm.scaler);
    json params = json::array();
    for (const auto& p : tm.params) {
        params.push_back(
            {{"name", p.name}, {"rows", p.rows}, {"cols", p.cols}, {"data", p.data}});
    }
    j["params"] = std::move(params);
    out << j.dump(2) << '\n';
}

TrainedModel load_trained_model(std::istream& in) {
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw DataError(std::string("model file is not valid JSON: ") + e.what());
    }
    if (!j.contains("format") || j["format"] != kFormatTag)
        throw DataError("model file has an unknown format tag");
    TrainedModel tm;
    tm.model.kind = model_kind_from_string(j.at("kind").get<std::string>());
    tm.w = j.at("w").get<std::size_t>();
    tm.k = j.at("k").get<std::size_t>();
    tm.input_size = j.at("input_size").get<std::size_t>();
    tm.init_seed = j.at("init_seed").get<std::uint64_t>();
    tm.model.hidden_size = j.at("hidden_size").get<std::size_t>();
    tm.model.head = j.at("head").get<std::string>() == "linear" ? HeadActivation::linear
                                                                : HeadActivation::sigmoid;
    const auto& t = j.at("transformer");
    tm.model.transformer.d_model = t.at("d_model").get<std::size_t>();
    tm.model.transformer.num_heads = t.at("num_heads").get<std::size_t>();
    tm.model.transformer.num_encoder_layers =
        t.at("num_encoder_layers").get<std::size_t>();
    tm.model.transformer.num_decoder_layers =
        t.at("num_decoder_layers").get<std::size_t>();
    tm.model.transformer.feedforward_size = t.at("feedforward_size").get<std::size_t>();
    tm.model.transformer.dropout_rate = t.at("dropout_rate").get<double>();
    tm.features.cyclical_time = j.at("features").at("cyclical_time").get<bool>();
    tm.scaler = scaler_from_json(j.at("scaler"));
    for (const auto& p : j.at("params")) {
        TrainedModel::Param param;
        param.name = p.at("name").get<std::string>();
        param.rows = p.at("rows").get<std::size_t>();
        param.cols = p.at("cols").get<std::size_t>();
        param.data = p.at("data").get<std::vector<double>>();
        if (param.data.size() != param.rows * param.cols)
            throw DataError("parameter '" + param.name + "' has inconsistent size");
        tm.params.push_back(std::move(param));
    }
    return tm;
}

}  // namespace tsf
