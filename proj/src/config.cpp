#include "tsf/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <sstream>

#include "tsf/error.hpp"
#include "tsf/rng.hpp"

namespace tsf {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char ch : s) {
        if (ch == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(ch);
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

double to_double(const std::string& key, const std::string& v) {
    double d = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), d);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return d;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t n = 0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), n);
    if (ec != std::errc{} || p != v.data() + v.size())
        throw ConfigError(key + ": expected an integer, got '" + v + "'");
    return n;
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "on") return true;
    if (v == "false" || v == "0" || v == "off") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

void apply_key(ExperimentConfig& c, const std::string& section, const std::string& key,
               const std::string& value) {
    const std::string full = "[" + section + "] " + key;
    if (section == "data") {
        if (key == "csv") c.data_csv = value;
        else if (key == "split_fraction") c.split_fraction = to_double(full, value);
        else if (key == "scaler_scope") {
            if (value == "train") c.scaler_scope = ScalerScope::train;
            else if (value == "full") c.scaler_scope = ScalerScope::full;
            else throw ConfigError(full + ": expected train or full");
        }
        else if (key == "cyclical_time") c.features.cyclical_time = to_bool(full, value);
        else if (key == "strict_gaps") c.strict_gaps = to_bool(full, value);
        else throw ConfigError("unknown key " + full);
    } else if (section == "model") {
        if (key == "kind") c.model.kind = model_kind_from_string(value);
        else if (key == "hidden_size") c.model.hidden_size = to_u64(full, value);
        else if (key == "head") {
            if (value == "sigmoid") c.model.head = HeadActivation::sigmoid;
            else if (value == "linear") c.model.head = HeadActivation::linear;
            else throw ConfigError(full + ": expected sigmoid or linear");
        }
        else if (key == "d_model") c.model.transformer.d_model = to_u64(full, value);
        else if (key == "num_heads") c.model.transformer.num_heads = to_u64(full, value);
        else if (key == "encoder_layers")
            c.model.transformer.num_encoder_layers = to_u64(full, value);
        else if (key == "decoder_layers")
            c.model.transformer.num_decoder_layers = to_u64(full, value);
        else if (key == "feedforward")
            c.model.transformer.feedforward_size = to_u64(full, value);
        else if (key == "dropout") c.model.transformer.dropout_rate = to_double(full, value);
        else throw ConfigError("unknown key " + full);
    } else if (section == "window") {
        if (key == "w_hours") c.w_hours = to_u64(full, value);
        else if (key == "k_hours") c.k_hours = to_u64(full, value);
        else throw ConfigError("unknown key " + full);
    } else if (section == "train") {
        if (key == "epochs") c.train.epochs = to_u64(full, value);
        else if (key == "learning_rate") c.train.learning_rate = to_double(full, value);
        else if (key == "batch_size") c.train.batch_size = to_u64(full, value);
        else if (key == "optimizer") c.train.optimizer = optimizer_from_string(value);
        else if (key == "beta1") c.train.adam_beta1 = to_double(full, value);
        else if (key == "beta2") c.train.adam_beta2 = to_double(full, value);
        else if (key == "epsilon") c.train.adam_epsilon = to_double(full, value);
        else if (key == "weight_decay") c.train.weight_decay = to_double(full, value);
        else if (key == "seed") c.train.seed = to_u64(full, value);
        else if (key == "shuffle") c.train.shuffle = to_bool(full, value);
        else if (key == "grad_clip") c.train.grad_clip = to_double(full, value);
        else throw ConfigError("unknown key " + full);
    } else if (section == "output") {
        if (key == "dir") c.output_dir = value;
        else throw ConfigError("unknown key " + full);
    } else if (section == "grid") {
        if (key == "models") {
            c.grid.models.clear();
            for (const auto& name : split_list(value))
                c.grid.models.push_back(model_kind_from_string(name));
        }
        else if (key == "w_hours") {
            c.grid.w_hours.clear();
            for (const auto& v : split_list(value))
                c.grid.w_hours.push_back(to_u64(full, v));
        }
        else if (key == "k_hours") {
            c.grid.k_hours.clear();
            for (const auto& v : split_list(value))
                c.grid.k_hours.push_back(to_u64(full, v));
        }
        else if (key == "workers") c.grid.workers = to_u64(full, value);
        else throw ConfigError("unknown key " + full);
    } else {
        throw ConfigError("unknown section [" + section + "]");
    }
}

std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace

ExperimentConfig parse_experiment_config(std::istream& in) {
    ExperimentConfig c;
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (t.front() == '[') {
            if (t.back() != ']')
                throw ConfigError("line " + std::to_string(line_no) +
                                  ": malformed section header");
            section = t.substr(1, t.size() - 2);
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (section.empty())
            throw ConfigError("line " + std::to_string(line_no) +
                              ": key outside any [section]");
        apply_key(c, section, key, value);
    }
    return c;
}

ExperimentConfig parse_experiment_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_experiment_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream out;
    out << "[data]\n";
    out << "csv = " << c.data_csv << "\n";
    out << "split_fraction = " << format_double(c.split_fraction) << "\n";
    out << "scaler_scope = " << (c.scaler_scope == ScalerScope::train ? "train" : "full")
        << "\n";
    out << "cyclical_time = " << (c.features.cyclical_time ? "true" : "false") << "\n";
    out << "strict_gaps = " << (c.strict_gaps ? "true" : "false") << "\n";
    out << "\n[model]\n";
    out << "kind = " << to_string(c.model.kind) << "\n";
    out << "hidden_size = " << c.model.hidden_size << "\n";
    out << "head = " << (c.model.head == HeadActivation::sigmoid ? "sigmoid" : "linear")
        << "\n";
    out << "d_model = " << c.model.transformer.d_model << "\n";
    out << "num_heads = " << c.model.transformer.num_heads << "\n";
    out << "encoder_layers = " << c.model.transformer.num_encoder_layers << "\n";
    out << "decoder_layers = " << c.model.transformer.num_decoder_layers << "\n";
    out << "feedforward = " << c.model.transformer.feedforward_size << "\n";
    out << "dropout = " << format_double(c.model.transformer.dropout_rate) << "\n";
    out << "\n[window]\n";
    out << "w_hours = " << c.w_hours << "\n";
    out << "k_hours = " << c.k_hours << "\n";
    out << "\n[train]\n";
    out << "epochs = " << c.train.epochs << "\n";
    out << "learning_rate = " << format_double(c.train.learning_rate) << "\n";
    out << "batch_size = " << c.train.batch_size << "\n";
    out << "optimizer = " << to_string(c.train.optimizer) << "\n";
    out << "beta1 = " << format_double(c.train.adam_beta1) << "\n";
    out << "beta2 = " << format_double(c.train.adam_beta2) << "\n";
    out << "epsilon = " << format_double(c.train.adam_epsilon) << "\n";
    out << "weight_decay = " << format_double(c.train.weight_decay) << "\n";
    out << "seed = " << c.train.seed << "\n";
    out << "shuffle = " << (c.train.shuffle ? "true" : "false") << "\n";
    out << "grad_clip = " << format_double(c.train.grad_clip) << "\n";
    out << "\n[output]\n";
    out << "dir = " << c.output_dir << "\n";
    if (!c.grid.models.empty() || !c.grid.w_hours.empty() || !c.grid.k_hours.empty()) {
        out << "\n[grid]\n";
        out << "models = ";
        for (std::size_t i = 0; i < c.grid.models.size(); ++i)
            out << (i ? "," : "") << to_string(c.grid.models[i]);
        out << "\nw_hours = ";
        for (std::size_t i = 0; i < c.grid.w_hours.size(); ++i)
            out << (i ? "," : "") << c.grid.w_hours[i];
        out << "\nk_hours = ";
        for (std::size_t i = 0; i < c.grid.k_hours.size(); ++i)
            out << (i ? "," : "") << c.grid.k_hours[i];
        out << "\nworkers = " << c.grid.workers << "\n";
    }
    return out.str();
}

std::string config_hash(const ExperimentConfig& c) {
    ExperimentConfig canonical = c;
    canonical.output_dir.clear();
    canonical.grid = GridAxes{};
    const std::uint64_t h = fnv1a(serialize_config(canonical));
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

std::string resolve_output_dir(const ExperimentConfig& c) {
    if (!c.output_dir.empty()) return c.output_dir;
    if (const char* env = std::getenv("TSF_OUTPUT_DIR"); env && *env) return env;
    return "out";
}

}  // namespace tsf
