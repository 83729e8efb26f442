#include "carets/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace carets {

namespace {

bool parse_bool(const std::string& v, const std::string& context) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(context + ": expected boolean, got '" + v + "'");
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

void ExperimentConfig::set(const std::string& key, const std::string& value,
                           const std::string& origin) {
    const std::string ctx = origin + ": key '" + key + "'";
    try {
        if (key == "data_path") data_path = value;
        else if (key == "output_dir") output_dir = value;
        else if (key == "variant") variant = value;
        else if (key == "encoder") encoder = value;
        else if (key == "n_lags") n_lags = static_cast<int>(parse_long(value, ctx));
        else if (key == "horizon") horizon = static_cast<int>(parse_long(value, ctx));
        else if (key == "num_folds") num_folds = static_cast<int>(parse_long(value, ctx));
        else if (key == "train_points") train_points = parse_long(value, ctx);
        else if (key == "max_epochs") max_epochs = static_cast<int>(parse_long(value, ctx));
        else if (key == "patience") patience = static_cast<int>(parse_long(value, ctx));
        else if (key == "learning_rate") learning_rate = parse_double(value, ctx);
        else if (key == "batch_size") batch_size = static_cast<int>(parse_long(value, ctx));
        else if (key == "seed") seed = parse_long(value, ctx);
        else if (key == "reg_coeff") reg_coeff = parse_double(value, ctx);
        else if (key == "single_task") single_task = parse_bool(value, ctx);
        else if (key == "include_persistence") include_persistence = parse_bool(value, ctx);
        else if (key == "native_units") native_units = parse_bool(value, ctx);
        else if (key == "fold_workers") fold_workers = static_cast<int>(parse_long(value, ctx));
        else if (key == "enc_num_layers") enc_num_layers = static_cast<int>(parse_long(value, ctx));
        else if (key == "enc_hidden_dim") enc_hidden_dim = static_cast<int>(parse_long(value, ctx));
        else if (key == "enc_kernel_size") enc_kernel_size = static_cast<int>(parse_long(value, ctx));
        else if (key == "enc_padding") enc_padding = static_cast<int>(parse_long(value, ctx));
        else if (key == "enc_num_heads") enc_num_heads = static_cast<int>(parse_long(value, ctx));
        else if (key == "head_num_fc_layers") head_num_fc_layers = static_cast<int>(parse_long(value, ctx));
        else if (key == "head_fc_hidden") head_fc_hidden = static_cast<int>(parse_long(value, ctx));
        else throw ConfigError(origin + ": unknown config key '" + key + "'");
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

ExperimentConfig ExperimentConfig::parse_text(const std::string& text,
                                              const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line;
    long row = 0;
    while (std::getline(in, line)) {
        ++row;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": row " + std::to_string(row) +
                              ": expected 'key = value', got '" + t + "'");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        cfg.set(key, value, origin + ": row " + std::to_string(row));
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_text(buf.str(), path);
}

std::string ExperimentConfig::serialize() const {
    std::ostringstream out;
    out << "data_path = " << data_path << "\n";
    out << "output_dir = " << output_dir << "\n";
    out << "variant = " << variant << "\n";
    out << "encoder = " << encoder << "\n";
    out << "n_lags = " << n_lags << "\n";
    out << "horizon = " << horizon << "\n";
    out << "num_folds = " << num_folds << "\n";
    out << "train_points = " << train_points << "\n";
    out << "max_epochs = " << max_epochs << "\n";
    out << "patience = " << patience << "\n";
    out << "learning_rate = " << fmt_double(learning_rate) << "\n";
    out << "batch_size = " << batch_size << "\n";
    out << "seed = " << seed << "\n";
    out << "reg_coeff = " << fmt_double(reg_coeff) << "\n";
    out << "single_task = " << (single_task ? "true" : "false") << "\n";
    out << "include_persistence = " << (include_persistence ? "true" : "false")
        << "\n";
    out << "native_units = " << (native_units ? "true" : "false") << "\n";
    out << "fold_workers = " << fold_workers << "\n";
    out << "enc_num_layers = " << enc_num_layers << "\n";
    out << "enc_hidden_dim = " << enc_hidden_dim << "\n";
    out << "enc_kernel_size = " << enc_kernel_size << "\n";
    out << "enc_padding = " << enc_padding << "\n";
    out << "enc_num_heads = " << enc_num_heads << "\n";
    out << "head_num_fc_layers = " << head_num_fc_layers << "\n";
    out << "head_fc_hidden = " << head_fc_hidden << "\n";
    return out.str();
}

long ExperimentConfig::resolved_train_points(long series_length) const {
    if (train_points > 0) {
        if (train_points >= series_length)
            throw ConfigError("train_points = " + std::to_string(train_points) +
                              " leaves no test segment for a series of length " +
                              std::to_string(series_length));
        return train_points;
    }
    // Reference chronological split: 6048 of 8784 points.
    return series_length * 6048 / 8784;
}

std::string ExperimentConfig::resolved_output_dir() const {
    const char* root = std::getenv("CARETS_OUTPUT_ROOT");
    if (root != nullptr && root[0] != '\0' && !output_dir.empty() &&
        output_dir[0] != '/')
        return std::string(root) + "/" + output_dir;
    return output_dir;
}

EncoderConfig ExperimentConfig::encoder_config() const {
    EncoderConfig ec;
    ec.kind = encoder_kind_from_string(encoder);
    ec.num_layers = enc_num_layers;
    ec.hidden_dim = enc_hidden_dim;
    ec.kernel_size = enc_kernel_size;
    ec.padding = enc_padding;
    ec.num_heads = enc_num_heads;
    ec.validate();
    return ec;
}

HeadConfig ExperimentConfig::head_config() const {
    HeadConfig hc;
    hc.num_fc_layers = head_num_fc_layers;
    hc.fc_hidden = head_fc_hidden;
    hc.horizon = horizon;
    hc.validate();
    return hc;
}

TrainConfig ExperimentConfig::train_config() const {
    TrainConfig tc;
    tc.max_epochs = max_epochs;
    tc.patience = patience;
    tc.learning_rate = learning_rate;
    tc.batch_size = batch_size;
    tc.seed = static_cast<std::uint64_t>(seed);
    tc.mode = single_task ? TrainMode::SingleTask : TrainMode::MultiTask;
    tc.reg_coeff = reg_coeff;
    tc.validate();
    return tc;
}

}  // namespace carets
