#include "nsaf/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include <json.hpp>

namespace nsaf {
namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<std::string_view> allowed, const std::string& where) {
    if (!obj.is_object()) throw std::invalid_argument(where + ": expected a JSON object");
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (auto a : allowed) known = known || key == a;
        if (!known) throw std::invalid_argument(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
T get(const json& obj, const char* key, const std::string& where) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(where + "." + key + ": " + e.what());
    }
}

std::size_t get_count(const json& obj, const char* key, const std::string& where) {
    const json& v = obj.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
        throw std::invalid_argument(where + "." + key + ": expected a non-negative integer");
    return v.get<std::size_t>();
}

InputSpec parse_input(const json& j) {
    const std::string where = "input";
    reject_unknown(j, {"kind", "pole", "innovation_variance", "variance", "path"}, where);
    InputSpec in;
    const auto kind = get<std::string>(j, "kind", where);
    if (kind == "ar1") {
        in.kind = InputKind::ar1;
    } else if (kind == "wgn") {
        in.kind = InputKind::wgn;
    } else if (kind == "wav") {
        in.kind = InputKind::wav;
    } else {
        throw std::invalid_argument("input.kind: expected ar1, wgn or wav, got '" + kind + "'");
    }
    if (j.contains("pole")) in.pole = get<double>(j, "pole", where);
    if (j.contains("innovation_variance")) in.innovation_variance = get<double>(j, "innovation_variance", where);
    if (j.contains("variance")) in.variance = get<double>(j, "variance", where);
    if (j.contains("path")) in.path = get<std::string>(j, "path", where);
    return in;
}

AlgorithmSpec parse_algorithm(const json& j, std::size_t index) {
    const std::string where = "algorithms[" + std::to_string(index) + "]";
    reject_unknown(j, {"name", "kind", "mu", "delta", "delta_input_var", "noise_split"}, where);
    AlgorithmSpec a;
    const auto kind = get<std::string>(j, "kind", where);
    if (kind == "nsaf") {
        a.kind = AlgorithmKind::nsaf;
    } else if (kind == "josr") {
        a.kind = AlgorithmKind::josr;
    } else if (kind == "nlms") {
        a.kind = AlgorithmKind::nlms;
    } else if (kind == "jo_nlms") {
        a.kind = AlgorithmKind::jo_nlms;
    } else {
        throw std::invalid_argument(where + ".kind: expected nsaf, josr, nlms or jo_nlms, got '" + kind + "'");
    }
    a.name = j.contains("name") ? get<std::string>(j, "name", where) : kind;

    const bool fixed_step = a.kind == AlgorithmKind::nsaf || a.kind == AlgorithmKind::nlms;
    for (const char* key : {"mu", "delta", "delta_input_var"})
        if (!fixed_step && j.contains(key))
            throw std::invalid_argument(where + "." + key + ": not a parameter of " + kind);
    if (fixed_step && j.contains("noise_split"))
        throw std::invalid_argument(where + ".noise_split: not a parameter of " + kind);

    if (j.contains("mu")) a.mu = get<double>(j, "mu", where);
    if (j.contains("delta")) a.delta = get<double>(j, "delta", where);
    if (j.contains("delta_input_var")) a.delta_input_var = get<double>(j, "delta_input_var", where);
    if (j.contains("delta") && j.contains("delta_input_var"))
        throw std::invalid_argument(where + ": give either delta or delta_input_var, not both");
    if (j.contains("noise_split")) {
        const auto split = get<std::string>(j, "noise_split", where);
        if (split == "per_subband") {
            a.noise_split = NoiseSplit::per_subband;
        } else if (split == "full_band") {
            a.noise_split = NoiseSplit::full_band;
        } else {
            throw std::invalid_argument(where + ".noise_split: expected per_subband or full_band");
        }
    }
    return a;
}

}  // namespace

const char* to_string(AlgorithmKind kind) noexcept {
    switch (kind) {
        case AlgorithmKind::nsaf: return "nsaf";
        case AlgorithmKind::josr: return "josr";
        case AlgorithmKind::nlms: return "nlms";
        case AlgorithmKind::jo_nlms: return "jo_nlms";
    }
    return "?";
}

std::size_t middle_change_sample(std::size_t total_samples, std::size_t subbands) {
    if (subbands == 0) throw std::invalid_argument("middle_change_sample: N must be >= 1");
    return (total_samples / 2) / subbands * subbands;
}

void ExperimentConfig::validate() const {
    if (taps == 0) throw std::invalid_argument("config: M must be >= 1");
    if (subbands == 0) throw std::invalid_argument("config: N must be >= 1");
    if (overlap == 0) throw std::invalid_argument("config: K must be >= 1");
    if (runs == 0) throw std::invalid_argument("config: runs must be >= 1");
    if (std::isnan(snr_db)) throw std::invalid_argument("config: snr_db is NaN");
    if (!(echo_decay > 0.0)) throw std::invalid_argument("config: echo_decay must be > 0");

    switch (input.kind) {
        case InputKind::ar1:
            if (!(std::abs(input.pole) < 1.0)) throw std::invalid_argument("config: AR(1) pole must satisfy |pole| < 1");
            if (input.innovation_variance && !(*input.innovation_variance > 0.0))
                throw std::invalid_argument("config: innovation_variance must be > 0");
            break;
        case InputKind::wgn:
            if (!(input.variance > 0.0)) throw std::invalid_argument("config: wgn variance must be > 0");
            break;
        case InputKind::wav:
            if (input.path.empty()) throw std::invalid_argument("config: wav input needs a path");
            break;
    }
    if (input.kind != InputKind::wav && total_samples < subbands)
        throw std::invalid_argument("config: total_samples must cover at least one frame (>= N)");
    if (change_at && change_at_middle) throw std::invalid_argument("config: change_at given twice");
    if (change_at && total_samples != 0 && *change_at >= total_samples)
        throw std::invalid_argument("config: change_at must be < total_samples");

    std::set<std::string> names;
    for (const auto& a : algorithms) {
        if (a.name.empty()) throw std::invalid_argument("config: algorithm with empty name");
        if (a.name.find_first_of(",\"\n\r") != std::string::npos)
            throw std::invalid_argument("config: algorithm name '" + a.name + "' contains CSV-reserved characters");
        if (!names.insert(a.name).second) throw std::invalid_argument("config: duplicate algorithm name '" + a.name + "'");
        if (a.kind == AlgorithmKind::nsaf || a.kind == AlgorithmKind::nlms) {
            NsafConfig{a.mu, a.delta}.validate();
            if (a.delta_input_var && !(*a.delta_input_var >= 0.0))
                throw std::invalid_argument("config: delta_input_var must be >= 0");
        }
    }
}

ExperimentConfig parse_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(std::string("config: invalid JSON: ") + e.what());
    }
    const std::string where = "config";
    reject_unknown(j,
                   {"input", "total_samples", "M", "N", "K", "snr_db", "echo_decay", "path_seed", "algorithms",
                    "change_at", "runs", "base_seed", "threads", "output"},
                   where);

    ExperimentConfig c;
    if (!j.contains("input")) throw std::invalid_argument("config: missing 'input'");
    c.input = parse_input(j.at("input"));
    if (j.contains("total_samples")) c.total_samples = get_count(j, "total_samples", where);
    if (j.contains("M")) c.taps = get_count(j, "M", where);
    if (j.contains("N")) c.subbands = get_count(j, "N", where);
    if (j.contains("K")) c.overlap = get_count(j, "K", where);
    if (j.contains("snr_db")) {
        const json& s = j.at("snr_db");
        if (s.is_string() && (s == "inf" || s == "infinity")) {
            c.snr_db = std::numeric_limits<double>::infinity();
        } else if (s.is_number()) {
            c.snr_db = s.get<double>();
        } else {
            throw std::invalid_argument("config.snr_db: expected a number or \"inf\"");
        }
    }
    if (j.contains("echo_decay")) c.echo_decay = get<double>(j, "echo_decay", where);
    if (j.contains("path_seed")) c.path_seed = get<std::uint64_t>(j, "path_seed", where);
    if (j.contains("algorithms")) {
        const json& algs = j.at("algorithms");
        if (!algs.is_array()) throw std::invalid_argument("config.algorithms: expected an array");
        for (std::size_t i = 0; i < algs.size(); ++i) c.algorithms.push_back(parse_algorithm(algs[i], i));
    }
    if (j.contains("change_at")) {
        const json& ch = j.at("change_at");
        if (ch.is_null()) {
            c.change_at.reset();
        } else if (ch.is_string() && ch == "middle") {
            c.change_at_middle = true;
        } else {
            c.change_at = get_count(j, "change_at", where);
        }
    }
    if (j.contains("runs")) c.runs = get_count(j, "runs", where);
    if (j.contains("base_seed")) c.base_seed = get<std::uint64_t>(j, "base_seed", where);
    if (j.contains("threads")) c.threads = get_count(j, "threads", where);
    if (j.contains("output")) {
        const json& out = j.at("output");
        reject_unknown(out, {"csv", "svg"}, "output");
        if (out.contains("csv")) c.out_csv = get<std::string>(out, "csv", "output");
        if (out.contains("svg")) c.out_svg = get<std::string>(out, "svg", "output");
    }
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

}  // namespace nsaf
