#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "csv.hpp"
#include "segeval/error.hpp"
#include "segeval/report.hpp"

namespace segeval {
namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& value) {
    std::vector<std::string> out;
    std::stringstream ss(value);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorCode::config_error, key + ": '" + value + "' is not a number");
    }
}

std::size_t parse_count(const std::string& key, const std::string& value) {
    const double v = parse_double(key, value);
    if (v < 0 || v != std::floor(v)) {
        throw Error(ErrorCode::config_error, key + ": '" + value + "' is not a non-negative integer");
    }
    return static_cast<std::size_t>(v);
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& value) {
    const std::filesystem::path p(value);
    return p.is_absolute() ? p : base / p;
}

}  // namespace

std::vector<std::string> RunConfig::default_correlation_metrics() {
    return {"dice", "tpr", "tnr", "ppv", "iou", "gce", "vs", "ravd", "nmi", "voi",
            "cks", "auc", "mcc", "pbd", "hd95", "mhd", "assd", "ari", "oassd"};
}

void RunConfig::validate() const {
    try {
        validate_thresholds(thresholds);
    } catch (const Error& e) {
        throw Error(ErrorCode::config_error, e.what());
    }
    if (workers < 1) throw Error(ErrorCode::config_error, "workers must be at least 1");
    if (volume_bins < 1) throw Error(ErrorCode::config_error, "volume_bins must be at least 1");
    if (!(evaluation.detection_threshold >= 0.0 && evaluation.detection_threshold < 1.0)) {
        throw Error(ErrorCode::config_error, "detection_threshold must lie in [0,1)");
    }
    const auto known = row_metric_names();
    for (const std::string& m : metrics) {
        if (std::find(known.begin(), known.end(), m) == known.end()) {
            throw Error(ErrorCode::config_error, "unknown metric '" + m + "'");
        }
    }
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(ErrorCode::config_error, "line " + std::to_string(line_no) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "manifest") {
            config.manifest = resolve(base_dir, value);
        } else if (key == "output_dir") {
            config.output_dir = resolve(base_dir, value);
        } else if (key == "thresholds") {
            config.thresholds.clear();
            for (const auto& item : split_list(value)) config.thresholds.push_back(parse_double(key, item));
        } else if (key == "detection_threshold") {
            config.evaluation.detection_threshold = parse_double(key, value);
        } else if (key == "min_component_voxels") {
            config.evaluation.min_component_voxels = parse_count(key, value);
        } else if (key == "connectivity") {
            try {
                config.evaluation.connectivity = parse_connectivity(static_cast<int>(parse_count(key, value)));
            } catch (const Error& e) {
                throw Error(ErrorCode::config_error, e.what());
            }
        } else if (key == "workers") {
            config.workers = parse_count(key, value);
        } else if (key == "metrics") {
            config.metrics = split_list(value);
        } else if (key == "pairing") {
            if (value == "greedy") config.evaluation.pairing = PairingStrategy::greedy;
            else if (value == "optimal") config.evaluation.pairing = PairingStrategy::optimal;
            else throw Error(ErrorCode::config_error, "pairing must be greedy or optimal");
        } else if (key == "hd95_mode") {
            if (value == "pooled") config.evaluation.hd95_mode = Hd95Mode::pooled;
            else if (value == "max_directed") config.evaluation.hd95_mode = Hd95Mode::max_directed;
            else throw Error(ErrorCode::config_error, "hd95_mode must be pooled or max_directed");
        } else if (key == "ari_variant") {
            if (value == "corrected") config.evaluation.ari = AriVariant::corrected;
            else if (value == "as_printed") config.evaluation.ari = AriVariant::as_printed;
            else throw Error(ErrorCode::config_error, "ari_variant must be corrected or as_printed");
        } else if (key == "correlation") {
            if (value == "pearson") config.correlation = CorrelationMethod::pearson;
            else if (value == "spearman") config.correlation = CorrelationMethod::spearman;
            else throw Error(ErrorCode::config_error, "correlation must be pearson or spearman");
        } else if (key == "binning") {
            if (value == "equal_count") config.binning = BinningMode::equal_count;
            else if (value == "equal_width") config.binning = BinningMode::equal_width;
            else throw Error(ErrorCode::config_error, "binning must be equal_count or equal_width");
        } else if (key == "volume_bins") {
            config.volume_bins = parse_count(key, value);
        } else {
            throw Error(ErrorCode::config_error, "unknown key '" + key + "'");
        }
    }
    if (config.manifest.empty()) {
        throw Error(ErrorCode::config_error, "missing required key 'manifest'");
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config_error, "cannot read config '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_config(buffer.str(), path.parent_path());
}

void apply_environment(RunConfig& config) {
    if (const char* env = std::getenv("SEGEVAL_WORKERS"); env != nullptr && *env != '\0') {
        config.workers = parse_count("SEGEVAL_WORKERS", env);
        if (config.workers < 1) throw Error(ErrorCode::config_error, "SEGEVAL_WORKERS must be at least 1");
    }
}

std::vector<PatientCase> load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::config_error, "cannot read manifest '" + path.string() + "'");
    std::string line;
    std::vector<std::string> header;
    while (header.empty() && std::getline(in, line)) {
        if (!trim(line).empty()) header = csv::split(line);
    }
    if (header.empty()) throw Error(ErrorCode::empty_manifest, "'" + path.string() + "' has no header");
    for (auto& h : header) h = trim(h);

    const auto column = [&](const std::string& name, bool required) -> std::ptrdiff_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) {
            if (required) throw Error(ErrorCode::config_error, "manifest lacks column '" + name + "'");
            return -1;
        }
        return it - header.begin();
    };
    const auto id_col = column("patient_id", true);
    const auto gt_col = column("gt_path", true);
    const auto pred_col = column("pred_path", true);
    const auto fold_col = column("fold", false);
    const auto type_col = column("tumor_type", false);

    const std::filesystem::path base = path.parent_path();
    std::vector<PatientCase> cases;
    std::vector<bool> fold_given;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        auto fields = csv::split(line);
        for (auto& f : fields) f = trim(f);
        const auto field = [&](std::ptrdiff_t col) -> std::string {
            return col >= 0 && static_cast<std::size_t>(col) < fields.size() ? fields[static_cast<std::size_t>(col)]
                                                                             : std::string{};
        };
        PatientCase c;
        c.patient_id = field(id_col);
        if (c.patient_id.empty()) {
            throw Error(ErrorCode::config_error, "manifest line " + std::to_string(line_no) + ": empty patient_id");
        }
        c.gt_path = resolve(base, field(gt_col)).string();
        c.pred_path = resolve(base, field(pred_col)).string();
        const std::string fold = field(fold_col);
        fold_given.push_back(!fold.empty());
        if (!fold.empty()) {
            const std::size_t f = parse_count("fold", fold);
            c.fold_id = static_cast<int>(f);
        }
        try {
            c.tumor_type = parse_tumor_type(field(type_col));
        } catch (const Error& e) {
            throw Error(ErrorCode::config_error, "manifest line " + std::to_string(line_no) + ": " + e.what());
        }
        cases.push_back(std::move(c));
    }
    if (cases.empty()) throw Error(ErrorCode::empty_manifest, "'" + path.string() + "' lists no cases");

    std::vector<std::string> ids;
    for (const auto& c : cases) ids.push_back(c.patient_id);
    std::sort(ids.begin(), ids.end());
    if (const auto dup = std::adjacent_find(ids.begin(), ids.end()); dup != ids.end()) {
        throw Error(ErrorCode::config_error, "duplicate patient_id '" + *dup + "'");
    }

    const auto given = std::count(fold_given.begin(), fold_given.end(), true);
    if (given != 0 && static_cast<std::size_t>(given) != cases.size()) {
        throw Error(ErrorCode::config_error, "fold ids must be given for every case or for none");
    }
    std::vector<int> folds;
    for (const auto& c : cases) folds.push_back(c.fold_id);
    std::sort(folds.begin(), folds.end());
    folds.erase(std::unique(folds.begin(), folds.end()), folds.end());
    for (std::size_t i = 0; i < folds.size(); ++i) {
        if (folds[i] != static_cast<int>(i)) {
            throw Error(ErrorCode::config_error, "fold ids must form a contiguous 0..k-1 set");
        }
    }
    return cases;
}

}  // namespace segeval
