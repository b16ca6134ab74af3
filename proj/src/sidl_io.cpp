#include <json.hpp>

#include "shapesel/error.hpp"
#include "shapesel/sidl.hpp"
#include "shapesel/text.hpp"

namespace shapesel {

namespace {

constexpr const char* kFormat = "shapesel.shapelets/1";

nlohmann::json config_json(const SidlConfig& c) {
    return {{"atoms", c.atoms},           {"atom_length", c.atom_length}, {"lambda", c.lambda},
            {"norm_bound", c.norm_bound}, {"max_iters", c.max_iters},     {"inner_iters", c.inner_iters},
            {"rel_tol", c.rel_tol},       {"seed", c.seed}};
}

}  // namespace

void save_shapelets(const std::filesystem::path& path, const ShapeletSet& shapelets, const Dictionary* dict) {
    nlohmann::json j;
    j["format"] = kFormat;
    j["top_k"] = shapelets.top_k;
    j["dedup_threshold"] = shapelets.dedup_threshold;
    auto& list = j["shapelets"] = nlohmann::json::array();
    for (const auto& s : shapelets.shapelets) {
        list.push_back({{"atom_index", s.atom_index}, {"score", s.score}, {"values", s.values}});
    }
    if (dict != nullptr) {
        j["config"] = config_json(dict->config);
        j["atoms"] = dict->atoms;
        j["objective_trace"] = dict->objective_trace;
    }
    text::write_file(path, j.dump(2) + "\n");
}

ShapeletSet load_shapelets(const std::filesystem::path& path) {
    const std::string contents = text::read_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(contents);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, "'" + path.string() + "' is not valid JSON: " + e.what());
    }
    if (j.value("format", std::string{}) != kFormat) {
        throw Error(ErrorKind::ParseError, "'" + path.string() + "' is not a shapelet file");
    }
    try {
        ShapeletSet out;
        out.top_k = j.at("top_k").get<std::size_t>();
        out.dedup_threshold = j.at("dedup_threshold").get<double>();
        for (const auto& s : j.at("shapelets")) {
            Shapelet sh;
            sh.atom_index = s.at("atom_index").get<std::size_t>();
            sh.score = s.at("score").get<double>();
            sh.values = s.at("values").get<std::vector<double>>();
            if (sh.values.empty()) {
                throw Error(ErrorKind::ParseError, "shapelet with no values in '" + path.string() + "'");
            }
            out.shapelets.push_back(std::move(sh));
        }
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::ParseError, "malformed shapelet file '" + path.string() + "': " + e.what());
    }
}

}  // namespace shapesel
