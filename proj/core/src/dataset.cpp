#include "salbench/dataset.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "salbench/errors.hpp"

namespace salbench::experiments {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

fixmap::StimulusSizes Dataset::sizes() const {
    fixmap::StimulusSizes s;
    for (const StimulusInfo& st : stimuli) s.by_id[st.id] = st.size;
    return s;
}

const StimulusInfo& Dataset::stimulus(const std::string& id) const {
    for (const StimulusInfo& st : stimuli) {
        if (st.id == id) return st;
    }
    throw ValidationError("unknown stimulus '" + id + "'");
}

std::vector<fixmap::FixationSet> Dataset::sets_for(const std::vector<fixmap::FixationSet>& condition,
                                                   const std::string& stimulus_id) const {
    std::vector<fixmap::FixationSet> out;
    for (const auto& s : condition) {
        if (s.stimulus_id == stimulus_id) out.push_back(s);
    }
    return out;
}

Dataset load_dataset(const fs::path& root) {
    const fs::path manifest = root / "dataset.json";
    std::ifstream in(manifest);
    if (!in) throw IoError("cannot open " + manifest.string());
    ordered_json j;
    try {
        j = ordered_json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(manifest.string() + ": " + e.what(), 0);
    }
    Dataset ds;
    try {
        if (j.value("schema_version", 0) != kSchemaVersion) {
            throw ValidationError(manifest.string() + ": unsupported schema_version");
        }
        for (const auto& s : j.at("stimuli")) {
            StimulusInfo info{s.at("id").get<std::string>(),
                              {s.at("width").get<std::size_t>(), s.at("height").get<std::size_t>()},
                              s.value("image", std::string())};
            if (info.size.width == 0 || info.size.height == 0) {
                throw ValidationError(manifest.string() + ": stimulus " + info.id + " has zero size");
            }
            ds.stimuli.push_back(std::move(info));
        }
        const auto sizes = ds.sizes();
        const auto& fx = j.at("fixations");
        ds.hc = fixmap::parse_fixations_file((root / fx.at("hc").get<std::string>()).string(), sizes);
        if (fx.contains("lg")) {
            ds.lg = fixmap::parse_fixations_file((root / fx.at("lg").get<std::string>()).string(), sizes);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(manifest.string() + ": " + e.what());
    }
    return ds;
}

void save_dataset(const fs::path& root, const Dataset& ds) {
    fs::create_directories(root);
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    ordered_json stimuli = ordered_json::array();
    for (const StimulusInfo& s : ds.stimuli) {
        ordered_json e;
        e["id"] = s.id;
        e["width"] = s.size.width;
        e["height"] = s.size.height;
        if (!s.image.empty()) e["image"] = s.image;
        stimuli.push_back(std::move(e));
    }
    j["stimuli"] = std::move(stimuli);
    j["fixations"]["hc"] = "fixations_hc.csv";
    if (!ds.lg.empty()) j["fixations"]["lg"] = "fixations_lg.csv";

    const auto write_text = [](const fs::path& p, const std::string& body) {
        std::ofstream out(p, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + p.string());
        out << body;
    };
    write_text(root / "dataset.json", j.dump(2) + "\n");
    std::ostringstream hc;
    fixmap::write_fixations(hc, ds.hc);
    write_text(root / "fixations_hc.csv", hc.str());
    if (!ds.lg.empty()) {
        std::ostringstream lg;
        fixmap::write_fixations(lg, ds.lg);
        write_text(root / "fixations_lg.csv", lg.str());
    }
}

}  // namespace salbench::experiments
