#include "codeevo/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

namespace codeevo {

namespace {

using nlohmann::json;

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) throw IoError("failed reading " + path.string());
    return ss.str();
}

[[noreturn]] void line_error(std::size_t line_no, const std::string& msg) {
    throw ValidationError("line " + std::to_string(line_no) + ": " + msg);
}

std::string id_string(const json& v, std::size_t line_no, const char* field) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    line_error(line_no, std::string("field '") + field + "' must be a string");
}

std::string optional_string(const json& obj, const char* field, std::size_t line_no) {
    auto it = obj.find(field);
    if (it == obj.end() || it->is_null()) return {};
    if (!it->is_string()) line_error(line_no, std::string("field '") + field + "' must be a string");
    return it->get<std::string>();
}

CodeSample parse_sample(const json& obj, std::size_t line_no, const std::filesystem::path& base_dir) {
    if (!obj.is_object()) line_error(line_no, "expected a JSON object");
    CodeSample s;
    auto require = [&](const char* field) -> const json& {
        auto it = obj.find(field);
        if (it == obj.end() || it->is_null()) line_error(line_no, std::string("missing field '") + field + "'");
        return *it;
    };
    s.id = id_string(require("id"), line_no, "id");
    s.run_id = id_string(require("run_id"), line_no, "run_id");
    s.name = optional_string(obj, "name", line_no);
    s.method = optional_string(obj, "method", line_no);
    s.llm = optional_string(obj, "llm", line_no);
    s.benchmark = optional_string(obj, "benchmark", line_no);

    const json& idx = require("evaluation_index");
    if (!idx.is_number_integer() || idx.get<long long>() < 0) {
        line_error(line_no, "field 'evaluation_index' must be a non-negative integer");
    }
    s.evaluation_index = idx.get<long long>();

    if (auto it = obj.find("parent_ids"); it != obj.end() && !it->is_null()) {
        if (!it->is_array()) line_error(line_no, "field 'parent_ids' must be an array");
        for (const auto& p : *it) s.parent_ids.push_back(id_string(p, line_no, "parent_ids"));
    }

    // "fitness" is accepted as an alias used by several run loggers.
    auto fit_it = obj.find("fitness_raw");
    if (fit_it == obj.end()) fit_it = obj.find("fitness");
    if (auto it = fit_it; it != obj.end() && !it->is_null()) {
        if (!it->is_number()) line_error(line_no, "field '" + it.key() + "' must be a number or null");
        const double f = it->get<double>();
        if (std::isfinite(f)) s.fitness_raw = f;
    }

    auto code_it = obj.find("code");
    auto path_it = obj.find("code_path");
    if (code_it != obj.end() && !code_it->is_null()) {
        if (!code_it->is_string()) line_error(line_no, "field 'code' must be a string");
        s.code = code_it->get<std::string>();
    } else if (path_it != obj.end() && !path_it->is_null()) {
        if (!path_it->is_string()) line_error(line_no, "field 'code_path' must be a string");
        s.code = read_file(base_dir / path_it->get<std::string>());
    } else {
        line_error(line_no, "missing field 'code' or 'code_path'");
    }
    return s;
}

}  // namespace

std::string GroupKey::label() const {
    std::string out = benchmark + "/" + method;
    if (!llm.empty()) out += "/" + llm;
    return out;
}

Dataset::Dataset(std::vector<CodeSample> samples) : samples_(std::move(samples)) {
    std::map<GroupKey, std::size_t> group_pos;
    std::map<RunKey, std::size_t> run_pos;
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        const CodeSample& s = samples_[i];
        GroupKey g = s.group_key();
        auto [git, gnew] = group_pos.try_emplace(g, groups_.size());
        if (gnew) groups_.emplace_back(g, std::vector<std::size_t>{});
        groups_[git->second].second.push_back(i);

        RunKey r{std::move(g), s.run_id};
        auto [rit, rnew] = run_pos.try_emplace(r, runs_.size());
        if (rnew) runs_.emplace_back(r, std::vector<std::size_t>{});
        runs_[rit->second].second.push_back(i);
    }
}

std::optional<std::size_t> Dataset::find(std::string_view id) const {
    for (std::size_t i = 0; i < samples_.size(); ++i) {
        if (samples_[i].id == id) return i;
    }
    return std::nullopt;
}

Dataset parse_jsonl(std::string_view text, const std::filesystem::path& base_dir) {
    std::vector<CodeSample> samples;
    std::set<std::string> seen;
    std::size_t line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        ++line_no;
        std::string_view line = text.substr(start, end - start);
        start = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            if (end == text.size()) break;
            continue;
        }
        json obj;
        try {
            obj = json::parse(line);
        } catch (const json::parse_error& e) {
            line_error(line_no, std::string("malformed JSON: ") + e.what());
        }
        CodeSample s = parse_sample(obj, line_no, base_dir);
        if (!seen.insert(s.id).second) line_error(line_no, "duplicate id '" + s.id + "'");
        samples.push_back(std::move(s));
        if (end == text.size()) break;
    }
    return Dataset(std::move(samples));
}

Dataset load_jsonl(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    return parse_jsonl(text, path.parent_path());
}

std::string to_jsonl(const Dataset& dataset) {
    std::string out;
    for (const CodeSample& s : dataset.samples()) {
        json obj = {
            {"id", s.id},
            {"name", s.name},
            {"run_id", s.run_id},
            {"method", s.method},
            {"llm", s.llm},
            {"benchmark", s.benchmark},
            {"evaluation_index", s.evaluation_index},
            {"parent_ids", s.parent_ids},
            {"fitness_raw", s.fitness_raw ? json(*s.fitness_raw) : json(nullptr)},
            {"code", s.code},
        };
        out += obj.dump();
        out += '\n';
    }
    return out;
}

void write_jsonl(const Dataset& dataset, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path.string());
    out << to_jsonl(dataset);
    if (!out) throw IoError("failed writing " + path.string());
}

std::pair<Dataset, std::vector<Violation>> validate(const Dataset& dataset, ValidationPolicy policy) {
    std::map<std::string, std::size_t, std::less<>> by_id;
    for (std::size_t i = 0; i < dataset.size(); ++i) by_id.emplace(dataset.samples()[i].id, i);

    std::vector<CodeSample> out = dataset.samples();
    std::vector<Violation> violations;
    for (CodeSample& child : out) {
        std::vector<std::string> kept;
        for (const std::string& pid : child.parent_ids) {
            std::string reason;
            auto it = by_id.find(pid);
            if (it == by_id.end()) {
                reason = "parent does not exist";
            } else {
                const CodeSample& parent = dataset.samples()[it->second];
                if (parent.run_id != child.run_id || parent.group_key() != child.group_key()) {
                    reason = "parent belongs to a different run";
                } else if (parent.evaluation_index >= child.evaluation_index) {
                    reason = "parent evaluation_index " + std::to_string(parent.evaluation_index) +
                             " is not before child evaluation_index " + std::to_string(child.evaluation_index);
                } else if (std::find(kept.begin(), kept.end(), pid) != kept.end()) {
                    reason = "duplicate parent";
                }
            }
            if (reason.empty()) {
                kept.push_back(pid);
                continue;
            }
            if (policy == ValidationPolicy::Strict) {
                throw ValidationError("sample '" + child.id + "' references parent '" + pid + "': " + reason);
            }
            violations.push_back(Violation{child.id, pid, reason});
        }
        child.parent_ids = std::move(kept);
    }
    return {Dataset(std::move(out)), std::move(violations)};
}

}  // namespace codeevo
