#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "codeevo/error.hpp"

namespace codeevo {

/// Experiment configuration a sample belongs to (one row of a figure grid).
struct GroupKey {
    std::string benchmark;
    std::string method;
    std::string llm;

    auto operator<=>(const GroupKey&) const = default;

    /// "benchmark/method/llm", with the llm part omitted when empty.
    std::string label() const;
};

/// One generated algorithm of an automated algorithm design run.
struct CodeSample {
    std::string id;
    std::string name;
    std::string run_id;
    std::string method;
    std::string llm;
    std::string benchmark;
    long long evaluation_index = 0;
    std::vector<std::string> parent_ids;
    /// Missing for failed or invalid code.
    std::optional<double> fitness_raw;
    std::string code;

    GroupKey group_key() const { return GroupKey{benchmark, method, llm}; }

    bool operator==(const CodeSample&) const = default;
};

/// Identifies one run; run ids are only unique within a group.
struct RunKey {
    GroupKey group;
    std::string run_id;

    auto operator<=>(const RunKey&) const = default;
};

/// Samples in file order plus the derived partitions. Both partitions list
/// keys in order of first appearance and sample indices in file order.
class Dataset {
public:
    Dataset() = default;
    explicit Dataset(std::vector<CodeSample> samples);

    const std::vector<CodeSample>& samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }

    const std::vector<std::pair<GroupKey, std::vector<std::size_t>>>& groups() const noexcept { return groups_; }
    const std::vector<std::pair<RunKey, std::vector<std::size_t>>>& runs() const noexcept { return runs_; }

    /// Index of the sample with the given id, if any.
    std::optional<std::size_t> find(std::string_view id) const;

    bool operator==(const Dataset& other) const { return samples_ == other.samples_; }

private:
    std::vector<CodeSample> samples_;
    std::vector<std::pair<GroupKey, std::vector<std::size_t>>> groups_;
    std::vector<std::pair<RunKey, std::vector<std::size_t>>> runs_;
};

enum class ValidationPolicy { Strict, DropDanglingEdges };

struct Violation {
    std::string sample_id;
    std::string parent_id;
    std::string reason;
};

/// Reads a JSONL run log. Each non-empty line is one sample; `code` may be
/// replaced by `code_path`, resolved relative to the log's directory.
/// Throws IoError when the file cannot be read and ValidationError on a
/// malformed line (the message names the line number) or a duplicate id.
Dataset load_jsonl(const std::filesystem::path& path);

/// Parses JSONL text; `base_dir` resolves `code_path` entries.
Dataset parse_jsonl(std::string_view text, const std::filesystem::path& base_dir = {});

/// Serializes samples one per line with inline code.
std::string to_jsonl(const Dataset& dataset);
void write_jsonl(const Dataset& dataset, const std::filesystem::path& path);

/// Checks that every parent id names an earlier sample of the same run.
/// Strict policy throws ValidationError on the first violation; the drop
/// policy removes offending parent ids and reports them.
std::pair<Dataset, std::vector<Violation>> validate(const Dataset& dataset, ValidationPolicy policy);

}  // namespace codeevo
