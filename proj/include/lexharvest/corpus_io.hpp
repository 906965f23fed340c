#pragma once

#include <cstdint>
#include <functional>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace lexharvest::corpus_io {

struct RawTweet {
    std::string id;
    std::string text;

    friend bool operator==(const RawTweet&, const RawTweet&) = default;
};

enum class Task { offensive, hate_speech, sentiment, emotion };

std::string_view task_name(Task task);
Task task_from_name(std::string_view name);

// Closed label sets per task; emotion is open (any non-empty labels).
std::vector<std::string> label_set(Task task);
std::string positive_label(Task task);  // OFF, HS, NEG; emotion has none
std::string negative_label(Task task);  // NOT_OFF, NOT_HS, POS
bool has_open_label_set(Task task);

struct Dataset {
    Task task = Task::offensive;
    struct Row {
        RawTweet tweet;
        std::string label;
        friend bool operator==(const Row&, const Row&) = default;
    };
    std::vector<Row> records;
    std::map<std::string, std::uint64_t> counts;
    // Free-form audit metadata (e.g. achieved prevalence when a pool ran
    // short). Never serialized into the TSV.
    std::map<std::string, std::string> notes;

    void recount();
    void validate_labels() const;  // throws DataError on an out-of-set label
};

Dataset make_dataset(Task task, std::vector<Dataset::Row> rows);

enum class BadLinePolicy { fail, skip };

struct ReadStats {
    std::uint64_t lines = 0;
    std::uint64_t records = 0;
    std::uint64_t skipped = 0;
};

// Single-consumer streaming reader over a JSONL corpus. Memory use is
// bounded by the longest line plus the id index kept for duplicate checks.
class JsonlReader {
public:
    JsonlReader(const std::string& path, BadLinePolicy policy = BadLinePolicy::fail);
    // Non-owning stream variant (CLI filter mode); `name` labels errors.
    JsonlReader(std::istream& in, std::string name, BadLinePolicy policy = BadLinePolicy::fail);

    // Next record in file order, or nullopt at end of file.
    std::optional<RawTweet> next();

    const ReadStats& stats() const { return stats_; }

private:
    std::string path_;
    std::ifstream own_;
    std::istream* in_ = nullptr;
    BadLinePolicy policy_;
    ReadStats stats_;
    std::unordered_map<std::string, std::uint64_t> seen_ids_;  // id -> line
};

void for_each_jsonl(const std::string& path, BadLinePolicy policy,
                    const std::function<void(RawTweet&&, std::uint64_t line)>& fn,
                    ReadStats* stats = nullptr);

std::vector<RawTweet> read_jsonl(const std::string& path,
                                 BadLinePolicy policy = BadLinePolicy::fail,
                                 ReadStats* stats = nullptr);

// Writes one {"id":...,"text":...} object per line, LF endings.
void write_jsonl(const std::vector<RawTweet>& records, const std::string& path);
void write_jsonl(const std::vector<RawTweet>& records, std::ostream& out,
                 const std::string& name);

// Labeled TSV: columns id/text/label, optional header detected by exact
// column names, labels validated against the task label set.
Dataset read_labeled_tsv(const std::string& path, Task task);

// Pool TSVs are intermediate artifacts whose label column is informational;
// rows are structurally validated (3 columns, unique ids) but labels are not
// checked against any task.
std::vector<Dataset::Row> read_pool_tsv(const std::string& path);

struct WriteStats {
    std::uint64_t sanitized = 0;  // texts with tabs/newlines replaced by spaces
};

// Deterministic TSV: header, fixed column order, LF endings, UTF-8, no BOM.
WriteStats write_dataset(const Dataset& dataset, const std::string& path);

}  // namespace lexharvest::corpus_io
