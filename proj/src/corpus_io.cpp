#include "lexharvest/corpus_io.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include <json.hpp>

#include "lexharvest/errors.hpp"

namespace lexharvest::corpus_io {

using nlohmann::json;

std::string_view task_name(Task task) {
    switch (task) {
        case Task::offensive: return "offensive";
        case Task::hate_speech: return "hate_speech";
        case Task::sentiment: return "sentiment";
        case Task::emotion: return "emotion";
    }
    return "?";
}

Task task_from_name(std::string_view name) {
    if (name == "offensive") return Task::offensive;
    if (name == "hate_speech") return Task::hate_speech;
    if (name == "sentiment") return Task::sentiment;
    if (name == "emotion") return Task::emotion;
    throw UsageError("unknown task: '" + std::string(name) +
                     "' (expected offensive, hate_speech, sentiment, or emotion)");
}

std::vector<std::string> label_set(Task task) {
    switch (task) {
        case Task::offensive: return {"NOT_OFF", "OFF"};
        case Task::hate_speech: return {"HS", "NOT_HS"};
        case Task::sentiment: return {"NEG", "POS"};
        case Task::emotion: return {};
    }
    return {};
}

std::string positive_label(Task task) {
    switch (task) {
        case Task::offensive: return "OFF";
        case Task::hate_speech: return "HS";
        case Task::sentiment: return "NEG";
        case Task::emotion: throw UsageError("emotion task has no positive label");
    }
    return {};
}

std::string negative_label(Task task) {
    switch (task) {
        case Task::offensive: return "NOT_OFF";
        case Task::hate_speech: return "NOT_HS";
        case Task::sentiment: return "POS";
        case Task::emotion: throw UsageError("emotion task has no negative label");
    }
    return {};
}

bool has_open_label_set(Task task) { return task == Task::emotion; }

void Dataset::recount() {
    counts.clear();
    for (const auto& row : records) ++counts[row.label];
}

void Dataset::validate_labels() const {
    if (has_open_label_set(task)) return;
    const auto allowed = label_set(task);
    for (const auto& row : records) {
        if (std::find(allowed.begin(), allowed.end(), row.label) == allowed.end()) {
            std::string msg = "unknown label '" + row.label + "' for task " +
                              std::string(task_name(task)) + " (allowed:";
            for (const auto& l : allowed) msg += " " + l;
            msg += ")";
            throw DataError(msg);
        }
    }
}

Dataset make_dataset(Task task, std::vector<Dataset::Row> rows) {
    Dataset d;
    d.task = task;
    d.records = std::move(rows);
    d.recount();
    d.validate_labels();
    return d;
}

namespace {

RawTweet parse_jsonl_line(const std::string& line, std::uint64_t line_no) {
    json obj;
    try {
        obj = json::parse(line);
    } catch (const json::exception& e) {
        throw DataError("line " + std::to_string(line_no) + ": malformed JSON: " + e.what());
    }
    if (!obj.is_object()) {
        throw DataError("line " + std::to_string(line_no) + ": not a JSON object");
    }
    if (!obj.contains("id") || !obj["id"].is_string()) {
        throw DataError("line " + std::to_string(line_no) + ": missing string field 'id'");
    }
    if (!obj.contains("text") || !obj["text"].is_string()) {
        throw DataError("line " + std::to_string(line_no) + ": missing string field 'text'");
    }
    RawTweet t{obj["id"].get<std::string>(), obj["text"].get<std::string>()};
    if (t.id.empty()) {
        throw DataError("line " + std::to_string(line_no) + ": empty id");
    }
    return t;
}

}  // namespace

JsonlReader::JsonlReader(const std::string& path, BadLinePolicy policy)
    : path_(path), own_(path, std::ios::binary), in_(&own_), policy_(policy) {
    if (!own_) throw DataError("cannot open JSONL file: " + path);
}

JsonlReader::JsonlReader(std::istream& in, std::string name, BadLinePolicy policy)
    : path_(std::move(name)), in_(&in), policy_(policy) {}

std::optional<RawTweet> JsonlReader::next() {
    std::string line;
    while (std::getline(*in_, line)) {
        ++stats_.lines;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        RawTweet t;
        try {
            t = parse_jsonl_line(line, stats_.lines);
        } catch (const DataError& e) {
            if (policy_ == BadLinePolicy::fail) {
                throw DataError(path_ + ": " + e.what());
            }
            ++stats_.skipped;
            continue;
        }
        auto [it, inserted] = seen_ids_.emplace(t.id, stats_.lines);
        if (!inserted) {
            throw DataError(path_ + ": duplicate id '" + t.id + "' on lines " +
                            std::to_string(it->second) + " and " + std::to_string(stats_.lines));
        }
        ++stats_.records;
        return t;
    }
    return std::nullopt;
}

void for_each_jsonl(const std::string& path, BadLinePolicy policy,
                    const std::function<void(RawTweet&&, std::uint64_t line)>& fn,
                    ReadStats* stats) {
    JsonlReader reader(path, policy);
    while (auto t = reader.next()) {
        fn(std::move(*t), reader.stats().lines);
    }
    if (stats) *stats = reader.stats();
}

std::vector<RawTweet> read_jsonl(const std::string& path, BadLinePolicy policy,
                                 ReadStats* stats) {
    std::vector<RawTweet> out;
    for_each_jsonl(
        path, policy, [&](RawTweet&& t, std::uint64_t) { out.push_back(std::move(t)); }, stats);
    return out;
}

void write_jsonl(const std::vector<RawTweet>& records, std::ostream& out,
                 const std::string& name) {
    for (const auto& t : records) {
        json obj;
        obj["id"] = t.id;
        obj["text"] = t.text;
        out << obj.dump() << '\n';
    }
    if (!out) throw DataError("write failed: " + name);
}

void write_jsonl(const std::vector<RawTweet>& records, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    write_jsonl(records, out, path);
}

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> cols;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string::npos) {
            cols.push_back(line.substr(start));
            break;
        }
        cols.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
    return cols;
}

struct TsvRow {
    std::vector<std::string> cols;
    std::uint64_t line_no;
};

// Yields data rows, skipping an exact "id\ttext\tlabel" header.
template <typename Fn>
void for_each_tsv_row(const std::string& path, Fn&& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open TSV file: " + path);
    std::string line;
    std::uint64_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (first) {
            first = false;
            if (line == "id\ttext\tlabel") continue;
        }
        if (line.empty()) continue;
        auto cols = split_tabs(line);
        if (cols.size() != 3) {
            throw DataError(path + ": row " + std::to_string(line_no) + ": expected 3 columns, got " +
                            std::to_string(cols.size()));
        }
        fn(TsvRow{std::move(cols), line_no});
    }
}

}  // namespace

Dataset read_labeled_tsv(const std::string& path, Task task) {
    Dataset d;
    d.task = task;
    const auto allowed = label_set(task);
    std::unordered_map<std::string, std::uint64_t> seen;
    for_each_tsv_row(path, [&](TsvRow row) {
        auto& cols = row.cols;
        if (cols[0].empty()) {
            throw DataError(path + ": row " + std::to_string(row.line_no) + ": empty id");
        }
        if (!has_open_label_set(task) &&
            std::find(allowed.begin(), allowed.end(), cols[2]) == allowed.end()) {
            std::string msg = path + ": row " + std::to_string(row.line_no) + ": unknown label '" +
                              cols[2] + "' (allowed:";
            for (const auto& l : allowed) msg += " " + l;
            msg += ")";
            throw DataError(msg);
        }
        if (has_open_label_set(task) && cols[2].empty()) {
            throw DataError(path + ": row " + std::to_string(row.line_no) + ": empty label");
        }
        auto [it, inserted] = seen.emplace(cols[0], row.line_no);
        if (!inserted) {
            throw DataError(path + ": duplicate id '" + cols[0] + "' on rows " +
                            std::to_string(it->second) + " and " + std::to_string(row.line_no));
        }
        d.records.push_back({{std::move(cols[0]), std::move(cols[1])}, std::move(cols[2])});
    });
    d.recount();
    return d;
}

std::vector<Dataset::Row> read_pool_tsv(const std::string& path) {
    std::vector<Dataset::Row> rows;
    std::unordered_map<std::string, std::uint64_t> seen;
    for_each_tsv_row(path, [&](TsvRow row) {
        auto& cols = row.cols;
        if (cols[0].empty()) {
            throw DataError(path + ": row " + std::to_string(row.line_no) + ": empty id");
        }
        auto [it, inserted] = seen.emplace(cols[0], row.line_no);
        if (!inserted) {
            throw DataError(path + ": duplicate id '" + cols[0] + "' on rows " +
                            std::to_string(it->second) + " and " + std::to_string(row.line_no));
        }
        rows.push_back({{std::move(cols[0]), std::move(cols[1])}, std::move(cols[2])});
    });
    return rows;
}

WriteStats write_dataset(const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    WriteStats stats;
    out << "id\ttext\tlabel\n";
    for (const auto& row : dataset.records) {
        std::string text = row.tweet.text;
        bool touched = false;
        for (char& c : text) {
            if (c == '\t' || c == '\n' || c == '\r') {
                c = ' ';
                touched = true;
            }
        }
        if (touched) ++stats.sanitized;
        out << row.tweet.id << '\t' << text << '\t' << row.label << '\n';
    }
    if (!out) throw DataError("write failed: " + path);
    return stats;
}

}  // namespace lexharvest::corpus_io
