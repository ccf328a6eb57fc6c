#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace pairlens {

using Json = nlohmann::json;

// Reads a JSON-lines file. Blank lines are skipped. A malformed record
// raises with the 1-based line number in the message.
std::vector<Json> read_jsonl(const std::string& path);

// Streaming variant for large files; callback gets (line_number, record).
void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t, const Json&)>& fn);

void write_jsonl(const std::string& path, const std::vector<Json>& records);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

Json read_json_file(const std::string& path);
void write_json_file(const std::string& path, const Json& value);

}  // namespace pairlens
