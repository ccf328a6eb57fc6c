#include "pairlens/jsonl.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pairlens {

void for_each_jsonl(const std::string& path,
                    const std::function<void(std::size_t, const Json&)>& fn) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json record = Json::parse(line, nullptr, false);
    if (record.is_discarded()) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": malformed JSON record");
    }
    fn(lineno, record);
  }
}

std::vector<Json> read_jsonl(const std::string& path) {
  std::vector<Json> records;
  for_each_jsonl(path, [&](std::size_t, const Json& r) { records.push_back(r); });
  return records;
}

void write_jsonl(const std::string& path, const std::vector<Json>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  for (const Json& r : records) out << r.dump() << '\n';
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

Json read_json_file(const std::string& path) {
  Json v = Json::parse(read_text_file(path), nullptr, false);
  if (v.is_discarded()) throw std::runtime_error(path + ": malformed JSON");
  return v;
}

void write_json_file(const std::string& path, const Json& value) {
  write_text_file(path, value.dump(2) + "\n");
}

}  // namespace pairlens
