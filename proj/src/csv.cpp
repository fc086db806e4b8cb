#include <fstream>
#include <sstream>

#include "medeq/dataset.hpp"
#include "medeq/errors.hpp"

namespace medeq {

namespace {

// RFC 4180 records: comma separated, double-quote escaping, quoted fields
// may contain commas, quotes and line breaks.
std::vector<std::vector<std::string>> split_records(std::string_view text) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> fields;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;
  auto end_field = [&] {
    fields.push_back(std::move(field));
    field.clear();
    field_started = false;
  };
  auto end_record = [&] {
    end_field();
    records.push_back(std::move(fields));
    fields.clear();
  };
  while (i < text.size()) {
    const char c = text[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field.push_back(c);
      }
      ++i;
      continue;
    }
    if (c == '"' && !field_started && field.empty()) {
      in_quotes = true;
      field_started = true;
    } else if (c == ',') {
      end_field();
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_record();
      ++i;
    } else if (c == '\n') {
      end_record();
    } else {
      field.push_back(c);
      field_started = true;
    }
    ++i;
  }
  if (in_quotes) throw DataError("CSV ends inside a quoted field");
  if (field_started || !field.empty() || !fields.empty()) end_record();
  return records;
}

bool needs_quotes(const std::string& s) {
  return s.find_first_of(",\"\r\n") != std::string::npos;
}

void write_field(std::string& out, const std::string& s) {
  if (!needs_quotes(s)) {
    out += s;
    return;
  }
  out.push_back('"');
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

}  // namespace

Dataset parse_csv(std::string_view text, const Schema& schema) {
  auto records = split_records(text);
  if (records.empty()) throw DataError("CSV has no header row");
  const auto& header = records.front();
  if (header != schema.names()) {
    std::string got;
    for (std::size_t i = 0; i < header.size(); ++i) got += (i ? "," : "") + header[i];
    throw DataError("CSV header mismatch: got '" + got + "'");
  }
  std::vector<Record> rows;
  rows.reserve(records.size() - 1);
  for (std::size_t r = 1; r < records.size(); ++r) {
    const auto& fields = records[r];
    if (fields.size() != schema.size())
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(fields.size()) +
                      " fields, expected " + std::to_string(schema.size()));
    Record rec(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c) {
      auto code = schema.column(c).code_of(fields[c]);
      if (!code)
        throw DataError("unknown category '" + fields[c] + "' at row " + std::to_string(r) +
                        ", column \"" + schema.column(c).name + "\"");
      rec[c] = *code;
    }
    rows.push_back(std::move(rec));
  }
  return Dataset(schema, std::move(rows));
}

std::string format_csv(const Dataset& d) {
  std::string out;
  const auto& schema = d.schema();
  for (std::size_t c = 0; c < schema.size(); ++c) {
    if (c) out.push_back(',');
    write_field(out, schema.column(c).name);
  }
  out.push_back('\n');
  for (const auto& r : d.rows()) {
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (c) out.push_back(',');
      write_field(out, schema.column(c).values[r[c]]);
    }
    out.push_back('\n');
  }
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open CSV file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_csv(buf.str(), schema);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

void save_csv(const Dataset& d, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write CSV file '" + path.string() + "'");
  out << format_csv(d);
  if (!out) throw DataError("I/O failure writing '" + path.string() + "'");
}

}  // namespace medeq
