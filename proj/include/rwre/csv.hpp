// csv.hpp -- minimal CSV assembly with atomic file writes.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace rwre::io {

class CsvTable {
  public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(std::vector<std::string> cells);
    // Convenience: formats doubles with enough digits to round-trip.
    static std::string cell(double v);
    static std::string cell(std::int64_t v);
    static std::string cell(std::uint64_t v);

    std::size_t rows() const { return rows_.size(); }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& data() const { return rows_; }

    std::string to_string() const;
    // Writes via temp file + rename so concurrent readers never see partial output.
    void write_atomic(const std::string& path) const;

    void append(const CsvTable& other);  // headers must match

  private:
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

// Shared by all writers: temp file in the target directory, then rename.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace rwre::io
