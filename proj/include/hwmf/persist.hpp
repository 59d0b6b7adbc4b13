#pragma once

#include <string>

#include "json.hpp"

#include "hwmf/harness.hpp"
#include "hwmf/maassform.hpp"
#include "hwmf/solver.hpp"

namespace hwmf {

// JSON text of a table; every number is a decimal string that reproduces the
// stored value bit for bit at the table's precision.
std::string table_to_json(const CoefficientTable& table);
CoefficientTable table_from_json(const std::string& text);

void save_table(const CoefficientTable& table, const std::string& path);
CoefficientTable load_table(const std::string& path);

// n,h,Delta,re,im,err_bound,phase; rows sorted by (Delta, h).
std::string table_to_csv(const CoefficientTable& table);

nlohmann::json to_json(const ErrorReport& report);
nlohmann::json to_json(const CheckReport& report);

// Writes via a temporary file and rename.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace hwmf
