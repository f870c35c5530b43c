/* SPDX-FileCopyrightText: Copyright (c) 2026, the nlrm authors.
 * SPDX-License-Identifier: Apache-2.0
 */

#ifndef NLRM_IO_HPP
#define NLRM_IO_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>

#include <json.hpp>

#include "nlrm/altmin.hpp"
#include "nlrm/estimation.hpp"
#include "nlrm/family.hpp"
#include "nlrm/measurement.hpp"
#include "nlrm/parametric_model.hpp"

namespace nlrm::io
{

using json = nlohmann::ordered_json;

/// Bumped whenever a stored layout changes; loaders reject other versions.
inline constexpr int kFormatVersion = 1;

class FormatError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// FNV-1a 64 of the compact dump, as 16 hex digits.
std::string config_hash(const json& config);

json read_json(const std::filesystem::path& path);
void write_json(const std::filesystem::path& path, const json& doc);

// Model description: {n_per_side, partition, abar, c, box}.
json model_to_json(const AffineModel& model);
AffineModel model_from_json(const json& doc);

json layout_to_json(const MeasurementLayout& layout);
MeasurementLayout layout_from_json(const json& doc);

json mode_to_json(const FamilyMode& mode);
FamilyMode mode_from_json(const json& doc);

/// `stem`.json (cells, eps/mu tables, split tree) and `stem`.bin (offsets
/// and bases, float64, column-major, little-endian).
void save_family(const std::filesystem::path& stem,
                 const ReducedFamily& family);
ReducedFamily load_family(const std::filesystem::path& stem);

/// Flat float64 dump `stem`.bin with header `stem`.json {rows, cols, ...}.
void write_state_dump(const std::filesystem::path& stem, const Matrix& data,
                      const json& meta = json::object());
Matrix read_state_dump(const std::filesystem::path& stem);

/// {"z": [...]} (raw measurements) or {"w": [...]} (psi-coordinates).
Observation observation_from_json(const MeasurementSpace& W, const json& doc);

json selection_to_json(const SelectionResult& sel);
json altmin_trace_to_json(const AltMinState& st);

json vector_to_json(const Vector& v);
Vector vector_from_json(const json& a);

} // namespace nlrm::io

#endif
