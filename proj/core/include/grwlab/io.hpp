#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "grwlab/graphgeom.hpp"
#include "grwlab/maxsolver.hpp"
#include "grwlab/verify.hpp"
#include "grwlab/warpkit.hpp"

/// grwlab/1 file formats: JSON headers and reports, CSV payloads.
///
/// All JSON documents carry "schema": "grwlab/1". Infinite interval bounds
/// are written as the strings "inf" / "-inf". Doubles are printed in their
/// shortest round-trip form so reruns are byte-identical.
namespace grwlab::io {

inline constexpr std::string_view kSchema = "grwlab/1";

std::string format_double(double x);

std::string interval_to_json(const IntervalDomain& d);
IntervalDomain interval_from_json(std::string_view json);

/// {name, n, warp: {kind, params}, domain: {lo, hi}}
std::string spacetime_to_json(const SpacetimeSpec& spec);
SpacetimeSpec spacetime_from_json(std::string_view json);

std::string grid_to_json(const Grid& grid);
Grid grid_from_json(std::string_view json);

std::string classification_to_json(const ClassificationReport& report);
std::string tolerances_to_json(const Tolerances& tol);
Tolerances tolerances_from_json(std::string_view json, Tolerances base = {});

/// Row-major CSV, one grid line (axis 0 varying) per text line.
std::string field_to_csv(const Grid& grid, const std::vector<double>& values);
std::vector<double> field_from_csv(const Grid& grid, std::string_view csv);

/// Writes `<stem>.json` (header) and `<stem>.csv` (u values).
void write_surface(const std::filesystem::path& stem, const GraphHypersurface& surface);
GraphHypersurface read_surface(const std::filesystem::path& header);

/// One CSV per field (x1,..,xn,value) over the nodes where the field is valid.
void write_fields(const std::filesystem::path& dir, const GeometryFields& fields);
std::string masked_field_to_csv(const Grid& grid, const MaskedField& field,
                                std::string_view column);

std::string check_report_to_json(const CheckReport& report);
std::string residual_history_csv(const SolveOutcome& outcome);
std::string outcome_to_json(const SolveOutcome& outcome, const Grid& grid);
/// Problem header; boundary values and initial guess go to CSV files alongside.
std::string problem_to_json(const DirichletProblem& problem);

void write_text(const std::filesystem::path& path, std::string_view text);
std::string read_text(const std::filesystem::path& path);

}  // namespace grwlab::io
