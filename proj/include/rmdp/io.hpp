#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "rmdp/erm.hpp"
#include "rmdp/evar.hpp"
#include "rmdp/model.hpp"
#include "rmdp/simulate.hpp"

namespace rmdp {

/// Model file formats.
///
/// JSON: {"n_states", "n_actions", "transitions": [[s, a, s_next, p, r], ...],
/// "mu": [...]} with s_next = -1 for the sink, plus optional "labels"
/// ({"states": [...], "actions": [...]}) and "allowed_actions".
///
/// CSV: header "s,a,s_next,p,r", one transition per row, with the initial
/// distribution in a sidecar "mu.csv" (one value per line) next to the file.
TransientMdp load_model(const std::filesystem::path& path);
TransientMdp model_from_json(const nlohmann::json& j);
nlohmann::json model_to_json(const TransientMdp& model);
void save_model(const TransientMdp& model, const std::filesystem::path& path);

/// -inf renders as the string "-inf" in JSON and as an empty cell in CSV.
nlohmann::json json_number(double x);
double number_from_json(const nlohmann::json& j);
std::string csv_number(double x);

/// Fixed-format double for CSV output ("%.17g"); value-identical reruns
/// produce byte-identical files.
std::string format_double(double x);

nlohmann::json report_to_json(const SolveReport& report);
nlohmann::json evar_to_json(const EvarSolution& sol);
std::string evar_per_beta_csv(const EvarSolution& sol);
std::string histogram_csv(const std::vector<HistogramBin>& bins);

/// Reads a policy (action id per state) from JSON: either a bare array or any
/// object with a "policy" key, so solver reports feed straight back in.
indvec load_policy(const std::filesystem::path& path, const TransientMdp& model);

/// Writes via a temp file and rename.
void write_text_atomic(const std::filesystem::path& path, const std::string& content);

std::string read_text(const std::filesystem::path& path);

}  // namespace rmdp
