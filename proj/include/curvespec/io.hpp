#pragma once

// JSON and CSV encodings of the public data types.

#include <string>

#include <json.hpp>

#include "curvespec/calculus.hpp"
#include "curvespec/compact.hpp"
#include "curvespec/selection.hpp"
#include "curvespec/spectral.hpp"

namespace curvespec {

using Json = nlohmann::ordered_json;

// {"n": n, "re": [[...]], "im": [[...]]}; "im" may be omitted for real input.
Matrix matrix_from_json(const Json& j);
Json matrix_to_json(const Matrix& m);
Matrix read_matrix_file(const std::string& path);

Json to_json(const GridSet2D& set);   // {"depth": d, "cells": [[col,row],...]}
Json to_json(const GridSet1D& set);   // {"depth": d, "intervals": [j,...]}
GridSet2D grid2d_from_json(const Json& j);
GridSet1D grid1d_from_json(const Json& j);

// {"depth": d, "entries": [{"cell":[c,r], "t_num": j, "t_den": 9^d}, ...]}
Json to_json(const SelectionTable& ts);
// Rebuilds the table from the cells and checks every stored ψ value against it.
SelectionTable selection_from_json(const Json& j);

Json to_json(const AffineFrame& frame);
Json complex_to_json(Complex z);

Json model_to_json(const SpectralModel& model);
Json to_json(const DiagonalSplit& split, bool include_matrices = false);
Json telescoping_to_json(const std::vector<TelescopingCheck>& checks);
Json spectra_to_json(const std::vector<TruncatedSpectrum>& spectra);

// Pieces of the pipeline output files (without the config block).
Json assembly_model_json(const AssemblyReport& rep);
Json assembly_decomposition_json(const AssemblyReport& rep);
std::string traces_csv(const AssemblyReport& rep);

// %.17g
std::string format_double(double x);

void write_text_file(const std::string& path, const std::string& text);

}  // namespace curvespec
