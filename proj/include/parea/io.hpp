#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "parea/functional.hpp"
#include "parea/grid.hpp"
#include "parea/heisenberg.hpp"
#include "parea/measure.hpp"
#include "parea/solver.hpp"

namespace parea {

using Json = nlohmann::ordered_json;

// Malformed configuration or input file (CLI exit code 2).
class SchemaError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// %.17g for every float; non-finite numbers become null.
std::string format_double(double v);
std::string dump_json(const Json& j);
void write_text(const std::filesystem::path& p, const std::string& text);
Json read_json_file(const std::filesystem::path& p);

Json measure_to_json(const VectorMeasure& m);
VectorMeasure measure_from_json(const Json& j);

// Nodal CSV `i,j,x,y,value`, rows ordered by j then i.
std::string scalar_csv(const ScalarField& f);
// Cell CSV `i,j,x,y,v1,v2` at cell centres.
std::string vector_csv(const VectorField& f);
// Cell CSV `i,j,x,y,value,valid`.
std::string cell_csv(const CellField& f);

// Without a domain the grid is inferred from the coordinates.
ScalarField read_scalar_csv(const std::filesystem::path& p, const std::optional<GridDomain>& dom = std::nullopt,
                            int quadrature_order = 4);
VectorField read_vector_csv(const std::filesystem::path& p, const GridDomain& dom);

// Config sections. Relative paths resolve against `base`.
void require_keys(const Json& j, std::initializer_list<const char*> allowed, const std::string& where);
GridDomain parse_domain(const Json& j);
EnergySpec parse_spec(const Json& j, const GridDomain& dom, const std::filesystem::path& base);
SolverConfig parse_solver(const Json& j);
// {"expression": "..."} or {"csv": "path"}.
ScalarField parse_field(const Json& j, const GridDomain& dom, const std::filesystem::path& base);

Json solver_config_json(const SolverConfig& cfg);
Json domain_json(const GridDomain& dom);

}  // namespace parea
