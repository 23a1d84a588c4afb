#include "rectfree/io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"
#include "rectfree/error.hpp"

namespace rectfree {

namespace {

using nlohmann::json;

struct Parts {
  std::vector<Atom> atoms;
  std::vector<double> grid;
  std::vector<double> density;
};

Parts parse(const std::string& text) {
  Parts p;
  try {
    json j = json::parse(text);
    if (!j.is_object()) throw ValidationError("measure JSON must be an object");
    if (j.contains("atoms"))
      for (const auto& a : j.at("atoms")) {
        if (!a.is_array() || a.size() != 2) throw ValidationError("atoms must be [x, mass] pairs");
        p.atoms.push_back({a[0].get<double>(), a[1].get<double>()});
      }
    if (j.contains("grid")) p.grid = j.at("grid").get<std::vector<double>>();
    if (j.contains("density")) p.density = j.at("density").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ValidationError(std::string("malformed measure JSON: ") + e.what());
  }
  return p;
}

json atoms_array(const std::vector<Atom>& atoms) {
  json a = json::array();
  for (const Atom& at : atoms) a.push_back({at.x, at.mass});
  return a;
}

std::string csv(const std::vector<double>& x, const std::vector<double>& f) {
  std::ostringstream out;
  out.precision(17);
  out << "x,density\n";
  for (std::size_t i = 0; i < x.size(); ++i) out << x[i] << ',' << f[i] << '\n';
  return out.str();
}

}  // namespace

std::string measure_json(const GriddedMeasure& mu) {
  nlohmann::ordered_json j;
  j["atoms"] = atoms_array(mu.atoms());
  j["grid"] = mu.grid();
  j["density"] = mu.density();
  return j.dump() + "\n";
}

SymmetricMeasure symmetric_measure_from_json(const std::string& text) {
  Parts p = parse(text);
  return SymmetricMeasure(std::move(p.atoms), std::move(p.grid), std::move(p.density));
}

LevyMeasure levy_measure_from_json(const std::string& text) {
  Parts p = parse(text);
  return LevyMeasure(std::move(p.atoms), std::move(p.grid), std::move(p.density));
}

std::string density_csv(const GriddedMeasure& mu) { return csv(mu.grid(), mu.density()); }

std::string density_csv(const HalfLineMeasure& rho) { return csv(rho.grid(), rho.density()); }

std::string atoms_json(const GriddedMeasure& mu) {
  return json{{"atoms", atoms_array(mu.atoms())}}.dump() + "\n";
}

std::string atoms_json(const HalfLineMeasure& rho) {
  return json{{"atoms", atoms_array(rho.atoms())}}.dump() + "\n";
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open " + path);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ValidationError("cannot write " + path);
  out << contents;
  if (!out) throw ValidationError("write failed: " + path);
}

}  // namespace rectfree
