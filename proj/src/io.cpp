#include "spintherm/io.hpp"

#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <ostream>
#include <sstream>
#include <variant>

namespace spintherm {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::string& scope,
                std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = false;
    for (const char* key : allowed) {
      if (it.key() == key) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw InvalidInput("config: unknown key '" + scope + "." + it.key() + "'");
    }
  }
}

double get_number(const json& obj, const std::string& scope, const char* key) {
  const auto it = obj.find(key);
  if (it == obj.end()) {
    throw InvalidInput("config: missing key '" + scope + "." + key + "'");
  }
  if (!it->is_number()) {
    throw InvalidInput("config: '" + scope + "." + key + "' must be a number");
  }
  return it->get<double>();
}

double get_number_or(const json& obj, const std::string& scope, const char* key,
                     double fallback) {
  if (obj.find(key) == obj.end()) return fallback;
  return get_number(obj, scope, key);
}

}  // namespace

json config_to_json(const SystemConfig& config) {
  json j;
  j["fields"] = {{"B_L", config.fields.B_L},
                 {"B_M", config.fields.B_M},
                 {"B_R", config.fields.B_R},
                 {"theta", config.fields.theta}};
  j["coupling"] = {{"J_LM", config.coupling.J_LM},
                   {"J_MR", config.coupling.J_MR},
                   {"g", config.coupling.g}};
  j["reservoirs"] = {{"T_L", config.reservoirs.T_L},         {"T_M", config.reservoirs.T_M},
                     {"T_R", config.reservoirs.T_R},         {"kappa_L", config.reservoirs.kappa_L},
                     {"kappa_M", config.reservoirs.kappa_M}, {"kappa_R", config.reservoirs.kappa_R}};
  std::visit(
      [&](const auto& init) {
        using T = std::decay_t<decltype(init)>;
        if constexpr (std::is_same_v<T, BareIndexInitial>) {
          j["initial"] = {{"bare_index", init.index}};
        } else if constexpr (std::is_same_v<T, EigenPopulationsInitial>) {
          std::array<double, 8> pops{};
          for (int i = 0; i < 8; ++i) pops[i] = init.populations(i);
          j["initial"] = {{"eigen_populations", pops}};
        } else {
          j["initial"] = {{"subspace_fraction", init.p}};
        }
      },
      config.initial);
  json tol = {{"eps_zero", config.tolerances.eps_zero}, {"dT", config.tolerances.dT}};
  if (config.tolerances.eps_conn) tol["eps_conn"] = *config.tolerances.eps_conn;
  j["tolerances"] = tol;
  return j;
}

SystemConfig config_from_json(const json& j) {
  if (!j.is_object()) throw InvalidInput("config: root must be a JSON object");
  check_keys(j, "config", {"fields", "coupling", "reservoirs", "initial", "tolerances"});

  SystemConfig config;

  const auto fields_it = j.find("fields");
  if (fields_it == j.end()) throw InvalidInput("config: missing section 'fields'");
  check_keys(*fields_it, "fields", {"B_L", "B_M", "B_R", "theta"});
  config.fields.B_L = get_number(*fields_it, "fields", "B_L");
  config.fields.B_M = get_number(*fields_it, "fields", "B_M");
  config.fields.B_R = get_number(*fields_it, "fields", "B_R");
  config.fields.theta = get_number_or(*fields_it, "fields", "theta", 0.0);

  if (const auto it = j.find("coupling"); it != j.end()) {
    check_keys(*it, "coupling", {"J_LM", "J_MR", "g"});
    config.coupling.J_LM = get_number_or(*it, "coupling", "J_LM", 0.0);
    config.coupling.J_MR = get_number_or(*it, "coupling", "J_MR", 0.0);
    if (const auto g_it = it->find("g"); g_it != it->end()) {
      if (!g_it->is_array() || g_it->size() != 3 ||
          !std::all_of(g_it->begin(), g_it->end(),
                       [](const json& v) { return v.is_number(); })) {
        throw InvalidInput("config: 'coupling.g' must be an array of three numbers");
      }
      for (int k = 0; k < 3; ++k) config.coupling.g[k] = (*g_it)[k].get<double>();
    }
  }

  const auto res_it = j.find("reservoirs");
  if (res_it == j.end()) throw InvalidInput("config: missing section 'reservoirs'");
  check_keys(*res_it, "reservoirs", {"T_L", "T_M", "T_R", "kappa_L", "kappa_M", "kappa_R"});
  config.reservoirs.T_L = get_number(*res_it, "reservoirs", "T_L");
  config.reservoirs.T_M = get_number(*res_it, "reservoirs", "T_M");
  config.reservoirs.T_R = get_number(*res_it, "reservoirs", "T_R");
  config.reservoirs.kappa_L = get_number_or(*res_it, "reservoirs", "kappa_L", 0.0);
  config.reservoirs.kappa_M = get_number_or(*res_it, "reservoirs", "kappa_M", 0.0);
  config.reservoirs.kappa_R = get_number_or(*res_it, "reservoirs", "kappa_R", 0.0);
  for (Spin mu : kSpins) {
    if (config.reservoirs.temperature(mu) < 0.0) {
      throw InvalidInput(std::string("config: 'reservoirs.T_") + to_string(mu) +
                         "' must be non-negative");
    }
    if (config.reservoirs.kappa(mu) < 0.0) {
      throw InvalidInput(std::string("config: 'reservoirs.kappa_") + to_string(mu) +
                         "' must be non-negative");
    }
  }
  if (!(config.reservoirs.max_kappa() > 0.0)) {
    throw InvalidInput("config: at least one reservoir coupling kappa must be positive");
  }

  if (const auto it = j.find("initial"); it != j.end()) {
    check_keys(*it, "initial", {"bare_index", "eigen_populations", "subspace_fraction"});
    if (it->size() != 1) {
      throw InvalidInput("config: 'initial' must contain exactly one state form");
    }
    if (const auto b = it->find("bare_index"); b != it->end()) {
      if (!b->is_number_integer()) {
        throw InvalidInput("config: 'initial.bare_index' must be an integer");
      }
      const int index = b->get<int>();
      if (index < 0 || index > 7) {
        throw InvalidInput("config: 'initial.bare_index' must lie in 0..7");
      }
      config.initial = BareIndexInitial{index};
    } else if (const auto e = it->find("eigen_populations"); e != it->end()) {
      if (!e->is_array() || e->size() != 8 ||
          !std::all_of(e->begin(), e->end(), [](const json& v) { return v.is_number(); })) {
        throw InvalidInput("config: 'initial.eigen_populations' must be an array of eight numbers");
      }
      EigenPopulationsInitial pops;
      for (int k = 0; k < 8; ++k) pops.populations(k) = (*e)[k].get<double>();
      config.initial = pops;
    } else {
      const double p = get_number(*it, "initial", "subspace_fraction");
      if (!(p >= 0.0 && p <= 1.0)) {
        throw InvalidInput("config: 'initial.subspace_fraction' must lie in [0, 1]");
      }
      config.initial = SubspaceFractionInitial{p};
    }
  }

  if (const auto it = j.find("tolerances"); it != j.end()) {
    check_keys(*it, "tolerances", {"eps_zero", "eps_conn", "dT"});
    config.tolerances.eps_zero =
        get_number_or(*it, "tolerances", "eps_zero", config.tolerances.eps_zero);
    config.tolerances.dT = get_number_or(*it, "tolerances", "dT", config.tolerances.dT);
    if (it->find("eps_conn") != it->end()) {
      config.tolerances.eps_conn = get_number(*it, "tolerances", "eps_conn");
    }
    if (!(config.tolerances.eps_zero > 0.0) || !(config.tolerances.dT > 0.0) ||
        (config.tolerances.eps_conn && !(*config.tolerances.eps_conn > 0.0))) {
      throw InvalidInput("config: tolerances must be positive");
    }
  }

  return config;
}

SystemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& err) {
    throw InvalidInput("config parse error in '" + path + "': " + err.what());
  }
  return config_from_json(j);
}

void write_config(const std::string& path, const SystemConfig& config) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot open '" + path + "' for writing");
  out << config_to_json(config).dump(2) << '\n';
}

std::string format_g17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "sweep_value,Q_L,Q_M,Q_R,components,flag\n";
  for (const SweepRow& row : rows) {
    os << format_g17(row.value) << ',' << format_g17(row.currents.Q_L) << ','
       << format_g17(row.currents.Q_M) << ',' << format_g17(row.currents.Q_R) << ','
       << row.components << ',' << row.flag << '\n';
  }
}

void write_plot_script(std::ostream& os, const std::string& csv_path,
                       const std::string& xlabel) {
  os << "set datafile separator ','\n"
     << "set xlabel '" << xlabel << "'\n"
     << "set ylabel 'heat current'\n"
     << "set grid\n"
     << "plot '" << csv_path << "' using 1:2 with lines title 'Q_L', \\\n"
     << "     '" << csv_path << "' using 1:3 with lines title 'Q_M', \\\n"
     << "     '" << csv_path << "' using 1:4 with lines title 'Q_R'\n";
}

}  // namespace spintherm
