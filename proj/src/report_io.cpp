#include "itp/report_io.hpp"

#include <cstdio>
#include <fstream>

#include "json.hpp"

namespace itp::report {

namespace {

nlohmann::json cplx_json(fnalg::Cplx v) {
  return nlohmann::json::array({v.real(), v.imag()});
}

}  // namespace

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Csv::Csv(std::vector<std::string> header) : cols_(header.size()) {
  if (header.empty()) throw InvalidArgError("CSV needs at least one column");
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void Csv::row(const std::vector<std::string>& cells) {
  if (cells.size() != cols_)
    throw InvalidArgError("CSV row width does not match the header");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) text_ += ',';
    text_ += cells[i];
  }
  text_ += '\n';
}

std::string decomposition_to_json(const bm::DecompositionReport& rep) {
  nlohmann::json j;
  j["schema"] = kSchema;
  j["kind"] = "decompose";
  j["measure"] = rep.measure_key;
  j["depth"] = rep.depth;
  j["seed"] = rep.seed;
  j["samples"] = rep.samples;
  j["levels"] = rep.levels;
  j["stages"] = {{"levels", rep.levels_pass},
                 {"tail", rep.tail_pass},
                 {"mc", rep.mc_pass},
                 {"push", rep.push_pass}};
  j["pass"] = rep.pass;
  j["error"] = rep.error;

  nlohmann::json tail = nlohmann::json::array();
  for (const auto& r : rep.tail)
    tail.push_back({{"k", r.k},
                    {"residual", r.residual},
                    {"bound", r.bound},
                    {"slack", r.slack},
                    {"pass", r.pass}});
  j["tail"] = std::move(tail);

  nlohmann::json mc = nlohmann::json::array();
  for (const auto& r : rep.mc) {
    nlohmann::json x;
    for (const auto& [slot, v] : r.x) x[std::to_string(slot)] = v;
    mc.push_back({{"x", std::move(x)},
                  {"closed", cplx_json(r.closed)},
                  {"closed_err", r.closed_err},
                  {"estimate", cplx_json(r.estimate)},
                  {"radius", r.radius},
                  {"pass", r.pass}});
  }
  j["mc"] = std::move(mc);

  nlohmann::json push = nlohmann::json::array();
  for (const auto& r : rep.push)
    push.push_back({{"elem", r.elem},
                    {"closed", cplx_json(r.closed)},
                    {"closed_err", r.closed_err},
                    {"estimate", cplx_json(r.estimate)},
                    {"radius", r.radius},
                    {"pass", r.pass}});
  j["push"] = std::move(push);

  return j.dump(2) + "\n";
}

std::string residual_plot_script(const std::string& csv_name) {
  std::string s;
  s += "set datafile separator ','\n";
  s += "set xlabel 'k'\n";
  s += "set ylabel 'tail residual'\n";
  s += "set logscale y\n";
  s += "set key left bottom\n";
  s += "plot '" + csv_name +
       "' skip 1 using 1:2 with linespoints title 'residual', \\\n";
  s += "     '" + csv_name + "' skip 1 using 1:3 with lines title 'bound'\n";
  return s;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw InvalidArgError("cannot open output file: " + path);
  out.write(content.data(),
            static_cast<std::streamsize>(content.size()));
  if (!out) throw InvalidArgError("short write to output file: " + path);
}

}  // namespace itp::report
