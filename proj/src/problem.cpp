#include "castro/problem.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "castro/error.hpp"
#include "csv.hpp"

namespace castro {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr int kMaxDecimals = 12;
constexpr std::size_t kMaxSubproblemDimension = 4;

ComponentBounds parse_bounds_entry(const json& j, std::string_view where) {
  if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object with name, lower, upper");
  ComponentBounds b;
  b.name = j.at("name").get<std::string>();
  b.lower = j.value("lower", 0.0);
  b.upper = j.value("upper", 1.0);
  if (b.name.empty()) throw ConfigError(std::string(where) + ": component name must not be empty");
  return b;
}

ordered_json bounds_json(const ComponentBounds& b) {
  return ordered_json{{"name", b.name}, {"lower", b.lower}, {"upper", b.upper}};
}

std::size_t lookup(const std::vector<std::string>& names, const std::string& name, std::string_view what) {
  const auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) throw ConfigError(std::string(what) + ": unknown name '" + name + "'");
  return static_cast<std::size_t>(it - names.begin());
}

void check_feasible(std::span<const ComponentBounds> bounds, std::string_view label) {
  if (!mixture_feasible(bounds)) {
    std::ostringstream msg;
    msg << label << ": mixture constraint infeasible (sum of lowers " << sum_of_lowers(bounds)
        << ", sum of uppers " << sum_of_uppers(bounds) << "; need lowers <= 1 <= uppers)";
    throw InfeasibleError(msg.str());
  }
}

using detail::split_csv_line;
using detail::trim;

}  // namespace

bool SynthesisConstraint::pair_allowed(std::size_t a, std::size_t b) const {
  if (mode == Mode::OneHot) return false;
  const std::pair<std::size_t, std::size_t> key(std::min(a, b), std::max(a, b));
  return std::find(allowed_pairs.begin(), allowed_pairs.end(), key) != allowed_pairs.end();
}

bool SynthesisConstraint::single_allowed(std::size_t a) const {
  if (mode == Mode::OneHot) return true;
  return std::binary_search(allowed_singles.begin(), allowed_singles.end(), a);
}

std::optional<std::size_t> ProblemSpec::component_index(std::string_view name) const {
  for (std::size_t i = 0; i < components.size(); ++i) {
    if (components[i].name == name) return i;
  }
  return std::nullopt;
}

std::vector<std::string> ProblemSpec::component_names() const {
  std::vector<std::string> names;
  names.reserve(components.size());
  for (const auto& c : components) names.push_back(c.name);
  return names;
}

std::vector<SubproblemSpec> effective_subproblems(const ProblemSpec& spec) {
  if (!spec.partition.empty()) return spec.partition;
  SubproblemSpec main;
  main.kind = SubproblemSpec::Kind::Main;
  main.name = "main";
  main.member_indices.resize(spec.components.size());
  for (std::size_t i = 0; i < spec.components.size(); ++i) main.member_indices[i] = i;
  return {main};
}

std::size_t main_subproblem_index(const std::vector<SubproblemSpec>& subs) {
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i].kind == SubproblemSpec::Kind::Main) return i;
  }
  throw ConfigError("partition has no main subproblem");
}

std::vector<ComponentBounds> subproblem_bounds(const ProblemSpec& spec, const SubproblemSpec& sub) {
  std::vector<ComponentBounds> out;
  out.reserve(sub.dimension());
  for (std::size_t idx : sub.member_indices) out.push_back(spec.components.at(idx));
  out.insert(out.end(), sub.aggregates.begin(), sub.aggregates.end());
  return out;
}

std::vector<ComponentBounds> full_bounds(const ProblemSpec& spec) {
  std::vector<ComponentBounds> out = spec.components;
  if (spec.partition.empty()) return out;
  const auto& subs = spec.partition;
  const auto& main = subs[main_subproblem_index(subs)];
  for (const auto& sub : subs) {
    if (sub.kind != SubproblemSpec::Kind::Group || !sub.aggregate_slot) continue;
    const ComponentBounds& agg = main.aggregates.at(*sub.aggregate_slot - main.member_indices.size());
    for (std::size_t idx : sub.member_indices) {
      out[idx].lower = agg.lower * spec.components[idx].lower;
      out[idx].upper = agg.upper * spec.components[idx].upper;
    }
  }
  return out;
}

void validate_problem(const ProblemSpec& spec) {
  if (spec.components.empty()) throw ConfigError("config: 'components' must not be empty");
  std::set<std::string> names;
  for (const auto& c : spec.components) {
    validate_bounds(c);
    if (!names.insert(c.name).second) throw ConfigError("config: duplicate component name '" + c.name + "'");
  }
  if (spec.budget == 0) throw ConfigError("config: 'budget' must be positive");
  if (spec.rounding_decimals < 0 || spec.rounding_decimals > kMaxDecimals) {
    throw ConfigError("config: 'rounding_decimals' must lie in [0, 12]");
  }
  const auto& s = spec.sampler;
  if (s.tot_samp == 0) throw ConfigError("config: sampler.tot_samp must be positive");
  if (s.max_iter_dim2 == 0 || s.max_iter_dim3 == 0) throw ConfigError("config: iteration caps must be positive");
  if (s.oversample < 2) throw ConfigError("config: sampler.oversample must be at least 2");
  if (s.pool_size == 0) throw ConfigError("config: sampler.pool_size must be positive");
  if (s.min_mutual && !(*s.min_mutual >= 0.0)) throw ConfigError("config: sampler.min_mutual must be >= 0");

  if (spec.partition.empty()) {
    if (spec.components.size() > kMaxSubproblemDimension) {
      throw ConfigError("config: " + std::to_string(spec.components.size()) +
                        " components exceed the 4 a single problem supports; define a 'partition'");
    }
    check_feasible(spec.components, "problem");
    return;
  }

  std::size_t mains = 0;
  std::vector<int> owner(spec.components.size(), -1);
  for (std::size_t p = 0; p < spec.partition.size(); ++p) {
    const auto& sub = spec.partition[p];
    const std::string label = "partition '" + sub.name + "'";
    if (sub.kind == SubproblemSpec::Kind::Main) ++mains;
    if (sub.dimension() == 0) throw ConfigError(label + ": no members");
    if (sub.dimension() > kMaxSubproblemDimension) throw ConfigError(label + ": dimension exceeds 4");
    for (std::size_t idx : sub.member_indices) {
      if (idx >= spec.components.size()) throw ConfigError(label + ": member index out of range");
      if (owner[idx] >= 0) {
        throw ConfigError(label + ": component '" + spec.components[idx].name +
                          "' already belongs to another subproblem");
      }
      owner[idx] = static_cast<int>(p);
    }
    if (sub.kind == SubproblemSpec::Kind::Group) {
      if (!sub.aggregates.empty()) throw ConfigError(label + ": only the main subproblem declares aggregates");
      if (!sub.aggregate_slot) throw ConfigError(label + ": group needs an aggregate_slot");
    } else if (sub.synthesis) {
      throw ConfigError(label + ": synthesis constraints apply to groups only");
    }
    for (const auto& agg : sub.aggregates) {
      validate_bounds(agg);
      if (names.count(agg.name)) throw ConfigError(label + ": aggregate '" + agg.name + "' clashes with a component");
    }
    if (sub.synthesis) {
      const auto& syn = *sub.synthesis;
      const std::size_t m = sub.member_indices.size();
      for (const auto& [a, b] : syn.allowed_pairs) {
        if (a >= m || b >= m || a == b) throw ConfigError(label + ": invalid allowed pair");
      }
      for (std::size_t a : syn.allowed_singles) {
        if (a >= m) throw ConfigError(label + ": invalid allowed single");
      }
    }
  }
  if (mains != 1) throw ConfigError("partition: exactly one subproblem must have kind 'main'");
  for (std::size_t i = 0; i < owner.size(); ++i) {
    if (owner[i] < 0) throw ConfigError("partition: component '" + spec.components[i].name + "' is not assigned");
  }

  const auto& main = spec.partition[main_subproblem_index(spec.partition)];
  std::vector<int> slot_owner(main.aggregates.size(), -1);
  for (std::size_t p = 0; p < spec.partition.size(); ++p) {
    const auto& sub = spec.partition[p];
    if (sub.kind != SubproblemSpec::Kind::Group) continue;
    const std::size_t slot = *sub.aggregate_slot;
    if (slot < main.member_indices.size() || slot >= main.dimension()) {
      throw ConfigError("partition '" + sub.name + "': aggregate_slot does not name a main-problem aggregate");
    }
    int& o = slot_owner[slot - main.member_indices.size()];
    if (o >= 0) throw ConfigError("partition '" + sub.name + "': aggregate slot shared by two groups");
    o = static_cast<int>(p);
  }
  for (std::size_t a = 0; a < slot_owner.size(); ++a) {
    if (slot_owner[a] < 0) throw ConfigError("partition: aggregate '" + main.aggregates[a].name + "' has no group");
  }

  for (const auto& sub : spec.partition) {
    check_feasible(subproblem_bounds(spec, sub), "partition '" + sub.name + "'");
  }
}

ProblemSpec parse_problem_config(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  ProblemSpec spec;
  try {
    if (!doc.is_object()) throw ConfigError("config: top level must be an object");
    const auto& comps = doc.at("components");
    if (!comps.is_array()) throw ConfigError("config: 'components' must be an array");
    for (std::size_t i = 0; i < comps.size(); ++i) {
      spec.components.push_back(parse_bounds_entry(comps[i], "components[" + std::to_string(i) + "]"));
    }
    const auto names = spec.component_names();

    spec.budget = doc.value("budget", spec.budget);
    spec.rounding_decimals = doc.value("rounding_decimals", spec.rounding_decimals);

    if (doc.contains("sampler")) {
      const auto& s = doc.at("sampler");
      auto& out = spec.sampler;
      out.tot_samp = s.value("tot_samp", out.tot_samp);
      if (s.contains("max_rej") && !s.at("max_rej").is_null()) out.max_rej = s.at("max_rej").get<std::size_t>();
      out.max_iter_dim2 = s.value("max_iter_dim2", out.max_iter_dim2);
      out.max_iter_dim3 = s.value("max_iter_dim3", out.max_iter_dim3);
      out.oversample = s.value("oversample", out.oversample);
      out.pool_size = s.value("pool_size", out.pool_size);
      out.all_select = s.value("all_select", out.all_select);
      out.num_select = s.value("num_select", out.num_select);
      if (s.contains("min_mutual") && !s.at("min_mutual").is_null()) {
        out.min_mutual = s.at("min_mutual").get<double>();
      }
      out.seed = s.value("seed", out.seed);
    }

    if (doc.contains("partition")) {
      const auto& parts = doc.at("partition");
      if (!parts.is_array()) throw ConfigError("config: 'partition' must be an array");
      // Aggregate names resolve against the main entry, which may come later.
      std::vector<std::string> aggregate_names;
      std::size_t main_members = 0;
      for (const auto& p : parts) {
        if (p.value("kind", std::string("group")) == "main") {
          main_members = p.at("members").size();
          for (const auto& a : p.value("aggregates", json::array())) {
            aggregate_names.push_back(a.at("name").get<std::string>());
          }
        }
      }
      for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const auto& p = parts[pi];
        SubproblemSpec sub;
        const std::string kind = p.value("kind", std::string("group"));
        if (kind == "main") {
          sub.kind = SubproblemSpec::Kind::Main;
        } else if (kind == "group") {
          sub.kind = SubproblemSpec::Kind::Group;
        } else {
          throw ConfigError("partition[" + std::to_string(pi) + "]: kind must be 'main' or 'group'");
        }
        sub.name = p.value("name", kind == "main" ? std::string("main") : "group" + std::to_string(pi));
        const std::string label = "partition '" + sub.name + "'";
        std::vector<std::string> member_names;
        for (const auto& m : p.at("members")) {
          member_names.push_back(m.get<std::string>());
          sub.member_indices.push_back(lookup(names, member_names.back(), label));
        }
        for (const auto& a : p.value("aggregates", json::array())) {
          sub.aggregates.push_back(parse_bounds_entry(a, label + " aggregate"));
        }
        if (p.contains("aggregate_slot")) {
          sub.aggregate_slot = main_members + lookup(aggregate_names, p.at("aggregate_slot").get<std::string>(),
                                                     label + " aggregate_slot");
        }
        if (p.contains("tot_samp") && !p.at("tot_samp").is_null()) sub.tot_samp = p.at("tot_samp").get<std::size_t>();
        if (p.contains("synthesis") && !p.at("synthesis").is_null()) {
          const auto& sj = p.at("synthesis");
          SynthesisConstraint syn;
          const std::string mode = sj.at("mode").get<std::string>();
          if (mode == "one_hot") {
            syn.mode = SynthesisConstraint::Mode::OneHot;
          } else if (mode == "pairs") {
            syn.mode = SynthesisConstraint::Mode::Pairs;
            for (const auto& pr : sj.value("allowed_pairs", json::array())) {
              if (!pr.is_array() || pr.size() != 2) throw ConfigError(label + ": allowed_pairs entries need two names");
              const std::size_t a = lookup(member_names, pr[0].get<std::string>(), label + " allowed_pairs");
              const std::size_t b = lookup(member_names, pr[1].get<std::string>(), label + " allowed_pairs");
              syn.allowed_pairs.emplace_back(std::min(a, b), std::max(a, b));
            }
            for (const auto& sname : sj.value("allowed_singles", json::array())) {
              syn.allowed_singles.push_back(lookup(member_names, sname.get<std::string>(), label + " allowed_singles"));
            }
            std::sort(syn.allowed_pairs.begin(), syn.allowed_pairs.end());
            syn.allowed_pairs.erase(std::unique(syn.allowed_pairs.begin(), syn.allowed_pairs.end()),
                                    syn.allowed_pairs.end());
            std::sort(syn.allowed_singles.begin(), syn.allowed_singles.end());
            syn.allowed_singles.erase(std::unique(syn.allowed_singles.begin(), syn.allowed_singles.end()),
                                      syn.allowed_singles.end());
          } else {
            throw ConfigError(label + ": synthesis mode must be 'pairs' or 'one_hot'");
          }
          sub.synthesis = syn;
        }
        spec.partition.push_back(std::move(sub));
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  validate_problem(spec);
  return spec;
}

std::string serialize_problem_config(const ProblemSpec& spec) {
  ordered_json doc;
  doc["components"] = ordered_json::array();
  for (const auto& c : spec.components) doc["components"].push_back(bounds_json(c));

  if (!spec.partition.empty()) {
    const auto& main = spec.partition[main_subproblem_index(spec.partition)];
    auto& parts = doc["partition"] = ordered_json::array();
    for (const auto& sub : spec.partition) {
      ordered_json p;
      p["kind"] = sub.kind == SubproblemSpec::Kind::Main ? "main" : "group";
      p["name"] = sub.name;
      std::vector<std::string> member_names;
      for (std::size_t idx : sub.member_indices) member_names.push_back(spec.components[idx].name);
      p["members"] = member_names;
      if (!sub.aggregates.empty()) {
        p["aggregates"] = ordered_json::array();
        for (const auto& a : sub.aggregates) p["aggregates"].push_back(bounds_json(a));
      }
      if (sub.aggregate_slot) {
        p["aggregate_slot"] = main.aggregates.at(*sub.aggregate_slot - main.member_indices.size()).name;
      }
      if (sub.tot_samp) p["tot_samp"] = *sub.tot_samp;
      if (sub.synthesis) {
        ordered_json sj;
        if (sub.synthesis->mode == SynthesisConstraint::Mode::OneHot) {
          sj["mode"] = "one_hot";
        } else {
          sj["mode"] = "pairs";
          sj["allowed_pairs"] = ordered_json::array();
          for (const auto& [a, b] : sub.synthesis->allowed_pairs) {
            sj["allowed_pairs"].push_back({member_names[a], member_names[b]});
          }
          sj["allowed_singles"] = ordered_json::array();
          for (std::size_t a : sub.synthesis->allowed_singles) sj["allowed_singles"].push_back(member_names[a]);
        }
        p["synthesis"] = sj;
      }
      parts.push_back(p);
    }
  }

  doc["budget"] = spec.budget;
  doc["rounding_decimals"] = spec.rounding_decimals;
  const auto& s = spec.sampler;
  ordered_json sj;
  sj["tot_samp"] = s.tot_samp;
  sj["max_rej"] = s.max_rej ? ordered_json(*s.max_rej) : ordered_json(nullptr);
  sj["max_iter_dim2"] = s.max_iter_dim2;
  sj["max_iter_dim3"] = s.max_iter_dim3;
  sj["oversample"] = s.oversample;
  sj["pool_size"] = s.pool_size;
  sj["all_select"] = s.all_select;
  sj["num_select"] = s.num_select;
  sj["min_mutual"] = s.min_mutual ? ordered_json(*s.min_mutual) : ordered_json(nullptr);
  sj["seed"] = s.seed;
  doc["sampler"] = sj;
  return doc.dump(2) + "\n";
}

ProblemSpec load_problem_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_problem_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  } catch (const InfeasibleError& e) {
    throw InfeasibleError(path + ": " + e.what());
  }
}

ExperimentDataset empty_dataset(const ProblemSpec& spec) {
  ExperimentDataset data;
  data.rows = SampleMatrix(0, static_cast<Eigen::Index>(spec.dimension()));
  data.columns = spec.component_names();
  return data;
}

ExperimentDataset parse_experiment_csv(std::string_view text, const ProblemSpec& spec, const LoadOptions& options,
                                       std::string_view source) {
  const std::string where(source);
  if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);

  const auto lines = detail::split_lines(text);

  std::size_t line_no = 0;
  while (line_no < lines.size() && trim(lines[line_no]).empty()) ++line_no;
  if (line_no == lines.size()) throw DataError(where + ": missing header row");

  const auto header = split_csv_line(lines[line_no]);
  const std::size_t d = spec.dimension();
  std::vector<std::size_t> column_of(d);
  for (std::size_t c = 0; c < d; ++c) {
    const auto it = std::find(header.begin(), header.end(), spec.components[c].name);
    if (it == header.end()) {
      throw DataError(where + ":" + std::to_string(line_no + 1) + ": missing column '" + spec.components[c].name + "'");
    }
    column_of[c] = static_cast<std::size_t>(it - header.begin());
  }

  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  for (std::size_t ln = line_no + 1; ln < lines.size(); ++ln) {
    if (trim(lines[ln]).empty()) continue;
    const auto cells = split_csv_line(lines[ln]);
    if (cells.size() != header.size()) {
      throw DataError(where + ":" + std::to_string(ln + 1) + ": expected " + std::to_string(header.size()) +
                      " cells, found " + std::to_string(cells.size()));
    }
    std::vector<double> row(d);
    for (std::size_t c = 0; c < d; ++c) {
      const std::string_view cell = cells[column_of[c]];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
      if (ec != std::errc() || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
        throw DataError(where + ":" + std::to_string(ln + 1) + ": non-numeric value '" + std::string(cell) +
                        "' in column '" + spec.components[c].name + "'");
      }
      row[c] = v;
    }
    rows.push_back(std::move(row));
    row_lines.push_back(ln + 1);
  }

  ExperimentDataset data;
  data.columns = spec.component_names();
  data.rows = SampleMatrix(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
  std::ostringstream violations;
  std::size_t violation_count = 0;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    double s = 0.0;
    for (double v : rows[r]) s += v;
    if (std::abs(s - 1.0) > options.sum_tolerance) {
      if (!options.lenient || s <= 0.0) {
        ++violation_count;
        violations << "\n  line " << row_lines[r] << ": row sums to " << s;
        continue;
      }
      for (double& v : rows[r]) v /= s;
      data.renormalized_rows.push_back(r);
    }
    for (std::size_t c = 0; c < d; ++c) data.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  }
  if (violation_count > 0) {
    throw DataError(where + ": " + std::to_string(violation_count) + " row(s) violate the sum-to-one tolerance " +
                    std::to_string(options.sum_tolerance) + violations.str());
  }

  const auto bounds = full_bounds(spec);
  for (Eigen::Index r = 0; r < data.rows.rows(); ++r) {
    for (std::size_t c = 0; c < d; ++c) {
      if (!bounds[c].contains(data.rows(r, static_cast<Eigen::Index>(c)), 1e-9)) {
        data.out_of_bounds_rows.push_back(static_cast<std::size_t>(r));
        break;
      }
    }
  }
  return data;
}

ExperimentDataset load_experiment_csv(const std::string& path, const ProblemSpec& spec, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open data file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment_csv(buf.str(), spec, options, path);
}

ExperimentDataset rescale_dataset_to_subproblem(const ExperimentDataset& data, const ProblemSpec& spec,
                                                const SubproblemSpec& sub) {
  // Column sets feeding each subproblem column: members map to themselves,
  // aggregates to every member of the group that collapses onto them.
  std::vector<std::vector<std::size_t>> sources;
  for (std::size_t idx : sub.member_indices) sources.push_back({idx});
  for (std::size_t a = 0; a < sub.aggregates.size(); ++a) {
    const std::size_t slot = sub.member_indices.size() + a;
    std::vector<std::size_t> cols;
    for (const auto& other : spec.partition) {
      if (other.kind == SubproblemSpec::Kind::Group && other.aggregate_slot == slot) cols = other.member_indices;
    }
    sources.push_back(std::move(cols));
  }
  for (const auto& cols : sources) {
    for (std::size_t c : cols) {
      if (c >= static_cast<std::size_t>(data.rows.cols())) throw DomainError("rescale: member index out of range");
    }
  }

  ExperimentDataset out;
  for (const auto& b : subproblem_bounds(spec, sub)) out.columns.push_back(b.name);
  std::vector<std::vector<double>> kept;
  for (Eigen::Index r = 0; r < data.rows.rows(); ++r) {
    std::vector<double> row(sources.size(), 0.0);
    double total = 0.0;
    for (std::size_t j = 0; j < sources.size(); ++j) {
      for (std::size_t c : sources[j]) row[j] += data.rows(r, static_cast<Eigen::Index>(c));
      total += row[j];
    }
    if (!(total > 0.0)) continue;
    for (double& v : row) v /= total;
    kept.push_back(std::move(row));
  }
  out.rows = SampleMatrix(static_cast<Eigen::Index>(kept.size()), static_cast<Eigen::Index>(sources.size()));
  for (std::size_t r = 0; r < kept.size(); ++r) {
    for (std::size_t j = 0; j < sources.size(); ++j) {
      out.rows(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)) = kept[r][j];
    }
  }
  return out;
}

}  // namespace castro
