#include "fpdtl/io.hpp"

#include <fstream>

#include "fpdtl/error.hpp"

namespace fpdtl::io {

namespace {

Json header(const StateActionSpace& sp) {
  return Json{{"n_states", sp.n_states}, {"n_actions", sp.n_actions}};
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw ConfigError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

void check_header(const Json& j, const StateActionSpace& sp) {
  if (j.contains("n_states") && j.at("n_states").get<std::size_t>() != sp.n_states) {
    throw ConfigError("header n_states disagrees with the array shape");
  }
  if (j.contains("n_actions") && j.at("n_actions").get<std::size_t>() != sp.n_actions) {
    throw ConfigError("header n_actions disagrees with the array shape");
  }
}

std::vector<std::vector<double>> rule_rows(const DecisionRule& r) {
  std::vector<std::vector<double>> rows;
  for (std::size_t s = 0; s < r.space().n_states; ++s) {
    const auto row = r.row(s);
    rows.emplace_back(row.begin(), row.end());
  }
  return rows;
}

std::vector<std::vector<std::vector<double>>> transition_rows(const TransitionModel& m) {
  const auto& sp = m.space();
  std::vector<std::vector<std::vector<double>>> out(sp.n_states);
  for (std::size_t s = 0; s < sp.n_states; ++s) {
    for (std::size_t a = 0; a < sp.n_actions; ++a) {
      const auto row = m.row(s, a);
      out[s].emplace_back(row.begin(), row.end());
    }
  }
  return out;
}

template <typename F>
auto wrap(F&& f) {
  try {
    return f();
  } catch (const Json::exception& e) {
    throw ConfigError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

Json to_json(const TransitionModel& m) {
  Json j = header(m.space());
  j["transition"] = transition_rows(m);
  return j;
}

Json to_json(const DecisionRule& r) {
  Json j = header(r.space());
  j["rule"] = rule_rows(r);
  return j;
}

Json to_json(const IdealClosedLoopModel& ideal) {
  Json j = header(ideal.space());
  j["ideal_transition"] = transition_rows(ideal.transition());
  j["ideal_rule"] = rule_rows(ideal.rule());
  return j;
}

Json to_json(const Policy& p) {
  Json j = header(p.space());
  j["horizon"] = p.horizon();
  Json rules = Json::array();
  for (const auto& r : p.rules()) rules.push_back(rule_rows(r));
  j["rules"] = std::move(rules);
  return j;
}

Json to_json(const ClosedLoopRecord& rec) {
  Json j = header(rec.space());
  j["initial_state"] = rec.initial_state();
  Json steps = Json::array();
  for (const Step& st : rec.steps()) steps.push_back({st.action, st.next_state});
  j["steps"] = std::move(steps);
  return j;
}

TransitionModel transition_from_json(const Json& j) {
  return wrap([&] {
    auto m = TransitionModel::from_nested(
        field(j, "transition").get<std::vector<std::vector<std::vector<double>>>>());
    check_header(j, m.space());
    return m;
  });
}

DecisionRule rule_from_json(const Json& j) {
  return wrap([&] {
    auto r = DecisionRule::from_nested(field(j, "rule").get<std::vector<std::vector<double>>>());
    check_header(j, r.space());
    return r;
  });
}

IdealClosedLoopModel ideal_from_json(const Json& j) {
  return wrap([&] {
    auto t = TransitionModel::from_nested(
        field(j, "ideal_transition").get<std::vector<std::vector<std::vector<double>>>>());
    auto r =
        DecisionRule::from_nested(field(j, "ideal_rule").get<std::vector<std::vector<double>>>());
    IdealClosedLoopModel ideal(std::move(t), std::move(r));
    check_header(j, ideal.space());
    return ideal;
  });
}

Policy policy_from_json(const Json& j) {
  return wrap([&] {
    std::vector<DecisionRule> rules;
    for (const auto& r : field(j, "rules")) {
      rules.push_back(DecisionRule::from_nested(r.get<std::vector<std::vector<double>>>()));
    }
    Policy p(std::move(rules));
    check_header(j, p.space());
    if (j.contains("horizon") && j.at("horizon").get<std::size_t>() != p.horizon()) {
      throw ConfigError("horizon field disagrees with the number of rules");
    }
    return p;
  });
}

ClosedLoopRecord record_from_json(const Json& j) {
  return wrap([&] {
    const StateActionSpace sp(field(j, "n_states").get<std::size_t>(),
                              field(j, "n_actions").get<std::size_t>());
    std::vector<Step> steps;
    for (const auto& st : field(j, "steps")) {
      if (!st.is_array() || st.size() != 2) throw ConfigError("each step must be [action, state]");
      steps.push_back({st[0].get<std::size_t>(), st[1].get<std::size_t>()});
    }
    return ClosedLoopRecord(sp, field(j, "initial_state").get<std::size_t>(), std::move(steps));
  });
}

Json read_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace fpdtl::io
